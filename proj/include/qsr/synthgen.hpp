#ifndef QSR_SYNTHGEN_HPP
#define QSR_SYNTHGEN_HPP

#include <array>
#include <cstdint>
#include <random>

#include "qsr/core_model.hpp"
#include "qsr/severity.hpp"

namespace qsr {

/// Generator engine for every simulation in the library: 64-bit Mersenne
/// Twister (MT19937-64, Matsumoto & Nishimura), seeded with one u64.
using Rng = std::mt19937_64;

/// Derives the seed of substream `index` from a base seed with the
/// SplitMix64 finalizer, so parallel shards stay reproducible.
std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Gamma-Poisson mixture draw: lambda ~ Gamma(r, mu / r), N ~ Poisson(lambda).
std::uint64_t sample_negbin(Rng& rng, double r, double mu);

double sample_severity(Rng& rng, const SeverityDistribution& d);

struct GenConfig {
    std::uint64_t n_policyholders = 22000;
    std::uint64_t seed = 0;
    /// Probability of each NCD level, parallel to kNcdLevels.
    std::array<double, 6> ncd_mix{};
    /// Expected claim count per policyholder at NCD 0.
    double freq_base_mean = 0.0;
    /// Change of log expected claim count per NCD decade.
    double freq_ncd_slope = 0.0;
    /// Negative-binomial dispersion of claim counts.
    double dispersion_r = 0.0;
    /// Per loss type, indexed by LossType.
    std::array<SeverityDistribution, 3> severity{};
    std::array<double, 3> type_inclusion_probs{};

    double expected_claims(int ncd_level) const;
};

/// Throws ValidationError for a malformed probability vector or
/// non-positive parameters.
void validate(const GenConfig& cfg);

/// Shipped synthetic calibration. Lognormal severities, with third party
/// injury the heaviest tail and own damage the lightest; claim frequency
/// falls with NCD. The values are synthetic, not estimates of any real book.
GenConfig default_config();

/// Deterministic for a fixed config (including seed). Policyholder ids are
/// P000001..., event ids E0000001... in generation order.
Portfolio generate_portfolio(const GenConfig& cfg);

}  // namespace qsr

#endif  // QSR_SYNTHGEN_HPP

#include "qsr/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <variant>

#include "qsr/error.hpp"

namespace qsr {

std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) noexcept {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t sample_negbin(Rng& rng, double r, double mu) {
    std::gamma_distribution<double> gamma(r, mu / r);
    const double lambda = gamma(rng);
    if (!(lambda > 0.0)) return 0;
    std::poisson_distribution<std::uint64_t> poisson(lambda);
    return poisson(rng);
}

double sample_severity(Rng& rng, const SeverityDistribution& d) {
    if (const auto* p = std::get_if<Lognormal>(&d)) {
        return std::lognormal_distribution<double>(p->mu, p->sigma)(rng);
    }
    if (const auto* p = std::get_if<Gamma>(&d)) {
        return std::gamma_distribution<double>(p->shape, p->scale)(rng);
    }
    const auto& p = std::get<Pareto>(d);
    // Inverse CDF on (0, 1].
    const double u = 1.0 - std::generate_canonical<double, 53>(rng);
    return p.scale * std::pow(u, -1.0 / p.shape);
}

double GenConfig::expected_claims(int ncd_level) const {
    return std::exp(std::log(freq_base_mean) + freq_ncd_slope * (ncd_level / 10.0));
}

void validate(const GenConfig& cfg) {
    if (cfg.n_policyholders == 0) throw ValidationError("n_policyholders must be > 0");
    double mix_sum = 0.0;
    for (double p : cfg.ncd_mix) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("ncd_mix entries must lie in [0, 1]");
        mix_sum += p;
    }
    if (std::fabs(mix_sum - 1.0) > 1e-12) throw ValidationError("ncd_mix must sum to 1");
    if (!(cfg.freq_base_mean > 0.0) || !std::isfinite(cfg.freq_base_mean)) {
        throw ValidationError("freq_base_mean must be positive");
    }
    if (!std::isfinite(cfg.freq_ncd_slope)) throw ValidationError("freq_ncd_slope must be finite");
    if (!(cfg.dispersion_r > 0.0) || !std::isfinite(cfg.dispersion_r)) {
        throw ValidationError("dispersion_r must be positive");
    }
    bool any_type = false;
    for (std::size_t t = 0; t < 3; ++t) {
        validate(cfg.severity[t]);
        const double p = cfg.type_inclusion_probs[t];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ValidationError("type_inclusion_probs entries must lie in [0, 1]");
        }
        any_type = any_type || p > 0.0;
    }
    if (!any_type) throw ValidationError("at least one type_inclusion_prob must be positive");
}

GenConfig default_config() {
    GenConfig cfg;
    cfg.n_policyholders = 22000;
    cfg.seed = 20120501;
    cfg.ncd_mix = {0.22, 0.16, 0.15, 0.14, 0.13, 0.20};
    cfg.freq_base_mean = 1.0;
    cfg.freq_ncd_slope = -0.12;
    cfg.dispersion_r = 2.0;
    cfg.severity = {
        Lognormal{3.8, 1.0},   // third party injury: heaviest tail
        Lognormal{1.5, 0.3},   // own damage
        Lognormal{4.3, 0.5},   // third party property
    };
    cfg.type_inclusion_probs = {0.60, 0.30, 0.50};
    return cfg;
}

namespace {

const char* const kVehicleTypes[] = {"SEDAN", "HATCH", "SUV", "BAKKIE", "MPV"};

std::string padded(char prefix, std::uint64_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*llu", prefix, width,
                  static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace

Portfolio generate_portfolio(const GenConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);

    std::discrete_distribution<std::size_t> ncd_pick(cfg.ncd_mix.begin(), cfg.ncd_mix.end());
    std::uniform_int_distribution<int> age_pick(18, 80);
    std::uniform_int_distribution<int> gender_pick(0, 9);
    std::uniform_int_distribution<std::size_t> vehicle_pick(0, std::size(kVehicleTypes) - 1);
    std::uniform_int_distribution<int> vehicle_age_pick(0, 20);
    std::bernoulli_distribution include[3] = {
        std::bernoulli_distribution(cfg.type_inclusion_probs[0]),
        std::bernoulli_distribution(cfg.type_inclusion_probs[1]),
        std::bernoulli_distribution(cfg.type_inclusion_probs[2]),
    };

    std::vector<PolicyHolder> holders;
    holders.reserve(cfg.n_policyholders);
    std::vector<ClaimEvent> events;
    std::uint64_t next_event = 1;

    const int id_width = cfg.n_policyholders < 1000000 ? 6 : 12;
    for (std::uint64_t i = 1; i <= cfg.n_policyholders; ++i) {
        PolicyHolder p;
        p.id = padded('P', i, id_width);
        p.age = age_pick(rng);
        const int g = gender_pick(rng);
        p.gender = g < 5 ? Gender::Male : (g < 9 ? Gender::Female : Gender::Unspecified);
        p.vehicle_type = kVehicleTypes[vehicle_pick(rng)];
        p.vehicle_age = vehicle_age_pick(rng);
        p.prior_experience =
            std::uniform_int_distribution<int>(0, p.age - kMinDriverAge)(rng);
        p.ncd_level = kNcdLevels[ncd_pick(rng)];

        const std::uint64_t claims =
            sample_negbin(rng, cfg.dispersion_r, cfg.expected_claims(p.ncd_level));
        for (std::uint64_t c = 0; c < claims; ++c) {
            ClaimEvent e;
            e.event_id = padded('E', next_event++, 8);
            e.policyholder_id = p.id;
            while (e.losses.empty()) {
                for (LossType t : kLossTypes) {
                    if (include[static_cast<std::size_t>(t)](rng)) e.losses.push_back({t, 0.0});
                }
            }
            for (auto& l : e.losses) {
                const double raw = sample_severity(rng, cfg.severity[static_cast<std::size_t>(l.type)]);
                // Whole cents, like a claims ledger.
                l.amount = std::round(raw * 100.0) / 100.0;
            }
            events.push_back(std::move(e));
        }
        holders.push_back(std::move(p));
    }
    return Portfolio(std::move(holders), std::move(events));
}

}  // namespace qsr

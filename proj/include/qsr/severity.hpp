#ifndef QSR_SEVERITY_HPP
#define QSR_SEVERITY_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qsr/empirical_sample.hpp"

namespace qsr {

// Loss-severity families. Each has exactly two parameters.

struct Lognormal {
    double mu;
    double sigma;
};

struct Gamma {
    double shape;
    double scale;
};

/// Type I Pareto with support [scale, inf).
struct Pareto {
    double scale;
    double shape;
};

using SeverityDistribution = std::variant<Lognormal, Gamma, Pareto>;

/// Declaration order doubles as the AIC tie-break order.
enum class SeverityFamily { Lognormal = 0, Gamma = 1, Pareto = 2 };

inline constexpr std::array<SeverityFamily, 3> kSeverityFamilies = {
    SeverityFamily::Lognormal, SeverityFamily::Gamma, SeverityFamily::Pareto};

std::string_view family_name(SeverityFamily f) noexcept;
std::optional<SeverityFamily> parse_family(std::string_view name) noexcept;
SeverityFamily family_of(const SeverityDistribution& d) noexcept;

/// Throws ValidationError unless every parameter is finite and positive.
void validate(const SeverityDistribution& d);

double cdf(const SeverityDistribution& d, double x);
double log_density(const SeverityDistribution& d, double x);
double mean(const SeverityDistribution& d);

/// Log-likelihood of strictly positive observations.
double log_likelihood(const SeverityDistribution& d, std::span<const double> xs);

/// Analytic gradient of log_likelihood with respect to the two parameters,
/// in declaration order of the parameter struct.
std::array<double, 2> log_likelihood_gradient(const SeverityDistribution& d,
                                              std::span<const double> xs);

struct SeverityFit {
    SeverityDistribution distribution;
    double loglik = 0.0;
    double aic = 0.0;              // 2 * 2 - 2 * loglik
    std::size_t n = 0;             // observations used (zeros excluded)
    std::size_t zeros_excluded = 0;

    SeverityFamily family() const noexcept { return family_of(distribution); }
};

inline constexpr std::size_t kMinFitSize = 3;
inline constexpr std::size_t kMinBestFitSize = 10;

/// Maximum-likelihood fit of one family to the positive part of `sample`.
/// Lognormal and Pareto are closed form (Pareto scale = sample minimum);
/// the gamma shape is found by Newton iteration. Throws ValidationError for
/// fewer than three positive values or a degenerate (constant) sample.
SeverityFit fit_severity(const EmpiricalSample& sample, SeverityFamily family);

/// Fits all families and returns the lowest AIC, ties going to the earlier
/// family. Requires at least ten values.
SeverityFit best_fit(const EmpiricalSample& sample);

/// Silverman's rule, 0.9 * min(sd, IQR / 1.34) * n^(-1/5). Falls back to sd
/// when the IQR is zero. Throws ValidationError when the result is zero.
double silverman_bandwidth(const EmpiricalSample& sample);

/// Gaussian kernel density estimate evaluated at each grid point.
std::vector<double> kde_density(const EmpiricalSample& sample, std::span<const double> grid,
                                std::optional<double> bandwidth = std::nullopt);

/// P(X <= threshold) under the fitted distribution.
double tail_loss_probability(const SeverityFit& fit, double threshold);

}  // namespace qsr

#endif  // QSR_SEVERITY_HPP

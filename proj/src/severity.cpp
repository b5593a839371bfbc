#include "qsr/severity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "qsr/error.hpp"

namespace qsr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::vector<double> logs_of(std::span<const double> xs) {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [](double x) { return std::log(x); });
    return out;
}

double sum_of(std::span<const double> xs) { return compensated_sum(xs); }

}  // namespace

std::string_view family_name(SeverityFamily f) noexcept {
    switch (f) {
        case SeverityFamily::Lognormal: return "lognormal";
        case SeverityFamily::Gamma: return "gamma";
        case SeverityFamily::Pareto: return "pareto";
    }
    return "?";
}

std::optional<SeverityFamily> parse_family(std::string_view name) noexcept {
    for (auto f : kSeverityFamilies) {
        if (name == family_name(f)) return f;
    }
    return std::nullopt;
}

SeverityFamily family_of(const SeverityDistribution& d) noexcept {
    return static_cast<SeverityFamily>(d.index());
}

void validate(const SeverityDistribution& d) {
    const bool ok = std::visit(
        overloaded{
            [](const Lognormal& p) { return std::isfinite(p.mu) && positive_finite(p.sigma); },
            [](const Gamma& p) { return positive_finite(p.shape) && positive_finite(p.scale); },
            [](const Pareto& p) { return positive_finite(p.scale) && positive_finite(p.shape); },
        },
        d);
    if (!ok) {
        throw ValidationError(std::string(family_name(family_of(d))) +
                              " parameters must be finite and positive");
    }
}

double cdf(const SeverityDistribution& d, double x) {
    if (x <= 0.0) return 0.0;
    return std::visit(
        overloaded{
            [x](const Lognormal& p) {
                return 0.5 * std::erfc(-(std::log(x) - p.mu) / (p.sigma * std::numbers::sqrt2));
            },
            [x](const Gamma& p) { return boost::math::gamma_p(p.shape, x / p.scale); },
            [x](const Pareto& p) {
                return x < p.scale ? 0.0 : -std::expm1(p.shape * std::log(p.scale / x));
            },
        },
        d);
}

double log_density(const SeverityDistribution& d, double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::visit(
        overloaded{
            [x](const Lognormal& p) {
                const double z = (std::log(x) - p.mu) / p.sigma;
                return -std::log(x * p.sigma) - 0.5 * std::log(2.0 * std::numbers::pi) -
                       0.5 * z * z;
            },
            [x](const Gamma& p) {
                return (p.shape - 1.0) * std::log(x) - x / p.scale - std::lgamma(p.shape) -
                       p.shape * std::log(p.scale);
            },
            [x](const Pareto& p) {
                if (x < p.scale) return -std::numeric_limits<double>::infinity();
                return std::log(p.shape) + p.shape * std::log(p.scale) -
                       (p.shape + 1.0) * std::log(x);
            },
        },
        d);
}

double mean(const SeverityDistribution& d) {
    return std::visit(
        overloaded{
            [](const Lognormal& p) { return std::exp(p.mu + 0.5 * p.sigma * p.sigma); },
            [](const Gamma& p) { return p.shape * p.scale; },
            [](const Pareto& p) {
                return p.shape > 1.0 ? p.shape * p.scale / (p.shape - 1.0) : std::numeric_limits<double>::infinity();
            },
        },
        d);
}

double log_likelihood(const SeverityDistribution& d, std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const auto logs = logs_of(xs);
    const double sum_log = sum_of(logs);
    return std::visit(
        overloaded{
            [&](const Lognormal& p) {
                std::vector<double> sq(logs.size());
                for (std::size_t i = 0; i < logs.size(); ++i) {
                    const double z = logs[i] - p.mu;
                    sq[i] = z * z;
                }
                return -sum_log - n * std::log(p.sigma) -
                       0.5 * n * std::log(2.0 * std::numbers::pi) -
                       sum_of(sq) / (2.0 * p.sigma * p.sigma);
            },
            [&](const Gamma& p) {
                return (p.shape - 1.0) * sum_log - sum_of(xs) / p.scale -
                       n * std::lgamma(p.shape) - n * p.shape * std::log(p.scale);
            },
            [&](const Pareto& p) {
                if (!xs.empty() && *std::min_element(xs.begin(), xs.end()) < p.scale) {
                    return -std::numeric_limits<double>::infinity();
                }
                return n * std::log(p.shape) + n * p.shape * std::log(p.scale) -
                       (p.shape + 1.0) * sum_log;
            },
        },
        d);
}

std::array<double, 2> log_likelihood_gradient(const SeverityDistribution& d,
                                              std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const auto logs = logs_of(xs);
    const double sum_log = sum_of(logs);
    return std::visit(
        overloaded{
            [&](const Lognormal& p) {
                std::vector<double> dev(logs.size());
                std::vector<double> sq(logs.size());
                for (std::size_t i = 0; i < logs.size(); ++i) {
                    dev[i] = logs[i] - p.mu;
                    sq[i] = dev[i] * dev[i];
                }
                const double s2 = p.sigma * p.sigma;
                return std::array<double, 2>{sum_of(dev) / s2,
                                             -n / p.sigma + sum_of(sq) / (s2 * p.sigma)};
            },
            [&](const Gamma& p) {
                return std::array<double, 2>{
                    sum_log - n * std::log(p.scale) - n * boost::math::digamma(p.shape),
                    sum_of(xs) / (p.scale * p.scale) - n * p.shape / p.scale};
            },
            [&](const Pareto& p) {
                // d/dscale is the boundary derivative; the MLE sits on the
                // support edge, so only the shape component is stationary.
                return std::array<double, 2>{n * p.shape / p.scale,
                                             n / p.shape + n * std::log(p.scale) - sum_log};
            },
        },
        d);
}

namespace {

SeverityDistribution fit_lognormal(std::span<const double> xs) {
    const auto logs = logs_of(xs);
    const double n = static_cast<double>(xs.size());
    const double mu = sum_of(logs) / n;
    std::vector<double> sq(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) sq[i] = (logs[i] - mu) * (logs[i] - mu);
    const double sigma = std::sqrt(sum_of(sq) / n);
    if (!(sigma > 0.0)) {
        throw ValidationError("lognormal fit is degenerate: all values identical (sigma = 0)");
    }
    return Lognormal{mu, sigma};
}

SeverityDistribution fit_gamma(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    const double m = sum_of(xs) / n;
    const auto logs = logs_of(xs);
    const double s = std::log(m) - sum_of(logs) / n;
    if (!(s > 0.0)) {
        throw ValidationError("gamma fit is degenerate: all values identical");
    }
    // Minka's closed-form start, then Newton on log k - digamma(k) = s.
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int iter = 0; iter < 100; ++iter) {
        const double f = std::log(k) - boost::math::digamma(k) - s;
        const double fp = 1.0 / k - boost::math::trigamma(k);
        double next = k - f / fp;
        if (!(next > 0.0)) next = k / 2.0;
        const double step = std::fabs(next - k);
        k = next;
        if (step <= 1e-14 * k) break;
    }
    return Gamma{k, m / k};
}

SeverityDistribution fit_pareto(std::span<const double> xs) {
    const double xm = *std::min_element(xs.begin(), xs.end());
    std::vector<double> rel(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) rel[i] = std::log(xs[i] / xm);
    const double denom = sum_of(rel);
    if (!(denom > 0.0)) {
        throw ValidationError("pareto fit is degenerate: all values identical");
    }
    return Pareto{xm, static_cast<double>(xs.size()) / denom};
}

}  // namespace

SeverityFit fit_severity(const EmpiricalSample& sample, SeverityFamily family) {
    const auto values = sample.values();
    const auto first_positive = std::upper_bound(values.begin(), values.end(), 0.0);
    const std::size_t zeros = static_cast<std::size_t>(first_positive - values.begin());
    const std::span<const double> xs(first_positive, values.end());
    if (xs.size() < kMinFitSize) {
        throw ValidationError("severity fit needs at least 3 positive values, got " +
                              std::to_string(xs.size()));
    }

    SeverityFit fit;
    switch (family) {
        case SeverityFamily::Lognormal: fit.distribution = fit_lognormal(xs); break;
        case SeverityFamily::Gamma: fit.distribution = fit_gamma(xs); break;
        case SeverityFamily::Pareto: fit.distribution = fit_pareto(xs); break;
    }
    validate(fit.distribution);
    fit.n = xs.size();
    fit.zeros_excluded = zeros;
    fit.loglik = log_likelihood(fit.distribution, xs);
    if (!std::isfinite(fit.loglik)) {
        throw ValidationError(std::string(family_name(family)) + " fit has non-finite likelihood");
    }
    fit.aic = 2.0 * 2.0 - 2.0 * fit.loglik;
    return fit;
}

SeverityFit best_fit(const EmpiricalSample& sample) {
    if (sample.size() < kMinBestFitSize) {
        throw ValidationError("best_fit needs at least 10 values, got " +
                              std::to_string(sample.size()));
    }
    std::optional<SeverityFit> best;
    std::string failures;
    for (auto family : kSeverityFamilies) {
        try {
            auto fit = fit_severity(sample, family);
            if (!best || fit.aic < best->aic) best = std::move(fit);
        } catch (const ValidationError& e) {
            failures += std::string(family_name(family)) + ": " + e.what() + "; ";
        }
    }
    if (!best) throw ValidationError("all severity fits failed: " + failures);
    return *best;
}

namespace {

// Linear-interpolation quantile on sorted data (Hyndman-Fan type 7).
double quantile7(std::span<const double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double silverman_bandwidth(const EmpiricalSample& sample) {
    if (sample.size() < 2) {
        throw ValidationError("kernel density needs at least 2 values");
    }
    const double sd = std::sqrt(sample.variance());
    const double iqr = quantile7(sample.values(), 0.75) - quantile7(sample.values(), 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    const double h = 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
    if (!(h > 0.0)) {
        throw ValidationError("kernel density bandwidth is zero (constant sample)");
    }
    return h;
}

std::vector<double> kde_density(const EmpiricalSample& sample, std::span<const double> grid,
                                std::optional<double> bandwidth) {
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(sample);
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ValidationError("kernel density bandwidth must be positive");
    }
    if (sample.size() < 2) {
        throw ValidationError("kernel density needs at least 2 values");
    }
    const auto xs = sample.values();
    const double norm = 1.0 / (static_cast<double>(xs.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    // Contributions beyond 40 bandwidths underflow to zero anyway.
    const double reach = 40.0 * h;
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double x = grid[g];
        auto lo = std::lower_bound(xs.begin(), xs.end(), x - reach);
        auto hi = std::upper_bound(lo, xs.end(), x + reach);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double z = (x - *it) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out[g] = acc * norm;
    }
    return out;
}

double tail_loss_probability(const SeverityFit& fit, double threshold) {
    if (!(threshold > 0.0)) {
        throw ValidationError("threshold must be positive");
    }
    return cdf(fit.distribution, threshold);
}

}  // namespace qsr

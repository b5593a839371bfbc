#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qsr/core_model.hpp"
#include "qsr/error.hpp"
#include "qsr/severity.hpp"
#include "qsr/synthgen.hpp"

namespace qsr {
namespace {

EmpiricalSample draws(const SeverityDistribution& d, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = sample_severity(rng, d);
    return EmpiricalSample(std::move(v));
}

TEST(FitSeverity, ConstantSampleIsDegenerate) {
    const double e = std::exp(1.0);
    for (auto f : kSeverityFamilies) {
        EXPECT_THROW(fit_severity(EmpiricalSample({e, e, e}), f), ValidationError);
    }
}

TEST(FitSeverity, TooFewPositiveValues) {
    EXPECT_THROW(fit_severity(EmpiricalSample({0, 0, 1, 2}), SeverityFamily::Lognormal),
                 ValidationError);
}

TEST(FitSeverity, LognormalClosedForm) {
    const auto fit = fit_severity(EmpiricalSample({1.0, std::exp(1.0), std::exp(2.0)}),
                                  SeverityFamily::Lognormal);
    const auto& d = std::get<Lognormal>(fit.distribution);
    EXPECT_NEAR(d.mu, 1.0, 1e-15);
    EXPECT_NEAR(d.sigma, std::sqrt(2.0 / 3.0), 1e-15);
    EXPECT_EQ(fit.n, 3u);
    EXPECT_DOUBLE_EQ(fit.aic, 4.0 - 2.0 * fit.loglik);
}

TEST(FitSeverity, ZerosExcludedAndCounted) {
    const auto fit = fit_severity(EmpiricalSample({0, 0, 1.0, std::exp(1.0), std::exp(2.0)}),
                                  SeverityFamily::Lognormal);
    EXPECT_EQ(fit.n, 3u);
    EXPECT_EQ(fit.zeros_excluded, 2u);
    EXPECT_NEAR(std::get<Lognormal>(fit.distribution).mu, 1.0, 1e-15);
}

TEST(FitSeverity, LognormalRecovery) {
    const auto fit = fit_severity(draws(Lognormal{5.0, 1.2}, 100000, 2024), SeverityFamily::Lognormal);
    const auto& d = std::get<Lognormal>(fit.distribution);
    EXPECT_NEAR(d.mu, 5.0, 0.05);
    EXPECT_NEAR(d.sigma, 1.2, 0.012);
}

TEST(FitSeverity, GammaAndParetoRecovery) {
    const auto g = fit_severity(draws(Gamma{2.5, 40.0}, 100000, 5), SeverityFamily::Gamma);
    EXPECT_NEAR(std::get<Gamma>(g.distribution).shape, 2.5, 0.05);
    EXPECT_NEAR(std::get<Gamma>(g.distribution).scale, 40.0, 1.0);

    const auto p = fit_severity(draws(Pareto{100.0, 3.0}, 100000, 6), SeverityFamily::Pareto);
    EXPECT_NEAR(std::get<Pareto>(p.distribution).shape, 3.0, 0.05);
    EXPECT_GE(std::get<Pareto>(p.distribution).scale, 100.0);
}

TEST(FitSeverity, StationaryAtReturnedParameters) {
    const auto sample = draws(Lognormal{3.0, 0.8}, 5000, 17);
    for (auto f : kSeverityFamilies) {
        const auto fit = fit_severity(sample, f);
        ASSERT_TRUE(std::isfinite(fit.loglik));
        auto g = log_likelihood_gradient(fit.distribution, sample.values());
        if (f == SeverityFamily::Pareto) g[0] = 0.0;  // scale sits on the support boundary
        EXPECT_LT(std::hypot(g[0], g[1]), 1e-6) << family_name(f);
    }
}

TEST(FitSeverity, BitDeterministic) {
    const auto sample = draws(Gamma{1.3, 10.0}, 3000, 9);
    for (auto f : kSeverityFamilies) {
        EXPECT_EQ(fit_severity(sample, f).loglik, fit_severity(sample, f).loglik);
    }
}

SeverityDistribution nudge(const SeverityDistribution& d, int which, double by) {
    if (auto* p = std::get_if<Lognormal>(&d)) {
        return which == 0 ? Lognormal{p->mu + by, p->sigma} : Lognormal{p->mu, p->sigma + by};
    }
    if (auto* p = std::get_if<Gamma>(&d)) {
        return which == 0 ? Gamma{p->shape + by, p->scale} : Gamma{p->shape, p->scale + by};
    }
    const auto& p = std::get<Pareto>(d);
    return which == 0 ? Pareto{p.scale + by, p.shape} : Pareto{p.scale, p.shape + by};
}

TEST(LogLikelihoodGradient, MatchesCentralDifferences) {
    const auto sample = draws(Lognormal{2.0, 0.6}, 400, 3);
    const auto xs = sample.values();
    const std::vector<SeverityDistribution> points{Lognormal{1.7, 0.9}, Gamma{1.8, 5.0},
                                                   Pareto{0.5, 1.4}};
    const double h = 1e-6;
    for (const auto& d : points) {
        const auto g = log_likelihood_gradient(d, xs);
        for (int i = 0; i < 2; ++i) {
            const double fd =
                (log_likelihood(nudge(d, i, h), xs) - log_likelihood(nudge(d, i, -h), xs)) / (2 * h);
            EXPECT_NEAR(g[static_cast<std::size_t>(i)], fd, 1e-4 * std::max(1.0, std::fabs(fd)));
        }
    }
}

TEST(BestFit, PicksGeneratingFamily) {
    const auto fit = best_fit(draws(Lognormal{4.0, 1.0}, 100000, 21));
    EXPECT_EQ(fit.family(), SeverityFamily::Lognormal);
}

TEST(BestFit, ReturnsMinimumAic) {
    const auto sample = draws(Gamma{2.0, 3.0}, 2000, 4);
    const auto best = best_fit(sample);
    double lowest = INFINITY;
    for (auto f : kSeverityFamilies) lowest = std::min(lowest, fit_severity(sample, f).aic);
    EXPECT_EQ(best.aic, lowest);
}

TEST(BestFit, MinimumSize) {
    EXPECT_THROW(best_fit(EmpiricalSample({1, 2, 3, 4, 5, 6, 7, 8, 9})), ValidationError);
}

TEST(Kde, ConstantSampleHasZeroBandwidth) {
    const std::vector<double> grid{1.0};
    EXPECT_THROW(kde_density(EmpiricalSample({5, 5, 5, 5}), grid), ValidationError);
}

TEST(Kde, IntegratesToOne) {
    const auto sample = draws(Lognormal{3.0, 0.5}, 2000, 12);
    const double h = silverman_bandwidth(sample);
    const double lo = sample.min() - 4 * h, hi = sample.max() + 4 * h;
    const std::size_t points = 20001;
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
    const auto f = kde_density(sample, grid);
    double integral = 0.0;
    for (std::size_t i = 1; i < points; ++i) integral += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
    EXPECT_NEAR(integral, 1.0, 1e-3);
}

TEST(Kde, SymmetricAboutMidpoint) {
    const EmpiricalSample sample({3.0, 7.0});
    for (double off : {0.0, 0.3, 1.0, 2.5, 4.0}) {
        const std::vector<double> pair{5.0 - off, 5.0 + off};
        const auto f = kde_density(sample, pair);
        EXPECT_NEAR(f[0], f[1], 1e-12);
    }
}

TEST(Kde, BoundedAndNonNegative) {
    const auto sample = draws(Gamma{0.8, 10.0}, 500, 33);
    const double h = silverman_bandwidth(sample);
    std::vector<double> grid;
    for (double x = -20; x < sample.max() + 20; x += 0.37) grid.push_back(x);
    const double bound = 1.0 / (h * std::sqrt(2 * M_PI));
    for (double v : kde_density(sample, grid)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, bound * (1 + 1e-12));
    }
}

TEST(Kde, SilvermanFallsBackToSdWhenIqrZero) {
    std::vector<double> v(20, 10.0);
    v.push_back(30.0);
    const EmpiricalSample s(v);
    const double sd = std::sqrt(s.variance());
    EXPECT_NEAR(silverman_bandwidth(s), 0.9 * sd * std::pow(21.0, -0.2), 1e-12);
}

TEST(TailProbability, MedianAndLimit) {
    SeverityFit fit;
    fit.distribution = Lognormal{2.3, 0.7};
    EXPECT_NEAR(tail_loss_probability(fit, std::exp(2.3)), 0.5, 1e-15);
    for (SeverityDistribution d : {SeverityDistribution{Lognormal{8.0, 3.0}},
                                   SeverityDistribution{Gamma{0.5, 5000.0}},
                                   SeverityDistribution{Pareto{10.0, 1.1}}}) {
        fit.distribution = d;
        EXPECT_GE(tail_loss_probability(fit, 1e12), 1 - 1e-9);
    }
    EXPECT_THROW(tail_loss_probability(fit, 0.0), ValidationError);
}

// P(type occurs in an event and its loss <= 5000) under the shipped calibration.
TEST(TailProbability, DefaultCalibrationOrderingAt5000) {
    const auto cfg = default_config();
    std::array<double, 3> mass{};
    for (std::size_t t = 0; t < 3; ++t) {
        SeverityFit fit;
        fit.distribution = cfg.severity[t];
        mass[t] = cfg.type_inclusion_probs[t] * tail_loss_probability(fit, 5000.0);
    }
    const auto i = static_cast<std::size_t>(LossType::ThirdPartyInjury);
    const auto d = static_cast<std::size_t>(LossType::OwnDamage);
    const auto p = static_cast<std::size_t>(LossType::ThirdPartyProperty);
    EXPECT_GT(mass[i], mass[p]);
    EXPECT_GT(mass[p], mass[d]);
}

TEST(Family, NamesRoundTrip) {
    for (auto f : kSeverityFamilies) EXPECT_EQ(parse_family(family_name(f)), f);
    EXPECT_FALSE(parse_family("weibull"));
}

}  // namespace
}  // namespace qsr

#ifndef QSR_RISK_HPP
#define QSR_RISK_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsr/core_model.hpp"
#include "qsr/empirical_sample.hpp"

namespace qsr {

/// Confidence level strictly inside (0, 1).
class Percentile {
public:
    /// Throws ValidationError unless 0 < p < 1.
    explicit Percentile(double p);
    double value() const noexcept { return p_; }

private:
    double p_;
};

/// Size of the upper tail used by both estimators:
/// m = max(1, ceil((1 - p) * n)). Products within 1e-9 of an integer are
/// snapped to it first, so 0.99 * 100 counts as exactly one value.
std::size_t tail_count(std::size_t n, Percentile p);

/// The m-th largest value. Throws ValidationError on an empty sample.
double var_empirical(const EmpiricalSample& sample, Percentile p);

/// Mean of the m largest values. Subadditive over aligned samples.
double cte_empirical(const EmpiricalSample& sample, Percentile p);

enum class CoverageRow {
    ThirdPartyInjury,
    OwnDamage,
    ThirdPartyProperty,
    SumOfUnbundled,             // arithmetic sum of the three coverage rows
    SumOfUnbundledIndependent,  // Monte Carlo, coverages resampled independently
    Bundled,
};

std::string_view coverage_row_label(CoverageRow row) noexcept;

struct RiskRow {
    CoverageRow row;
    std::size_t n = 0;  // sample size; 0 marks an empty coverage
    std::vector<std::optional<double>> var;  // parallel to percentiles
    std::vector<std::optional<double>> cte;

    std::string_view label() const noexcept { return coverage_row_label(row); }
};

struct RiskOptions {
    std::uint64_t mc_draws = 1'000'000;
    std::uint64_t seed = 0;
    /// Workers for the Monte Carlo variant. Draws are generated in fixed
    /// blocks with per-block substreams, so the result does not depend on it.
    unsigned workers = 1;
};

struct RiskReport {
    std::vector<double> percentiles;
    /// Table layout: injury, own damage, property, sum of unbundled, bundled.
    std::vector<RiskRow> rows;
    /// Sum of unbundled under independent resampling of the coverages.
    std::optional<RiskRow> independent_sum;
    std::uint64_t mc_draws = 0;
    std::uint64_t mc_seed = 0;
    unsigned workers = 0;
    /// Whether bundled VaR <= arithmetic sum VaR held, per percentile.
    /// Observation only; VaR is not subadditive in general.
    std::vector<bool> var_subadditive_observed;

    const RiskRow* find(CoverageRow row) const noexcept;
};

/// VaR and CTE for each coverage (losses_by_type), their arithmetic sum,
/// the independence resampling of the sum, and the bundled per-event
/// totals. Throws ValidationError for a portfolio without events.
RiskReport risk_table(const Portfolio& portfolio, std::span<const double> percentiles,
                      const RiskOptions& options = {});

/// Arithmetic sum-of-unbundled CTE minus bundled CTE at `p`: the capital
/// released by bundling. Throws ValidationError when either row or the
/// percentile is missing.
double economic_capital_gap(const RiskReport& report, Percentile p);

/// Monte Carlo draws of the per-event sum when each aligned coverage
/// column is resampled independently. Deterministic for (columns, draws,
/// seed) regardless of `workers`.
std::vector<double> independent_sum_draws(std::span<const std::vector<double>> columns,
                                          std::uint64_t draws, std::uint64_t seed,
                                          unsigned workers);

}  // namespace qsr

#endif  // QSR_RISK_HPP

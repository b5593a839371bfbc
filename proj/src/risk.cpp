#include "qsr/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "qsr/error.hpp"
#include "qsr/synthgen.hpp"

namespace qsr {

Percentile::Percentile(double p) : p_(p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ValidationError("percentile must lie in (0, 1), got " + std::to_string(p));
    }
}

std::size_t tail_count(std::size_t n, Percentile p) {
    const double x = (1.0 - p.value()) * static_cast<double>(n);
    const double nearest = std::round(x);
    const double m = std::fabs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
    return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

double var_empirical(const EmpiricalSample& sample, Percentile p) {
    if (sample.empty()) throw ValidationError("VaR of an empty sample");
    const std::size_t m = tail_count(sample.size(), p);
    return sample[sample.size() - m];
}

double cte_empirical(const EmpiricalSample& sample, Percentile p) {
    if (sample.empty()) throw ValidationError("CTE of an empty sample");
    const std::size_t m = tail_count(sample.size(), p);
    const auto top = sample.values().last(m);
    return compensated_sum(top) / static_cast<double>(m);
}

std::string_view coverage_row_label(CoverageRow row) noexcept {
    switch (row) {
        case CoverageRow::ThirdPartyInjury: return loss_type_label(LossType::ThirdPartyInjury);
        case CoverageRow::OwnDamage: return loss_type_label(LossType::OwnDamage);
        case CoverageRow::ThirdPartyProperty: return loss_type_label(LossType::ThirdPartyProperty);
        case CoverageRow::SumOfUnbundled: return "Sum of Unbundled";
        case CoverageRow::SumOfUnbundledIndependent: return "Sum of Unbundled (independent)";
        case CoverageRow::Bundled: return "Bundled (Comprehensive)";
    }
    return "?";
}

const RiskRow* RiskReport::find(CoverageRow row) const noexcept {
    if (independent_sum && independent_sum->row == row) return &*independent_sum;
    for (const auto& r : rows) {
        if (r.row == row) return &r;
    }
    return nullptr;
}

namespace {

constexpr std::uint64_t kBlockDraws = 1 << 16;

RiskRow measure_row(CoverageRow row, const EmpiricalSample& sample,
                    const std::vector<Percentile>& ps) {
    RiskRow out{row, sample.size(), {}, {}};
    for (const auto& p : ps) {
        if (sample.empty()) {
            out.var.emplace_back();
            out.cte.emplace_back();
        } else {
            out.var.emplace_back(var_empirical(sample, p));
            out.cte.emplace_back(cte_empirical(sample, p));
        }
    }
    return out;
}

}  // namespace

std::vector<double> independent_sum_draws(std::span<const std::vector<double>> columns,
                                          std::uint64_t draws, std::uint64_t seed,
                                          unsigned workers) {
    for (const auto& c : columns) {
        if (c.empty()) throw ValidationError("independent resampling needs non-empty columns");
    }
    std::vector<double> out(draws);
    const std::uint64_t blocks = (draws + kBlockDraws - 1) / kBlockDraws;
    std::atomic<std::uint64_t> next{0};

    auto work = [&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
            Rng rng(substream_seed(seed, b));
            std::vector<std::uniform_int_distribution<std::size_t>> pick;
            for (const auto& c : columns) pick.emplace_back(0, c.size() - 1);
            const std::uint64_t lo = b * kBlockDraws;
            const std::uint64_t hi = std::min(draws, lo + kBlockDraws);
            for (std::uint64_t i = lo; i < hi; ++i) {
                double s = 0.0;
                for (std::size_t c = 0; c < columns.size(); ++c) s += columns[c][pick[c](rng)];
                out[i] = s;
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
    return out;
}

RiskReport risk_table(const Portfolio& portfolio, std::span<const double> percentiles,
                      const RiskOptions& options) {
    if (portfolio.events().empty()) throw ValidationError("empty portfolio: no claim events");
    if (percentiles.empty()) throw ValidationError("risk_table needs at least one percentile");
    std::vector<Percentile> ps;
    for (double p : percentiles) ps.emplace_back(p);

    RiskReport report;
    report.percentiles.assign(percentiles.begin(), percentiles.end());
    report.mc_draws = options.mc_draws;
    report.mc_seed = options.seed;
    report.workers = std::max(1u, options.workers);

    const CoverageRow coverage_rows[] = {CoverageRow::ThirdPartyInjury, CoverageRow::OwnDamage,
                                         CoverageRow::ThirdPartyProperty};
    for (std::size_t t = 0; t < 3; ++t) {
        report.rows.push_back(
            measure_row(coverage_rows[t], losses_by_type(portfolio, kLossTypes[t]), ps));
    }

    RiskRow sum{CoverageRow::SumOfUnbundled, portfolio.events().size(), {}, {}};
    for (std::size_t j = 0; j < ps.size(); ++j) {
        double v = 0.0;
        double c = 0.0;
        for (std::size_t t = 0; t < 3; ++t) {
            // An empty coverage carries no loss, so it adds nothing.
            v += report.rows[t].var[j].value_or(0.0);
            c += report.rows[t].cte[j].value_or(0.0);
        }
        sum.var.emplace_back(v);
        sum.cte.emplace_back(c);
    }
    report.rows.push_back(std::move(sum));

    const auto bundled = event_totals(portfolio);
    report.rows.push_back(measure_row(CoverageRow::Bundled, bundled, ps));

    if (options.mc_draws > 0) {
        std::vector<std::vector<double>> columns;
        for (LossType t : kLossTypes) columns.push_back(aligned_column(portfolio, t));
        auto draws = independent_sum_draws(columns, options.mc_draws, options.seed, report.workers);
        auto row = measure_row(CoverageRow::SumOfUnbundledIndependent,
                               EmpiricalSample(std::move(draws)), ps);
        report.independent_sum = std::move(row);
    }

    const auto& s = report.rows[3];
    const auto& b = report.rows[4];
    for (std::size_t j = 0; j < ps.size(); ++j) {
        report.var_subadditive_observed.push_back(*b.var[j] <= *s.var[j]);
    }
    return report;
}

double economic_capital_gap(const RiskReport& report, Percentile p) {
    const RiskRow* sum = report.find(CoverageRow::SumOfUnbundled);
    const RiskRow* bundled = report.find(CoverageRow::Bundled);
    if (!sum || !bundled) {
        throw ValidationError("economic_capital_gap needs Sum of Unbundled and Bundled rows");
    }
    for (std::size_t j = 0; j < report.percentiles.size(); ++j) {
        if (std::fabs(report.percentiles[j] - p.value()) <= 1e-12) {
            if (j >= sum->cte.size() || j >= bundled->cte.size() || !sum->cte[j] ||
                !bundled->cte[j]) {
                throw ValidationError("economic_capital_gap: CTE cell missing");
            }
            return *sum->cte[j] - *bundled->cte[j];
        }
    }
    throw ValidationError("economic_capital_gap: percentile not in report");
}

}  // namespace qsr

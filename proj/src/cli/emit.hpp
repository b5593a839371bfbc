// Text renderers for every table, figure series and report the CLI writes,
// plus the parsers the round-trip tests use.
#ifndef QSR_CLI_EMIT_HPP
#define QSR_CLI_EMIT_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsr/bundling_pricing.hpp"
#include "qsr/frequency.hpp"
#include "qsr/reinsurance.hpp"
#include "qsr/risk.hpp"
#include "qsr/severity.hpp"
#include "qsr/synthgen.hpp"

namespace qsr::cli {

using nlohmann::json;

/// "0.95" -> "95", "0.995" -> "99.5".
std::string percent_token(double p);

// Predicted-mean grid: response_kind,ncd_0,...,ncd_50 (one row per kind).
std::string grid_csv(const PredictedMeanGrid& grid, std::span<const ResponseKind> kinds);
// Same layout, per-level sample means; empty cell where a level has no data.
std::string sample_means_csv(
    std::span<const std::pair<ResponseKind, std::array<std::optional<double>, 6>>> rows);
// response_kind,d_0_10,d_10_20,d_20_30,d_30_40,d_40_50
std::string changes_csv(const std::array<std::array<double, 5>, 3>& changes,
                        std::span<const ResponseKind> kinds);
json models_json(std::span<const NcdRegressionModel> models);

struct GridRow {
    std::string kind;
    std::array<double, 6> values;
};
std::vector<GridRow> parse_grid_csv(const std::string& text);

std::string density_csv(std::span<const double> xs, std::span<const double> density);
std::vector<double> density_grid(double lo, double hi, std::size_t points);

json fit_json(const SeverityFit& fit);

std::string quota_summary_csv(const QuotaSweep& sweep);

std::string risk_csv(const RiskReport& report);
json risk_json(const RiskReport& report);

struct RiskCsvRow {
    std::string coverage;
    std::vector<std::optional<double>> var;
    std::vector<std::optional<double>> cte;
    std::size_t n = 0;
};
struct RiskCsv {
    std::vector<std::string> header;
    std::vector<RiskCsvRow> rows;
};
RiskCsv parse_risk_csv(const std::string& text);

json guidance_json(const OfferScenario& scenario, const PricingGuidance& guidance);

json config_json(const GenConfig& cfg);

}  // namespace qsr::cli

#endif  // QSR_CLI_EMIT_HPP

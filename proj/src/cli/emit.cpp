#include "cli/emit.hpp"

#include <cmath>
#include <sstream>
#include <variant>

#include "qsr/csv.hpp"
#include "qsr/error.hpp"

namespace qsr::cli {

namespace {

using csv::format_number;

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "n=0"; }

json cell_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    auto f = csv::split_line(line);
    if (!f) throw ValidationError("malformed CSV line: " + line);
    return *f;
}

double number_of(const std::string& s) {
    auto v = csv::parse_double(s);
    if (!v) throw ValidationError("not a number: '" + s + "'");
    return *v;
}

}  // namespace

std::string percent_token(double p) {
    return format_number(std::round(p * 1e8) / 1e6);
}

std::string grid_csv(const PredictedMeanGrid& grid, std::span<const ResponseKind> kinds) {
    std::string out = "response_kind";
    for (int level : kNcdLevels) out += ",ncd_" + std::to_string(level);
    out += '\n';
    for (auto k : kinds) {
        out += response_kind_code(k);
        for (double v : grid.row(k)) out += "," + format_number(v);
        out += '\n';
    }
    return out;
}

std::string sample_means_csv(
    std::span<const std::pair<ResponseKind, std::array<std::optional<double>, 6>>> rows) {
    std::string out = "response_kind";
    for (int level : kNcdLevels) out += ",ncd_" + std::to_string(level);
    out += '\n';
    for (const auto& [k, means] : rows) {
        out += response_kind_code(k);
        for (const auto& m : means) out += "," + (m ? format_number(*m) : std::string());
        out += '\n';
    }
    return out;
}

std::string changes_csv(const std::array<std::array<double, 5>, 3>& changes,
                        std::span<const ResponseKind> kinds) {
    std::string out = "response_kind";
    for (std::size_t j = 0; j < 5; ++j) {
        out += ",d_" + std::to_string(kNcdLevels[j]) + "_" + std::to_string(kNcdLevels[j + 1]);
    }
    out += '\n';
    for (auto k : kinds) {
        out += response_kind_code(k);
        for (double v : changes[static_cast<std::size_t>(k)]) out += "," + format_number(v);
        out += '\n';
    }
    return out;
}

json models_json(std::span<const NcdRegressionModel> models) {
    json out = json::object();
    for (const auto& m : models) {
        out[std::string(response_kind_code(m.kind))] = {
            {"label", std::string(response_kind_label(m.kind))},
            {"intercept", m.intercept},
            {"slope_per_decade", m.slope},
            {"dispersion_r", m.r},
            {"n_obs", m.n_obs},
            {"iterations", m.iterations},
            {"loglik", m.loglik},
        };
    }
    return out;
}

std::vector<GridRow> parse_grid_csv(const std::string& text) {
    auto lines = lines_of(text);
    if (lines.empty() || fields_of(lines[0]).size() != 7) {
        throw ValidationError("grid CSV needs a 7-column header");
    }
    std::vector<GridRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = fields_of(lines[i]);
        if (f.size() != 7) throw ValidationError("grid CSV row needs 7 fields");
        GridRow r{f[0], {}};
        for (std::size_t j = 0; j < 6; ++j) r.values[j] = number_of(f[j + 1]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<double> density_grid(double lo, double hi, std::size_t points) {
    std::vector<double> xs(points);
    for (std::size_t i = 0; i < points; ++i) {
        xs[i] = points == 1 ? lo
                            : lo + (hi - lo) * static_cast<double>(i) /
                                       static_cast<double>(points - 1);
    }
    return xs;
}

std::string density_csv(std::span<const double> xs, std::span<const double> density) {
    std::string out = "x,density\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += format_number(xs[i]) + "," + format_number(density[i]) + "\n";
    }
    return out;
}

json fit_json(const SeverityFit& fit) {
    json params = std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Lognormal>) {
                return {{"mu", d.mu}, {"sigma", d.sigma}};
            } else if constexpr (std::is_same_v<T, Gamma>) {
                return {{"shape", d.shape}, {"scale", d.scale}};
            } else {
                return {{"scale", d.scale}, {"shape", d.shape}};
            }
        },
        fit.distribution);
    return {
        {"family", std::string(family_name(fit.family()))},
        {"params", params},
        {"loglik", fit.loglik},
        {"aic", fit.aic},
        {"n", fit.n},
        {"zeros_excluded", fit.zeros_excluded},
    };
}

std::string quota_summary_csv(const QuotaSweep& sweep) {
    std::string out = "quota,mean,variance,var95,cte95\n";
    for (const auto& s : sweep.summary) {
        out += format_number(s.quota) + "," + format_number(s.mean) + "," +
               format_number(s.variance) + "," + format_number(s.var95) + "," +
               format_number(s.cte95) + "\n";
    }
    return out;
}

std::string risk_csv(const RiskReport& report) {
    std::vector<std::string> header{"coverage"};
    for (double p : report.percentiles) header.push_back("var_" + percent_token(p));
    for (double p : report.percentiles) header.push_back("cte_" + percent_token(p));
    header.push_back("n");
    std::string out = csv::join(header) + "\n";
    for (const auto& row : report.rows) {
        std::vector<std::string> f{std::string(row.label())};
        for (const auto& v : row.var) f.push_back(cell(v));
        for (const auto& v : row.cte) f.push_back(cell(v));
        f.push_back(std::to_string(row.n));
        out += csv::join(f) + "\n";
    }
    return out;
}

RiskCsv parse_risk_csv(const std::string& text) {
    auto lines = lines_of(text);
    if (lines.empty()) throw ValidationError("risk CSV is empty");
    RiskCsv out;
    out.header = fields_of(lines[0]);
    if (out.header.size() < 4 || out.header.front() != "coverage" || out.header.back() != "n" ||
        (out.header.size() - 2) % 2 != 0) {
        throw ValidationError("risk CSV header malformed");
    }
    const std::size_t k = (out.header.size() - 2) / 2;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = fields_of(lines[i]);
        if (f.size() != out.header.size()) throw ValidationError("risk CSV row width mismatch");
        RiskCsvRow row;
        row.coverage = f[0];
        auto parse_cell = [](const std::string& s) -> std::optional<double> {
            if (s == "n=0") return std::nullopt;
            return number_of(s);
        };
        for (std::size_t j = 0; j < k; ++j) row.var.push_back(parse_cell(f[1 + j]));
        for (std::size_t j = 0; j < k; ++j) row.cte.push_back(parse_cell(f[1 + k + j]));
        auto n = csv::parse_int(f.back());
        if (!n || *n < 0) throw ValidationError("risk CSV n column malformed");
        row.n = static_cast<std::size_t>(*n);
        out.rows.push_back(std::move(row));
    }
    return out;
}

namespace {

json row_json(const RiskRow& row, std::span<const double> ps) {
    json var = json::object();
    json cte = json::object();
    for (std::size_t j = 0; j < ps.size(); ++j) {
        var[percent_token(ps[j])] = cell_json(row.var[j]);
        cte[percent_token(ps[j])] = cell_json(row.cte[j]);
    }
    return {{"coverage", std::string(row.label())}, {"n", row.n}, {"var", var}, {"cte", cte}};
}

}  // namespace

json risk_json(const RiskReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) rows.push_back(row_json(r, report.percentiles));

    json gaps = json::object();
    json var_obs = json::object();
    for (std::size_t j = 0; j < report.percentiles.size(); ++j) {
        const auto key = percent_token(report.percentiles[j]);
        gaps[key] = economic_capital_gap(report, Percentile(report.percentiles[j]));
        var_obs[key] = static_cast<bool>(report.var_subadditive_observed[j]);
    }

    json sums = {{"arithmetic", row_json(*report.find(CoverageRow::SumOfUnbundled),
                                         report.percentiles)}};
    sums["independent"] = report.independent_sum
                              ? row_json(*report.independent_sum, report.percentiles)
                              : json(nullptr);
    return {
        {"percentiles", report.percentiles},
        {"rows", rows},
        {"sum_of_unbundled", sums},
        {"economic_capital_gap_cte", gaps},
        {"var_subadditive_observed", var_obs},
        {"monte_carlo",
         {{"draws", report.mc_draws}, {"seed", report.mc_seed}, {"workers", report.workers}}},
    };
}

json guidance_json(const OfferScenario& s, const PricingGuidance& g) {
    json components = json::object();
    for (LossType t : kLossTypes) {
        components[std::string(loss_type_code(t))] = s.component_prices[static_cast<std::size_t>(t)];
    }
    json scenario = {{"component_prices", components},
                     {"bundle_price", s.bundle_price},
                     {"value_add_present", s.value_add_present}};
    scenario["value_add_reference_price"] =
        s.value_add_present ? json(s.value_add_reference_price) : json(nullptr);
    return {
        {"scenario", scenario},
        {"max_recommended_bundle_price", g.max_recommended_bundle_price},
        {"recommendation", std::string(recommendation_name(g.recommendation))},
        {"rationale", g.rationale},
    };
}

json config_json(const GenConfig& cfg) {
    json severity = json::object();
    json inclusion = json::object();
    for (LossType t : kLossTypes) {
        const auto i = static_cast<std::size_t>(t);
        SeverityFit tmp;
        tmp.distribution = cfg.severity[i];
        const json f = fit_json(tmp);
        severity[std::string(loss_type_code(t))] = {{"family", f["family"]}, {"params", f["params"]}};
        inclusion[std::string(loss_type_code(t))] = cfg.type_inclusion_probs[i];
    }
    json mix = json::object();
    for (std::size_t j = 0; j < kNcdLevels.size(); ++j) {
        mix["ncd_" + std::to_string(kNcdLevels[j])] = cfg.ncd_mix[j];
    }
    return {
        {"n_policyholders", cfg.n_policyholders},
        {"seed", cfg.seed},
        {"ncd_mix", mix},
        {"freq_base_mean", cfg.freq_base_mean},
        {"freq_ncd_slope", cfg.freq_ncd_slope},
        {"dispersion_r", cfg.dispersion_r},
        {"severity", severity},
        {"type_inclusion_probs", inclusion},
        {"rng", "mt19937_64"},
    };
}

}  // namespace qsr::cli

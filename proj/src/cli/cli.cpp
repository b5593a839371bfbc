#include "qsr/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli/emit.hpp"
#include "cli/manifest.hpp"
#include "cli/svg.hpp"
#include "qsr/core_model.hpp"
#include "qsr/csv.hpp"
#include "qsr/error.hpp"

namespace qsr::cli {

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QSR_THREADS")) {
        auto cap = csv::parse_int(env);
        if (!cap || *cap < 1) throw ValidationError("QSR_THREADS must be a positive integer");
        n = std::min<unsigned>(n, static_cast<unsigned>(std::min<long long>(*cap, 1 << 16)));
    }
    return n;
}

namespace {

namespace fs = std::filesystem;

constexpr double kTailThreshold = 5000.0;
constexpr std::size_t kDensityPoints = 256;

struct InputOptions {
    std::string policies;
    std::string claims;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> policyholders;
};

struct Source {
    Portfolio portfolio;
    json config;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> digests;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--policies", in.policies, "policies.csv to ingest instead of generating");
    cmd->add_option("--claims", in.claims, "claims.csv to ingest instead of generating");
    cmd->add_option("--seed", in.seed, "generator / Monte Carlo seed");
    cmd->add_option("--policyholders", in.policyholders,
                    "number of synthetic policyholders (default 22000)");
}

GenConfig config_from(const InputOptions& in) {
    GenConfig cfg = default_config();
    if (in.seed) cfg.seed = *in.seed;
    if (in.policyholders) cfg.n_policyholders = *in.policyholders;
    return cfg;
}

Source load_source(const InputOptions& in) {
    Source src;
    if (in.policies.empty() != in.claims.empty()) {
        throw ValidationError("--policies and --claims must be given together");
    }
    if (!in.policies.empty()) {
        for (const auto& path : {in.policies, in.claims}) {
            if (!fs::is_regular_file(path)) throw ValidationError("missing input file: " + path);
        }
        std::ifstream p(in.policies, std::ios::binary);
        std::ifstream c(in.claims, std::ios::binary);
        src.portfolio = ingest_csv(p, c);
        src.config = nullptr;
        src.seed = in.seed.value_or(0);
        src.digests = {{"policies", sha256_file(in.policies)}, {"claims", sha256_file(in.claims)}};
        return src;
    }
    const GenConfig cfg = config_from(in);
    src.portfolio = generate_portfolio(cfg);
    src.config = config_json(cfg);
    src.seed = cfg.seed;
    return src;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Context {
    std::string command;
    std::vector<std::string> args;
    unsigned workers = 1;
};

void add_manifest(OutputSet& out, const Context& ctx, const Source& src,
                  const std::string& name = "manifest.json") {
    RunManifest m;
    m.command = ctx.command;
    m.args = ctx.args;
    m.config = src.config;
    m.seed = src.seed;
    m.input_digests = src.digests;
    m.workers = ctx.workers;
    m.timestamp = utc_timestamp();
    out.add(name, dump(m.to_json()));
}

// ---- stages ----------------------------------------------------------------

struct FrequencyResult {
    std::vector<ResponseKind> kinds;
    std::vector<NcdRegressionModel> models;
    PredictedMeanGrid grid;
    std::array<std::array<double, 5>, 3> changes{};
    std::vector<std::pair<ResponseKind, std::array<std::optional<double>, 6>>> sample_means;
};

FrequencyResult frequency_stage(const Portfolio& portfolio, std::vector<ResponseKind> kinds) {
    FrequencyResult r;
    r.kinds = std::move(kinds);
    for (auto k : r.kinds) {
        const auto obs = ncd_observations(portfolio, k);
        r.models.push_back(fit_ncd_regression(obs, k));
        r.sample_means.emplace_back(k, ncd_sample_means(obs));
    }
    if (r.models.size() == 3) {
        r.grid = predicted_mean_grid(r.models);
    } else {
        for (const auto& m : r.models) {
            for (std::size_t j = 0; j < kNcdLevels.size(); ++j) {
                r.grid.rows[static_cast<std::size_t>(m.kind)][j] = m.predicted_mean(kNcdLevels[j]);
            }
        }
    }
    r.changes = mean_change_series(r.grid);
    return r;
}

void emit_frequency(OutputSet& out, const FrequencyResult& r, bool changes, bool svg) {
    out.add("table1.csv", grid_csv(r.grid, r.kinds));
    out.add("table1_sample_means.csv", sample_means_csv(r.sample_means));
    out.add("table1_models.json", dump(models_json(r.models)));
    if (changes) out.add("fig1.csv", changes_csv(r.changes, r.kinds));
    if (svg) {
        LineChart means{"Predicted mean by NCD level", "NCD level", "predicted mean", {}};
        LineChart diffs{"Change of predicted mean per NCD step", "NCD step start", "change", {}};
        for (auto k : r.kinds) {
            const auto& row = r.grid.row(k);
            Series s{std::string(response_kind_label(k)), {}, {row.begin(), row.end()}};
            for (int level : kNcdLevels) s.xs.push_back(level);
            means.series.push_back(std::move(s));
            const auto& d = r.changes[static_cast<std::size_t>(k)];
            Series c{std::string(response_kind_label(k)), {0, 10, 20, 30, 40}, {d.begin(), d.end()}};
            diffs.series.push_back(std::move(c));
        }
        out.add("table1.svg", render_svg({means}));
        if (changes) out.add("fig1.svg", render_svg({diffs}));
    }
}

void severity_stage(OutputSet& out, const Portfolio& portfolio,
                    std::optional<SeverityFamily> family, const std::string& dir, bool svg) {
    struct PerType {
        LossType type;
        EmpiricalSample sample;
        std::optional<SeverityFit> fit;
        std::vector<SeverityFit> candidates;
        std::string error;
    };
    std::vector<std::future<PerType>> jobs;
    for (LossType t : kLossTypes) {
        jobs.push_back(std::async(std::launch::async, [&portfolio, family, t] {
            PerType r{t, losses_by_type(portfolio, t), std::nullopt, {}, {}};
            try {
                if (family) {
                    r.fit = fit_severity(r.sample, *family);
                } else {
                    r.fit = best_fit(r.sample);
                    for (auto f : kSeverityFamilies) {
                        try {
                            r.candidates.push_back(fit_severity(r.sample, f));
                        } catch (const ValidationError&) {
                        }
                    }
                }
            } catch (const ValidationError& e) {
                r.error = e.what();
            }
            return r;
        }));
    }

    const double n_events = static_cast<double>(portfolio.events().size());
    json fits = json::object();
    LineChart chart{"Severity density by loss type", "loss amount", "density", {}};
    std::vector<LineChart> panels;
    for (auto& job : jobs) {
        PerType r = job.get();
        const std::string code(loss_type_code(r.type));
        json entry = {{"label", std::string(loss_type_label(r.type))}, {"sample_n", r.sample.size()}};
        if (r.fit) {
            entry["fit"] = fit_json(*r.fit);
            json cands = json::array();
            for (const auto& c : r.candidates) cands.push_back(fit_json(c));
            entry["candidates"] = cands;
            const double p = tail_loss_probability(*r.fit, kTailThreshold);
            entry["p_loss_le_5000"] = p;
            entry["p_occurs_and_le_5000"] =
                n_events > 0 ? p * static_cast<double>(r.sample.size()) / n_events : 0.0;
        } else {
            entry["fit"] = nullptr;
            entry["error"] = r.error;
        }
        fits[code] = entry;

        if (r.sample.size() >= 2) {
            try {
                const double h = silverman_bandwidth(r.sample);
                const std::size_t q99 = r.sample.size() - tail_count(r.sample.size(), Percentile(0.99));
                const auto xs = density_grid(0.0, r.sample[q99], kDensityPoints);
                const auto ds = kde_density(r.sample, xs, h);
                out.add(dir + "density_" + code + ".csv", density_csv(xs, ds));
                panels.push_back(LineChart{std::string(loss_type_label(r.type)), "loss amount",
                                           "density", {Series{code, xs, ds}}});
            } catch (const ValidationError&) {
                // constant sample: no density to draw
            }
        }
    }
    out.add(dir + "fits.json", dump(fits));
    if (svg && !panels.empty()) out.add(dir + "fig3.svg", render_svg(panels));
}

void quota_stage(OutputSet& out, const Portfolio& portfolio, std::span<const double> quotas,
                 const std::string& dir, bool svg) {
    const auto losses = event_totals(portfolio);
    const auto sweep = quota_sweep(losses, quotas);
    out.add(dir + "summary.csv", quota_summary_csv(sweep));
    LineChart chart{"Retained claims under quota share", "retained loss", "density", {}};
    const double top = losses[losses.size() - tail_count(losses.size(), Percentile(0.99))];
    for (std::size_t i = 0; i < sweep.quotas.size(); ++i) {
        const auto& kept = sweep.retained[i];
        const auto xs = density_grid(0.0, sweep.quotas[i] * top, kDensityPoints);
        std::vector<double> ds(xs.size(), 0.0);
        try {
            ds = kde_density(kept, xs);
        } catch (const ValidationError&) {
        }
        const std::string q = csv::format_number(sweep.quotas[i]);
        out.add(dir + "density_q" + q + ".csv", density_csv(xs, ds));
        chart.series.push_back(Series{"quota " + q, xs, ds});
    }
    if (svg) out.add(dir + "fig2.svg", render_svg({chart}));
}

void risk_stage(OutputSet& out, const Portfolio& portfolio, std::span<const double> percentiles,
                std::uint64_t draws, std::uint64_t seed, unsigned workers) {
    RiskOptions opt;
    opt.mc_draws = draws;
    opt.seed = seed;
    opt.workers = workers;
    const auto report = risk_table(portfolio, percentiles, opt);
    out.add("table2.csv", risk_csv(report));
    out.add("table2.json", dump(risk_json(report)));
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
    auto v = csv::parse_real_list(text);
    if (!v || v->empty()) {
        throw ValidationError(std::string(flag) + " expects a comma-separated list of numbers");
    }
    return *v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Motor portfolio risk analytics: claim frequency by NCD, severity, "
                 "quota share and bundled vs unbundled VaR/CTE",
                 "qsr"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string out_dir = "qsr-out";
    InputOptions input;
    std::string kind_text;
    bool changes = false;
    std::string family_text;
    std::string quotas_text = "0.25,0.5,0.75,1.0";
    std::string percentiles_text = "0.90,0.95,0.99";
    std::uint64_t draws = 1'000'000;
    bool svg = false;
    std::string components_text;
    double bundle_price = 0.0;
    std::optional<double> value_add_ref;

    auto* gen = app.add_subcommand("generate", "write a synthetic portfolio as CSV");
    gen->add_option("--seed", input.seed, "generator seed");
    gen->add_option("--policyholders", input.policyholders, "number of policyholders");
    gen->add_option("--out", out_dir, "output directory");

    auto* ingest = app.add_subcommand("ingest", "validate and canonicalize portfolio CSVs");
    ingest->add_option("--policies", input.policies)->required();
    ingest->add_option("--claims", input.claims)->required();
    ingest->add_option("--out", out_dir, "output directory");

    auto* freq = app.add_subcommand("fit-frequency", "NB regression of losses on NCD level");
    add_input_options(freq, input);
    freq->add_option("--kind", kind_text, "indl, type or event (default: all three)")
        ->check(CLI::IsMember({"indl", "type", "event"}));
    freq->add_flag("--changes", changes, "also write the change-of-mean series");
    freq->add_option("--out", out_dir, "output directory");

    auto* sev = app.add_subcommand("fit-severity", "per-coverage severity fits and densities");
    add_input_options(sev, input);
    sev->add_option("--family", family_text, "lognormal, gamma or pareto (default: best AIC)")
        ->check(CLI::IsMember({"lognormal", "gamma", "pareto"}));
    sev->add_option("--out", out_dir, "output directory");

    auto* quota = app.add_subcommand("quota-share", "retained-loss distributions by quota");
    add_input_options(quota, input);
    quota->add_option("--quotas", quotas_text, "retained fractions, e.g. 0.25,0.5,0.75,1.0");
    quota->add_option("--out", out_dir, "output directory");

    auto* risk = app.add_subcommand("risk-report", "VaR/CTE for unbundled and bundled coverage");
    add_input_options(risk, input);
    risk->add_option("--percentiles", percentiles_text, "e.g. 0.90,0.95,0.99");
    risk->add_option("--draws", draws, "Monte Carlo draws for the independence variant");
    risk->add_option("--out", out_dir, "output directory");

    auto* advise = app.add_subcommand("bundle-advise", "reference-price guidance for a bundle");
    advise->add_option("--components", components_text, "TPI,OD,TPP component prices")->required();
    advise->add_option("--bundle", bundle_price, "bundle price")->required();
    advise->add_option("--value-add-ref", value_add_ref,
                       "reference price of a component only sold in the bundle");

    auto* pipe = app.add_subcommand("pipeline", "run every stage and write all tables and figures");
    add_input_options(pipe, input);
    pipe->add_option("--percentiles", percentiles_text, "e.g. 0.90,0.95,0.99");
    pipe->add_option("--quotas", quotas_text, "retained fractions");
    pipe->add_option("--draws", draws, "Monte Carlo draws for the independence variant");
    pipe->add_flag("--svg", svg, "also render SVG figures");
    pipe->add_option("--out", out_dir, "output directory");

    std::vector<const char*> argv{"qsr"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        Context ctx;
        ctx.command = app.get_subcommands().front()->get_name();
        ctx.args = args;
        ctx.workers = worker_count();
        OutputSet files(out_dir);

        if (gen->parsed()) {
            GenConfig cfg = config_from(input);
            Source src{generate_portfolio(cfg), config_json(cfg), cfg.seed, {}};
            std::ostringstream p, c;
            emit_csv(src.portfolio, p, c);
            files.add("policies.csv", p.str());
            files.add("claims.csv", c.str());
            add_manifest(files, ctx, src, "gen-manifest.json");
        } else if (ingest->parsed()) {
            Source src = load_source(input);
            std::ostringstream p, c;
            emit_csv(src.portfolio, p, c);
            files.add("policies.csv", p.str());
            files.add("claims.csv", c.str());
            add_manifest(files, ctx, src);
            out << src.portfolio.policyholders().size() << " policyholders, "
                << src.portfolio.events().size() << " events\n";
        } else if (freq->parsed()) {
            Source src = load_source(input);
            std::vector<ResponseKind> kinds(kResponseKinds.begin(), kResponseKinds.end());
            if (!kind_text.empty()) kinds = {*parse_response_kind(kind_text)};
            emit_frequency(files, frequency_stage(src.portfolio, kinds), changes, false);
            add_manifest(files, ctx, src);
        } else if (sev->parsed()) {
            Source src = load_source(input);
            std::optional<SeverityFamily> family;
            if (!family_text.empty()) family = parse_family(family_text);
            severity_stage(files, src.portfolio, family, "", false);
            add_manifest(files, ctx, src);
        } else if (quota->parsed()) {
            const auto quotas = parse_list(quotas_text, "--quotas");
            Source src = load_source(input);
            quota_stage(files, src.portfolio, quotas, "", false);
            add_manifest(files, ctx, src);
        } else if (risk->parsed()) {
            const auto ps = parse_list(percentiles_text, "--percentiles");
            Source src = load_source(input);
            risk_stage(files, src.portfolio, ps, draws, src.seed, ctx.workers);
            add_manifest(files, ctx, src);
        } else if (advise->parsed()) {
            const auto parts = parse_list(components_text, "--components");
            if (parts.size() != 3) {
                throw ValidationError("--components expects three prices: TPI,OD,TPP");
            }
            OfferScenario s;
            std::copy(parts.begin(), parts.end(), s.component_prices.begin());
            s.bundle_price = bundle_price;
            s.value_add_present = value_add_ref.has_value();
            s.value_add_reference_price = value_add_ref.value_or(0.0);
            out << dump(guidance_json(s, evaluate_offer(s)));
            return kExitOk;
        } else if (pipe->parsed()) {
            const auto ps = parse_list(percentiles_text, "--percentiles");
            const auto quotas = parse_list(quotas_text, "--quotas");
            Source src = load_source(input);
            std::vector<ResponseKind> kinds(kResponseKinds.begin(), kResponseKinds.end());
            emit_frequency(files, frequency_stage(src.portfolio, kinds), true, svg);
            quota_stage(files, src.portfolio, quotas, "fig2/", svg);
            severity_stage(files, src.portfolio, std::nullopt, "fig3/", svg);
            risk_stage(files, src.portfolio, ps, draws, src.seed, ctx.workers);
            add_manifest(files, ctx, src);
        }
        files.commit();
        return kExitOk;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (last iterate: " << e.last_iterate() << ")\n";
        return kExitNonConvergence;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace qsr::cli

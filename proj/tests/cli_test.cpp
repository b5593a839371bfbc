#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli/emit.hpp"
#include "cli/manifest.hpp"
#include "qsr/cli.hpp"
#include "qsr/core_model.hpp"
#include "qsr/synthgen.hpp"

namespace fs = std::filesystem;

namespace qsr::cli {
namespace {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("qsr-cli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string operator/(const std::string& rel) const { return (path_ / rel).string(); }

private:
    fs::path path_;
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
    return files;
}

std::string without_timestamp(const std::string& manifest) {
    auto j = json::parse(manifest);
    j.erase("timestamp");
    return j.dump();
}

TEST(Cli, UsageErrorsExit64) {
    EXPECT_EQ(invoke({}).code, kExitUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(invoke({"risk-report", "--no-such-flag"}).code, kExitUsage);
    EXPECT_EQ(invoke({"bundle-advise", "--bundle", "10"}).code, kExitUsage);
    EXPECT_EQ(invoke({"fit-frequency", "--kind", "weekly"}).code, kExitUsage);
}

TEST(Cli, RiskReportOnEmptyClaimsFileExits1) {
    TempDir dir;
    spit(dir / "policies.csv",
         std::string(kPoliciesHeader) + "\nP1,30,M,SEDAN,2,5,10\n");
    spit(dir / "claims.csv", std::string(kClaimsHeader) + "\n");
    const auto r = invoke({"risk-report", "--policies", dir / "policies.csv", "--claims",
                           dir / "claims.csv", "--out", dir / "out"});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_NE(r.err.find("empty portfolio"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir.path() / "out" / "table2.csv"));
}

TEST(Cli, MissingInputFileExits1) {
    TempDir dir;
    const auto r = invoke({"risk-report", "--policies", dir / "nope.csv", "--claims",
                           dir / "nope2.csv", "--out", dir / "out"});
    EXPECT_EQ(r.code, kExitValidation);
}

TEST(Cli, MalformedInputReportsLine) {
    TempDir dir;
    spit(dir / "policies.csv", std::string(kPoliciesHeader) + "\nP1,30,M,SEDAN,2,5,35\n");
    spit(dir / "claims.csv", std::string(kClaimsHeader) + "\n");
    const auto r = invoke({"ingest", "--policies", dir / "policies.csv", "--claims",
                           dir / "claims.csv", "--out", dir / "out"});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_NE(r.err.find("policies.csv line 2"), std::string::npos) << r.err;
}

TEST(Cli, GenerateThenIngestRoundTrips) {
    TempDir dir;
    ASSERT_EQ(invoke({"generate", "--seed", "3", "--policyholders", "1500", "--out", dir / "gen"}).code,
              kExitOk);
    EXPECT_TRUE(fs::exists(dir.path() / "gen" / "gen-manifest.json"));
    ASSERT_EQ(invoke({"ingest", "--policies", dir / "gen/policies.csv", "--claims",
                      dir / "gen/claims.csv", "--out", dir / "canon"})
                  .code,
              kExitOk);
    EXPECT_EQ(slurp(dir.path() / "gen/policies.csv"), slurp(dir.path() / "canon/policies.csv"));
    EXPECT_EQ(slurp(dir.path() / "gen/claims.csv"), slurp(dir.path() / "canon/claims.csv"));

    const auto manifest = json::parse(slurp(dir.path() / "canon/manifest.json"));
    EXPECT_EQ(manifest["input_digests"]["policies"],
              sha256_file(dir.path() / "gen/policies.csv"));

    auto cfg = default_config();
    cfg.seed = 3;
    cfg.n_policyholders = 1500;
    std::ifstream p(dir.path() / "gen/policies.csv"), c(dir.path() / "gen/claims.csv");
    EXPECT_EQ(ingest_csv(p, c), generate_portfolio(cfg));
}

TEST(Cli, PipelineWritesAllArtifactGroups) {
    TempDir dir;
    const auto r = invoke({"pipeline", "--seed", "7", "--policyholders", "4000", "--draws", "20000",
                           "--out", dir / "run"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto files = tree(dir.path() / "run");
    for (const char* name : {"table1.csv", "fig1.csv", "fig2/summary.csv", "fig2/density_q0.25.csv",
                             "fig2/density_q1.csv", "fig3/fits.json", "fig3/density_TPI.csv",
                             "fig3/density_OD.csv", "fig3/density_TPP.csv", "table2.csv",
                             "table2.json", "manifest.json"}) {
        EXPECT_TRUE(files.contains(name)) << name;
    }
    int manifests = 0;
    for (const auto& [name, _] : files) manifests += name.ends_with("manifest.json");
    EXPECT_EQ(manifests, 1);
    for (const auto& [name, _] : files) EXPECT_EQ(name.find(".tmp"), std::string::npos) << name;
}

TEST(Cli, PipelineDeterministicApartFromTimestamp) {
    TempDir dir;
    const std::vector<std::string> args{"pipeline", "--seed", "11", "--policyholders", "3000",
                                        "--draws", "20000", "--svg", "--out", dir / "run"};
    ASSERT_EQ(invoke(args).code, kExitOk);
    auto first = tree(dir.path() / "run");
    fs::remove_all(dir.path() / "run");
    ASSERT_EQ(invoke(args).code, kExitOk);
    auto second = tree(dir.path() / "run");
    ASSERT_EQ(first.size(), second.size());
    for (auto& [name, content] : first) {
        if (name == "manifest.json") {
            EXPECT_EQ(without_timestamp(content), without_timestamp(second[name]));
        } else {
            EXPECT_EQ(content, second[name]) << name;
        }
    }
}

TEST(Cli, EmittedCsvsRoundTrip) {
    TempDir dir;
    ASSERT_EQ(invoke({"pipeline", "--seed", "5", "--policyholders", "3000", "--draws", "20000",
                      "--out", dir / "run"})
                  .code,
              kExitOk);

    const auto grid = parse_grid_csv(slurp(dir.path() / "run/table1.csv"));
    ASSERT_EQ(grid.size(), 3u);
    const auto models = json::parse(slurp(dir.path() / "run/table1_models.json"));
    for (const auto& row : grid) {
        const auto kind = parse_response_kind(row.kind);
        ASSERT_TRUE(kind) << row.kind;
        NcdRegressionModel m;
        m.intercept = models[row.kind]["intercept"];
        m.slope = models[row.kind]["slope_per_decade"];
        for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(row.values[j], m.predicted_mean(kNcdLevels[j]));
    }

    const auto risk = parse_risk_csv(slurp(dir.path() / "run/table2.csv"));
    EXPECT_EQ(risk.header, (std::vector<std::string>{"coverage", "var_90", "var_95", "var_99",
                                                     "cte_90", "cte_95", "cte_99", "n"}));
    ASSERT_EQ(risk.rows.size(), 5u);
    const auto rj = json::parse(slurp(dir.path() / "run/table2.json"));
    for (std::size_t i = 0; i < risk.rows.size(); ++i) {
        const auto& row = risk.rows[i];
        const auto& jr = rj["rows"][i];
        EXPECT_EQ(row.coverage, jr["coverage"].get<std::string>());
        EXPECT_EQ(row.n, jr["n"].get<std::size_t>());
        const char* pct[] = {"90", "95", "99"};
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_EQ(*row.var[j], jr["var"][pct[j]].get<double>());
            EXPECT_EQ(*row.cte[j], jr["cte"][pct[j]].get<double>());
        }
    }
}

TEST(Cli, RiskCsvMarksEmptyCoverage) {
    TempDir dir;
    spit(dir / "policies.csv", std::string(kPoliciesHeader) + "\nP1,30,M,SEDAN,2,5,10\n");
    spit(dir / "claims.csv", std::string(kClaimsHeader) + "\nE1,P1,TPI,100\n");
    ASSERT_EQ(invoke({"risk-report", "--policies", dir / "policies.csv", "--claims",
                      dir / "claims.csv", "--draws", "1000", "--out", dir / "out"})
                  .code,
              kExitOk);
    const auto text = slurp(dir.path() / "out/table2.csv");
    EXPECT_NE(text.find("Own damage,n=0"), std::string::npos) << text;
    const auto parsed = parse_risk_csv(text);
    EXPECT_EQ(parsed.rows[1].n, 0u);
    EXPECT_FALSE(parsed.rows[1].var[0]);
    EXPECT_EQ(parsed.rows[0].var[2], 100.0);
}

TEST(Cli, BundleAdvisePrintsGuidance) {
    const auto r = invoke({"bundle-advise", "--components", "300,500,200", "--bundle", "1100",
                           "--value-add-ref", "150"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["recommendation"], "BundleViableIfValueCommunicated");
    EXPECT_EQ(j["max_recommended_bundle_price"], 1150.0);

    const auto viable = json::parse(
        invoke({"bundle-advise", "--components", "300,500,200", "--bundle", "1000"}).out);
    EXPECT_EQ(viable["recommendation"], "BundleViable");

    EXPECT_EQ(invoke({"bundle-advise", "--components", "300,500", "--bundle", "1000"}).code,
              kExitValidation);
}

TEST(Cli, QuotaShareSummary) {
    TempDir dir;
    ASSERT_EQ(invoke({"quota-share", "--seed", "2", "--policyholders", "2000", "--quotas", "1,0.25",
                      "--out", dir / "q"})
                  .code,
              kExitOk);
    const auto text = slurp(dir.path() / "q/summary.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "quota,mean,variance,var95,cte95");
    EXPECT_TRUE(fs::exists(dir.path() / "q/density_q0.25.csv"));
    EXPECT_EQ(invoke({"quota-share", "--quotas", "0,1", "--out", dir / "bad"}).code, kExitValidation);
}

TEST(Cli, FitSeverityFamilies) {
    TempDir dir;
    ASSERT_EQ(invoke({"fit-severity", "--seed", "2", "--policyholders", "2000", "--family", "gamma",
                      "--out", dir / "s"})
                  .code,
              kExitOk);
    const auto fits = json::parse(slurp(dir.path() / "s/fits.json"));
    EXPECT_FALSE(fits.dump().empty());
    EXPECT_NE(fits.dump().find("\"gamma\""), std::string::npos);
    const auto density = slurp(dir.path() / "s/density_TPI.csv");
    EXPECT_EQ(density.substr(0, density.find('\n')), "x,density");
}

TEST(Emit, PercentToken) {
    EXPECT_EQ(percent_token(0.95), "95");
    EXPECT_EQ(percent_token(0.9), "90");
    EXPECT_EQ(percent_token(0.995), "99.5");
}

TEST(OutputSet, CommitWritesEveryFile) {
    TempDir dir;
    OutputSet out(dir.path() / "o");
    out.add("a.txt", "alpha");
    out.add("sub/b.txt", "beta");
    EXPECT_FALSE(fs::exists(dir.path() / "o" / "a.txt"));
    out.commit();
    EXPECT_EQ(slurp(dir.path() / "o/a.txt"), "alpha");
    EXPECT_EQ(slurp(dir.path() / "o/sub/b.txt"), "beta");
}

}  // namespace
}  // namespace qsr::cli

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/output.hpp"
#include "oracles.hpp"

using namespace darboux;
using namespace darboux::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = DARBOUX_CONFIG_DIR;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome darboux_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "darboux");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "darboux_cli_tests" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

fs::path write_config(const std::string& name, const Json& j) {
    const fs::path dir = scratch("configs_" + name);
    fs::create_directories(dir);
    const fs::path p = dir / (name + ".json");
    std::ofstream(p) << j.dump(2);
    return p;
}

Json config(const std::string& name) { return read_json(kConfigs / (name + ".json")); }

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    double at(std::size_t r, std::size_t c) const { return std::stod(rows[r][c]); }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

Csv read_csv(const fs::path& p) {
    std::istringstream in(slurp(p));
    Csv csv;
    std::string line;
    std::getline(in, line);
    csv.header = split(line);
    while (std::getline(in, line)) csv.rows.push_back(split(line));
    return csv;
}

std::vector<std::string> header(std::initializer_list<const char*> names) { return {names.begin(), names.end()}; }

}  // namespace

TEST(NumberFormat, ShortestRoundTrip) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double v = std::ldexp(mantissa(rng), exponent(rng));
        const std::string s = format_number(v);
        EXPECT_EQ(std::stod(s), v) << s;
        EXPECT_LE(s.size(), 24u);
    }
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.2), "0.2");
    EXPECT_EQ(format_number(30.0), "30");
}

TEST(Cli, TransformHermiteMatchesClosedForms) {
    const fs::path out = scratch("hermite");
    const Outcome r = darboux_cli({"transform", "--config", (kConfigs / "hermite.json").string(), "--out", out.string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;

    const Csv R0 = read_csv(out / "R0.csv");
    EXPECT_EQ(R0.header, header({"x", "R0"}));
    ASSERT_EQ(R0.rows.size(), 2001u);
    for (std::size_t i = 0; i < R0.rows.size(); ++i) {
        const double x = R0.at(i, 0);
        EXPECT_NEAR(R0.at(i, 1), std::exp(x * x), 1e-9 * std::exp(x * x)) << x;
    }
    const Csv z = read_csv(out / "zmap.csv");
    EXPECT_EQ(z.header, header({"x", "z"}));
    for (std::size_t i = 0; i < z.rows.size(); i += 10) EXPECT_NEAR(z.at(i, 1), oracle::erfi_integral(z.at(i, 0)), 1e-8);
    EXPECT_EQ(read_csv(out / "V1.csv").header, header({"z", "V1"}));
}

TEST(Cli, TransformBesselGivesLogMap) {
    const fs::path out = scratch("bessel");
    ASSERT_EQ(darboux_cli({"transform", "--config", (kConfigs / "bessel.json").string(), "--out", out.string()}).code,
              kSuccess);
    const Csv z = read_csv(out / "zmap.csv");
    for (std::size_t i = 0; i < z.rows.size(); ++i) EXPECT_NEAR(z.at(i, 1), std::log(z.at(i, 0)), 1e-9);
}

TEST(Cli, TransformFreeParticleHasZeroPotential) {
    const fs::path out = scratch("free_transform");
    ASSERT_EQ(darboux_cli({"transform", "--config", (kConfigs / "free.json").string(), "--out", out.string()}).code,
              kSuccess);
    const Csv v = read_csv(out / "V1.csv");
    for (std::size_t i = 0; i < v.rows.size(); ++i) EXPECT_EQ(v.rows[i][1], "0");
}

TEST(Cli, FamilyFreeParticleClosedForm) {
    const fs::path out = scratch("free_family");
    const Outcome r = darboux_cli({"family", "--config", (kConfigs / "free.json").string(), "--out", out.string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;

    const Csv psi = read_csv(out / "psi_lambda_1.csv");
    EXPECT_EQ(psi.header, header({"z", "psi_lambda"}));
    for (std::size_t i = 0; i < psi.rows.size(); ++i)
        EXPECT_NEAR(psi.at(i, 1), 1.0 / (psi.at(i, 0) + 1.0), 1e-8);
    const Csv v = read_csv(out / "V1_lambda_1.csv");
    for (std::size_t i = 0; i < v.rows.size(); ++i) {
        const double s = v.at(i, 0) + 1.0;
        EXPECT_NEAR(v.at(i, 1), 2.0 / (s * s), 1e-8);
    }
    EXPECT_TRUE(fs::exists(out / "psi.csv"));
    EXPECT_TRUE(fs::exists(out / "I.csv"));
    EXPECT_TRUE(fs::exists(out / "psi_lambda_3.csv"));
}

TEST(Cli, ManifestListsEveryFileWithChecksum) {
    const fs::path out = scratch("manifest");
    ASSERT_EQ(darboux_cli({"family", "--config", (kConfigs / "free.json").string(), "--out", out.string()}).code,
              kSuccess);
    const Json report = read_json(out / "report.json");
    std::size_t listed = 0;
    for (const Json& f : report["files"]) {
        const fs::path p = out / f["name"].get<std::string>();
        ASSERT_TRUE(fs::exists(p)) << p;
        EXPECT_EQ(f["sha256"], sha256_hex(slurp(p)));
        if (p.extension() == ".csv") EXPECT_EQ(f["rows"].get<std::size_t>(), read_csv(p).rows.size());
        ++listed;
    }
    // everything but the report itself
    std::size_t on_disk = 0;
    for (const auto& e : fs::directory_iterator(out)) on_disk += e.path().filename() != "report.json";
    EXPECT_EQ(listed, on_disk);

    const std::vector<std::string> keys{"command", "status", "config", "gauge", "zero_mode", "lambdas", "files"};
    std::vector<std::string> got;
    for (const auto& [k, _] : report.items()) got.push_back(k);
    EXPECT_EQ(got, keys);
    EXPECT_EQ(report["gauge"]["integral_base"], 0.0);
    EXPECT_EQ(report["zero_mode"]["admissible_lambda"][0][0], "-inf");
    EXPECT_EQ(report["zero_mode"]["admissible_lambda"][1][1], "inf");
}

TEST(Cli, InadmissibleLambdaGetsReportEntryOnly) {
    // I(z) = z on [0, 2] so lambda = -1 makes I + lambda vanish at z = 1
    Json j = config("free");
    j["lambdas"] = {-1.0, 1.0};
    const fs::path out = scratch("mixed");
    const Outcome r = darboux_cli({"family", "--config", write_config("mixed", j).string(), "--out", out.string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    EXPECT_FALSE(fs::exists(out / "psi_lambda_-1.csv"));
    EXPECT_TRUE(fs::exists(out / "psi_lambda_1.csv"));
    const Json report = read_json(out / "report.json");
    EXPECT_FALSE(report["lambdas"][0]["admissible"].get<bool>());
    EXPECT_TRUE(report["lambdas"][1]["admissible"].get<bool>());

    j["lambdas"] = {-1.0};
    const Outcome none = darboux_cli({"family", "--config", write_config("none", j).string(), "--out", out.string()});
    EXPECT_EQ(none.code, kValidationFailure);
}

TEST(Cli, ValidateFreeParticlePassesAtTightTolerance) {
    const fs::path out = scratch("free_validate");
    const Outcome r = darboux_cli({"validate", "--config", (kConfigs / "free.json").string(), "--out", out.string()});
    ASSERT_EQ(r.code, kSuccess) << r.err;
    const Json report = read_json(out / "report.json");
    EXPECT_EQ(report["status"], "ok");
    for (const Json& c : report["checks"]) {
        EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
        if (c.contains("max")) EXPECT_LE(c["value"].get<double>(), 1e-8) << c.dump();
    }
}

TEST(Cli, ValidateShippedConfigs) {
    for (const char* name : {"hermite", "bessel"}) {
        const fs::path out = scratch(std::string("validate_") + name);
        const Outcome r =
            darboux_cli({"validate", "--config", (kConfigs / (std::string(name) + ".json")).string(), "--out", out.string()});
        EXPECT_EQ(r.code, kSuccess) << name << "\n" << r.err;
        bool pullback = false;
        const Json report = read_json(out / "report.json");
        for (const Json& c : report["checks"])
            pullback = pullback || c["name"].get<std::string>().starts_with("pullback[lambda=");
        EXPECT_TRUE(pullback) << name;
    }
}

TEST(Cli, ValidateRejectsLambdaOnTheIntegralRange) {
    Json j = config("free");
    j["lambdas"] = {-1.0};
    const fs::path out = scratch("inadmissible");
    const Outcome r = darboux_cli({"validate", "--config", write_config("inadmissible", j).string(), "--out", out.string()});
    EXPECT_EQ(r.code, kValidationFailure);
    EXPECT_NE(r.err.find("worst offender admissible[lambda=-1]"), std::string::npos) << r.err;
    EXPECT_EQ(read_json(out / "report.json")["worst"], "admissible[lambda=-1]");
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(darboux_cli({}).code, kConfigError);
    EXPECT_EQ(darboux_cli({"bogus"}).code, kConfigError);
    EXPECT_EQ(darboux_cli({"transform"}).code, kConfigError);
    EXPECT_EQ(darboux_cli({"transform", "--config", "/nonexistent.json"}).code, kConfigError);
    EXPECT_EQ(darboux_cli({"reproduce", "fig3"}).code, kConfigError);
    EXPECT_EQ(darboux_cli({"--help"}).code, kSuccess);

    const fs::path out = scratch("exit_codes");
    auto code_for = [&](const std::string& name, const Json& j) {
        return darboux_cli({"transform", "--config", write_config(name, j).string(), "--out", out.string()});
    };
    Json unknown = config("free");
    unknown["problem"]["D"] = "1";
    const Outcome r = code_for("unknown", unknown);
    EXPECT_EQ(r.code, kConfigError);
    EXPECT_NE(r.err.find("/problem/D"), std::string::npos) << r.err;

    Json bad_expr = config("free");
    bad_expr["problem"]["C"] = "2*(x";
    EXPECT_EQ(code_for("bad_expr", bad_expr).code, kConfigError);

    Json singular = config("free");
    singular["problem"]["A"] = "x - 1";
    EXPECT_EQ(code_for("singular", singular).code, kConfigError);

    Json both = config("free");
    both["problem"]["V1"] = "0";
    EXPECT_EQ(code_for("both", both).code, kConfigError);

    Json small = config("free");
    small["grid_size"] = 10;
    EXPECT_EQ(code_for("small", small).code, kConfigError);
    EXPECT_EQ(darboux_cli({"transform", "--config", (kConfigs / "free.json").string(), "--grid", "5"}).code,
              kConfigError);

    // Numerov with h sqrt(V) = 50 overflows and leaves nothing to integrate
    const Json stiff = {{"problem", {{"V1", "1e6"}, {"z_domain", {0, 100}}}},
                        {"zero_mode", {{"anchor", 0}, {"psi0", 1}, {"dpsi0", 1}}},
                        {"lambdas", {1}}};
    EXPECT_EQ(darboux_cli({"family", "--config", write_config("stiff", stiff).string(), "--out", out.string()}).code,
              kNumericalFailure);
}

TEST(Cli, OverridesReachTheResolvedConfig) {
    const fs::path out = scratch("overrides");
    ASSERT_EQ(darboux_cli({"transform", "--config", (kConfigs / "free.json").string(), "--out", out.string(), "--grid",
                           "201", "--tol", "1e-11"})
                  .code,
              kSuccess);
    const Json c = read_json(out / "resolved_config.json");
    EXPECT_EQ(c["grid_size"], 201);
    EXPECT_EQ(c["tolerances"]["quadrature"], 1e-11);
    EXPECT_EQ(c["outputs"]["directory"], out.string());
    EXPECT_EQ(read_csv(out / "V1.csv").rows.size(), 201u);
}

TEST(Cli, ResolvedConfigRerunsByteIdentically) {
    for (const char* name : {"hermite", "bessel"}) {
        const fs::path first = scratch(std::string("round_trip_a_") + name);
        const fs::path second = scratch(std::string("round_trip_b_") + name);
        ASSERT_EQ(darboux_cli({"family", "--config", (kConfigs / (std::string(name) + ".json")).string(), "--out",
                               first.string()})
                      .code,
                  kSuccess);
        Json resolved = read_json(first / "resolved_config.json");
        EXPECT_EQ(to_json(parse_config(resolved)), resolved) << "resolving is idempotent";
        ASSERT_EQ(darboux_cli({"family", "--config", (first / "resolved_config.json").string(), "--out",
                               second.string()})
                      .code,
                  kSuccess);
        for (const auto& e : fs::directory_iterator(first)) {
            if (e.path().extension() != ".csv") continue;
            EXPECT_EQ(slurp(e.path()), slurp(second / e.path().filename())) << e.path();
        }
    }
}

TEST(Cli, ShippedFigureConfigsMatchEmbedded) {
    for (const char* fig : {"fig1", "fig2"})
        EXPECT_EQ(to_json(parse_config(config(fig))), to_json(parse_config(figure_config(fig)))) << fig;
}

TEST(Cli, ReproduceFigureOneSurface) {
    const fs::path out = scratch("fig1");
    const Outcome r = darboux_cli({"reproduce", "fig1", "--out", out.string()});
    EXPECT_EQ(r.code, kSuccess) << r.err;
    const Csv csv = read_csv(out / "fig1.csv");
    EXPECT_EQ(csv.header, header({"z", "lambda", "V1_lambda", "psi_lambda"}));
    ASSERT_EQ(csv.rows.size(), 2001u * 30u);
    EXPECT_EQ(csv.at(0, 0), 0.05);
    EXPECT_EQ(csv.at(0, 1), 1.0);
    EXPECT_EQ(csv.at(csv.rows.size() - 1, 0), 4.0);
    EXPECT_EQ(csv.at(csv.rows.size() - 1, 1), 30.0);
}

TEST(Cli, ReproduceIsByteDeterministic) {
    for (const char* fig : {"fig1", "fig2"}) {
        const fs::path a = scratch(std::string(fig) + "_a");
        const fs::path b = scratch(std::string(fig) + "_b");
        const int ca = darboux_cli({"reproduce", fig, "--out", a.string()}).code;
        const int cb = darboux_cli({"reproduce", fig, "--out", b.string()}).code;
        EXPECT_EQ(ca, cb);
        const std::string csv = std::string(fig) + ".csv";
        EXPECT_EQ(slurp(a / csv), slurp(b / csv)) << fig;
        EXPECT_EQ(slurp(a / csv).find('\r'), std::string::npos);
    }
}

TEST(Cli, ReproduceFigureTwoCurves) {
    const fs::path out = scratch("fig2");
    const Outcome r = darboux_cli({"reproduce", "fig2", "--out", out.string()});
    // the exit code reflects the divergence check; the data is written either way
    EXPECT_TRUE(r.code == kSuccess || r.code == kValidationFailure) << r.err;
    const Csv csv = read_csv(out / "fig2.csv");
    EXPECT_EQ(csv.header, header({"z", "V1_lambda", "psi_lambda"}));
    EXPECT_EQ(csv.rows.size(), 2001u);
    const Json report = read_json(out / "report.json");
    EXPECT_EQ(report["checks"].size(), 2u);
    EXPECT_EQ(report["status"] == "ok", r.code == kSuccess);
}

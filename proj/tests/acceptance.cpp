// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/output.hpp"
#include "darboux/specials.hpp"
#include "darboux/susy.hpp"
#include "darboux/transform.hpp"
#include "oracles.hpp"

using namespace darboux;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = DARBOUX_CONFIG_DIR;

struct Criterion {
    bool pass = true;
    std::string detail;

    // records value against an upper limit
    void at_most(const std::string& what, double value, double limit) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s %.3g <= %.0e", detail.empty() ? "" : "; ", what.c_str(), value, limit);
        detail += buf;
        pass = pass && std::isfinite(value) && value <= limit;
    }
    void require(const std::string& what, bool ok) {
        detail += (detail.empty() ? "" : "; ") + what + (ok ? " yes" : " NO");
        pass = pass && ok;
    }
};

cli::RunConfig load(const std::string& name) { return cli::load_config((kConfigs / (name + ".json")).string()); }

ProblemSpec spec(const std::string& name) { return cli::to_problem_spec(load(name)); }

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

ZeroMode shipped_zero_mode(const cli::RunConfig& c, const SampledFunction& V1) {
    const InitialData ic = cli::resolve_zero_mode(*c.zero_mode);
    return solve_zero_mode(V1, ic.anchor, ic.psi, ic.dpsi, std::nullopt, c.tolerances.quadrature);
}

SampledFunction constant(double v, double a, double b, Index n) {
    return SampledFunction(Grid::uniform(a, b, n), Eigen::VectorXd::Constant(n, v));
}

Criterion gauge_zeroing() {
    Criterion c;
    for (const char* name : {"hermite", "bessel"}) {
        const ProblemSpec p = spec(name);
        const GaugeFactor R0(p);
        const GeneralRiccati r = riccati_coefficients(p, [&](double x) { return R0(x); });
        c.at_most(name, max_abs(r.linear_coeff.values()), 1e-9);
    }
    return c;
}

Criterion transform_oracles() {
    Criterion c;
    const TransformResult h = compute_transform(spec("hermite"));
    double r0 = 0.0, zmap = 0.0;
    const Grid& xg = h.R0->grid();
    for (Index i = 0; i < xg.size(); ++i) {
        const double x = xg[i];
        r0 = std::max(r0, std::abs((*h.R0)[i] / std::exp(x * x) - 1.0));
        zmap = std::max(zmap, std::abs((*h.zmap)[i] - oracle::erfi_integral(x)));
    }
    c.at_most("hermite R0 rel", r0, 1e-9);
    c.at_most("hermite z-map vs erfi series", zmap, 1e-8);

    const TransformResult b = compute_transform(spec("bessel"));
    double ln = 0.0;
    for (Index i = 0; i < b.zmap->size(); ++i) ln = std::max(ln, std::abs((*b.zmap)[i] - std::log(b.zmap->grid()[i])));
    c.at_most("bessel z-map vs ln x", ln, 1e-9);
    return c;
}

Criterion equivalence() {
    Criterion c;
    const ProblemSpec p = spec("bessel");
    const TransformResult t = compute_transform(p);
    // x0 = 1 maps to z = 0 with R0 = 1, so psi and u share their data there
    const double u0 = oracle::bessel_jn(0, 1.0);
    const double du0 = -oracle::bessel_jn(1, 1.0);
    const ZeroMode m = solve_zero_mode(t.V1, 0.0, u0, du0);
    c.at_most("bessel x-side vs z-side rel", compare_axes(p, t, m.psi, 1.0, u0, du0).relative(), 1e-6);
    return c;
}

Criterion riccati() {
    Criterion c;
    for (const char* name : {"hermite", "bessel", "free", "fig1", "fig2"}) {
        const cli::RunConfig cfg = load(name);
        const TransformResult t = compute_transform(cli::to_problem_spec(cfg));
        const ZeroMode m = shipped_zero_mode(cfg, t.V1);
        const double h = m.grid().step();
        c.at_most(name, riccati_residual(t.V1, m, riccati_clearance(h)).max, 1e-5);
    }
    return c;
}

Criterion darboux_identities() {
    Criterion c;
    {
        const SampledFunction V = constant(0.0, 0.0, 4.0, 2001);
        const ZeroMode m = solve_zero_mode(V, 0.0, 0.0, 1.0);
        const SampledFunction V2 = darboux_partner(V, m);
        double err = 0.0;
        for (Index i = 0; i < V2.size(); ++i) {
            const double z = V2.grid()[i];
            if (z >= 0.5 && !V2.excluded(i)) err = std::max(err, std::abs(V2[i] - 2.0 / (z * z)));
        }
        c.at_most("psi = z gives 2/z^2", err, 1e-8);
    }
    {
        const SampledFunction V = constant(1.0, -4.0, 4.0, 2001);
        const ZeroMode m = solve_zero_mode(V, 0.0, 1.0, 0.0);
        const SampledFunction V2 = darboux_partner(V, m);
        double err = 0.0;
        for (Index i = 0; i < V2.size(); ++i) {
            const double s = 1.0 / std::cosh(V2.grid()[i]);
            err = std::max(err, std::abs(V2[i] - (1.0 - 2.0 * s * s)));
        }
        c.at_most("cosh gives 1 - 2 sech^2", err, 1e-7);
    }
    double fd = 0.0;
    for (const char* name : {"bessel", "fig1", "fig2"}) {
        const cli::RunConfig cfg = load(name);
        const TransformResult t = compute_transform(cli::to_problem_spec(cfg));
        const ZeroMode m = shipped_zero_mode(cfg, t.V1);
        fd = std::max(fd, darboux_cross_check(t.V1, m, kCrossCheckClearanceSteps * m.grid().step()).max);
    }
    c.at_most("algebraic vs finite differences", fd, 1e-5);
    return c;
}

Criterion mielnik_family() {
    Criterion c;
    {
        const SampledFunction V = constant(0.0, 0.0, 5.0, 2001);
        const ZeroMode m = solve_zero_mode(V, 0.0, 1.0, 0.0);
        const FamilyMember fm = family_member(V, m, 1.0);
        double psi = 0.0, pot = 0.0;
        for (Index i = 0; i < fm.psi_lambda.size(); ++i) {
            const double s = m.grid()[i] + 1.0;
            psi = std::max(psi, std::abs(fm.psi_lambda[i] - 1.0 / s));
            pot = std::max(pot, std::abs(fm.V1_lambda[i] - 2.0 / (s * s)));
        }
        c.at_most("1/(z+1)", psi, 1e-8);
        c.at_most("2/(z+1)^2", pot, 1e-8);
    }
    double identity = 0.0, iso = 0.0;
    for (const char* name : {"fig1", "fig2"}) {
        const cli::RunConfig cfg = load(name);
        const TransformResult t = compute_transform(cli::to_problem_spec(cfg));
        const ZeroMode m = shipped_zero_mode(cfg, t.V1);
        for (double lambda : {0.2, 1.0, 5.0, 30.0}) {
            const FamilyMember fm = family_member(t.V1, m, lambda);
            identity = std::max(identity, family_identity_error(m, fm));
            iso = std::max(iso, verify_isospectral(t.V1, fm).max);
        }
    }
    c.at_most("psi_l (I + l) = psi", identity, 1e-12);
    c.at_most("isospectral on -z^2", iso, 1e-5);
    return c;
}

Criterion special_functions() {
    namespace sp = special;
    Criterion c;
    double half = 0.0;
    for (double w = 0.1; w <= 20.0; w += 0.0173) {
        half = std::max(half, std::abs(sp::bessel_j(0.5, w) - oracle::j_half(w)));
        half = std::max(half, std::abs(sp::bessel_y(0.5, w) - oracle::y_half(w)));
    }
    c.at_most("half-order closed forms", half, 1e-12);

    auto J = [](double t) { return sp::bessel_j(0.25, t); };
    auto Y = [](double t) { return sp::bessel_y(0.25, t); };
    double wr = 0.0;
    for (double w = 0.3; w <= 10.0; w += 0.0497) {
        const double W = J(w) * oracle::d1(Y, w, 1e-3) - Y(w) * oracle::d1(J, w, 1e-3);
        wr = std::max(wr, std::abs(W - 2.0 / (std::numbers::pi * w)));
    }
    c.at_most("quarter-order Wronskian", wr, 1e-8);

    double ode = 0.0;
    for (double c2 : {0.0, 1.0}) {
        auto f = [&](double z) { return sp::quarter_bessel_mode(z, 1.0 - c2, c2); };
        double res = 0.0, scale = 0.0;
        for (double z = 0.2; z <= 3.0; z += 0.0137) {
            const double d2 = oracle::d2(f, z, 1e-3);
            res = std::max(res, std::abs(d2 + z * z * f(z)));
            scale = std::max(scale, std::abs(d2));
        }
        ode = std::max(ode, res / scale);
    }
    c.at_most("mode solves psi'' + z^2 psi = 0, rel", ode, 1e-7);
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Criterion figures() {
    Criterion c;
    const fs::path root = fs::temp_directory_path() / "darboux_acceptance";
    for (const char* fig : {"fig1", "fig2"}) {
        std::string bytes[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = root / (std::string(fig) + "_" + std::to_string(k));
            fs::remove_all(out);
            std::ostringstream sink;
            cli::run({"darboux", "reproduce", fig, "--out", out.string()}, sink, sink);
            bytes[k] = slurp(out / (std::string(fig) + ".csv"));
            if (k == 1) continue;
            const cli::Json report = cli::Json::parse(slurp(out / "report.json"));
            for (const cli::Json& check : report["checks"]) {
                const double v = check["value"].get<double>();
                char buf[64];
                std::snprintf(buf, sizeof buf, " (%.3g)", v);
                c.require(std::string(fig) + " " + check["name"].get<std::string>() + buf, check["pass"].get<bool>());
            }
        }
        c.require(std::string(fig) + " byte-deterministic", !bytes[0].empty() && bytes[0] == bytes[1]);
    }
    return c;
}

Criterion pullback() {
    Criterion c;
    const cli::RunConfig cfg = load("bessel");
    const TransformResult t = compute_transform(cli::to_problem_spec(cfg));
    const ZeroMode m = shipped_zero_mode(cfg, t.V1);
    for (double lambda : cfg.lambdas) {
        const FamilyMember fm = family_member(t.V1, m, lambda);
        const Pullback pb = pullback_residual(t, fm.psi_lambda, fm.V1_lambda);
        c.at_most("lambda = " + cli::format_number(lambda) + " rel to max|u''| on [0.5, 4]", pb.relative_max(0.5, 4.0),
                  1e-5);
    }
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Criterion()>>> criteria{
        {"gauge zeroing", gauge_zeroing},
        {"transform oracles", transform_oracles},
        {"equivalence oracle", equivalence},
        {"Riccati residual", riccati},
        {"Darboux identities", darboux_identities},
        {"Mielnik family", mielnik_family},
        {"special functions", special_functions},
        {"figure reproduction", figures},
        {"pullback", pullback},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Criterion c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("threw: ") + e.what();
        }
        failed += !c.pass;
        std::printf("%s %zu %s: %s\n", c.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail.c_str());
    }
    return failed ? 1 : 0;
}

#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "CLI11.hpp"

#include "cli/output.hpp"
#include "darboux/susy.hpp"
#include "darboux/transform.hpp"

namespace darboux::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Json number_or_infinity(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

struct Check {
    std::string name;
    double value;
    double limit;
    bool pass;
    bool upper = true;  // value <= limit when true, value > limit otherwise
};

Check at_most(std::string name, double value, double limit) {
    return {std::move(name), value, limit, std::isfinite(value) && value <= limit, true};
}

Json to_json(const Check& c) {
    return {{"name", c.name},
            {"value", number_or_infinity(c.value)},
            {c.upper ? "max" : "min", c.limit},
            {"pass", c.pass}};
}

struct Pipeline {
    ProblemSpec spec;
    TransformResult t;
};

Pipeline build(const RunConfig& c) {
    ProblemSpec spec = to_problem_spec(c);
    TransformResult t = compute_transform(spec);
    Pipeline p{std::move(spec), std::move(t)};
    const Problem& pr = c.problem;
    if (pr.direct && pr.pullback) {
        Expr z_of_x;
        try {
            z_of_x = parse(pr.pullback->z_of_x, "x", pr.constants);
        } catch (const ParseError& e) {
            throw ConfigError("/problem/pullback/z_of_x", e.what());
        }
        p.t = with_pullback(std::move(p.t), z_of_x, pr.pullback->x_min, pr.pullback->x_max, c.grid_size);
    }
    return p;
}

ZeroMode zero_mode(const RunConfig& c, const Pipeline& p) {
    if (!c.zero_mode) throw ConfigError("/zero_mode", "this command needs a zero mode");
    const InitialData ic = resolve_zero_mode(*c.zero_mode);
    if (ic.anchor < p.t.z_min || ic.anchor > p.t.z_max)
        throw ConfigError("/zero_mode/anchor", "outside the z-domain [" + format_number(p.t.z_min) + ", " +
                                                   format_number(p.t.z_max) + "]");
    return solve_zero_mode(p.t.V1, ic.anchor, ic.psi, ic.dpsi, std::nullopt, c.tolerances.quadrature);
}

Json gauge_json(const RunConfig& c, const Pipeline& p, const ZeroMode* m) {
    Json g;
    if (c.problem.direct)
        g["base_point"] = nullptr;
    else
        g["base_point"] = p.spec.base_point;
    g["z_domain"] = {p.t.z_min, p.t.z_max};
    if (m) g["integral_base"] = m->integral_base;
    return g;
}

Json zero_mode_json(const ZeroMode& m) {
    Json intervals = Json::array();
    for (const Interval& iv : admissible_lambda(m))
        intervals.push_back({number_or_infinity(iv.lo), number_or_infinity(iv.hi)});
    Json branches = Json::array();
    for (const Interval& b : branch_split(m)) branches.push_back({b.lo, b.hi});
    return {{"anchor", m.ic.anchor},
            {"psi0", m.ic.psi},
            {"dpsi0", m.ic.dpsi},
            {"truncated", m.truncated},
            {"z_domain", {m.grid().front(), m.grid().back()}},
            {"I_range", {m.I_min(), m.I_max()}},
            {"admissibility_margin", admissibility_margin(m)},
            {"admissible_lambda", intervals},
            {"nodes", m.nodes},
            {"branches", branches}};
}

Json manifest_json(const OutputDirectory& out) {
    Json files = Json::array();
    for (const FileEntry& f : out.manifest())
        files.push_back({{"name", f.name}, {"rows", f.rows}, {"sha256", f.sha256}});
    return files;
}

// resolved_config.json reruns the command with every default made explicit
void finish(OutputDirectory& out, Json report) {
    out.write_json("resolved_config.json", report["config"]);
    report["files"] = manifest_json(out);
    out.write_json("report.json", report);
}

Json begin_report(const std::string& command, const RunConfig& c) {
    Json r;
    r["command"] = command;
    r["status"] = "ok";
    r["config"] = to_json(c);
    return r;
}

void write_transform(OutputDirectory& out, const TransformResult& t) {
    if (t.has_x_side()) {
        out.write_csv("R0.csv", two_columns("x", "R0", *t.R0));
        out.write_csv("zmap.csv", two_columns("x", "z", *t.zmap));
    }
    out.write_csv("V1.csv", two_columns("z", "V1", t.V1));
}

std::string lambda_file(const std::string& stem, double lambda) {
    return stem + "_" + format_number(lambda) + ".csv";
}

double sup_difference(const SampledFunction& a, const SampledFunction& b) {
    double d = 0.0;
    for (Index i = 0; i < a.size(); ++i)
        if (!a.excluded(i) && !b.excluded(i)) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double gauge_zeroing(const Pipeline& p) {
    const GaugeFactor R0(p.spec);
    const GeneralRiccati r = riccati_coefficients(p.spec, [&](double x) { return R0(x); });
    return r.linear_coeff.values().cwiseAbs().maxCoeff();
}

double round_trip(const TransformResult& t) {
    double worst = 0.0;
    const Grid& g = t.zmap->grid();
    for (Index i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs((*t.inverse_zmap)((*t.zmap)[i]) - g[i]) / (1.0 + std::abs(g[i])));
    return worst;
}

// by default the two samples at each end are left out: their difference
// stencils are only second order
std::pair<double, double> window(const RunConfig& c, const TransformResult& t) {
    if (c.pullback_window) return *c.pullback_window;
    const Grid& g = t.zmap->grid();
    return {g[2], g[g.size() - 3]};
}

std::string lambda_tag(const std::string& name, double lambda) {
    return name + "[lambda=" + format_number(lambda) + "]";
}

}  // namespace

RunConfig apply(RunConfig c, const Overrides& o) {
    if (o.out) c.output_directory = *o.out;
    if (o.tol) {
        if (!(*o.tol > 0.0) || !std::isfinite(*o.tol)) throw ConfigError("--tol", "must be positive");
        c.tolerances.quadrature = *o.tol;
    }
    if (o.grid) {
        if (*o.grid < 101) throw ConfigError("--grid", "must be at least 101");
        c.grid_size = *o.grid;
    }
    return c;
}

int cmd_transform(const RunConfig& c, std::ostream& log) {
    const Pipeline p = build(c);
    OutputDirectory out(c.output_directory);
    write_transform(out, p.t);
    Json report = begin_report("transform", c);
    report["gauge"] = gauge_json(c, p, nullptr);
    finish(out, std::move(report));
    log << "wrote " << out.manifest().size() << " files to " << out.path().string() << "\n";
    return kSuccess;
}

int cmd_family(const RunConfig& c, std::ostream& log) {
    const Pipeline p = build(c);
    const ZeroMode m = zero_mode(c, p);
    OutputDirectory out(c.output_directory);
    out.write_csv("psi.csv", two_columns("z", "psi", m.psi));
    out.write_csv("I.csv", two_columns("z", "I", m.I));

    Json members = Json::array();
    std::size_t admitted = 0;
    for (double lambda : c.lambdas) {
        Json entry{{"lambda", lambda}};
        if (!is_admissible(m, lambda)) {
            entry["admissible"] = false;
            entry["reason"] = "I(z) + lambda comes within the admissibility margin of zero";
            log << "lambda = " << format_number(lambda) << " is not admissible; no files written\n";
            members.push_back(entry);
            continue;
        }
        ++admitted;
        const FamilyMember fm = family_member(p.t.V1, m, lambda);
        const std::string vname = lambda_file("V1_lambda", lambda);
        const std::string pname = lambda_file("psi_lambda", lambda);
        out.write_csv(vname, two_columns("z", "V1_lambda", fm.V1_lambda));
        out.write_csv(pname, two_columns("z", "psi_lambda", fm.psi_lambda));
        entry["admissible"] = true;
        entry["files"] = {vname, pname};
        members.push_back(entry);
    }

    const bool failed = !c.lambdas.empty() && admitted == 0;
    Json report = begin_report("family", c);
    if (failed) report["status"] = "no admissible lambda";
    report["gauge"] = gauge_json(c, p, &m);
    report["zero_mode"] = zero_mode_json(m);
    report["lambdas"] = members;
    finish(out, std::move(report));
    if (failed) {
        log << "error: none of the requested lambdas is admissible\n";
        return kValidationFailure;
    }
    return kSuccess;
}

int cmd_validate(const RunConfig& c, std::ostream& log) {
    const Pipeline p = build(c);
    const Tolerances& tol = c.tolerances;
    std::vector<Check> checks;

    if (!c.problem.direct) {
        checks.push_back(at_most("gauge_zeroing", gauge_zeroing(p), tol.gauge));
        const bool monotone = p.t.zmap->strictly_increasing();
        checks.push_back({"zmap_monotone", monotone ? 1.0 : 0.0, 0.0, monotone, false});
    }
    if (p.t.has_x_side()) checks.push_back(at_most("zmap_round_trip", round_trip(p.t), tol.round_trip));

    std::optional<ZeroMode> m;
    if (c.zero_mode) {
        m = zero_mode(c, p);
        const double h = m->grid().step();
        checks.push_back(at_most("zero_mode_residual", zero_mode_residual(p.t.V1, *m).max, tol.residual));
        checks.push_back(
            at_most("riccati_residual", riccati_residual(p.t.V1, *m, riccati_clearance(h, tol.residual)).max,
                    tol.residual));
        checks.push_back(at_most("darboux_cross_check",
                                 darboux_cross_check(p.t.V1, *m, kCrossCheckClearanceSteps * h).max, tol.residual));
        if (!c.problem.direct) {
            const InitialData& ic = m->ic;
            const double x_anchor = (*p.t.inverse_zmap)(ic.anchor);
            const double du0 = GaugeFactor(p.spec)(x_anchor) * ic.dpsi;
            checks.push_back(at_most("equivalence", compare_axes(p.spec, p.t, m->psi, x_anchor, ic.psi, du0).relative(),
                                     tol.equivalence));
        }
        if (p.t.has_x_side()) {
            const auto [lo, hi] = window(c, p.t);
            const darboux::Pullback pb = pullback_residual(p.t, m->psi, restrict_to(p.t.V1, *m));
            checks.push_back(at_most("pullback[zero_mode]", pb.term_relative_max(lo, hi), tol.residual));
        }
        for (double lambda : c.lambdas) {
            const FamilyMember fm = family_member(p.t.V1, *m, lambda);
            double closest = kInf;
            for (Index i = 0; i < m->I.size(); ++i) closest = std::min(closest, std::abs(m->I[i] + lambda));
            checks.push_back({lambda_tag("admissible", lambda), closest, admissibility_margin(*m), fm.admissible, false});
            if (!fm.admissible) continue;
            checks.push_back(at_most(lambda_tag("family_identity", lambda), family_identity_error(*m, fm), tol.identity));
            checks.push_back(at_most(lambda_tag("isospectral", lambda), verify_isospectral(p.t.V1, fm).max, tol.residual));
            checks.push_back(
                at_most(lambda_tag("family_cross_check", lambda), family_cross_check(p.t.V1, *m, fm).max, tol.residual));
            if (p.t.has_x_side()) {
                const auto [lo, hi] = window(c, p.t);
                const darboux::Pullback pb = pullback_residual(p.t, fm.psi_lambda, fm.V1_lambda);
                checks.push_back(at_most(lambda_tag("pullback", lambda), pb.term_relative_max(lo, hi), tol.residual));
            }
        }
    } else if (!c.lambdas.empty()) {
        throw ConfigError("/zero_mode", "lambdas given without a zero mode");
    }

    // the worst offender is the failed check furthest past its limit
    const Check* worst = nullptr;
    double worst_ratio = -kInf;
    Json list = Json::array();
    for (const Check& ch : checks) {
        list.push_back(to_json(ch));
        if (ch.pass) continue;
        const double ratio = ch.upper ? ch.value / ch.limit : ch.limit / std::max(ch.value, 1e-300);
        if (!worst || !(ratio <= worst_ratio)) {
            worst = &ch;
            worst_ratio = ratio;
        }
    }

    OutputDirectory out(c.output_directory);
    Json report = begin_report("validate", c);
    report["status"] = worst ? "failed" : "ok";
    report["gauge"] = gauge_json(c, p, m ? &*m : nullptr);
    if (m) report["zero_mode"] = zero_mode_json(*m);
    report["checks"] = list;
    if (worst) report["worst"] = worst->name;
    finish(out, std::move(report));

    for (const Check& ch : checks)
        log << (ch.pass ? "PASS " : "FAIL ") << ch.name << " = " << format_number(ch.value) << "\n";
    if (worst) {
        log << "error: validation failed; worst offender " << worst->name << "\n";
        return kValidationFailure;
    }
    return kSuccess;
}

Json figure_config(const std::string& figure) {
    Json lambdas = Json::array();
    double C1 = 0.0, C2 = 0.0;
    if (figure == "fig1") {
        for (int l = 1; l <= 30; ++l) lambdas.push_back(static_cast<double>(l));
        C2 = 1.0;
    } else if (figure == "fig2") {
        lambdas.push_back(0.2);
        C1 = 1.0;
    } else {
        throw ConfigError("figure", "unknown figure \"" + figure + "\"; expected fig1 or fig2");
    }
    return {{"problem", {{"V1", "-z^2"}, {"z_domain", {0.05, 4.0}}}},
            {"grid_size", 2001},
            {"zero_mode", {{"oracle", "paper_mode"}, {"C1", C1}, {"C2", C2}, {"anchor", 0.5}}},
            {"lambdas", lambdas},
            {"outputs", {{"directory", "out/" + figure}, {"formats", {"csv"}}}}};
}

int cmd_reproduce(const std::string& figure, const Overrides& o, std::ostream& log) {
    const RunConfig c = apply(parse_config(figure_config(figure)), o);
    const Pipeline p = build(c);
    const ZeroMode m = zero_mode(c, p);
    const SampledFunction& V = p.t.V1;
    OutputDirectory out(c.output_directory);
    std::vector<Check> checks;
    Json metrics;

    if (figure == "fig1") {
        const Index n = m.psi.size();
        const Index rows = n * static_cast<Index>(c.lambdas.size());
        Eigen::VectorXd z(rows), lam(rows), vl(rows), pl(rows);
        Index r = 0;
        for (double lambda : c.lambdas) {
            const FamilyMember fm = family_member(V, m, lambda);
            for (Index i = 0; i < n; ++i, ++r) {
                z[r] = m.grid()[i];
                lam[r] = lambda;
                vl[r] = fm.V1_lambda.excluded(i) ? std::nan("") : fm.V1_lambda[i];
                pl[r] = fm.psi_lambda.excluded(i) ? std::nan("") : fm.psi_lambda[i];
            }
        }
        out.write_csv("fig1.csv", {{"z", "lambda", "V1_lambda", "psi_lambda"}, {z, lam, vl, pl}});

        const SampledFunction base = restrict_to(V, m);
        auto sup = [&](double lambda) { return sup_difference(family_member(V, m, lambda).V1_lambda, base); };
        Json decades = Json::array();
        bool decreasing = true;
        double prev = kInf;
        for (double lambda : {1.0, 10.0, 100.0}) {
            const double d = sup(lambda);
            decades.push_back({{"lambda", lambda}, {"sup_deviation", d}});
            decreasing = decreasing && d < prev;
            prev = d;
        }
        metrics["flatness_by_decade"] = decades;
        checks.push_back({"flatness_decreasing_by_decade", decreasing ? 1.0 : 0.0, 0.0, decreasing, false});
        const double large = sup_difference(family_member(V, m, 25.0).V1_lambda, family_member(V, m, 30.0).V1_lambda);
        const double small = sup_difference(family_member(V, m, 1.0).V1_lambda, family_member(V, m, 2.0).V1_lambda);
        metrics["sup_difference_25_30"] = large;
        metrics["sup_difference_1_2"] = small;
        checks.push_back({"flat_at_large_lambda", large, small, large < small, true});
    } else {
        const double lambda = c.lambdas.front();
        const FamilyMember fm = family_member(V, m, lambda);
        Table t{{"z", "V1_lambda", "psi_lambda"},
                {m.grid().points(), two_columns("z", "V1_lambda", fm.V1_lambda).columns[1],
                 two_columns("z", "psi_lambda", fm.psi_lambda).columns[1]}};
        out.write_csv("fig2.csv", t);

        const double v_edge = std::abs(fm.V1_lambda[0]);
        const double psi_max = fm.psi_lambda.values().cwiseAbs().maxCoeff();
        metrics["V1_lambda_at_smallest_z"] = fm.V1_lambda[0];
        metrics["psi_lambda_at_smallest_z"] = fm.psi_lambda[0];
        metrics["psi_at_smallest_z"] = m.psi[0];
        metrics["max_abs_psi_lambda"] = psi_max;
        checks.push_back({"potential_diverges_at_small_z", v_edge, 1e3, v_edge > 1e3, false});
        checks.push_back(at_most("mode_stays_bounded", psi_max, 10.0));
    }

    Json list = Json::array();
    bool ok = true;
    for (const Check& ch : checks) {
        list.push_back(to_json(ch));
        ok = ok && ch.pass;
        log << (ch.pass ? "PASS " : "FAIL ") << figure << " " << ch.name << " = " << format_number(ch.value) << "\n";
    }
    Json report = begin_report("reproduce " + figure, c);
    report["status"] = ok ? "ok" : "failed";
    report["gauge"] = gauge_json(c, p, &m);
    report["zero_mode"] = zero_mode_json(m);
    report["metrics"] = metrics;
    report["checks"] = list;
    finish(out, std::move(report));
    return ok ? kSuccess : kValidationFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Darboux and Mielnik transformations of second-order linear ODEs", "darboux"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides o;
    std::string figure;
    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON problem configuration");
        if (needs_config) opt->required();
        sub->add_option("--out", o.out, "output directory (overrides outputs.directory)");
        sub->add_option("--tol", o.tol, "quadrature tolerance");
        sub->add_option("--grid", o.grid, "grid size");
    };
    auto* transform = app.add_subcommand("transform", "write R0, z(x) and V1(z)");
    auto* family = app.add_subcommand("family", "write the zero mode and one member per lambda");
    auto* validate = app.add_subcommand("validate", "run the residual and oracle checks");
    auto* reproduce = app.add_subcommand("reproduce", "regenerate the figure data");
    common(transform, true);
    common(family, true);
    common(validate, true);
    common(reproduce, false);
    reproduce->add_option("figure", figure, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (reproduce->parsed()) return cmd_reproduce(figure, o, err);
        const RunConfig c = apply(load_config(config_path), o);
        if (transform->parsed()) return cmd_transform(c, err);
        if (family->parsed()) return cmd_family(c, err);
        return cmd_validate(c, err);
    } catch (const ConfigError& e) {
        err << "config error at " << (e.path().empty() ? "/" : e.path()) << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const SingularityError& e) {
        err << "config error: singular domain: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
}

}  // namespace darboux::cli

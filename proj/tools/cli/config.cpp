#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "darboux/specials.hpp"

namespace darboux::cli {

namespace {

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(path + "/" + key, "missing required field");
    return *it;
}

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
    return d;
}

std::string expression(const Json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected an expression string");
    return v.get<std::string>();
}

std::pair<double, double> interval(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [lo, hi]");
    const double lo = number(v[0], path + "/0");
    const double hi = number(v[1], path + "/1");
    if (!(lo < hi)) throw ConfigError(path, "lower bound must be below upper bound");
    return {lo, hi};
}

void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError(path + "/" + key, "unknown field");
}

Problem parse_problem(const Json& j) {
    const std::string path = "/problem";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const bool coeff = j.contains("A") || j.contains("B") || j.contains("C");
    const bool direct = j.contains("V1");
    if (coeff == direct)
        throw ConfigError(path, "give exactly one of coefficient mode (A, B, C) or direct mode (V1)");

    Problem p;
    if (auto it = j.find("constants"); it != j.end()) {
        if (!it->is_object()) throw ConfigError(path + "/constants", "expected an object");
        for (const auto& [name, v] : it->items()) p.constants[name] = number(v, path + "/constants/" + name);
    }
    if (coeff) {
        reject_unknown(j, path, {"A", "B", "C", "x_domain", "base_point", "constants"});
        p.A = expression(require(j, "A", path), path + "/A");
        p.B = expression(require(j, "B", path), path + "/B");
        p.C = expression(require(j, "C", path), path + "/C");
        std::tie(p.x_min, p.x_max) = interval(require(j, "x_domain", path), path + "/x_domain");
        if (auto it = j.find("base_point"); it != j.end()) {
            p.base_point = number(*it, path + "/base_point");
            if (*p.base_point < p.x_min || *p.base_point > p.x_max)
                throw ConfigError(path + "/base_point", "outside x_domain");
        }
    } else {
        reject_unknown(j, path, {"V1", "z_domain", "pullback", "constants"});
        p.direct = true;
        p.V1 = expression(require(j, "V1", path), path + "/V1");
        std::tie(p.z_min, p.z_max) = interval(require(j, "z_domain", path), path + "/z_domain");
        if (auto it = j.find("pullback"); it != j.end()) {
            const std::string pp = path + "/pullback";
            if (!it->is_object()) throw ConfigError(pp, "expected an object");
            reject_unknown(*it, pp, {"z_of_x", "x_domain"});
            Pullback pb;
            pb.z_of_x = expression(require(*it, "z_of_x", pp), pp + "/z_of_x");
            std::tie(pb.x_min, pb.x_max) = interval(require(*it, "x_domain", pp), pp + "/x_domain");
            p.pullback = pb;
        }
    }
    return p;
}

ZeroModeSpec parse_zero_mode(const Json& j) {
    const std::string path = "/zero_mode";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    ZeroModeSpec z;
    if (j.contains("oracle")) {
        reject_unknown(j, path, {"oracle", "C1", "C2", "anchor"});
        const Json& o = j["oracle"];
        if (!o.is_string() || o.get<std::string>() != "paper_mode")
            throw ConfigError(path + "/oracle", "the only oracle is \"paper_mode\"");
        z.oracle = true;
        z.C1 = number(require(j, "C1", path), path + "/C1");
        z.C2 = number(require(j, "C2", path), path + "/C2");
        z.anchor = j.contains("anchor") ? number(j["anchor"], path + "/anchor") : 0.5;
        if (!(z.anchor > 0.0)) throw ConfigError(path + "/anchor", "the oracle mode needs anchor > 0");
        if (z.C1 == 0.0 && z.C2 == 0.0) throw ConfigError(path, "C1 and C2 cannot both vanish");
    } else {
        reject_unknown(j, path, {"anchor", "psi0", "dpsi0"});
        z.anchor = number(require(j, "anchor", path), path + "/anchor");
        z.psi0 = number(require(j, "psi0", path), path + "/psi0");
        z.dpsi0 = number(require(j, "dpsi0", path), path + "/dpsi0");
        if (z.psi0 == 0.0 && z.dpsi0 == 0.0) throw ConfigError(path, "psi0 and dpsi0 cannot both vanish");
    }
    return z;
}

Tolerances parse_tolerances(const Json& j) {
    const std::string path = "/tolerances";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    reject_unknown(j, path, {"quadrature", "gauge", "round_trip", "equivalence", "residual", "identity"});
    Tolerances t;
    auto field = [&](const char* key, double& dst) {
        if (auto it = j.find(key); it != j.end()) {
            dst = number(*it, path + "/" + key);
            if (!(dst > 0.0)) throw ConfigError(path + "/" + key, "must be positive");
        }
    };
    field("quadrature", t.quadrature);
    field("gauge", t.gauge);
    field("round_trip", t.round_trip);
    field("equivalence", t.equivalence);
    field("residual", t.residual);
    field("identity", t.identity);
    return t;
}

}  // namespace

RunConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
    reject_unknown(j, "", {"problem", "grid_size", "zero_mode", "lambdas", "outputs", "tolerances",
                           "pullback_window"});
    RunConfig c;
    c.problem = parse_problem(require(j, "problem", ""));
    if (auto it = j.find("grid_size"); it != j.end()) {
        if (!it->is_number_integer()) throw ConfigError("/grid_size", "expected an integer");
        c.grid_size = it->get<Index>();
        if (c.grid_size < 101) throw ConfigError("/grid_size", "must be at least 101");
    }
    if (auto it = j.find("zero_mode"); it != j.end()) c.zero_mode = parse_zero_mode(*it);
    if (auto it = j.find("lambdas"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("/lambdas", "expected an array of numbers");
        for (std::size_t i = 0; i < it->size(); ++i)
            c.lambdas.push_back(number((*it)[i], "/lambdas/" + std::to_string(i)));
    }
    if (auto it = j.find("outputs"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("/outputs", "expected an object");
        reject_unknown(*it, "/outputs", {"directory", "formats"});
        if (auto d = it->find("directory"); d != it->end()) {
            if (!d->is_string()) throw ConfigError("/outputs/directory", "expected a string");
            c.output_directory = d->get<std::string>();
        }
        if (auto f = it->find("formats"); f != it->end()) {
            if (!f->is_array()) throw ConfigError("/outputs/formats", "expected an array");
            c.formats.clear();
            for (std::size_t i = 0; i < f->size(); ++i) {
                const Json& v = (*f)[i];
                if (!v.is_string() || v.get<std::string>() != "csv")
                    throw ConfigError("/outputs/formats/" + std::to_string(i), "the only format is \"csv\"");
                c.formats.push_back("csv");
            }
        }
    }
    if (auto it = j.find("tolerances"); it != j.end()) c.tolerances = parse_tolerances(*it);
    if (auto it = j.find("pullback_window"); it != j.end()) c.pullback_window = interval(*it, "/pullback_window");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

Json to_json(const RunConfig& c) {
    Json problem;
    const Problem& p = c.problem;
    if (p.direct) {
        problem["V1"] = p.V1;
        problem["z_domain"] = {p.z_min, p.z_max};
        if (p.pullback)
            problem["pullback"] = {{"z_of_x", p.pullback->z_of_x}, {"x_domain", {p.pullback->x_min, p.pullback->x_max}}};
    } else {
        problem["A"] = p.A;
        problem["B"] = p.B;
        problem["C"] = p.C;
        problem["x_domain"] = {p.x_min, p.x_max};
        problem["base_point"] = p.base_point.value_or(0.5 * (p.x_min + p.x_max));
    }
    if (!p.constants.empty()) {
        Json k = Json::object();
        for (const auto& [name, v] : p.constants) k[name] = v;
        problem["constants"] = k;
    }

    Json j;
    j["problem"] = problem;
    j["grid_size"] = c.grid_size;
    if (c.zero_mode) {
        const ZeroModeSpec& z = *c.zero_mode;
        if (z.oracle)
            j["zero_mode"] = {{"oracle", "paper_mode"}, {"C1", z.C1}, {"C2", z.C2}, {"anchor", z.anchor}};
        else
            j["zero_mode"] = {{"anchor", z.anchor}, {"psi0", z.psi0}, {"dpsi0", z.dpsi0}};
    }
    j["lambdas"] = c.lambdas;
    j["outputs"] = {{"directory", c.output_directory}, {"formats", c.formats}};
    const Tolerances& t = c.tolerances;
    j["tolerances"] = {{"quadrature", t.quadrature}, {"gauge", t.gauge},        {"round_trip", t.round_trip},
                       {"equivalence", t.equivalence}, {"residual", t.residual}, {"identity", t.identity}};
    if (c.pullback_window) j["pullback_window"] = {c.pullback_window->first, c.pullback_window->second};
    return j;
}

ProblemSpec to_problem_spec(const RunConfig& c) {
    const Problem& p = c.problem;
    auto expr = [&](const std::string& text, const char* var, const std::string& path) {
        try {
            return parse(text, var, p.constants);
        } catch (const ParseError& e) {
            throw ConfigError(path, std::string(e.what()) + " at offset " + std::to_string(e.offset()));
        }
    };
    ProblemSpec s;
    if (p.direct) {
        s = ProblemSpec::direct(expr(p.V1, "z", "/problem/V1"), p.z_min, p.z_max, c.grid_size);
    } else {
        s = ProblemSpec::coefficients(expr(p.A, "x", "/problem/A"), expr(p.B, "x", "/problem/B"),
                                      expr(p.C, "x", "/problem/C"), p.x_min, p.x_max, p.base_point, c.grid_size);
    }
    s.tol = c.tolerances.quadrature;
    return s;
}

InitialData resolve_zero_mode(const ZeroModeSpec& z) {
    if (!z.oracle) return {z.anchor, z.psi0, z.dpsi0};
    auto mode = [&](double t) { return special::quarter_bessel_mode(t, z.C1, z.C2); };
    // samples stay inside z > 0
    const double h = std::min(1e-2, 0.25 * z.anchor);
    return {z.anchor, mode(z.anchor), numeric_derivative(mode, z.anchor, h)};
}

}  // namespace darboux::cli

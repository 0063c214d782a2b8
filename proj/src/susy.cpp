#include "darboux/susy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace darboux {

namespace {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

// bound on |V| s^2 for trusting the linear model of psi over a distance s
constexpr double kLinearZeroModel = 0.1;

SampledFunction masked(const Grid& g, Eigen::VectorXd values, const Mask& mask) {
    if (mask.any()) return SampledFunction(g, std::move(values), mask);
    return SampledFunction(g, std::move(values));
}

bool interior(Index i, Index n) { return i >= 2 && i + 2 < n; }

struct Accumulator {
    double max = 0.0;
    double sum_sq = 0.0;
    Index count = 0;
    void add(double r) {
        max = std::max(max, r);
        sum_sq += r * r;
        ++count;
    }
    ResidualReport report(double scale = 1.0) const {
        if (count == 0) return {};
        const double s = scale > 0.0 ? scale : 1.0;
        return {max / s, std::sqrt(sum_sq / static_cast<double>(count)) / s, count};
    }
};

// Normalized |f'' - V f| over interior points.
ResidualReport second_order_residual(const SampledFunction& f, const Eigen::VectorXd& V) {
    const SampledFunction d2 = derivative(f, 2);
    const Index n = f.size();
    Accumulator acc;
    double scale = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (!interior(i, n) || d2.excluded(i) || f.excluded(i)) continue;
        scale = std::max(scale, std::abs(d2[i]));
    }
    for (Index i = 0; i < n; ++i) {
        if (!interior(i, n) || d2.excluded(i) || f.excluded(i)) continue;
        acc.add(std::abs(d2[i] - V[i] * f[i]));
    }
    return acc.report(scale);
}

}  // namespace

double ZeroMode::node_distance(double z) const {
    double d = std::numeric_limits<double>::infinity();
    for (double node : nodes) d = std::min(d, std::abs(z - node));
    for (double zero : edge_zeros) d = std::min(d, std::abs(z - zero));
    return d;
}

ZeroMode solve_zero_mode(const SampledFunction& V1, double anchor, double psi0, double dpsi0,
                         std::optional<double> integral_base, double tol) {
    NumerovSweep s = numerov_sweep(V1, anchor, psi0, dpsi0);
    const Index first = s.first_valid;
    const Index len = s.last_valid - s.first_valid + 1;
    if (len < 5) throw OverflowError("zero mode overflowed next to the anchor", s.last_valid);
    const bool truncated = s.truncated();
    const Grid g = truncated ? Grid(V1.grid().points().segment(first, len)) : V1.grid();

    Eigen::VectorXd psi = s.psi.segment(first, len);
    Eigen::VectorXd dpsi = s.dpsi.segment(first, len);
    SampledFunction psi_f(g, psi, dpsi);

    std::vector<double> nodes, edge_zeros;
    const double edge = 1e-12 * g.span();
    for (const SignChange& c : find_sign_changes(psi_f)) {
        if (c.root > g.front() + edge && c.root < g.back() - edge)
            nodes.push_back(c.root);
        else
            edge_zeros.push_back(c.root);
    }
    // A zero just beyond an end: psi(e + s) = psi(e) (1 + y s + V s^2 / 2 + ...),
    // so s = -1/y locates it whenever |V| s^2 is small. Exponential tails have
    // |V| s^2 near 1 and are not mistaken for zeros.
    for (const Index e : {Index{0}, len - 1}) {
        const double outward = e == 0 ? -1.0 : 1.0;
        if (psi[e] == 0.0 || dpsi[e] == 0.0) continue;
        const double s = -psi[e] / dpsi[e];
        if (s * outward <= 0.0 || std::abs(V1[first + e]) * s * s > kLinearZeroModel) continue;
        edge_zeros.push_back(g[e] + s);
    }
    std::sort(edge_zeros.begin(), edge_zeros.end());

    ZeroMode m{psi_f,
               SampledFunction(g, dpsi),
               SampledFunction(g, Eigen::VectorXd::Zero(len)),
               std::move(nodes),
               std::move(edge_zeros),
               SampledFunction(g, Eigen::VectorXd::Zero(len)),
               0.0,
               InitialData{anchor, psi0, dpsi0},
               first,
               truncated};

    const double h = g.step();
    const double radius = kNodeExclusionSteps * h * (1.0 + 1e-9);
    Eigen::VectorXd y(len);
    Mask ex(len);
    for (Index i = 0; i < len; ++i) {
        ex[i] = psi[i] == 0.0 || m.node_distance(g[i]) <= radius;
        y[i] = ex[i] ? 0.0 : dpsi[i] / psi[i];
    }
    m.y = masked(g, std::move(y), ex);

    m.integral_base = integral_base.value_or(g.front());
    m.I = cumulative_integral(
        [&](double z) {
            const double p = psi_f(z);
            return p * p;
        },
        g, m.integral_base, tol);
    return m;
}

SampledFunction restrict_to(const SampledFunction& V1, const ZeroMode& m) {
    const Index n = m.psi.size();
    if (m.offset == 0 && n == V1.size()) return V1;
    if (m.offset + n > V1.size()) throw std::invalid_argument("zero mode does not fit the potential's grid");
    return SampledFunction(m.grid(), V1.values().segment(m.offset, n));
}

SampledFunction darboux_partner(const SampledFunction& V1, const ZeroMode& m) {
    const SampledFunction V = restrict_to(V1, m);
    const Index n = V.size();
    Eigen::VectorXd v2(n);
    Mask ex(n);
    for (Index i = 0; i < n; ++i) {
        ex[i] = m.y.excluded(i);
        v2[i] = ex[i] ? 0.0 : 2.0 * m.y[i] * m.y[i] - V[i];
    }
    return masked(m.grid(), std::move(v2), ex);
}

double admissibility_margin(const ZeroMode& m) { return 1e-6 * (m.I_max() - m.I_min()); }

bool is_admissible(const ZeroMode& m, double lambda) {
    for (const Interval& iv : admissible_lambda(m))
        if (iv.contains(lambda)) return true;
    return false;
}

std::vector<Interval> admissible_lambda(const ZeroMode& m) {
    const double eps = admissibility_margin(m);
    const double inf = std::numeric_limits<double>::infinity();
    return {{-inf, -m.I_max() - eps}, {-m.I_min() + eps, inf}};
}

FamilyMember family_member(const SampledFunction& V1, const ZeroMode& m, double lambda) {
    const SampledFunction V = restrict_to(V1, m);
    const Index n = V.size();
    const double eps = admissibility_margin(m);
    const Eigen::VectorXd& psi = m.psi.values();
    const Eigen::VectorXd& dpsi = m.dpsi.values();
    Eigen::VectorXd vl(n), pl(n), dpl(n);
    Mask ex(n);
    for (Index i = 0; i < n; ++i) {
        const double d = m.I[i] + lambda;
        ex[i] = std::abs(d) <= eps;
        if (ex[i]) {
            vl[i] = pl[i] = dpl[i] = 0.0;
            continue;
        }
        const double p = psi[i];
        const double q = p * p / d;
        vl[i] = V[i] - 4.0 * p * dpsi[i] / d + 2.0 * q * q;
        pl[i] = p / d;
        dpl[i] = dpsi[i] / d - p * p * p / (d * d);
    }
    FamilyMember fm{lambda, masked(m.grid(), std::move(vl), ex),
                    ex.any() ? SampledFunction(m.grid(), std::move(pl), ex)
                             : SampledFunction(m.grid(), std::move(pl), std::move(dpl)),
                    is_admissible(m, lambda)};
    return fm;
}

std::vector<Interval> branch_split(const ZeroMode& m) {
    std::vector<Interval> out;
    double lo = m.grid().front();
    for (double node : m.nodes) {
        out.push_back({lo, node});
        lo = node;
    }
    out.push_back({lo, m.grid().back()});
    return out;
}

ResidualReport verify_isospectral(const SampledFunction& V1, const FamilyMember& fm) {
    if (!fm.admissible)
        throw std::invalid_argument("family member with lambda = " + std::to_string(fm.lambda) +
                                    " is not admissible");
    if (fm.V1_lambda.size() > V1.size()) throw std::invalid_argument("family member does not fit the potential's grid");
    return second_order_residual(fm.psi_lambda, fm.V1_lambda.values());
}

ResidualReport zero_mode_residual(const SampledFunction& V1, const ZeroMode& m) {
    return second_order_residual(SampledFunction(m.grid(), m.psi.values()), restrict_to(V1, m).values());
}

double riccati_clearance(double h, double tol) { return std::pow(4.0 * std::pow(h, 4) / tol, 1.0 / 6.0); }

ResidualReport riccati_residual(const SampledFunction& V1, const ZeroMode& m, double clearance) {
    const SampledFunction V = restrict_to(V1, m);
    const SampledFunction dy = derivative(m.y, 1);
    const Index n = V.size();
    Accumulator acc;
    for (Index i = 0; i < n; ++i) {
        if (!interior(i, n) || dy.excluded(i) || m.y.excluded(i)) continue;
        if (m.node_distance(m.grid()[i]) < clearance) continue;
        const double y = m.y[i];
        acc.add(std::abs(dy[i] + y * y - V[i]) / (1.0 + std::abs(V[i])));
    }
    return acc.report();
}

ResidualReport darboux_cross_check(const SampledFunction& V1, const ZeroMode& m, double clearance) {
    const SampledFunction V = restrict_to(V1, m);
    const SampledFunction V2 = darboux_partner(V1, m);
    const Index n = V.size();
    Eigen::VectorXd lnpsi(n);
    Mask ex(n);
    for (Index i = 0; i < n; ++i) {
        ex[i] = m.psi[i] == 0.0;
        lnpsi[i] = ex[i] ? 0.0 : std::log(std::abs(m.psi[i]));
    }
    const SampledFunction d2 = derivative(masked(m.grid(), std::move(lnpsi), ex), 2);
    Accumulator acc;
    for (Index i = 0; i < n; ++i) {
        if (!interior(i, n) || d2.excluded(i) || V2.excluded(i)) continue;
        if (m.node_distance(m.grid()[i]) < clearance) continue;
        const double fd = V[i] - 2.0 * d2[i];
        acc.add(std::abs(V2[i] - fd) / (1.0 + std::abs(V2[i])));
    }
    return acc.report();
}

ResidualReport family_cross_check(const SampledFunction& V1, const ZeroMode& m, const FamilyMember& fm) {
    const SampledFunction V = restrict_to(V1, m);
    const Index n = V.size();
    Eigen::VectorXd lnd(n);
    Mask ex(n);
    for (Index i = 0; i < n; ++i) {
        const double d = m.I[i] + fm.lambda;
        ex[i] = fm.V1_lambda.excluded(i) || d == 0.0;
        lnd[i] = ex[i] ? 0.0 : std::log(std::abs(d));
    }
    const SampledFunction d2 = derivative(masked(m.grid(), std::move(lnd), ex), 2);
    Accumulator acc;
    for (Index i = 0; i < n; ++i) {
        if (!interior(i, n) || d2.excluded(i)) continue;
        const double fd = V[i] - 2.0 * d2[i];
        acc.add(std::abs(fm.V1_lambda[i] - fd) / (1.0 + std::abs(fm.V1_lambda[i])));
    }
    return acc.report();
}

double family_identity_error(const ZeroMode& m, const FamilyMember& fm) {
    double worst = 0.0;
    for (Index i = 0; i < m.psi.size(); ++i) {
        if (fm.psi_lambda.excluded(i)) continue;
        const double psi = m.psi[i];
        const double back = fm.psi_lambda[i] * (m.I[i] + fm.lambda);
        const double err = std::abs(back - psi);
        if (psi == 0.0) {
            worst = std::max(worst, err);
        } else {
            worst = std::max(worst, err / std::abs(psi));
        }
    }
    return worst;
}

}  // namespace darboux

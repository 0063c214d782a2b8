#include "darboux/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace darboux {

namespace {

Expr quotient(const Expr& num, const Expr& den) {
    auto node = std::make_shared<const Expr::Node>(
        Expr::Node{Expr::Kind::Div, 0.0, Expr::Function::Exp, num.root(), den.root()});
    return Expr(std::move(node), num.variable());
}

double panel_tolerance(const ProblemSpec& p) { return p.tol / static_cast<double>(p.grid_size - 1); }

// Evaluates f, turning a domain error into a singularity report at x.
template <class F>
double checked(F&& f, double x, const char* what) {
    try {
        const double v = f(x);
        if (!std::isfinite(v)) throw SingularityError(std::string(what) + " is not finite", x);
        return v;
    } catch (const DomainError& e) {
        throw SingularityError(std::string(what) + ": " + e.what(), x);
    }
}

}  // namespace

ProblemSpec ProblemSpec::coefficients(Expr A, Expr B, Expr C, double x_min, double x_max,
                                      std::optional<double> base_point, Index grid_size) {
    ProblemSpec p;
    p.mode = Mode::Coefficients;
    p.A = std::move(A);
    p.B = std::move(B);
    p.C = std::move(C);
    p.x_min = x_min;
    p.x_max = x_max;
    p.base_point = base_point.value_or(0.5 * (x_min + x_max));
    p.grid_size = grid_size;
    return p;
}

ProblemSpec ProblemSpec::direct(Expr V1, double z_min, double z_max, Index grid_size) {
    ProblemSpec p;
    p.mode = Mode::Direct;
    p.V1 = std::move(V1);
    p.z_min = z_min;
    p.z_max = z_max;
    p.grid_size = grid_size;
    return p;
}

void validate(const ProblemSpec& p) {
    if (p.grid_size < 5) throw std::invalid_argument("grid_size must be at least 5");
    if (!(p.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (p.mode == ProblemSpec::Mode::Direct) {
        if (p.V1.empty()) throw std::invalid_argument("direct mode needs a potential V1");
        if (!(p.z_max > p.z_min)) throw std::invalid_argument("z-domain must satisfy z_min < z_max");
        const Grid g = p.z_grid();
        for (Index i = 0; i < g.size(); ++i) checked(p.V1, g[i], "V1");
        return;
    }
    if (p.A.empty() || p.B.empty() || p.C.empty())
        throw std::invalid_argument("coefficient mode needs A, B and C");
    if (!(p.x_max > p.x_min)) throw std::invalid_argument("x-domain must satisfy x_min < x_max");
    if (!(p.base_point >= p.x_min && p.base_point <= p.x_max))
        throw std::invalid_argument("base point " + std::to_string(p.base_point) + " outside the x-domain");

    const Grid g = p.x_grid();
    double prev = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        const double x = g[i];
        const double a = checked(p.A, x, "A");
        if (a == 0.0 || (i > 0 && a * prev < 0.0))
            throw SingularityError("leading coefficient A vanishes; equation is singular", x);
        prev = a;
        checked(p.B, x, "B");
        checked(p.C, x, "C");
        // B/A must stay finite between grid points as well
        if (i > 0) checked(p.B, 0.5 * (x + g[i - 1]), "B");
    }
}

// ---------------------------------------------------------------------------
// Gauge factor

GaugeFactor::GaugeFactor(const ProblemSpec& p)
    : ratio_(quotient(p.B, p.A)), tol_(panel_tolerance(p)), samples_([&] {
          if (p.mode != ProblemSpec::Mode::Coefficients)
              throw std::invalid_argument("gauge factor needs coefficient mode");
          validate(p);
          const Grid g = p.x_grid();
          const Index k = g.nearest(p.base_point);
          const Expr ratio = quotient(p.B, p.A);
          auto f = [&](double x) { return checked(ratio, x, "B/A"); };
          const double offset = integrate(f, p.base_point, g[k], panel_tolerance(p));
          const SampledFunction F = cumulative_integral(f, g, g[k], p.tol);
          Eigen::VectorXd r0 = (-(F.values().array() + offset)).exp().matrix();
          Eigen::VectorXd slopes(g.size());
          for (Index i = 0; i < g.size(); ++i) slopes[i] = -f(g[i]) * r0[i];
          return SampledFunction(g, std::move(r0), std::move(slopes));
      }()) {}

double GaugeFactor::operator()(double x) const {
    const Grid& g = samples_.grid();
    const Index i = g.nearest(x);
    if (x == g[i]) return samples_[i];
    auto f = [&](double t) { return checked(ratio_, t, "B/A"); };
    return samples_[i] * std::exp(-integrate(f, g[i], x, tol_));
}

SampledFunction compute_R0(const ProblemSpec& p) { return GaugeFactor(p).samples(); }

// ---------------------------------------------------------------------------
// Riccati coefficients

namespace {

GeneralRiccati assemble(const ProblemSpec& p, const RealFunction& R, const RealFunction& dR) {
    if (p.mode != ProblemSpec::Mode::Coefficients)
        throw std::invalid_argument("Riccati coefficients need coefficient mode");
    validate(p);
    const Grid g = p.x_grid();
    const Index n = g.size();
    Eigen::VectorXd lin(n), quad(n), rhs(n);
    for (Index i = 0; i < n; ++i) {
        const double x = g[i];
        const double r = R(x);
        if (!(r > 0.0)) throw std::invalid_argument("R must be positive; R(" + std::to_string(x) + ") = " +
                                                    std::to_string(r));
        const double a = p.A(x);
        lin[i] = dR(x) / r + p.B(x) / a;
        quad[i] = r;
        rhs[i] = -p.C(x) / (a * r);
    }
    return {SampledFunction(g, std::move(lin)), SampledFunction(g, std::move(quad)),
            SampledFunction(g, std::move(rhs))};
}

}  // namespace

GeneralRiccati riccati_coefficients(const ProblemSpec& p, const Expr& R) {
    const Expr dR = differentiate(R);
    return assemble(p, [&](double x) { return R(x); }, [&](double x) { return dR(x); });
}

GeneralRiccati riccati_coefficients(const ProblemSpec& p, const RealFunction& R) {
    const double h = 1e-2 * (p.x_max - p.x_min) / 8.0;
    auto dR = [&](double x) {
        int side = 0;
        if (x - h < p.x_min) side = +1;
        if (x + h > p.x_max) side = -1;
        return numeric_derivative(R, x, h, side);
    };
    return assemble(p, R, dR);
}

// ---------------------------------------------------------------------------
// z-map and potential

TransformResult compute_transform(const ProblemSpec& p) {
    validate(p);
    if (p.mode == ProblemSpec::Mode::Direct) {
        const Grid zg = p.z_grid();
        return TransformResult{std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                               SampledFunction::tabulate(zg, [&](double z) { return p.V1(z); }), p.z_min,
                               p.z_max};
    }

    const GaugeFactor gauge(p);
    const SampledFunction& r0 = gauge.samples();
    const Grid& xg = r0.grid();
    const Index n = xg.size();
    const Index k = xg.nearest(p.base_point);

    auto R = [&](double x) { return gauge(x); };
    const double offset = integrate(R, p.base_point, xg[k], panel_tolerance(p));
    const SampledFunction F = cumulative_integral(R, xg, xg[k], p.tol);
    Eigen::VectorXd zv = F.values().array() + offset;
    SampledFunction zmap(xg, std::move(zv), *F.slopes());
    if (!zmap.strictly_increasing()) throw NumericalError("z-map is not strictly increasing");
    SampledFunction inverse = invert_monotone(zmap);

    const double z_lo = zmap[0];
    const double z_hi = zmap[n - 1];
    const Grid zg = Grid::uniform(z_lo, z_hi, n);
    Eigen::VectorXd v1(n);
    for (Index j = 0; j < n; ++j) {
        const double x = std::clamp(inverse(zg[j]), p.x_min, p.x_max);
        const double r = gauge(x);
        v1[j] = -p.C(x) / (p.A(x) * r * r);
    }

    Eigen::VectorXd slope(n);
    for (Index i = 0; i < n; ++i) slope[i] = -p.B(xg[i]) / p.A(xg[i]);

    return TransformResult{r0,
                           std::move(zmap),
                           std::move(inverse),
                           SampledFunction(xg, std::move(slope)),
                           SampledFunction(zg, std::move(v1)),
                           z_lo,
                           z_hi};
}

TransformResult with_pullback(TransformResult t, const Expr& z_of_x, double x_min, double x_max,
                              Index grid_size) {
    const Grid xg = Grid::uniform(x_min, x_max, grid_size);
    const Expr dz = differentiate(z_of_x);
    const Expr d2z = differentiate(dz);
    const Index n = xg.size();
    Eigen::VectorXd z(n), r0(n), dr0(n), slope(n);
    for (Index i = 0; i < n; ++i) {
        const double x = xg[i];
        z[i] = checked(z_of_x, x, "z(x)");
        r0[i] = checked(dz, x, "dz/dx");
        if (!(r0[i] > 0.0)) throw SingularityError("change of variable is not increasing", x);
        dr0[i] = checked(d2z, x, "d2z/dx2");
        slope[i] = dr0[i] / r0[i];
    }
    SampledFunction zmap(xg, std::move(z), r0);
    t.inverse_zmap = invert_monotone(zmap);
    t.zmap = std::move(zmap);
    t.R0 = SampledFunction(xg, std::move(r0), std::move(dr0));
    t.log_R0_slope = SampledFunction(xg, std::move(slope));
    return t;
}

// ---------------------------------------------------------------------------
// Pullback

double Pullback::relative_max(double lo, double hi) const {
    const Grid& g = residual.grid();
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        if (g[i] < lo || g[i] > hi || residual.excluded(i)) continue;
        num = std::max(num, std::abs(residual[i]));
        den = std::max(den, std::abs(u_second[i]));
    }
    return den > 0.0 ? num / den : num;
}

double Pullback::term_relative_max(double lo, double hi) const {
    const Grid& g = residual.grid();
    double num = 0.0, den = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        if (g[i] < lo || g[i] > hi || residual.excluded(i)) continue;
        num = std::max(num, std::abs(residual[i]));
        den = std::max(den, term_scale[i]);
    }
    return den > 0.0 ? num / den : num;
}

Pullback pullback_residual(const TransformResult& t, const SampledFunction& psi_z, const SampledFunction& V) {
    if (!t.has_x_side()) throw std::invalid_argument("transform has no x-side map to pull back along");
    if (!(psi_z.grid() == V.grid())) throw std::invalid_argument("psi and V are on different z-grids");
    const SampledFunction& zmap = *t.zmap;
    const Grid& xg = zmap.grid();
    const Grid& zg = psi_z.grid();
    const Index n = xg.size();
    const double slack = 1e-12 * zg.span();

    Eigen::VectorXd u(n), vz(n);
    Eigen::Array<bool, Eigen::Dynamic, 1> out = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
    for (Index i = 0; i < n; ++i) {
        const double z = zmap[i];
        if (z < zg.front() - slack || z > zg.back() + slack) {
            out[i] = true;
            u[i] = vz[i] = 0.0;
            continue;
        }
        u[i] = psi_z(z);
        vz[i] = V(z);
    }
    SampledFunction us = out.any() ? SampledFunction(xg, u, out) : SampledFunction(xg, u);
    SampledFunction d1 = derivative(us, 1);
    SampledFunction d2 = derivative(us, 2);

    Eigen::VectorXd res(n), scale(n);
    Eigen::Array<bool, Eigen::Dynamic, 1> ex = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
    const SampledFunction& r0 = *t.R0;
    const SampledFunction& s = *t.log_R0_slope;
    for (Index i = 0; i < n; ++i) {
        ex[i] = out[i] || d1.excluded(i) || d2.excluded(i);
        const double drift = s[i] * d1[i];
        const double potential = r0[i] * r0[i] * vz[i] * u[i];
        res[i] = ex[i] ? 0.0 : d2[i] - drift - potential;
        scale[i] = ex[i] ? 0.0 : std::max({std::abs(d2[i]), std::abs(drift), std::abs(potential)});
    }
    auto masked = [&](Eigen::VectorXd v) {
        return ex.any() ? SampledFunction(xg, std::move(v), ex) : SampledFunction(xg, std::move(v));
    };
    return Pullback{std::move(us), std::move(d2), masked(std::move(res)), masked(std::move(scale))};
}

AxisComparison compare_axes(const ProblemSpec& p, const TransformResult& t, const SampledFunction& psi_z,
                            double x_anchor, double u0, double du0) {
    if (p.mode != ProblemSpec::Mode::Coefficients || !t.has_x_side())
        throw std::invalid_argument("axis comparison needs a coefficient-mode transform");
    const Grid& xg = t.zmap->grid();
    const SampledFunction u = integrate_general_ode(p.A, p.B, p.C, xg, x_anchor, u0, du0);
    const SampledFunction& inverse = *t.inverse_zmap;
    const Grid& zg = psi_z.grid();
    const double lo = std::max(zg.front(), inverse.grid().front());
    const double hi = std::min(zg.back(), inverse.grid().back());

    AxisComparison cmp;
    for (Index j = 0; j < zg.size(); ++j) {
        const double z = zg[j];
        if (z < lo || z > hi) continue;
        const double x = std::clamp(inverse(z), xg.front(), xg.back());
        const double ux = u(x);
        cmp.max_abs_u = std::max(cmp.max_abs_u, std::abs(ux));
        cmp.max_abs_diff = std::max(cmp.max_abs_diff, std::abs(ux - psi_z[j]));
    }
    return cmp;
}

}  // namespace darboux

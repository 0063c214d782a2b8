#include "darboux/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace darboux {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSimpsonDepth = 50;
constexpr int kStartSubsteps = 64;
constexpr double kOverflow = 1e150;  // squares of valid samples stay finite

double hermite(double y0, double y1, double m0, double m1, double h, double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * m1;
}

double hermite_slope(double y0, double y1, double m0, double m1, double h, double t) {
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (-6 * t2 + 6 * t) * y1) / h + (3 * t2 - 4 * t + 1) * m0 +
           (3 * t2 - 2 * t) * m1;
}

struct SimpsonState {
    const RealFunction& f;
    double deepest_a = 0.0;
    double deepest_b = 0.0;
    int deepest = 0;
};

double sample(const RealFunction& f, double x, double a, double b) {
    const double v = f(x);
    if (!std::isfinite(v)) throw QuadratureError("non-finite integrand at x = " + std::to_string(x), a, b);
    return v;
}

double simpson(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = sample(st.f, lm, a, b);
    const double frm = sample(st.f, rm, a, b);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta))
        throw QuadratureError("adaptive Simpson estimate overflowed", a, b);

    if (depth > st.deepest) {
        st.deepest = depth;
        st.deepest_a = a;
        st.deepest_b = b;
    }
    const double floor = 64.0 * kEps * (std::abs(left) + std::abs(right));
    if (depth > 0 && std::abs(delta) <= 15.0 * std::max(tol, floor))
        return left + right + delta / 15.0;
    // an interval a few ulps wide cannot be refined further and carries no weight
    if (lm <= a || m <= lm || rm <= m || b <= rm) return left + right;
    if (depth >= kMaxSimpsonDepth)
        throw QuadratureError("adaptive Simpson did not converge; deepest interval", st.deepest_a,
                              st.deepest_b);
    return simpson(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

Eigen::Array<bool, Eigen::Dynamic, 1> no_exclusions() { return {}; }

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(Eigen::VectorXd points) : points_(std::move(points)) {
    const Index n = points_.size();
    if (n < 3) throw std::invalid_argument("grid needs at least 3 points");
    if (!points_.allFinite()) throw std::invalid_argument("grid points must be finite");
    for (Index i = 0; i + 1 < n; ++i)
        if (!(points_[i + 1] > points_[i]))
            throw std::invalid_argument("grid points must be strictly increasing (index " +
                                        std::to_string(i + 1) + ")");
    const double h = (back() - front()) / static_cast<double>(n - 1);
    double dev = 0.0;
    for (Index i = 0; i < n; ++i)
        dev = std::max(dev, std::abs(points_[i] - (front() + static_cast<double>(i) * h)));
    uniform_ = dev <= 1e-12 * span();
    step_ = uniform_ ? h : 0.0;
}

Grid Grid::uniform(double a, double b, Index n) {
    if (n < 3) throw std::invalid_argument("grid needs at least 3 points");
    if (!(b > a)) throw std::invalid_argument("grid interval must satisfy a < b");
    Eigen::VectorXd p(n);
    for (Index i = 0; i < n; ++i)
        p[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    p[n - 1] = b;
    return Grid(std::move(p));
}

double Grid::step() const {
    if (!uniform_) throw std::logic_error("grid is not uniform");
    return step_;
}

Index Grid::locate(double x) const {
    const Index n = size();
    auto it = std::upper_bound(points_.data(), points_.data() + n, x);
    const Index i = static_cast<Index>(it - points_.data()) - 1;
    return std::clamp<Index>(i, 0, n - 2);
}

Index Grid::nearest(double x) const {
    const Index i = locate(x);
    return std::abs(x - points_[i]) <= std::abs(points_[i + 1] - x) ? i : i + 1;
}

std::optional<Index> Grid::find(double x) const {
    const Index i = nearest(x);
    if (std::abs(points_[i] - x) <= 1e-12 * span()) return i;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// SampledFunction

SampledFunction::SampledFunction(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw std::invalid_argument("values and grid differ in length");
    validate_finite();
    build_spline();
}

SampledFunction::SampledFunction(Grid grid, Eigen::VectorXd values, Eigen::VectorXd slopes)
    : grid_(std::move(grid)), values_(std::move(values)), slopes_(std::move(slopes)) {
    if (values_.size() != grid_.size() || slopes_->size() != grid_.size())
        throw std::invalid_argument("values, slopes and grid differ in length");
    validate_finite();
    if (!slopes_->allFinite()) throw std::invalid_argument("non-finite slope");
}

SampledFunction::SampledFunction(Grid grid, Eigen::VectorXd values,
                                 Eigen::Array<bool, Eigen::Dynamic, 1> excluded)
    : grid_(std::move(grid)), values_(std::move(values)), excluded_(std::move(excluded)) {
    if (values_.size() != grid_.size() || excluded_.size() != grid_.size())
        throw std::invalid_argument("values, mask and grid differ in length");
    for (Index i = 0; i < values_.size(); ++i)
        if (excluded_[i]) values_[i] = std::numeric_limits<double>::quiet_NaN();
    validate_finite();
    if (!excluded_.any()) {
        excluded_ = no_exclusions();
        build_spline();
    }
}

SampledFunction SampledFunction::monotone(Grid grid, Eigen::VectorXd values) {
    const Index n = grid.size();
    if (values.size() != n) throw std::invalid_argument("values and grid differ in length");
    const Eigen::VectorXd& x = grid.points();
    Eigen::VectorXd h = x.tail(n - 1) - x.head(n - 1);
    Eigen::VectorXd delta = (values.tail(n - 1) - values.head(n - 1)).cwiseQuotient(h);
    Eigen::VectorXd m(n);
    for (Index k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] * delta[k] <= 0.0) {
            m[k] = 0.0;
        } else {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) return 3.0 * d0;
        return s;
    };
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return SampledFunction(std::move(grid), std::move(values), std::move(m));
}

SampledFunction SampledFunction::tabulate(const Grid& grid, const RealFunction& f) {
    Eigen::VectorXd v(grid.size());
    for (Index i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return SampledFunction(grid, std::move(v));
}

void SampledFunction::validate_finite() const {
    for (Index i = 0; i < values_.size(); ++i)
        if (!excluded(i) && !std::isfinite(values_[i]))
            throw std::invalid_argument("non-finite sample at index " + std::to_string(i));
}

void SampledFunction::build_spline() {
    // Natural cubic spline: tridiagonal system for the second derivatives.
    const Index n = grid_.size();
    const Eigen::VectorXd& x = grid_.points();
    moments_ = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd diag(n), rhs(n), upper(n);
    for (Index i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0);
    }
    // forward elimination on rows 1..n-2, lower coefficient of row i is h_{i-1}
    for (Index i = 2; i + 1 < n; ++i) {
        const double w = (x[i] - x[i - 1]) / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (Index i = n - 2; i >= 1; --i) {
        const double next = (i + 1 < n - 1) ? moments_[i + 1] : 0.0;
        moments_[i] = (rhs[i] - upper[i] * next) / diag[i];
    }
}

double SampledFunction::operator()(double x) const {
    const double tol = 1e-12 * grid_.span();
    if (!(x >= grid_.front() - tol && x <= grid_.back() + tol))
        throw std::out_of_range("interpolation query " + std::to_string(x) + " outside [" +
                                std::to_string(grid_.front()) + ", " + std::to_string(grid_.back()) + "]");
    if (has_exclusions()) throw std::logic_error("cannot interpolate a function with excluded samples");
    x = std::clamp(x, grid_.front(), grid_.back());
    const Index i = grid_.locate(x);
    const double x0 = grid_[i];
    const double h = grid_[i + 1] - x0;
    const double t = (x - x0) / h;
    if (slopes_) return hermite(values_[i], values_[i + 1], (*slopes_)[i], (*slopes_)[i + 1], h, t);
    const double a = 1.0 - t;
    return a * values_[i] + t * values_[i + 1] +
           h * h / 6.0 * ((a * a * a - a) * moments_[i] + (t * t * t - t) * moments_[i + 1]);
}

double SampledFunction::slope_at(double x) const {
    if (has_exclusions()) throw std::logic_error("cannot interpolate a function with excluded samples");
    x = std::clamp(x, grid_.front(), grid_.back());
    const Index i = grid_.locate(x);
    const double x0 = grid_[i];
    const double h = grid_[i + 1] - x0;
    const double t = (x - x0) / h;
    if (slopes_) return hermite_slope(values_[i], values_[i + 1], (*slopes_)[i], (*slopes_)[i + 1], h, t);
    const double a = 1.0 - t;
    return (values_[i + 1] - values_[i]) / h +
           h / 6.0 * (-(3.0 * a * a - 1.0) * moments_[i] + (3.0 * t * t - 1.0) * moments_[i + 1]);
}

bool SampledFunction::strictly_increasing() const {
    for (Index i = 0; i + 1 < size(); ++i)
        if (!(values_[i + 1] > values_[i])) return false;
    return true;
}

bool SampledFunction::strictly_decreasing() const {
    for (Index i = 0; i + 1 < size(); ++i)
        if (!(values_[i + 1] < values_[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Quadrature

double integrate(const RealFunction& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, tol);
    SimpsonState st{f, a, b, 0};
    const double fa = sample(f, a, a, b);
    const double fb = sample(f, b, a, b);
    const double m = 0.5 * (a + b);
    const double fm = sample(f, m, a, b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(st, a, b, fa, fm, fb, whole, tol, 0);
}

SampledFunction cumulative_integral(const RealFunction& f, const Grid& grid, double base, double tol) {
    const auto k = grid.find(base);
    if (!k) throw std::invalid_argument("cumulative integral base " + std::to_string(base) +
                                        " is not a grid point");
    const Index n = grid.size();
    const double panel_tol = tol / static_cast<double>(n - 1);
    Eigen::VectorXd F(n), dF(n);
    F[*k] = 0.0;
    for (Index i = *k; i + 1 < n; ++i) F[i + 1] = F[i] + integrate(f, grid[i], grid[i + 1], panel_tol);
    for (Index i = *k; i > 0; --i) F[i - 1] = F[i] - integrate(f, grid[i - 1], grid[i], panel_tol);
    for (Index i = 0; i < n; ++i) dF[i] = f(grid[i]);
    return SampledFunction(grid, std::move(F), std::move(dF));
}

SampledFunction invert_monotone(const SampledFunction& s) {
    if (s.has_exclusions()) throw std::invalid_argument("cannot invert a function with excluded samples");
    const bool inc = s.strictly_increasing();
    if (!inc && !s.strictly_decreasing()) throw std::invalid_argument("map is not strictly monotone");
    Eigen::VectorXd z = s.values();
    Eigen::VectorXd x = s.grid().points();
    std::optional<Eigen::VectorXd> dz = s.slopes();
    if (!inc) {
        z.reverseInPlace();
        x.reverseInPlace();
        if (dz) dz->reverseInPlace();
    }
    if (dz && (dz->array() != 0.0).all() && (dz->array() > 0.0).all() == inc)
        return SampledFunction(Grid(std::move(z)), std::move(x), Eigen::VectorXd(dz->cwiseInverse()));
    return SampledFunction::monotone(Grid(std::move(z)), std::move(x));
}

// ---------------------------------------------------------------------------
// ODEs

double local_cubic(const Grid& grid, const Eigen::VectorXd& values, double x) {
    const Index n = grid.size();
    const Index j0 = std::clamp<Index>(grid.locate(x) - 1, 0, n - 4);
    double sum = 0.0;
    for (Index j = j0; j < j0 + 4; ++j) {
        double w = 1.0;
        for (Index m = j0; m < j0 + 4; ++m)
            if (m != j) w *= (x - grid[m]) / (grid[j] - grid[m]);
        sum += w * values[j];
    }
    return sum;
}

namespace {

struct State {
    double u;
    double du;
};

// psi'' = V(z) psi with V from local cubic interpolation, `steps` RK4 steps.
State rk4_schrodinger(const SampledFunction& V, State s, double from, double to, int steps) {
    const double h = (to - from) / steps;
    auto pot = [&](double z) { return local_cubic(V.grid(), V.values(), z); };
    double z = from;
    for (int k = 0; k < steps; ++k) {
        const double vz = pot(z), vm = pot(z + 0.5 * h), ve = pot(z + h);
        const double k1u = s.du, k1d = vz * s.u;
        const double k2u = s.du + 0.5 * h * k1d, k2d = vm * (s.u + 0.5 * h * k1u);
        const double k3u = s.du + 0.5 * h * k2d, k3d = vm * (s.u + 0.5 * h * k2u);
        const double k4u = s.du + h * k3d, k4d = ve * (s.u + h * k3u);
        s.u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        s.du += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
        z = (k + 1 == steps) ? to : z + h;
    }
    return s;
}

bool overflowed(double v) { return !std::isfinite(v) || std::abs(v) > kOverflow; }

}  // namespace

Eigen::VectorXd numerov_derivative(const Eigen::VectorXd& psi, const Eigen::VectorXd& V, double h) {
    const Index n = psi.size();
    Eigen::VectorXd d(n);
    const double c = h * h / 6.0;
    for (Index i = 1; i + 1 < n; ++i)
        d[i] = ((1.0 - c * V[i + 1]) * psi[i + 1] - (1.0 - c * V[i - 1]) * psi[i - 1]) / (2.0 * h);
    d[0] = (psi[1] - psi[0]) / h - h / 3.0 * V[0] * psi[0] - h / 6.0 * V[1] * psi[1];
    d[n - 1] = (psi[n - 1] - psi[n - 2]) / h + h / 3.0 * V[n - 1] * psi[n - 1] +
               h / 6.0 * V[n - 2] * psi[n - 2];
    return d;
}

NumerovSweep numerov_sweep(const SampledFunction& V, double anchor, double psi0, double dpsi0) {
    const Grid& g = V.grid();
    if (!g.is_uniform()) throw std::invalid_argument("Numerov integration needs a uniform grid");
    if (V.has_exclusions()) throw std::invalid_argument("potential has excluded samples");
    const double tol = 1e-12 * g.span();
    if (!(anchor >= g.front() - tol && anchor <= g.back() + tol))
        throw std::out_of_range("anchor outside the potential's grid");
    const Index n = g.size();
    const double h = g.step();
    const Eigen::VectorXd& v = V.values();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    NumerovSweep out;
    out.psi = Eigen::VectorXd::Constant(n, nan);
    const Index k = g.nearest(anchor);
    State at_k{psi0, dpsi0};
    if (std::abs(g[k] - anchor) > tol) at_k = rk4_schrodinger(V, at_k, anchor, g[k], kStartSubsteps);
    out.psi[k] = at_k.u;
    out.first_valid = out.last_valid = k;

    const double c = h * h / 12.0;
    auto w = [&](Index i) { return (1.0 - c * v[i]) * out.psi[i]; };

    if (k + 1 < n) {
        const State s1 = rk4_schrodinger(V, at_k, g[k], g[k + 1], kStartSubsteps);
        if (!overflowed(s1.u)) {
            out.psi[k + 1] = s1.u;
            out.last_valid = k + 1;
            for (Index i = k + 1; i + 1 < n; ++i) {
                const double next = (2.0 * w(i) - w(i - 1) + h * h * v[i] * out.psi[i]) / (1.0 - c * v[i + 1]);
                if (overflowed(next)) break;
                out.psi[i + 1] = next;
                out.last_valid = i + 1;
            }
        }
    }
    if (k > 0) {
        const State s1 = rk4_schrodinger(V, at_k, g[k], g[k - 1], kStartSubsteps);
        if (!overflowed(s1.u)) {
            out.psi[k - 1] = s1.u;
            out.first_valid = k - 1;
            for (Index i = k - 1; i > 0; --i) {
                const double next = (2.0 * w(i) - w(i + 1) + h * h * v[i] * out.psi[i]) / (1.0 - c * v[i - 1]);
                if (overflowed(next)) break;
                out.psi[i - 1] = next;
                out.first_valid = i - 1;
            }
        }
    }

    out.dpsi = Eigen::VectorXd::Constant(n, nan);
    const Index len = out.last_valid - out.first_valid + 1;
    if (len >= 2) {
        out.dpsi.segment(out.first_valid, len) =
            numerov_derivative(out.psi.segment(out.first_valid, len), v.segment(out.first_valid, len), h);
    } else {
        out.dpsi[k] = at_k.du;
    }
    return out;
}

SampledFunction integrate_schrodinger(const SampledFunction& V, double anchor, double psi0, double dpsi0) {
    NumerovSweep s = numerov_sweep(V, anchor, psi0, dpsi0);
    if (s.last_valid != V.size() - 1) throw OverflowError("Numerov solution overflowed", s.last_valid);
    if (s.first_valid != 0) throw OverflowError("Numerov solution overflowed", s.first_valid);
    return SampledFunction(V.grid(), std::move(s.psi), std::move(s.dpsi));
}

SampledFunction integrate_general_ode(const Expr& A, const Expr& B, const Expr& C, const Grid& grid,
                                      double anchor, double u0, double du0, int substeps) {
    if (substeps < 1) throw std::invalid_argument("substeps must be positive");
    const Index n = grid.size();
    double prev_a = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double a = A(grid[i]);
        if (a == 0.0 || (i > 0 && a * prev_a < 0.0))
            throw SingularityError("leading coefficient A vanishes; equation is singular", grid[i]);
        prev_a = a;
    }
    const double tol = 1e-12 * grid.span();
    if (!(anchor >= grid.front() - tol && anchor <= grid.back() + tol))
        throw std::out_of_range("anchor outside the grid");

    auto rhs = [&](double x, const State& s) {
        const double a = A(x);
        if (a == 0.0) throw SingularityError("leading coefficient A vanishes; equation is singular", x);
        return State{s.du, -(B(x) * s.du + C(x) * s.u) / a};
    };
    auto advance = [&](State s, double from, double to, int steps) {
        const double h = (to - from) / steps;
        double x = from;
        for (int k = 0; k < steps; ++k) {
            const State k1 = rhs(x, s);
            const State k2 = rhs(x + 0.5 * h, {s.u + 0.5 * h * k1.u, s.du + 0.5 * h * k1.du});
            const State k3 = rhs(x + 0.5 * h, {s.u + 0.5 * h * k2.u, s.du + 0.5 * h * k2.du});
            const State k4 = rhs(x + h, {s.u + h * k3.u, s.du + h * k3.du});
            s.u += h / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
            s.du += h / 6.0 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du);
            x = (k + 1 == steps) ? to : x + h;
        }
        return s;
    };

    Eigen::VectorXd u(n), du(n);
    const Index k = grid.nearest(anchor);
    State s{u0, du0};
    if (std::abs(grid[k] - anchor) > tol) s = advance(s, anchor, grid[k], substeps);
    u[k] = s.u;
    du[k] = s.du;
    State f = s;
    for (Index i = k; i + 1 < n; ++i) {
        f = advance(f, grid[i], grid[i + 1], substeps);
        if (overflowed(f.u)) throw OverflowError("general ODE solution overflowed", i);
        u[i + 1] = f.u;
        du[i + 1] = f.du;
    }
    State b = s;
    for (Index i = k; i > 0; --i) {
        b = advance(b, grid[i], grid[i - 1], substeps);
        if (overflowed(b.u)) throw OverflowError("general ODE solution overflowed", i);
        u[i - 1] = b.u;
        du[i - 1] = b.du;
    }
    return SampledFunction(grid, std::move(u), std::move(du));
}

// ---------------------------------------------------------------------------
// Differences

SampledFunction derivative(const SampledFunction& s, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
    const Grid& g = s.grid();
    if (!g.is_uniform()) throw std::invalid_argument("finite differences need a uniform grid");
    const Index n = g.size();
    if (n < 5) throw std::invalid_argument("finite differences need at least 5 points");
    const double h = g.step();
    const Eigen::VectorXd& f = s.values();

    Eigen::VectorXd d(n);
    Eigen::Array<bool, Eigen::Dynamic, 1> ex = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
    auto touches = [&](Index lo, Index hi) {
        for (Index j = lo; j <= hi; ++j)
            if (s.excluded(j)) return true;
        return false;
    };

    for (Index i = 0; i < n; ++i) {
        Index lo, hi;
        double v;
        if (i >= 2 && i + 2 < n) {
            lo = i - 2;
            hi = i + 2;
            v = order == 1 ? (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
                           : (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) /
                                 (12.0 * h * h);
        } else if (i == 1 || i == n - 2) {
            lo = i - 1;
            hi = i + 1;
            v = order == 1 ? (f[i + 1] - f[i - 1]) / (2.0 * h) : (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h);
        } else if (i == 0) {
            lo = 0;
            hi = 3;
            v = order == 1 ? (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
                           : (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
        } else {
            lo = n - 4;
            hi = n - 1;
            v = order == 1 ? (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
                           : (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
        }
        ex[i] = touches(lo, hi);
        d[i] = v;
    }
    if (ex.any()) return SampledFunction(g, std::move(d), std::move(ex));
    return SampledFunction(g, std::move(d));
}

double numeric_derivative(const RealFunction& f, double x, double h, int side) {
    // central: error in h^2, h^4, ...; one-sided: h^2, h^3, ...
    auto diff = [&](double step) {
        if (side == 0) return (f(x + step) - f(x - step)) / (2.0 * step);
        const double s = side > 0 ? step : -step;
        return (-3.0 * f(x) + 4.0 * f(x + s) - f(x + 2.0 * s)) / (2.0 * s);
    };
    constexpr int kLevels = 5;
    double table[kLevels][kLevels];
    for (int k = 0; k < kLevels; ++k) {
        table[k][0] = diff(std::ldexp(h, -k));
        for (int j = 1; j <= k; ++j) {
            const int power = side == 0 ? 2 * j : j + 1;
            const double w = std::ldexp(1.0, power);
            table[k][j] = (w * table[k][j - 1] - table[k - 1][j - 1]) / (w - 1.0);
        }
    }
    return table[kLevels - 1][kLevels - 1];
}

std::vector<SignChange> find_sign_changes(const SampledFunction& s) {
    const Grid& g = s.grid();
    const Eigen::VectorXd& v = s.values();
    const Index n = g.size();
    std::vector<SignChange> out;
    for (Index i = 0; i < n; ++i) {
        if (s.excluded(i)) continue;
        if (v[i] == 0.0) {
            out.push_back({g[i], g[i], g[i]});
            continue;
        }
        if (i + 1 >= n || s.excluded(i + 1) || v[i] * v[i + 1] >= 0.0) continue;

        const Index j0 = std::clamp<Index>(i - 1, 0, n - 4);
        bool usable = true;
        for (Index j = j0; j < j0 + 4; ++j) usable = usable && !s.excluded(j);
        auto cubic = [&](double x) {
            if (!usable) return v[i] + (v[i + 1] - v[i]) * (x - g[i]) / (g[i + 1] - g[i]);
            double sum = 0.0;
            for (Index j = j0; j < j0 + 4; ++j) {
                double w = 1.0;
                for (Index m = j0; m < j0 + 4; ++m)
                    if (m != j) w *= (x - g[m]) / (g[j] - g[m]);
                sum += w * v[j];
            }
            return sum;
        };
        double lo = g[i], hi = g[i + 1];
        double flo = v[i];
        const double target = 1e-13 * g.span();
        for (int it = 0; it < 200 && hi - lo > target; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = cubic(mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        out.push_back({g[i], g[i + 1], 0.5 * (lo + hi)});
    }
    return out;
}

}  // namespace darboux

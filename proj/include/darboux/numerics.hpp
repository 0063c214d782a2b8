#ifndef DARBOUX_NUMERICS_HPP
#define DARBOUX_NUMERICS_HPP

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <vector>

#include "darboux/errors.hpp"
#include "darboux/expr.hpp"

namespace darboux {

using Index = Eigen::Index;
using RealFunction = std::function<double(double)>;

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr Index kDefaultGridSize = 2001;

/// Strictly increasing abscissae, at least three of them.
class Grid {
public:
    explicit Grid(Eigen::VectorXd points);
    static Grid uniform(double a, double b, Index n);

    const Eigen::VectorXd& points() const noexcept { return points_; }
    Index size() const noexcept { return points_.size(); }
    double operator[](Index i) const { return points_[i]; }
    double front() const { return points_[0]; }
    double back() const { return points_[points_.size() - 1]; }
    double span() const { return back() - front(); }

    bool is_uniform() const noexcept { return uniform_; }
    /// Step of a uniform grid; throws std::logic_error otherwise.
    double step() const;

    /// Index i of the panel [p_i, p_{i+1}] containing x (clamped to the ends).
    Index locate(double x) const;
    Index nearest(double x) const;
    /// Index of the grid point equal to x within 1e-12 of the span, if any.
    std::optional<Index> find(double x) const;

    friend bool operator==(const Grid& a, const Grid& b) { return a.points_ == b.points_; }

private:
    Eigen::VectorXd points_;
    bool uniform_ = false;
    double step_ = 0.0;
};

/// Values on a grid plus the interpolant used to evaluate between samples.
///
/// Three interpolants are supported. A natural cubic spline is the default.
/// If slopes are supplied the interpolant is a cubic Hermite through values and
/// slopes; `monotone()` builds one with Fritsch-Carlson limited slopes, which
/// preserves monotonicity of the data. Samples may be marked excluded (near a
/// pole); such functions carry NaN there and cannot be interpolated.
class SampledFunction {
public:
    enum class Interpolation { NaturalSpline, Hermite };

    SampledFunction(Grid grid, Eigen::VectorXd values);
    SampledFunction(Grid grid, Eigen::VectorXd values, Eigen::VectorXd slopes);
    SampledFunction(Grid grid, Eigen::VectorXd values, Eigen::Array<bool, Eigen::Dynamic, 1> excluded);

    static SampledFunction monotone(Grid grid, Eigen::VectorXd values);
    static SampledFunction tabulate(const Grid& grid, const RealFunction& f);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    Index size() const noexcept { return values_.size(); }
    double operator[](Index i) const { return values_[i]; }

    const std::optional<Eigen::VectorXd>& slopes() const noexcept { return slopes_; }
    Interpolation interpolation() const noexcept {
        return slopes_ ? Interpolation::Hermite : Interpolation::NaturalSpline;
    }

    bool excluded(Index i) const { return excluded_.size() != 0 && excluded_[i]; }
    bool has_exclusions() const { return excluded_.size() != 0 && excluded_.any(); }
    const Eigen::Array<bool, Eigen::Dynamic, 1>& exclusion_mask() const noexcept { return excluded_; }

    /// Interpolated value; throws std::out_of_range outside the grid.
    double operator()(double x) const;
    /// Derivative of the interpolant.
    double slope_at(double x) const;

    bool strictly_increasing() const;
    bool strictly_decreasing() const;

private:
    void validate_finite() const;
    void build_spline();

    Grid grid_;
    Eigen::VectorXd values_;
    std::optional<Eigen::VectorXd> slopes_;
    Eigen::VectorXd moments_;  // spline second derivatives
    Eigen::Array<bool, Eigen::Dynamic, 1> excluded_;
};

// ---------------------------------------------------------------------------
// Quadrature

/// Adaptive Simpson with Richardson correction, maximum recursion depth 50.
/// Throws QuadratureError on non-finite samples or non-convergence.
double integrate(const RealFunction& f, double a, double b, double tol = kDefaultTolerance);

/// F(p_i) = \int_base^{p_i} f, built panel by panel so that consecutive values
/// differ by exactly one single-panel quadrature with tolerance tol / (n - 1).
/// `base` must be a grid point.
SampledFunction cumulative_integral(const RealFunction& f, const Grid& grid, double base,
                                    double tol = kDefaultTolerance);

/// Interpolated inverse of a strictly monotone sampled map. Cubic Hermite with
/// slopes 1/s' when s carries slopes, monotone cubic otherwise.
SampledFunction invert_monotone(const SampledFunction& s);

// ---------------------------------------------------------------------------
// Second-order ODEs

/// Raw Numerov sweep for psi'' = V psi on a uniform grid. Integration starts at
/// `anchor` (anywhere in the grid range) and proceeds in both directions. On
/// overflow the sweep stops; samples outside [first_valid, last_valid] are NaN.
struct NumerovSweep {
    Eigen::VectorXd psi;
    Eigen::VectorXd dpsi;  // Numerov-consistent first derivative
    Index first_valid = 0;
    Index last_valid = 0;
    bool truncated() const { return first_valid != 0 || last_valid != psi.size() - 1; }
};

NumerovSweep numerov_sweep(const SampledFunction& V, double anchor, double psi0, double dpsi0);

/// psi'' = V psi with psi(anchor) = psi0, psi'(anchor) = dpsi0. The result carries
/// Numerov-consistent slopes. Throws OverflowError.
SampledFunction integrate_schrodinger(const SampledFunction& V, double anchor, double psi0, double dpsi0);
inline SampledFunction integrate_schrodinger(const SampledFunction& V, double psi0, double dpsi0) {
    return integrate_schrodinger(V, V.grid().front(), psi0, dpsi0);
}

/// First derivative of Numerov samples: O(h^4) in the interior, O(h^3) at the edges.
Eigen::VectorXd numerov_derivative(const Eigen::VectorXd& psi, const Eigen::VectorXd& V, double h);

/// A u'' + B u' + C u = 0 by classical RK4 on (u, u'), `substeps` RK4 steps per
/// panel. Initial data at `anchor`, integrated both ways. The result carries u'
/// as slopes. Throws SingularityError where A vanishes.
SampledFunction integrate_general_ode(const Expr& A, const Expr& B, const Expr& C, const Grid& grid,
                                      double anchor, double u0, double du0, int substeps = 4);
inline SampledFunction integrate_general_ode(const Expr& A, const Expr& B, const Expr& C,
                                             const Grid& grid, double u0, double du0) {
    return integrate_general_ode(A, B, C, grid, grid.front(), u0, du0);
}

// ---------------------------------------------------------------------------
// Differences and roots

/// 4th-order central differences inside, 2nd-order stencils in the two outermost
/// points at each edge. Stencils that touch excluded samples give excluded output.
SampledFunction derivative(const SampledFunction& s, int order);

/// Derivative of a smooth callable by Richardson-extrapolated differences.
/// side = 0 is central; +1 / -1 only sample at or to the right / left of x.
double numeric_derivative(const RealFunction& f, double x, double h, int side = 0);

struct SignChange {
    double lo;
    double hi;
    double root;
};

/// Sign changes of the samples, refined by bisection on the local cubic through
/// the four surrounding samples. Exact zeros at grid points are reported once.
std::vector<SignChange> find_sign_changes(const SampledFunction& s);

/// Cubic Lagrange interpolation through the four samples nearest to x.
double local_cubic(const Grid& grid, const Eigen::VectorXd& values, double x);

}  // namespace darboux

#endif  // DARBOUX_NUMERICS_HPP

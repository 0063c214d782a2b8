#ifndef DARBOUX_TRANSFORM_HPP
#define DARBOUX_TRANSFORM_HPP

#include <optional>

#include "darboux/expr.hpp"
#include "darboux/numerics.hpp"

namespace darboux {

/// A u'' + B u' + C u = 0 on [x_min, x_max] (coefficient mode), or a
/// potential V1(z) given directly on [z_min, z_max] (direct mode).
struct ProblemSpec {
    enum class Mode { Coefficients, Direct };

    Mode mode = Mode::Coefficients;
    Expr A, B, C;
    double x_min = 0.0;
    double x_max = 1.0;
    /// Lower limit of every x-side antiderivative; R0(x0) = 1 and z(x0) = 0.
    double base_point = 0.5;
    Expr V1;
    double z_min = 0.0;
    double z_max = 1.0;
    Index grid_size = kDefaultGridSize;
    double tol = kDefaultTolerance;

    static ProblemSpec coefficients(Expr A, Expr B, Expr C, double x_min, double x_max,
                                    std::optional<double> base_point = std::nullopt,
                                    Index grid_size = kDefaultGridSize);
    static ProblemSpec direct(Expr V1, double z_min, double z_max, Index grid_size = kDefaultGridSize);

    Grid x_grid() const { return Grid::uniform(x_min, x_max, grid_size); }
    Grid z_grid() const { return Grid::uniform(z_min, z_max, grid_size); }
};

/// Throws SingularityError if A vanishes or B/A, C/A cannot be evaluated on the
/// x-grid, std::invalid_argument for a malformed domain or base point.
void validate(const ProblemSpec& p);

/// Coefficients of y' + (R'/R + B/A) y + R y^2 = -C/(A R) sampled on the x-grid.
struct GeneralRiccati {
    SampledFunction linear_coeff;
    SampledFunction quadratic_coeff;
    SampledFunction rhs;
};

/// R0(x) = exp(-\int_{x0}^x B/A) anywhere in the domain: tabulated on the
/// x-grid, and between grid points continued from the nearest sample by a
/// short quadrature.
class GaugeFactor {
public:
    explicit GaugeFactor(const ProblemSpec& p);

    double operator()(double x) const;
    /// Samples with slopes R0' = -(B/A) R0.
    const SampledFunction& samples() const noexcept { return samples_; }

private:
    Expr ratio_;  // B/A
    double tol_;
    SampledFunction samples_;
};

SampledFunction compute_R0(const ProblemSpec& p);

/// R' is taken symbolically.
GeneralRiccati riccati_coefficients(const ProblemSpec& p, const Expr& R);
/// R' by Richardson-extrapolated differences of the callable.
GeneralRiccati riccati_coefficients(const ProblemSpec& p, const RealFunction& R);

struct TransformResult {
    // x-side, absent in pure direct mode
    std::optional<SampledFunction> R0;            ///< R0 on the x-grid, Hermite slopes
    std::optional<SampledFunction> zmap;          ///< z(x), strictly increasing
    std::optional<SampledFunction> inverse_zmap;  ///< x(z)
    std::optional<SampledFunction> log_R0_slope;  ///< R0'/R0 on the x-grid
    SampledFunction V1;                           ///< on a uniform z-grid
    double z_min = 0.0;
    double z_max = 0.0;

    bool has_x_side() const { return R0.has_value(); }
};

TransformResult compute_transform(const ProblemSpec& p);

/// Attaches an explicit change of variable z(x) to a transform, e.g. z = ln x
/// for a potential that was given directly. R0 = dz/dx must stay positive.
TransformResult with_pullback(TransformResult t, const Expr& z_of_x, double x_min, double x_max,
                              Index grid_size = kDefaultGridSize);

/// u(x) = psi(z(x)) and the residual of u'' - (R0'/R0) u' - R0^2 V(z(x)) u = 0 on
/// the x-grid. Samples whose z falls outside psi's grid, or whose stencils touch
/// such samples, are excluded.
struct Pullback {
    SampledFunction u;
    SampledFunction u_second;
    SampledFunction residual;
    /// Largest of |u''|, |(R0'/R0) u'| and |R0^2 V u| at each sample.
    SampledFunction term_scale;

    /// max |residual| / max |u''| over grid points in [lo, hi].
    double relative_max(double lo, double hi) const;
    /// max |residual| / max term_scale over [lo, hi]; stays meaningful when
    /// u'' vanishes identically, as for u = x.
    double term_relative_max(double lo, double hi) const;
};

Pullback pullback_residual(const TransformResult& t, const SampledFunction& psi_z, const SampledFunction& V);

/// Solves the x-side equation by RK4 from (x_anchor, u0, du0) and compares
/// u(x(z)) with psi_z over the common domain.
struct AxisComparison {
    double max_abs_diff = 0.0;
    double max_abs_u = 0.0;
    double relative() const { return max_abs_u > 0.0 ? max_abs_diff / max_abs_u : max_abs_diff; }
};

AxisComparison compare_axes(const ProblemSpec& p, const TransformResult& t, const SampledFunction& psi_z,
                            double x_anchor, double u0, double du0);

}  // namespace darboux

#endif  // DARBOUX_TRANSFORM_HPP

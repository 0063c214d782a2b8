#ifndef DARBOUX_SUSY_HPP
#define DARBOUX_SUSY_HPP

#include <limits>
#include <optional>
#include <vector>

#include "darboux/numerics.hpp"

namespace darboux {

/// Samples within this many grid steps of a node are excluded from y and V2.
inline constexpr int kNodeExclusionSteps = 3;

/// Distance from nodes, in grid steps, beyond which finite-difference cross
/// checks of the log derivative reach 1e-5: their relative truncation error
/// scales like (h / distance)^4.
inline constexpr int kCrossCheckClearanceSteps = 25;

struct InitialData {
    double anchor = 0.0;
    double psi = 0.0;
    double dpsi = 0.0;
};

/// A solution of psi'' = V1 psi with everything the partner constructions need.
struct ZeroMode {
    SampledFunction psi;   ///< Numerov samples with Numerov-consistent slopes
    SampledFunction dpsi;  ///< psi'
    SampledFunction y;     ///< psi'/psi, excluded near nodes
    std::vector<double> nodes;  ///< interior sign changes, refined
    /// Zeros at the grid ends, or just beyond them where the linear model of psi
    /// at the end sample places one. Not nodes, but y is singular there.
    std::vector<double> edge_zeros;
    SampledFunction I;     ///< \int_base^z psi^2
    double integral_base = 0.0;
    InitialData ic;
    /// Index of psi's first sample in the potential's grid; nonzero only when
    /// the integration overflowed and the domain was truncated.
    Index offset = 0;
    bool truncated = false;

    const Grid& grid() const { return psi.grid(); }
    double I_min() const { return I.values().minCoeff(); }
    double I_max() const { return I.values().maxCoeff(); }
    /// Distance from z to the nearest zero of psi, edge zeros included
    /// (infinity without any).
    double node_distance(double z) const;
};

/// Numerov in both directions from the anchor. On overflow the domain is
/// truncated to the valid samples and `truncated` is set. `integral_base`
/// defaults to the left edge of the (possibly truncated) grid.
ZeroMode solve_zero_mode(const SampledFunction& V1, double anchor, double psi0, double dpsi0,
                         std::optional<double> integral_base = std::nullopt, double tol = kDefaultTolerance);

/// V1 restricted to the samples a zero mode covers.
SampledFunction restrict_to(const SampledFunction& V1, const ZeroMode& m);

/// V2 = V1 - 2 (ln psi)'' evaluated as 2 y^2 - V1; excluded around nodes.
SampledFunction darboux_partner(const SampledFunction& V1, const ZeroMode& m);

struct FamilyMember {
    double lambda = 0.0;
    SampledFunction V1_lambda;
    SampledFunction psi_lambda;
    bool admissible = false;
};

/// Margin by which I + lambda must stay away from zero: 1e-6 (I_max - I_min).
double admissibility_margin(const ZeroMode& m);

/// V1(z; lambda) = V1 - 4 psi psi' / (I + lambda) + 2 psi^4 / (I + lambda)^2 and
/// psi(z, lambda) = psi / (I + lambda). Samples where |I + lambda| is within the
/// margin are excluded.
FamilyMember family_member(const SampledFunction& V1, const ZeroMode& m, double lambda);

struct Interval {
    double lo;
    double hi;
    bool contains(double v) const { return v > lo && v < hi; }
};

/// Values of lambda with I(z) + lambda bounded away from zero on the grid:
/// (-inf, -I_max - eps) and (-I_min + eps, +inf).
std::vector<Interval> admissible_lambda(const ZeroMode& m);
bool is_admissible(const ZeroMode& m, double lambda);

/// The nodes split the domain into nodes + 1 branches, in order.
std::vector<Interval> branch_split(const ZeroMode& m);

struct ResidualReport {
    double max = 0.0;
    double rms = 0.0;
    Index points = 0;
};

/// |psi_l'' - V1_l psi_l| over interior points, normalized by max |psi_l''|.
/// Throws std::invalid_argument for an inadmissible member.
ResidualReport verify_isospectral(const SampledFunction& V1, const FamilyMember& fm);

/// Same normalized residual for the zero mode itself.
ResidualReport zero_mode_residual(const SampledFunction& V1, const ZeroMode& m);

/// |y' + y^2 - V1| / (1 + |V1|) with y' by finite differences of y, at interior
/// points at least `clearance` away from every node.
///
/// Near a simple node y' is about -1/d^2 and its 4th-order difference errs by
/// about 4 h^4 / d^6, so the residual falls below tol for d >= (4 h^4 / tol)^(1/6).
double riccati_clearance(double h, double tol = 1e-5);
ResidualReport riccati_residual(const SampledFunction& V1, const ZeroMode& m, double clearance);

/// 2 y^2 - V1 against V1 - 2 FD2[ln|psi|], scaled by 1 + |V2|, away from nodes.
ResidualReport darboux_cross_check(const SampledFunction& V1, const ZeroMode& m, double clearance);

/// Closed-form V1(z; lambda) against V1 - 2 FD2[ln(I + lambda)], scaled by 1 + |V1_lambda|.
ResidualReport family_cross_check(const SampledFunction& V1, const ZeroMode& m, const FamilyMember& fm);

/// max |psi_l (I + lambda) - psi| / max |psi|.
double family_identity_error(const ZeroMode& m, const FamilyMember& fm);

}  // namespace darboux

#endif  // DARBOUX_SUSY_HPP

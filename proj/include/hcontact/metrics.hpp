#pragma once

#include "hcontact/lifts.hpp"

#include <limits>
#include <optional>

namespace hcontact {

/// kappa_V(p'; u) with its witness: the Legendrian lift through p' of the
/// extremal base disc tangent to d pi(u).
struct MetricCertificate {
    double value = 0.0;
    HoloMap base_disc;
    std::optional<LiftedDisc> witness;
    /// Witness tangent at 0 = lambda u.
    cplx lambda;
    /// |witness'(0) - lambda u| / |u|.
    double proportionality = 0.0;
    /// Legendrian residual of the witness at certificate_params().
    double legendrian = 0.0;
};

/// Raises NotInContactHyperplane when |xi_{p'}(u)| >= tol, DegenerateInput
/// for u = 0 and UnsupportedDomain for bases without a model metric.
MetricCertificate kappa_V(const Lift& lift, const CVec& p, const CVec& u, double tol = 1e-10);

/// Nodes in (0, 1) where tangency is checked on every piece.
std::vector<double> tangency_nodes();

struct VLength {
    double value = 0.0;
    /// max |xi(gamma')| over the tangency nodes.
    double tangency = 0.0;
};

/// Integral of kappa_V along a curve in the total space, computed as the
/// model length of its base projection. Raises TangencyViolation (with the
/// residual and location) when the curve is not horizontal.
VLength v_length(const Lift& lift, const Path& curve, double tol = 1e-10);

/// 1/2 sum log((1 + t_j)/(1 - t_j)). Raises ParamOutOfRange.
double chain_length(std::span<const double> t);
double chain_length(const Chain& chain);
double chain_length(const VChain& chain);

struct DistBounds {
    double lower = 0.0;
    /// +infinity when the lifted chain misses the fiber of q'.
    double upper = std::numeric_limits<double>::infinity();
    /// |y_end - y(q')| of the lifted chain.
    double gap = 0.0;
    std::optional<VChain> chain;

    bool finite() const noexcept { return upper < std::numeric_limits<double>::infinity(); }
};

/// lower = k_S(pi p', pi q'); upper = length of the lifted geodesic chain
/// when it ends at q' (within tol).
DistBounds dist_bounds(const Lift& lift, const CVec& p, const CVec& q, double tol = 1e-9);

struct FiberDistance {
    double value = 0.0;
    /// Empty when q = pi(p').
    VChain chain;
};

/// k_S(pi p', q) with the lifted chain realizing it.
FiberDistance dist_to_fiber(const Lift& lift, const CVec& p, const CVec& q);

/// Box B_r = {|z|^2 + |w|^2 < r^2, |y| < r} for the standard structure
/// dy - z dw on C^3.
bool in_box(double r, const CVec& p);

/// Horizontal curve from p to the origin made of coordinate moves and the
/// curve (s, s + t, s t), s = sqrt(y): p -> (0, w, y) -> (0, 2s, y) ->
/// (s, 2s, y) -> (s, s, 0) -> (0, s, 0) -> 0, zero-length pieces skipped.
/// Raises IntermediatePointEscapes when a corner leaves B_r.
Path local_connect(double r, const CVec& p);

struct BoxBound {
    double value = 0.0;
    /// Radius of the linear base disc used as witness.
    double rho = 0.0;
    double base_slack = 0.0;
    /// Largest radius allowed by the fiber constraint (infinite if none).
    double fiber_rho = 0.0;
};

/// Upper bound |d pi u| / rho for kappa_V on B_r, from the Legendrian lift of
/// the linear base disc pi(p) + rho zeta e with e = d pi u / |d pi u|.
/// Raises NotInContactHyperplane and DegenerateDirection.
BoxBound kappa_upper_box(double r, const CVec& p, const CVec& u, double tol = 1e-10);

struct BoxLength {
    double value = 0.0;
    double tangency = 0.0;
};

/// Integral of kappa_upper_box along a horizontal curve in B_r.
BoxLength box_length(double r, const Path& curve, double tol = 1e-10);

} // namespace hcontact

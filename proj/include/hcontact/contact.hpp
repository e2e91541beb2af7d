#pragma once

#include "hcontact/domains.hpp"
#include "hcontact/forms.hpp"

#include <span>
#include <string>
#include <vector>

namespace hcontact {

/// Holomorphic 1-form xi on C^{2N+1}; V = ker xi.
struct ContactData {
    DiffForm xi;
    int N = 1;
    Domain domain;
};

/// Holomorphic 2-form omega on C^{2N}.
struct SymplecticData {
    DiffForm omega;
    int N = 1;
    Domain domain;
};

/// Raises DimensionMismatch unless xi is a 1-form on an odd dimension
/// matching the domain.
ContactData make_contact(DiffForm xi, Domain domain);
/// Raises DimensionMismatch unless omega is a 2-form on an even dimension
/// matching the domain.
SymplecticData make_symplectic(DiffForm omega, Domain domain);

/// dy - z_1 dw_1 - ... - z_N dw_N on (z_1..z_N, w_1..w_N, y), sampled on the
/// unit box around the origin.
ContactData standard_contact(int N);

/// A sample where evaluation raised; recorded instead of aborting the check.
struct SampleFailure {
    CVec point;
    std::string message;
};

struct ContactReport {
    bool pass = false;
    /// min over samples of |coefficient of xi ^ (d xi)^N|.
    double min_volume = 0.0;
    CVec worst_point;
    std::vector<SampleFailure> failures;
};

struct SymplecticReport {
    bool pass = false;
    /// max over samples of the largest |coefficient| of d omega.
    double max_dclosed = 0.0;
    /// min over samples of |coefficient of omega^N|.
    double min_top = 0.0;
    CVec worst_point;
    std::vector<SampleFailure> failures;
};

/// Top coefficient of xi ^ (d xi)^N at p.
cplx contact_volume(const ContactData& c, const CVec& p);
/// Top coefficient of omega^N at p.
cplx symplectic_volume(const SymplecticData& s, const CVec& p);

/// Passes iff min_volume > tol and no sample failed.
ContactReport contact_check(const ContactData& c, std::span<const CVec> samples, double tol = 1e-10);
/// Passes iff max_dclosed < tol, min_top > tol and no sample failed.
SymplecticReport symplectic_check(const SymplecticData& s, std::span<const CVec> samples, double tol = 1e-10);

struct ReebResult {
    CVec v;
    /// |xi(v) - 1|.
    double normalization = 0.0;
    /// max |coefficient| of i_v d xi.
    double horizontal = 0.0;
};

/// Unique v with i_v d xi = 0 and xi(v) = 1 at p, from the bordered system
/// [[d xi_p, xi_p^T], [xi_p, 0]] (v, mu) = (0, 1). Raises SingularSystem when
/// the structure degenerates at p.
ReebResult reeb_solve(const ContactData& c, const CVec& p);

/// max over the parameters of |xi_{phi(s)}(phi'(s))| for a curve or disc phi
/// of one variable.
double legendrian_residual(const DiffForm& xi, const HoloMap& phi, std::span<const cplx> params);
inline double legendrian_residual(const ContactData& c, const HoloMap& phi, std::span<const cplx> params)
{
    return legendrian_residual(c.xi, phi, params);
}

/// Time-s flow of the holomorphic vector field X (components in the ambient
/// coordinates) from p, by classical RK4 with complex time steps.
CVec flow(const HoloMap& field, const CVec& p, cplx s, int steps = 16);

/// (Y_{-s} X_{-s} Y_s X_s (p) - p) / s^2, which tends to the bracket [X, Y](p).
CVec bracket_surrogate(const HoloMap& x, const HoloMap& y, const CVec& p, double s = 1e-2);

/// The horizontal frame of the standard structure: d/dz_j, then
/// d/dw_j + z_j d/dy, for j = 1..N.
std::vector<HoloMap> standard_horizontal_fields(int N);

} // namespace hcontact

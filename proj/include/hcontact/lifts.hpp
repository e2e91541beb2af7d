#pragma once

#include "hcontact/contact.hpp"
#include "hcontact/domains.hpp"
#include "hcontact/forms.hpp"
#include "hcontact/quadrature.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hcontact {

/// Trivialized contact symplectic lift over S: total space S x C with the
/// fiber coordinate y appended last and xi = dy - pi*(nu + twist). The Reeb
/// field is d/dy.
struct Lift {
    SymplecticData base;
    DiffForm nu;
    DiffForm twist;
    /// nu + twist, the connection potential on S.
    DiffForm eta;
    /// Contact form on the total space, sampled on base x disc(1).
    ContactData contact;

    int base_dim() const noexcept { return base.omega.dim(); }
    int total_dim() const noexcept { return base.omega.dim() + 1; }
};

/// Default base sample set used when a caller provides none.
std::vector<CVec> default_base_samples(const Domain& d);
/// Total-space points over base samples, fiber coordinates on |y| = 1/2.
std::vector<CVec> total_space_samples(std::span<const CVec> base);

/// Raises PotentialMismatch when max |d nu - omega| >= tol at the samples and
/// TwistNotClosed when max |d twist| >= tol.
Lift make_lift(const SymplecticData& base, DiffForm nu, DiffForm twist, std::span<const CVec> samples,
               double tol = 1e-10);
Lift make_lift(const SymplecticData& base, DiffForm nu, DiffForm twist, double tol = 1e-10);

struct LiftReport {
    bool pass = false;
    /// max |d xi + pi* omega|
    double curvature = 0.0;
    /// max |xi(d/dy) - 1|
    double reeb_normalization = 0.0;
    /// max |i_{d/dy} d xi|
    double reeb_horizontal = 0.0;
    ContactReport contact;
    std::vector<SampleFailure> failures;

    double max_residual() const;
};

/// Samples live in the total space.
LiftReport validate_lift(const Lift& lift, std::span<const CVec> samples, double tol = 1e-10);

struct DiscLiftOptions {
    QuadOptions quad{1e-13};
    /// Legendrian residual bound checked at the certificate samples.
    double tol = 1e-10;
};

/// Legendrian lift zeta -> (phi(zeta), y(zeta)) of a base disc, with
/// y(zeta) = y0 + integral over [0, zeta] of eta(phi').
class LiftedDisc {
public:
    LiftedDisc(HoloMap base, DiffForm eta, cplx y0, QuadOptions quad);

    const HoloMap& base() const noexcept { return base_; }
    cplx y0() const noexcept { return y0_; }
    cplx fiber(cplx zeta) const;
    CVec eval(cplx zeta) const;
    /// Exact derivative (phi', eta(phi')).
    CVec velocity(cplx zeta) const;
    /// max |xi(d/dzeta of the lift)| at `params`, with the fiber derivative
    /// taken numerically (Cauchy integral), so the quadrature itself is checked.
    double residual(std::span<const cplx> params) const;

private:
    HoloMap base_;
    DiffForm eta_;
    cplx y0_;
    QuadOptions quad_;
    /// phi* eta = g d zeta
    Expr g_;
};

/// 64 parameters on four circles of radius at most 0.8.
std::vector<cplx> certificate_params();

struct DiscLift {
    LiftedDisc disc;
    /// Legendrian residual at certificate_params().
    double residual = 0.0;
};

/// Raises ImageEscapesDomain when the sampled image of phi leaves S and
/// QuadratureNotConverged from the fiber integral.
DiscLift lift_disc(const Lift& lift, const HoloMap& phi, cplx y0, const DiscLiftOptions& opts = {});

struct VChain {
    std::vector<LiftedDisc> discs;
    std::vector<double> t;
    CVec start;
    CVec end;
    /// max Legendrian residual over the discs.
    double residual = 0.0;
};

VChain lift_chain(const Lift& lift, const Chain& chain, cplx start_y, const DiscLiftOptions& opts = {});

struct ScaleResult {
    cplx lambda;
    /// max over samples of |F* omega' - lambda omega| / ((1 + |lambda|) max(1, |omega|)).
    double residual = 0.0;
    CVec fit_point;
};

/// F* target = lambda * source at the samples. lambda is read off at the
/// sample with the largest |source| coefficient. Raises NotScaleSymplectic
/// with the residual when it is >= tol.
ScaleResult scale_factor(const HoloMap& f, const SymplecticData& source, const SymplecticData& target,
                         std::span<const CVec> samples, double tol = 1e-8);
inline ScaleResult scale_factor(const HoloMap& f, const SymplecticData& s, std::span<const CVec> samples,
                                double tol = 1e-8)
{
    return scale_factor(f, s, s, samples, tol);
}

struct PeriodVector {
    std::vector<Path> loops;
    std::vector<cplx> values;

    double max_abs() const;
};

/// Periods of a closed 1-form over the loops.
PeriodVector periods(const DiffForm& a, const std::vector<Path>& loops, const QuadOptions& quad = {});

/// h(p) = integral of a closed 1-form along canonical_path(domain, p), so
/// h(basepoint) = 0 and dh = a where the periods vanish.
class PathPrimitive {
public:
    PathPrimitive(DiffForm form, Domain domain, QuadOptions quad = {});

    const DiffForm& form() const noexcept { return form_; }
    cplx operator()(const CVec& p) const;
    /// dh at p by Cauchy integrals in each coordinate.
    CVec gradient(const CVec& p) const;
    /// max over samples of |dh - a|.
    double residual(std::span<const CVec> samples) const;

private:
    DiffForm form_;
    Domain domain_;
    QuadOptions quad_;
};

/// Periods of (nu1 + twist1) - (nu2 + twist2). Raises BaseMismatch when the
/// base domains or symplectic forms differ and NotClosed when the difference
/// is not closed.
PeriodVector theta_class(const Lift& l1, const Lift& l2, const std::vector<Path>& loops,
                         std::span<const CVec> samples = {}, double tol = 1e-9);

struct Equivalence {
    bool equivalent = false;
    PeriodVector periods;
    /// Phi(p, y) = (p, y + h(p)) with dh = eta2 - eta1 (present iff equivalent).
    std::optional<PathPrimitive> shift;
    /// max |Phi* xi2 - xi1| at the samples.
    double residual = 0.0;

    CVec apply(const CVec& total) const;
};

Equivalence are_equivalent(const Lift& l1, const Lift& l2, const std::vector<Path>& loops,
                           std::span<const CVec> samples = {}, double tol = 1e-9);

/// Integral of (nu + twist) - nu_ref over the loop: the fiber displacement of
/// the parallel lift for the flat connection xi + pi* nu_ref. Raises
/// NotAPotential when d nu_ref differs from omega at the samples.
cplx monodromy(const Lift& lift, const DiffForm& nu_ref, const Path& loop, std::span<const CVec> samples = {},
               double tol = 1e-9);

struct FitResult {
    bool fit = false;
    PeriodVector periods;
    /// Section h with xi = d(y + h) - pi* nu_ref (present iff fit).
    std::optional<PathPrimitive> section;
    double residual = 0.0;
};

FitResult is_fit(const Lift& lift, const DiffForm& nu_ref, const std::vector<Path>& loops,
                 std::span<const CVec> samples = {}, double tol = 1e-9);

struct AutomorphismLift {
    bool liftable = false;
    cplx lambda;
    double scale_residual = 0.0;
    /// Periods of rho = F* eta - lambda eta.
    PeriodVector periods;
    HoloMap map;
    std::optional<PathPrimitive> h;
    /// max |F~* xi - lambda xi| at the total-space samples.
    double residual = 0.0;

    /// F~(p, y) = (F(p), lambda y + h(p)).
    CVec apply(const CVec& total) const;
    /// Jacobian of F~: [[J_F, 0], [dh, lambda]].
    CMatrix jacobian(const CVec& total) const;
};

AutomorphismLift lift_automorphism(const Lift& lift, const HoloMap& f, const std::vector<Path>& loops,
                                   std::span<const CVec> samples = {}, double tol = 1e-8);

struct PulledLift {
    Lift lift;
    double min_top = 0.0;
    /// max |(phi x id)* xi' - xi| at the samples.
    double morphism_residual = 0.0;
};

/// Lift over `domain` pulled back along phi: domain -> S'. Raises
/// DegeneratePullback with min |(phi* omega')^N| when the pullback degenerates.
PulledLift pullback_lift(const HoloMap& phi, const Lift& target, const Domain& domain, std::span<const CVec> samples,
                         double tol = 1e-10);

struct Chart {
    std::string name;
    DiffForm nu;
};

struct Transition {
    int a = 0;
    int b = 0;
    /// f_ab on the overlap of charts a and b.
    Expr f;
    std::vector<CVec> samples;
};

struct TripleOverlap {
    int a = 0;
    int b = 0;
    int c = 0;
    std::vector<CVec> samples;
};

/// Cech data of a lift: local potentials nu_a and transition functions with
/// d f_ab = nu_a - nu_b and f_ab + f_bc + f_ca = 0.
struct CechAtlas {
    Domain domain;
    std::vector<Chart> charts;
    std::vector<Transition> transitions;
    std::vector<TripleOverlap> triples;
};

struct AtlasReport {
    bool pass = false;
    double cocycle = 0.0;
    double differential = 0.0;
    /// Transition with the largest differential residual, -1 if none.
    int worst_transition = -1;
    std::vector<SampleFailure> failures;
};

AtlasReport validate_atlas(const CechAtlas& atlas, double tol = 1e-10);

/// Three sector charts covering disc x punctured disc for the lift
/// dy - (z - c/w) dw: sector j is |arg(w) - 2 pi j / 3| < 5 pi / 6, with
/// y_j = y + c log_j(w) + j z w, nu_j = z dw + d(j z w), f_jk = y_j - y_k.
CechAtlas punctured_sector_atlas(cplx c, int samples_per_overlap = 64, std::uint64_t seed = 1);

} // namespace hcontact

#include "hcontact/lifts.hpp"
#include "hcontact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hcontact {

namespace {

void require_base_one_form(const DiffForm& a, int n, const char* what)
{
    if (a.degree() != 1 || a.dim() != n)
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be a 1-form on the base");
}

double max_difference(const DiffForm& a, const DiffForm& b, std::span<const CVec> samples)
{
    const DiffForm d = a - b;
    double worst = 0.0;
    for (const auto& p : samples)
        worst = std::max(worst, d.eval(p).max_abs());
    return worst;
}

std::vector<CVec> or_default(std::span<const CVec> samples, const Domain& d)
{
    if (!samples.empty())
        return {samples.begin(), samples.end()};
    return default_base_samples(d);
}

} // namespace

std::vector<CVec> total_space_samples(std::span<const CVec> base)
{
    std::vector<CVec> out;
    out.reserve(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        out.push_back(base[i].appended(std::polar(0.5, 2.0 * std::numbers::pi * static_cast<double>(i) / 7.0)));
    return out;
}

namespace {

// Scalar expression g with phi* a = g d zeta for a curve phi of one variable.
Expr pulled_coefficient(const HoloMap& phi, const DiffForm& a)
{
    const DiffForm p = pullback(phi, a);
    return p.coeff(Mask{1});
}

} // namespace

std::vector<CVec> default_base_samples(const Domain& d) { return sample(d, 64, 1, 1e-2); }

Lift make_lift(const SymplecticData& base, DiffForm nu, DiffForm twist, std::span<const CVec> samples, double tol)
{
    const int n = base.omega.dim();
    require_base_one_form(nu, n, "symplectic potential");
    require_base_one_form(twist, n, "twist");
    const double potential = max_difference(exterior_derivative(nu), base.omega, samples);
    if (!(potential < tol))
        throw Error(ErrorKind::PotentialMismatch, "d nu differs from omega", potential);
    const DiffForm dtwist = exterior_derivative(twist);
    double closed = 0.0;
    for (const auto& p : samples)
        closed = std::max(closed, dtwist.eval(p).max_abs());
    if (!(closed < tol))
        throw Error(ErrorKind::TwistNotClosed, "twist form is not closed", closed);

    DiffForm eta = nu + twist;
    DiffForm xi = DiffForm::basis(n + 1, {n}) - eta.extended(n + 1);
    ContactData contact = make_contact(std::move(xi), Domain::product({base.domain, Domain::disc()}));
    return Lift{base, std::move(nu), std::move(twist), std::move(eta), std::move(contact)};
}

Lift make_lift(const SymplecticData& base, DiffForm nu, DiffForm twist, double tol)
{
    const auto samples = default_base_samples(base.domain);
    return make_lift(base, std::move(nu), std::move(twist), samples, tol);
}

double LiftReport::max_residual() const { return std::max({curvature, reeb_normalization, reeb_horizontal}); }

LiftReport validate_lift(const Lift& lift, std::span<const CVec> samples, double tol)
{
    const int n = lift.base_dim();
    const DiffForm dxi = exterior_derivative(lift.contact.xi);
    const DiffForm curvature = dxi + lift.base.omega.extended(n + 1);
    CVec ey(static_cast<std::size_t>(n + 1));
    ey = ey.with(static_cast<std::size_t>(n), 1.0);
    const CVec ey1[1] = {ey};

    LiftReport r;
    for (const auto& p : samples) {
        try {
            r.curvature = std::max(r.curvature, curvature.eval(p).max_abs());
            r.reeb_normalization = std::max(r.reeb_normalization, std::abs(lift.contact.xi.eval(p).apply(ey1) - 1.0));
            r.reeb_horizontal = std::max(r.reeb_horizontal, interior(ey, dxi.eval(p)).max_abs());
        } catch (const Error& e) {
            r.failures.push_back({p, e.what()});
        }
    }
    r.contact = contact_check(lift.contact, samples, tol);
    r.pass = r.failures.empty() && r.contact.pass && r.max_residual() < tol;
    return r;
}

LiftedDisc::LiftedDisc(HoloMap base, DiffForm eta, cplx y0, QuadOptions quad)
    : base_(std::move(base)), eta_(std::move(eta)), y0_(y0), quad_(quad), g_(pulled_coefficient(base_, eta_))
{
}

cplx LiftedDisc::fiber(cplx zeta) const
{
    if (zeta == 0.0)
        return y0_;
    auto f = [&](double s) { return g_.eval(CVec{s * zeta}) * zeta; };
    return y0_ + integrate(f, 0.0, 1.0, quad_).value;
}

CVec LiftedDisc::eval(cplx zeta) const { return base_.eval(CVec{zeta}).appended(fiber(zeta)); }

CVec LiftedDisc::velocity(cplx zeta) const
{
    const CVec at{zeta};
    std::vector<cplx> v;
    for (int r = 0; r < base_.dim(); ++r)
        v.push_back(base_.partial(r, 0).eval(at));
    v.push_back(g_.eval(at));
    return CVec(std::move(v));
}

double LiftedDisc::residual(std::span<const cplx> params) const
{
    double worst = 0.0;
    for (const cplx zeta : params) {
        const double rho = std::min(0.1, 0.25 * (1.0 - std::abs(zeta)));
        const cplx dy = cauchy_derivative([&](cplx s) { return fiber(s); }, zeta, rho);
        worst = std::max(worst, std::abs(dy - g_.eval(CVec{zeta})));
    }
    return worst;
}

std::vector<cplx> certificate_params()
{
    std::vector<cplx> out;
    for (int ring = 1; ring <= 4; ++ring)
        for (int k = 0; k < 16; ++k)
            out.push_back(std::polar(0.2 * ring, 2.0 * std::numbers::pi * (k + 0.25 * ring) / 16.0));
    return out;
}

DiscLift lift_disc(const Lift& lift, const HoloMap& phi, cplx y0, const DiscLiftOptions& opts)
{
    if (phi.arity() != 1 || phi.dim() != lift.base_dim())
        throw Error(ErrorKind::DimensionMismatch, "lift_disc needs a disc of one variable in the base");
    std::vector<cplx> probes{0.0};
    for (double r : {0.5, 0.9, 0.95})
        for (int k = 0; k < 32; ++k)
            probes.push_back(std::polar(r, 2.0 * std::numbers::pi * k / 32.0));
    for (const cplx zeta : probes) {
        bool inside = false;
        try {
            inside = contains(lift.base.domain, phi.eval(CVec{zeta}));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DomainError)
                throw;
        }
        if (!inside)
            throw Error(ErrorKind::ImageEscapesDomain,
                        "disc leaves the base at zeta = " + format_complex(zeta), std::abs(zeta));
    }
    DiscLift out{LiftedDisc(phi, lift.eta, y0, opts.quad)};
    const auto params = certificate_params();
    out.residual = out.disc.residual(params);
    if (!(out.residual < opts.tol))
        throw Error(ErrorKind::QuadratureNotConverged, "lifted disc is not Legendrian to tolerance", out.residual);
    return out;
}

VChain lift_chain(const Lift& lift, const Chain& chain, cplx start_y, const DiscLiftOptions& opts)
{
    if (chain.links.empty())
        throw Error(ErrorKind::DegenerateInput, "empty chain");
    VChain out;
    cplx y = start_y;
    for (const auto& link : chain.links) {
        if (!(link.t > 0.0 && link.t < 1.0))
            throw Error(ErrorKind::ParamOutOfRange, "chain parameter outside (0, 1)", link.t);
        auto lifted = lift_disc(lift, link.disc, y, opts);
        out.residual = std::max(out.residual, lifted.residual);
        if (out.discs.empty())
            out.start = lifted.disc.eval(0.0);
        out.end = lifted.disc.eval(link.t);
        y = out.end[out.end.size() - 1];
        out.discs.push_back(std::move(lifted.disc));
        out.t.push_back(link.t);
    }
    return out;
}

ScaleResult scale_factor(const HoloMap& f, const SymplecticData& source, const SymplecticData& target,
                         std::span<const CVec> samples, double tol)
{
    if (f.arity() != source.omega.dim() || f.dim() != target.omega.dim())
        throw Error(ErrorKind::DimensionMismatch, "map does not match the symplectic dimensions");
    if (samples.empty())
        throw Error(ErrorKind::DegenerateInput, "scale_factor needs samples");
    std::vector<FormValue> src;
    std::vector<FormValue> pulled;
    std::size_t best = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        src.push_back(source.omega.eval(samples[i]));
        pulled.push_back(pullback(f, target.omega, samples[i]));
        if (src[i].max_abs() > src[best].max_abs())
            best = i;
    }
    const FormValue& s = src[best];
    if (s.terms().empty())
        throw Error(ErrorKind::DegenerateInput, "source form vanishes at every sample");
    auto largest = s.terms().begin();
    for (auto it = s.terms().begin(); it != s.terms().end(); ++it)
        if (std::abs(it->second) > std::abs(largest->second))
            largest = it;

    ScaleResult r{pulled[best].coeff(largest->first) / largest->second, 0.0, samples[best]};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double defect = (pulled[i] - r.lambda * src[i]).max_abs();
        r.residual = std::max(r.residual, defect / ((1.0 + std::abs(r.lambda)) * std::max(1.0, src[i].max_abs())));
    }
    if (!(r.residual < tol))
        throw Error(ErrorKind::NotScaleSymplectic,
                    "F* omega' is not a constant multiple of omega (fitted lambda " + format_complex(r.lambda) + ")",
                    r.residual);
    return r;
}

double PeriodVector::max_abs() const
{
    double m = 0.0;
    for (const auto& v : values)
        m = std::max(m, std::abs(v));
    return m;
}

PeriodVector periods(const DiffForm& a, const std::vector<Path>& loops, const QuadOptions& quad)
{
    PeriodVector pv{loops, {}};
    for (const auto& loop : loops)
        pv.values.push_back(path_integral(a, loop, quad).value);
    return pv;
}

PathPrimitive::PathPrimitive(DiffForm form, Domain domain, QuadOptions quad)
    : form_(std::move(form)), domain_(std::move(domain)), quad_(quad)
{
    if (form_.degree() != 1 || form_.dim() != domain_.dim())
        throw Error(ErrorKind::DimensionMismatch, "primitive needs a 1-form on the domain");
}

cplx PathPrimitive::operator()(const CVec& p) const
{
    if (form_.is_zero())
        return 0.0;
    return path_integral(form_, canonical_path(domain_, p), quad_).value;
}

CVec PathPrimitive::gradient(const CVec& p) const
{
    const double rho = std::min(0.05, 0.5 * boundary_distance(domain_, p));
    std::vector<cplx> g(p.size());
    if (form_.is_zero())
        return CVec(std::move(g));
    for (std::size_t i = 0; i < p.size(); ++i)
        g[i] = cauchy_derivative([&](cplx s) { return (*this)(p.with(i, s)); }, p[i], rho);
    return CVec(std::move(g));
}

double PathPrimitive::residual(std::span<const CVec> samples) const
{
    double worst = 0.0;
    for (const auto& p : samples) {
        const CVec g = gradient(p);
        const FormValue a = form_.eval(p);
        for (std::size_t i = 0; i < p.size(); ++i)
            worst = std::max(worst, std::abs(g[i] - a.coeff(Mask{1} << i)));
    }
    return worst;
}

PeriodVector theta_class(const Lift& l1, const Lift& l2, const std::vector<Path>& loops, std::span<const CVec> samples,
                         double tol)
{
    if (!(l1.base.domain == l2.base.domain))
        throw Error(ErrorKind::BaseMismatch,
                    "bases differ: " + l1.base.domain.describe() + " vs " + l2.base.domain.describe());
    const auto pts = or_default(samples, l1.base.domain);
    const double omega_gap = max_difference(l1.base.omega, l2.base.omega, pts);
    if (!(omega_gap < tol))
        throw Error(ErrorKind::BaseMismatch, "symplectic forms differ", omega_gap);
    const DiffForm diff = l1.eta - l2.eta;
    const double closed = closedness_residual(diff, pts);
    if (!(closed < tol))
        throw Error(ErrorKind::NotClosed, "difference of potentials is not closed", closed);
    return periods(diff, loops, QuadOptions{1e-12});
}

CVec Equivalence::apply(const CVec& total) const
{
    const std::size_t n = total.size() - 1;
    const CVec p = total.head(n);
    return p.appended(total[n] + (shift ? (*shift)(p) : 0.0));
}

Equivalence are_equivalent(const Lift& l1, const Lift& l2, const std::vector<Path>& loops,
                           std::span<const CVec> samples, double tol)
{
    const auto pts = or_default(samples, l1.base.domain);
    Equivalence out;
    out.periods = theta_class(l1, l2, loops, pts, tol);
    if (!(out.periods.max_abs() < tol))
        return out;

    out.shift.emplace(l2.eta - l1.eta, l1.base.domain, QuadOptions{1e-13});
    const int n = l1.base_dim();
    for (const auto& q : total_space_samples(pts)) {
        const CVec p = q.head(static_cast<std::size_t>(n));
        const CVec dh = out.shift->gradient(p);
        CMatrix j = CMatrix::identity(n + 1);
        for (int i = 0; i < n; ++i)
            j(n, i) = dh[static_cast<std::size_t>(i)];
        const FormValue pulled = pullback_value(j, l2.contact.xi.eval(out.apply(q)));
        out.residual = std::max(out.residual, (pulled - l1.contact.xi.eval(q)).max_abs());
    }
    out.equivalent = out.residual < tol;
    return out;
}

namespace {

void require_potential(const Lift& lift, const DiffForm& nu_ref, const std::vector<CVec>& pts, double tol)
{
    require_base_one_form(nu_ref, lift.base_dim(), "reference potential");
    const double gap = max_difference(exterior_derivative(nu_ref), lift.base.omega, pts);
    if (!(gap < tol))
        throw Error(ErrorKind::NotAPotential, "d nu_ref differs from omega", gap);
}

} // namespace

cplx monodromy(const Lift& lift, const DiffForm& nu_ref, const Path& loop, std::span<const CVec> samples, double tol)
{
    const auto pts = or_default(samples, lift.base.domain);
    require_potential(lift, nu_ref, pts, tol);
    return path_integral(lift.eta - nu_ref, loop, QuadOptions{1e-12}).value;
}

FitResult is_fit(const Lift& lift, const DiffForm& nu_ref, const std::vector<Path>& loops,
                 std::span<const CVec> samples, double tol)
{
    const auto pts = or_default(samples, lift.base.domain);
    require_potential(lift, nu_ref, pts, tol);
    FitResult out;
    out.periods = periods(lift.eta - nu_ref, loops, QuadOptions{1e-12});
    if (!(out.periods.max_abs() < tol))
        return out;
    out.section.emplace(nu_ref - lift.eta, lift.base.domain, QuadOptions{1e-13});
    out.residual = out.section->residual(pts);
    out.fit = out.residual < tol;
    return out;
}

CVec AutomorphismLift::apply(const CVec& total) const
{
    const std::size_t n = total.size() - 1;
    const CVec p = total.head(n);
    return map.eval(p).appended(lambda * total[n] + (h ? (*h)(p) : 0.0));
}

CMatrix AutomorphismLift::jacobian(const CVec& total) const
{
    const int n = static_cast<int>(total.size()) - 1;
    const CVec p = total.head(static_cast<std::size_t>(n));
    const CMatrix jf = map.jacobian(p);
    const CVec dh = h ? h->gradient(p) : CVec(static_cast<std::size_t>(n));
    CMatrix j(n + 1, n + 1);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            j(r, c) = jf(r, c);
    for (int c = 0; c < n; ++c)
        j(n, c) = dh[static_cast<std::size_t>(c)];
    j(n, n) = lambda;
    return j;
}

AutomorphismLift lift_automorphism(const Lift& lift, const HoloMap& f, const std::vector<Path>& loops,
                                   std::span<const CVec> samples, double tol)
{
    const auto pts = or_default(samples, lift.base.domain);
    const auto scale = scale_factor(f, lift.base, pts, tol);
    AutomorphismLift out;
    out.lambda = scale.lambda;
    out.scale_residual = scale.residual;
    out.map = f;
    const DiffForm rho = pullback(f, lift.eta) - Expr(scale.lambda) * lift.eta;
    out.periods = periods(rho, loops, QuadOptions{1e-12});
    if (!(out.periods.max_abs() < tol))
        return out;
    out.h.emplace(rho, lift.base.domain, QuadOptions{1e-13});
    for (const auto& q : total_space_samples(pts)) {
        const FormValue pulled = pullback_value(out.jacobian(q), lift.contact.xi.eval(out.apply(q)));
        out.residual = std::max(out.residual, (pulled - out.lambda * lift.contact.xi.eval(q)).max_abs());
    }
    out.liftable = out.residual < tol;
    return out;
}

PulledLift pullback_lift(const HoloMap& phi, const Lift& target, const Domain& domain, std::span<const CVec> samples,
                         double tol)
{
    const int n = domain.dim();
    if (phi.arity() != n || phi.dim() != target.base_dim())
        throw Error(ErrorKind::DimensionMismatch, "pullback map does not match the domains");
    for (const auto& p : samples)
        if (!contains(target.base.domain, phi.eval(p)))
            throw Error(ErrorKind::ImageEscapesDomain, "map leaves the target base at " + p.to_string());
    const SymplecticData base = make_symplectic(pullback(phi, target.base.omega), domain);
    const auto check = symplectic_check(base, samples, tol);
    if (!check.failures.empty())
        throw Error(ErrorKind::DomainError, "pulled back form fails at " + check.failures.front().point.to_string());
    if (!(check.min_top > tol))
        throw Error(ErrorKind::DegeneratePullback, "pulled back form is degenerate", check.min_top);
    if (!(check.max_dclosed < tol))
        throw Error(ErrorKind::NotClosed, "pulled back form is not closed", check.max_dclosed);

    PulledLift out{make_lift(base, pullback(phi, target.nu), pullback(phi, target.twist), samples, tol)};
    out.min_top = check.min_top;
    std::vector<Expr> comps = phi.components();
    comps.push_back(Expr::var(n));
    const HoloMap total(n + 1, std::move(comps));
    for (const auto& q : total_space_samples({samples.begin(), samples.end()})) {
        const FormValue pulled = pullback(total, target.contact.xi, q);
        out.morphism_residual = std::max(out.morphism_residual, (pulled - out.lift.contact.xi.eval(q)).max_abs());
    }
    return out;
}

AtlasReport validate_atlas(const CechAtlas& atlas, double tol)
{
    const int n = atlas.domain.dim();
    const int charts = static_cast<int>(atlas.charts.size());
    auto transition = [&](int a, int b, const CVec& p) -> cplx {
        for (const auto& t : atlas.transitions) {
            if (t.a == a && t.b == b)
                return t.f.eval(p);
            if (t.a == b && t.b == a)
                return -t.f.eval(p);
        }
        throw Error(ErrorKind::InvalidArgument,
                    "missing transition between charts " + std::to_string(a) + " and " + std::to_string(b));
    };

    AtlasReport r;
    for (std::size_t i = 0; i < atlas.transitions.size(); ++i) {
        const auto& t = atlas.transitions[i];
        if (t.a < 0 || t.b < 0 || t.a >= charts || t.b >= charts)
            throw Error(ErrorKind::InvalidArgument, "transition refers to a missing chart");
        const DiffForm defect =
            differential(n, t.f) - (atlas.charts[static_cast<std::size_t>(t.a)].nu - atlas.charts[static_cast<std::size_t>(t.b)].nu);
        for (const auto& p : t.samples) {
            try {
                const double d = defect.eval(p).max_abs();
                if (d > r.differential || r.worst_transition < 0) {
                    r.differential = std::max(r.differential, d);
                    r.worst_transition = static_cast<int>(i);
                }
            } catch (const Error& e) {
                r.failures.push_back({p, e.what()});
            }
        }
    }
    for (const auto& tr : atlas.triples) {
        for (const auto& p : tr.samples) {
            try {
                const cplx s = transition(tr.a, tr.b, p) + transition(tr.b, tr.c, p) + transition(tr.c, tr.a, p);
                r.cocycle = std::max(r.cocycle, std::abs(s));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DomainError)
                    throw;
                r.failures.push_back({p, e.what()});
            }
        }
    }
    r.pass = r.failures.empty() && r.cocycle < tol && r.differential < tol;
    return r;
}

CechAtlas punctured_sector_atlas(cplx c, int samples_per_overlap, std::uint64_t seed)
{
    constexpr double pi = std::numbers::pi;
    constexpr double half_width = 5.0 * pi / 6.0;
    constexpr double margin = 0.05;
    const Expr z = Expr::var(0);
    const Expr w = Expr::var(1);

    CechAtlas atlas{Domain::product({Domain::disc(), Domain::punctured_disc()}), {}, {}, {}};
    std::vector<Expr> y_shift;
    for (int j = 0; j < 3; ++j) {
        const double theta = 2.0 * pi * j / 3.0;
        const Expr log_j = log(Expr(std::polar(1.0, -theta)) * w) + Expr(cplx(0.0, theta));
        const Expr g = Expr(static_cast<double>(j)) * z * w;
        y_shift.push_back(Expr(c) * log_j + g);
        atlas.charts.push_back({"sector " + std::to_string(j),
                                DiffForm::basis(2, {1}, z) + differential(2, g)});
    }

    auto in_sector = [&](const CVec& p, int j) {
        const double theta = 2.0 * pi * j / 3.0;
        const double rel = std::abs(std::arg(p[1] * std::polar(1.0, -theta)));
        return rel < half_width - margin;
    };
    auto collect = [&](std::vector<int> members) {
        std::vector<CVec> out;
        std::uint64_t s = seed;
        while (static_cast<int>(out.size()) < samples_per_overlap) {
            for (const auto& p : sample(atlas.domain, 4 * samples_per_overlap, s++, 1e-3)) {
                if (std::all_of(members.begin(), members.end(), [&](int j) { return in_sector(p, j); }))
                    out.push_back(p);
                if (static_cast<int>(out.size()) == samples_per_overlap)
                    break;
            }
        }
        return out;
    };

    for (auto [a, b] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}})
        atlas.transitions.push_back({a, b, y_shift[static_cast<std::size_t>(a)] - y_shift[static_cast<std::size_t>(b)],
                                     collect({a, b})});
    atlas.triples.push_back({0, 1, 2, collect({0, 1, 2})});
    return atlas;
}

} // namespace hcontact

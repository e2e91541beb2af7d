#include "hcontact/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hcontact {

namespace {

const ContactData& standard1()
{
    static const ContactData c = standard_contact(1);
    return c;
}

double real_integral(const std::function<double(double)>& f, double a, double b, double tol)
{
    return integrate([&](double t) { return cplx(f(t)); }, a, b, QuadOptions{tol}).value.real();
}

cplx xi_of(const DiffForm& xi, const CVec& p, const CVec& u)
{
    const CVec v[1] = {u};
    return xi.eval(p).apply(v);
}

double max_tangency(const DiffForm& xi, const Path& curve, int& seg, double& at)
{
    double worst = 0.0;
    for (std::size_t s = 0; s < curve.size(); ++s)
        for (const double t : tangency_nodes()) {
            const double r = std::abs(xi_of(xi, curve.point(s, t), curve.velocity(s, t)));
            if (r > worst) {
                worst = r;
                seg = static_cast<int>(s);
                at = t;
            }
        }
    return worst;
}

void require_tangent(const DiffForm& xi, const Path& curve, double tol, double& tangency)
{
    int seg = -1;
    double at = 0.0;
    tangency = max_tangency(xi, curve, seg, at);
    if (!(tangency < tol))
        throw Error(ErrorKind::TangencyViolation,
                    "curve leaves the contact hyperplane on piece " + std::to_string(seg) + " at t = " +
                        std::to_string(at),
                    tangency);
}

} // namespace

MetricCertificate kappa_V(const Lift& lift, const CVec& p, const CVec& u, double tol)
{
    const int n = lift.base_dim();
    if (p.size() != static_cast<std::size_t>(n + 1) || u.size() != p.size())
        throw Error(ErrorKind::DimensionMismatch, "kappa_V needs a total-space point and vector");
    if (u.max_abs() == 0.0)
        throw Error(ErrorKind::DegenerateInput, "zero direction");
    const double off = std::abs(xi_of(lift.contact.xi, p, u));
    if (!(off < tol))
        throw Error(ErrorKind::NotInContactHyperplane, "direction is not in ker xi", off);

    const CVec base = p.head(static_cast<std::size_t>(n));
    const CVec v = u.head(static_cast<std::size_t>(n));
    MetricCertificate c;
    c.value = model_kappa(lift.base.domain, base, v);
    c.base_disc = extremal_disc(lift.base.domain, base, v);
    c.witness.emplace(c.base_disc, lift.eta, p[static_cast<std::size_t>(n)], QuadOptions{1e-13});

    // tangent of the witness at 0, fiber part by a Cauchy integral
    const CVec tangent = cauchy_derivative([&](cplx s) { return c.witness->eval(s); }, 0.0, 0.25);
    c.lambda = inner(tangent, u) / u.norm2();
    c.proportionality = (tangent - c.lambda * u).norm() / u.norm();
    c.legendrian = c.witness->residual(certificate_params());
    return c;
}

std::vector<double> tangency_nodes()
{
    std::vector<double> t(128);
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = (static_cast<double>(k) + 0.5) / 128.0;
    return t;
}

VLength v_length(const Lift& lift, const Path& curve, double tol)
{
    VLength out;
    if (curve.empty())
        return out;
    if (curve.dim() != lift.total_dim())
        throw Error(ErrorKind::DimensionMismatch, "curve is not in the total space");
    require_tangent(lift.contact.xi, curve, tol, out.tangency);
    const auto n = static_cast<std::size_t>(lift.base_dim());
    for (std::size_t s = 0; s < curve.size(); ++s) {
        out.value += real_integral(
            [&](double t) {
                const CVec v = curve.velocity(s, t).head(n);
                if (v.max_abs() == 0.0)
                    return 0.0;
                return model_kappa(lift.base.domain, curve.point(s, t).head(n), v);
            },
            0.0, 1.0, 1e-12);
    }
    return out;
}

double chain_length(std::span<const double> t)
{
    double sum = 0.0;
    for (const double tj : t) {
        if (!(tj > 0.0 && tj < 1.0))
            throw Error(ErrorKind::ParamOutOfRange, "chain parameter outside (0, 1)", tj);
        sum += 0.5 * std::log((1.0 + tj) / (1.0 - tj));
    }
    return sum;
}

double chain_length(const Chain& chain)
{
    std::vector<double> t;
    for (const auto& link : chain.links)
        t.push_back(link.t);
    return chain_length(t);
}

double chain_length(const VChain& chain) { return chain_length(chain.t); }

DistBounds dist_bounds(const Lift& lift, const CVec& p, const CVec& q, double tol)
{
    const auto n = static_cast<std::size_t>(lift.base_dim());
    if (p.size() != n + 1 || q.size() != n + 1)
        throw Error(ErrorKind::DimensionMismatch, "dist_bounds needs total-space points");
    const CVec pb = p.head(n);
    const CVec qb = q.head(n);
    DistBounds out;
    out.lower = model_dist(lift.base.domain, pb, qb);
    if (pb == qb) {
        out.gap = std::abs(q[n] - p[n]);
    } else {
        out.chain = lift_chain(lift, geodesic_chain(lift.base.domain, pb, qb), p[n]);
        out.gap = std::abs(out.chain->end[n] - q[n]);
    }
    if (out.gap < tol)
        out.upper = out.chain ? chain_length(*out.chain) : 0.0;
    return out;
}

FiberDistance dist_to_fiber(const Lift& lift, const CVec& p, const CVec& q)
{
    const auto n = static_cast<std::size_t>(lift.base_dim());
    if (p.size() != n + 1 || q.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "dist_to_fiber needs a total-space point and a base point");
    FiberDistance out;
    out.chain.start = p;
    out.chain.end = p;
    const CVec pb = p.head(n);
    if (pb == q)
        return out;
    out.value = model_dist(lift.base.domain, pb, q);
    out.chain = lift_chain(lift, geodesic_chain(lift.base.domain, pb, q), p[n]);
    return out;
}

bool in_box(double r, const CVec& p)
{
    if (p.size() != 3)
        throw Error(ErrorKind::DimensionMismatch, "the standard box lives in C^3");
    return std::norm(p[0]) + std::norm(p[1]) < r * r && std::abs(p[2]) < r;
}

Path local_connect(double r, const CVec& p)
{
    if (!in_box(r, p))
        throw Error(ErrorKind::IntermediatePointEscapes, "start point " + p.to_string() + " is outside B_r");
    const cplx w = p[1], y = p[2];
    const cplx s = std::sqrt(y);
    const CVec c1{0.0, w, y}, c2{0.0, 2.0 * s, y}, c3{s, 2.0 * s, y}, c4{s, s, 0.0}, c5{0.0, s, 0.0}, c6{0.0, 0.0, 0.0};
    for (const auto& c : {c2, c3, c4})
        if (!in_box(r, c))
            throw Error(ErrorKind::IntermediatePointEscapes, "corner " + c.to_string() + " is outside B_r");

    const Expr t = Expr::var(0);
    std::vector<HoloMap> pieces;
    auto move = [&](const CVec& a, const CVec& b) {
        if (a == b)
            return;
        std::vector<Expr> comps;
        for (std::size_t i = 0; i < 3; ++i)
            comps.push_back(a[i] == b[i] ? Expr(a[i]) : Expr(a[i]) + Expr(b[i] - a[i]) * t);
        pieces.emplace_back(1, std::move(comps));
    };
    move(p, c1);
    move(c1, c2);
    move(c2, c3);
    if (y != 0.0) {
        // (s, s + tau, s tau) for tau from s down to 0, i.e. tau = (1 - t) s
        const Expr tau = Expr(s) * (1.0 - t);
        pieces.emplace_back(1, std::vector<Expr>{Expr(s), Expr(s) + tau, Expr(s) * tau});
    }
    move(c4, c5);
    move(c5, c6);
    return Path(std::move(pieces));
}

BoxBound kappa_upper_box(double r, const CVec& p, const CVec& u, double tol)
{
    if (!in_box(r, p))
        throw Error(ErrorKind::InvalidArgument, "point " + p.to_string() + " is outside B_r");
    if (u.size() != 3)
        throw Error(ErrorKind::DimensionMismatch, "the standard box lives in C^3");
    const double off = std::abs(xi_of(standard1().xi, p, u));
    if (!(off < tol))
        throw Error(ErrorKind::NotInContactHyperplane, "direction is not in ker xi", off);
    const double len = std::hypot(std::abs(u[0]), std::abs(u[1]));
    if (len == 0.0)
        throw Error(ErrorKind::DegenerateDirection, "direction projects to zero");

    const double a = std::abs(u[0]) / len;
    const double b = std::abs(u[1]) / len;
    const double z0 = std::abs(p[0]);
    // |y(zeta) - y0| <= rho |b| |z0| + rho^2 |a b| / 2 for |zeta| < 1
    const double quad = 0.5 * a * b;
    const double lin = b * z0;
    const double room = r - std::abs(p[2]);
    BoxBound out;
    out.base_slack = r - std::hypot(std::abs(p[0]), std::abs(p[1]));
    if (quad > 0.0)
        out.fiber_rho = 2.0 * room / (lin + std::sqrt(lin * lin + 4.0 * quad * room));
    else if (lin > 0.0)
        out.fiber_rho = room / lin;
    else
        out.fiber_rho = std::numeric_limits<double>::infinity();
    out.rho = std::min(out.base_slack, out.fiber_rho);
    out.value = len / out.rho;
    return out;
}

BoxLength box_length(double r, const Path& curve, double tol)
{
    BoxLength out;
    if (curve.empty())
        return out;
    require_tangent(standard1().xi, curve, tol, out.tangency);
    for (std::size_t s = 0; s < curve.size(); ++s)
        out.value += real_integral(
            [&](double t) {
                const CVec v = curve.velocity(s, t);
                if (v.max_abs() == 0.0)
                    return 0.0;
                return kappa_upper_box(r, curve.point(s, t), v, tol).value;
            },
            0.0, 1.0, 1e-12);
    return out;
}

} // namespace hcontact

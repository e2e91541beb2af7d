#include "hcontact/domains.hpp"
#include "hcontact/model_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace hcontact {

namespace {

void require_radius(double r)
{
    if (!(r > 0.0) || !std::isfinite(r))
        throw Error(ErrorKind::InvalidArgument, "domain radii must be positive and finite");
}

void require_dim(const Domain& d, const CVec& p)
{
    if (static_cast<int>(p.size()) != d.dim())
        throw Error(ErrorKind::DimensionMismatch, d.describe() + " has dimension " + std::to_string(d.dim()) +
                                                      ", point has " + std::to_string(p.size()));
}

std::string number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// A domain is handled as a list of atomic pieces (disc, punctured disc, ball,
// half plane, Siegel) occupying consecutive coordinates. Polydisc and box
// coordinates become discs; box discs carry their center as a shift.
struct Piece {
    Domain atom;
    int offset = 0;
    cplx shift = 0.0;

    int dim() const { return atom.dim(); }
};

void flatten(const Domain& d, int offset, std::vector<Piece>& out)
{
    switch (d.kind()) {
    case Domain::Kind::Product: {
        const auto offs = d.factor_offsets();
        for (std::size_t i = 0; i < d.factors().size(); ++i)
            flatten(d.factors()[i], offset + offs[i], out);
        return;
    }
    case Domain::Kind::Polydisc:
        for (std::size_t i = 0; i < d.radii().size(); ++i)
            out.push_back({Domain::disc(d.radii()[i]), offset + static_cast<int>(i), 0.0});
        return;
    case Domain::Kind::Box:
        for (std::size_t i = 0; i < d.radii().size(); ++i)
            out.push_back({Domain::disc(d.radii()[i]), offset + static_cast<int>(i), d.center()[i]});
        return;
    default: out.push_back({d, offset, 0.0});
    }
}

std::vector<Piece> pieces_of(const Domain& d)
{
    std::vector<Piece> out;
    flatten(d, 0, out);
    return out;
}

CVec slice(const CVec& p, const Piece& pc)
{
    std::vector<cplx> v;
    for (int i = 0; i < pc.dim(); ++i)
        v.push_back(p[static_cast<std::size_t>(pc.offset + i)] - pc.shift);
    return CVec(std::move(v));
}

CVec slice_vector(const CVec& v, const Piece& pc)
{
    std::vector<cplx> r;
    for (int i = 0; i < pc.dim(); ++i)
        r.push_back(v[static_cast<std::size_t>(pc.offset + i)]);
    return CVec(std::move(r));
}

// ---------------------------------------------------------------------------
// atomic geometry

// Upper half plane H = {Im x > 0}, normalized as the unit disc.
double h_dist(cplx a, cplx b) { return std::atanh(std::abs(a - b) / std::abs(a - std::conj(b))); }

// Universal cover of the punctured disc: w = r exp(i x).
cplx cover_coordinate(cplx w, double r) { return cplx(0.0, -1.0) * std::log(w / r); }

constexpr int deck_window = 16;

// Deck translate n of x_q closest to x_p; ties resolve in the order 0, 1, -1, 2, ...
int best_translate(cplx xp, cplx xq, double& best)
{
    best = h_dist(xp, xq);
    int arg = 0;
    for (int k = 1; k <= deck_window; ++k)
        for (int n : {k, -k}) {
            const double d = h_dist(xp, xq + 2.0 * std::numbers::pi * static_cast<double>(n));
            if (d < best) {
                best = d;
                arg = n;
            }
        }
    return arg;
}

bool atom_contains(const Domain& a, const CVec& x)
{
    switch (a.kind()) {
    case Domain::Kind::Disc: return std::abs(x[0]) < a.radius();
    case Domain::Kind::PuncturedDisc: return x[0] != 0.0 && std::abs(x[0]) < a.radius();
    case Domain::Kind::Ball: return x.norm() < a.radius();
    case Domain::Kind::HalfPlane: return x[0].real() > 0.0;
    case Domain::Kind::Siegel: {
        double s = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i)
            s += std::norm(x[i]);
        return x[0].real() > s;
    }
    default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "not an atomic domain");
}

double atom_boundary_distance(const Domain& a, const CVec& x)
{
    if (!atom_contains(a, x))
        return 0.0;
    switch (a.kind()) {
    case Domain::Kind::Disc: return a.radius() - std::abs(x[0]);
    case Domain::Kind::PuncturedDisc: return std::min(a.radius() - std::abs(x[0]), std::abs(x[0]));
    case Domain::Kind::Ball: return a.radius() - x.norm();
    case Domain::Kind::HalfPlane: return x[0].real();
    case Domain::Kind::Siegel: {
        double s = 0.0;
        double tail2 = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            s += std::norm(x[i]);
            tail2 += std::norm(x[i]);
        }
        // a perturbation of norm delta moves the defining function by at most
        // delta (1 + 2 |z'|) + delta^2
        const double m = x[0].real() - s;
        const double b = 1.0 + 2.0 * std::sqrt(tail2);
        return 2.0 * m / (b + std::sqrt(b * b + 4.0 * m));
    }
    default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "not an atomic domain");
}

[[noreturn]] void unsupported(const Domain& a, const char* what)
{
    throw Error(ErrorKind::UnsupportedDomain,
                std::string(what) + " is not available on " + a.describe() +
                    (a.kind() == Domain::Kind::Siegel ? " (route through the Cayley map to the ball)" : ""));
}

double atom_kappa(const Domain& a, const CVec& x, const CVec& v)
{
    switch (a.kind()) {
    case Domain::Kind::Disc: {
        const double r = a.radius();
        return r * std::abs(v[0]) / (r * r - std::norm(x[0]));
    }
    case Domain::Kind::PuncturedDisc: {
        const double m = std::abs(x[0]);
        return std::abs(v[0]) / (2.0 * m * std::log(a.radius() / m));
    }
    case Domain::Kind::Ball: {
        const double r = a.radius();
        const CVec p = (1.0 / r) * x;
        const CVec u = (1.0 / r) * v;
        const double s = 1.0 - p.norm2();
        const double num = s * u.norm2() + std::norm(inner(u, p));
        return std::sqrt(num) / s;
    }
    case Domain::Kind::HalfPlane: return std::abs(v[0]) / (2.0 * x[0].real());
    default: unsupported(a, "the Kobayashi metric");
    }
}

double ball_invariant(const CVec& p, const CVec& q)
{
    // |1 - <p,q>|^2 - (1 - |p|^2)(1 - |q|^2) written without cancellation
    double cross = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            cross += std::norm(p[i] * q[j] - p[j] * q[i]);
    const double num = std::max(0.0, (p - q).norm2() - cross);
    return std::sqrt(num) / std::abs(1.0 - inner(p, q));
}

double atom_dist(const Domain& a, const CVec& x, const CVec& y)
{
    switch (a.kind()) {
    case Domain::Kind::Disc: {
        const double r = a.radius();
        return std::atanh(r * std::abs(x[0] - y[0]) / std::abs(r * r - std::conj(x[0]) * y[0]));
    }
    case Domain::Kind::PuncturedDisc: {
        double best = 0.0;
        best_translate(cover_coordinate(x[0], a.radius()), cover_coordinate(y[0], a.radius()), best);
        return best;
    }
    case Domain::Kind::Ball: {
        const double r = a.radius();
        return std::atanh(ball_invariant((1.0 / r) * x, (1.0 / r) * y));
    }
    case Domain::Kind::HalfPlane: return std::atanh(std::abs(x[0] - y[0]) / std::abs(x[0] + std::conj(y[0])));
    default: unsupported(a, "the Kobayashi distance");
    }
}

const Expr zeta = Expr::var(0);

// The discs below are written as p + (terms vanishing at 0) so that phi(0)
// reproduces the base point exactly.

// Disc of radius r through p: p + r (1 - |a|^2) e s / (1 + conj(a) e s), a = p/r.
Expr disc_through(cplx p, double r, cplx e)
{
    const cplx a = p / r;
    return Expr(p) + Expr(r * (1.0 - std::norm(a)) * e) * zeta / (1.0 + Expr(std::conj(a) * e) * zeta);
}

// Punctured disc through p via the covering map: p exp(-2 Im(x_p) s/(1 - s)), s = e zeta.
Expr punctured_through(cplx p, double r, cplx e)
{
    const double height = cover_coordinate(p, r).imag();
    const Expr s = Expr(e) * zeta;
    return Expr(p) * exp(Expr(-2.0 * height) * s / (1.0 - s));
}

// Half plane through p: p + 2 Re(p) s / (1 - s), s = e zeta.
Expr half_plane_through(cplx p, cplx e)
{
    const Expr s = Expr(e) * zeta;
    return Expr(p) + Expr(2.0 * p.real()) * s / (1.0 - s);
}

// Ball disc inside the affine slice p + lambda u: the slice meets the unit ball
// in |lambda - c0| < R, c0 = -<p,u>, R^2 = 1 - |p|^2 + |c0|^2.
struct Slice {
    cplx c0;
    double big_r;
    cplx alpha; // normalized position of p, -c0/R
};

Slice ball_slice(const CVec& p, const CVec& u)
{
    const cplx c0 = -inner(p, u);
    const double big_r = std::sqrt(1.0 - p.norm2() + std::norm(c0));
    return {c0, big_r, -c0 / big_r};
}

std::vector<Expr> ball_through(const CVec& x, double r, const CVec& u, const Slice& sl, cplx e)
{
    const Expr lambda = Expr(sl.big_r * (1.0 - std::norm(sl.alpha)) * e) * zeta /
                        (1.0 + Expr(std::conj(sl.alpha) * e) * zeta);
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < x.size(); ++i)
        comps.push_back(Expr(x[i]) + Expr(r * u[i]) * lambda);
    return comps;
}

struct AtomDisc {
    std::vector<Expr> comps;
    double t = 0.0;
};

std::vector<Expr> atom_extremal(const Domain& a, const CVec& x, const CVec& v)
{
    switch (a.kind()) {
    case Domain::Kind::Disc: return {disc_through(x[0], a.radius(), v[0] / std::abs(v[0]))};
    case Domain::Kind::PuncturedDisc: {
        const cplx e = -(v[0] / std::abs(v[0])) * (std::abs(x[0]) / x[0]);
        return {punctured_through(x[0], a.radius(), e)};
    }
    case Domain::Kind::Ball: {
        const double r = a.radius();
        const CVec u = (1.0 / v.norm()) * v;
        return ball_through(x, r, u, ball_slice((1.0 / r) * x, u), 1.0);
    }
    case Domain::Kind::HalfPlane: return {half_plane_through(x[0], v[0] / std::abs(v[0]))};
    default: unsupported(a, "extremal discs");
    }
}

AtomDisc atom_geodesic(const Domain& a, const CVec& x, const CVec& y)
{
    switch (a.kind()) {
    case Domain::Kind::Disc: {
        const double r = a.radius();
        const cplx pa = x[0] / r;
        const cplx pb = y[0] / r;
        const cplx m = (pb - pa) / (1.0 - std::conj(pa) * pb);
        const double t = std::abs(m);
        return {{disc_through(x[0], r, m / t)}, t};
    }
    case Domain::Kind::Ball: {
        const double r = a.radius();
        const CVec p = (1.0 / r) * x;
        const CVec q = (1.0 / r) * y;
        const double len = (q - p).norm();
        const CVec u = (1.0 / len) * (q - p);
        const auto sl = ball_slice(p, u);
        const cplx sq = (len - sl.c0) / sl.big_r;
        const cplx m = (sq - sl.alpha) / (1.0 - std::conj(sl.alpha) * sq);
        const double t = std::abs(m);
        return {ball_through(x, r, u, sl, m / t), t};
    }
    case Domain::Kind::PuncturedDisc: {
        const double r = a.radius();
        const cplx xp = cover_coordinate(x[0], r);
        const cplx xq0 = cover_coordinate(y[0], r);
        double best = 0.0;
        const int n = best_translate(xp, xq0, best);
        const cplx xq = xq0 + 2.0 * std::numbers::pi * static_cast<double>(n);
        const cplx m = (xq - xp) / (xq - std::conj(xp));
        const double t = std::abs(m);
        return {{punctured_through(x[0], r, m / t)}, t};
    }
    case Domain::Kind::HalfPlane: {
        const cplx m = (y[0] - x[0]) / (y[0] + std::conj(x[0]));
        const double t = std::abs(m);
        return {{half_plane_through(x[0], m / t)}, t};
    }
    default: unsupported(a, "geodesic chains");
    }
}

// tanh(alpha artanh s) for 0 < alpha <= 1, holomorphic from D into D.
Expr contraction(const Expr& s, double alpha)
{
    const Expr e = exp(Expr(alpha) * log((1.0 + s) / (1.0 - s)));
    return (e - 1.0) / (e + 1.0);
}

// Unit cube coordinates -> atom point (unshifted); may land outside.
CVec atom_from_cube(const Domain& a, const double* u)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (a.kind()) {
    case Domain::Kind::Disc:
    case Domain::Kind::PuncturedDisc: return CVec{std::polar(a.radius() * std::sqrt(u[0]), two_pi * u[1])};
    case Domain::Kind::Ball: {
        std::vector<cplx> v;
        for (int i = 0; i < a.dim(); ++i)
            v.emplace_back(a.radius() * (2.0 * u[2 * i] - 1.0), a.radius() * (2.0 * u[2 * i + 1] - 1.0));
        return CVec(std::move(v));
    }
    case Domain::Kind::HalfPlane: {
        const cplx s = std::polar(0.95 * std::sqrt(u[0]), two_pi * u[1]);
        return CVec{(1.0 + s) / (1.0 - s)};
    }
    case Domain::Kind::Siegel: {
        std::vector<cplx> b;
        for (int i = 0; i < a.dim(); ++i)
            b.emplace_back(0.95 * (2.0 * u[2 * i] - 1.0), 0.95 * (2.0 * u[2 * i + 1] - 1.0));
        const CVec bp(std::move(b));
        if (bp.norm() >= 0.95)
            return bp.with(0, 1e9);
        std::vector<cplx> z{(1.0 + bp[0]) / (1.0 - bp[0])};
        for (std::size_t i = 1; i < bp.size(); ++i)
            z.push_back(bp[i] / (1.0 - bp[0]));
        return CVec(std::move(z));
    }
    default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "not an atomic domain");
}

double radical_inverse(std::uint64_t i, unsigned base)
{
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

std::vector<unsigned> first_primes(std::size_t n)
{
    std::vector<unsigned> p;
    for (unsigned c = 2; p.size() < n; ++c) {
        bool prime = true;
        for (unsigned q : p)
            if (c % q == 0) {
                prime = false;
                break;
            }
        if (prime)
            p.push_back(c);
    }
    return p;
}

} // namespace

// ---------------------------------------------------------------------------
// Domain

Domain Domain::disc(double r)
{
    require_radius(r);
    Domain d;
    d.kind_ = Kind::Disc;
    d.r_ = r;
    return d;
}

Domain Domain::punctured_disc(double r)
{
    auto d = disc(r);
    d.kind_ = Kind::PuncturedDisc;
    return d;
}

Domain Domain::ball(int n, double r)
{
    require_radius(r);
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "ball dimension must be positive");
    Domain d;
    d.kind_ = Kind::Ball;
    d.dim_ = n;
    d.r_ = r;
    return d;
}

Domain Domain::polydisc(std::vector<double> radii)
{
    if (radii.empty())
        throw Error(ErrorKind::InvalidArgument, "polydisc needs at least one radius");
    for (double r : radii)
        require_radius(r);
    Domain d;
    d.kind_ = Kind::Polydisc;
    d.dim_ = static_cast<int>(radii.size());
    d.radii_ = std::move(radii);
    return d;
}

Domain Domain::half_plane()
{
    Domain d;
    d.kind_ = Kind::HalfPlane;
    return d;
}

Domain Domain::siegel(int n)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "Siegel dimension must be positive");
    Domain d;
    d.kind_ = Kind::Siegel;
    d.dim_ = n;
    return d;
}

Domain Domain::product(std::vector<Domain> factors)
{
    if (factors.empty())
        throw Error(ErrorKind::InvalidArgument, "product needs at least one factor");
    Domain d;
    d.kind_ = Kind::Product;
    d.dim_ = 0;
    for (auto& f : factors) {
        if (f.kind_ == Kind::Product)
            d.factors_.insert(d.factors_.end(), f.factors_.begin(), f.factors_.end());
        else
            d.factors_.push_back(std::move(f));
    }
    for (const auto& f : d.factors_)
        d.dim_ += f.dim_;
    return d;
}

Domain Domain::box(CVec center, std::vector<double> radii)
{
    if (radii.empty() || center.size() != radii.size())
        throw Error(ErrorKind::InvalidArgument, "box needs one radius per center coordinate");
    for (double r : radii)
        require_radius(r);
    Domain d;
    d.kind_ = Kind::Box;
    d.dim_ = static_cast<int>(radii.size());
    d.radii_ = std::move(radii);
    d.center_ = std::move(center);
    return d;
}

std::vector<int> Domain::factor_offsets() const
{
    std::vector<int> r;
    int o = 0;
    for (const auto& f : factors_) {
        r.push_back(o);
        o += f.dim_;
    }
    return r;
}

std::string to_string(Domain::Kind kind)
{
    switch (kind) {
    case Domain::Kind::Disc: return "disc";
    case Domain::Kind::PuncturedDisc: return "punctured_disc";
    case Domain::Kind::Ball: return "ball";
    case Domain::Kind::Polydisc: return "polydisc";
    case Domain::Kind::HalfPlane: return "half_plane";
    case Domain::Kind::Siegel: return "siegel";
    case Domain::Kind::Product: return "product";
    case Domain::Kind::Box: return "box";
    }
    return "?";
}

std::string Domain::describe() const
{
    switch (kind_) {
    case Kind::Disc:
    case Kind::PuncturedDisc: return to_string(kind_) + "(" + number(r_) + ")";
    case Kind::Ball: return "ball(" + std::to_string(dim_) + ", " + number(r_) + ")";
    case Kind::Siegel: return "siegel(" + std::to_string(dim_) + ")";
    case Kind::HalfPlane: return "half_plane";
    case Kind::Polydisc:
    case Kind::Box: {
        std::string s = to_string(kind_) + "(";
        for (std::size_t i = 0; i < radii_.size(); ++i)
            s += (i ? ", " : "") + number(radii_[i]);
        return s + (kind_ == Kind::Box ? "; center " + center_.to_string() : "") + ")";
    }
    case Kind::Product: {
        std::string s;
        for (const auto& f : factors_)
            s += (s.empty() ? "" : " x ") + f.describe();
        return s;
    }
    }
    return "?";
}

bool operator==(const Domain& a, const Domain& b)
{
    return a.kind_ == b.kind_ && a.dim_ == b.dim_ && a.r_ == b.r_ && a.radii_ == b.radii_ && a.center_ == b.center_ &&
           a.factors_ == b.factors_;
}

// ---------------------------------------------------------------------------
// queries

bool contains(const Domain& d, const CVec& p)
{
    require_dim(d, p);
    for (const auto& pc : pieces_of(d))
        if (!atom_contains(pc.atom, slice(p, pc)))
            return false;
    return true;
}

double boundary_distance(const Domain& d, const CVec& p)
{
    require_dim(d, p);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& pc : pieces_of(d))
        m = std::min(m, atom_boundary_distance(pc.atom, slice(p, pc)));
    return m;
}

CVec basepoint(const Domain& d)
{
    std::vector<cplx> v(static_cast<std::size_t>(d.dim()));
    for (const auto& pc : pieces_of(d)) {
        cplx first = pc.shift;
        switch (pc.atom.kind()) {
        case Domain::Kind::PuncturedDisc: first += 0.5 * pc.atom.radius(); break;
        case Domain::Kind::HalfPlane:
        case Domain::Kind::Siegel: first += 1.0; break;
        default: break;
        }
        v[static_cast<std::size_t>(pc.offset)] = first;
    }
    return CVec(std::move(v));
}

std::vector<CVec> sample(const Domain& d, int count, std::uint64_t seed, double margin)
{
    if (count < 0)
        throw Error(ErrorKind::InvalidArgument, "negative sample count");
    const auto pieces = pieces_of(d);
    const std::size_t dims = 2 * static_cast<std::size_t>(d.dim());
    const auto primes = first_primes(dims);
    std::mt19937_64 rng(seed);
    std::vector<double> shift(dims);
    for (auto& s : shift)
        s = static_cast<double>(rng() >> 11) * 0x1.0p-53;

    std::vector<CVec> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<double> u(dims);
    const std::uint64_t budget = 100000 + 1000 * static_cast<std::uint64_t>(count);
    for (std::uint64_t i = 1; static_cast<int>(out.size()) < count; ++i) {
        if (i > budget)
            throw Error(ErrorKind::InvalidArgument, "sampler rejected too many candidates in " + d.describe());
        for (std::size_t k = 0; k < dims; ++k) {
            const double x = radical_inverse(i, primes[k]) + shift[k];
            u[k] = x - std::floor(x);
        }
        std::vector<cplx> p(static_cast<std::size_t>(d.dim()));
        for (const auto& pc : pieces) {
            const auto x = atom_from_cube(pc.atom, u.data() + 2 * pc.offset);
            for (int j = 0; j < pc.dim(); ++j)
                p[static_cast<std::size_t>(pc.offset + j)] = x[static_cast<std::size_t>(j)] + pc.shift;
        }
        CVec candidate(std::move(p));
        if (boundary_distance(d, candidate) >= margin)
            out.push_back(std::move(candidate));
    }
    return out;
}

double model_kappa(const Domain& d, const CVec& p, const CVec& v)
{
    require_dim(d, p);
    require_same_size(p, v, "model_kappa");
    if (!contains(d, p))
        throw Error(ErrorKind::DomainError, "point " + p.to_string() + " outside " + d.describe());
    double k = 0.0;
    for (const auto& pc : pieces_of(d))
        k = std::max(k, atom_kappa(pc.atom, slice(p, pc), slice_vector(v, pc)));
    return k;
}

double model_dist(const Domain& d, const CVec& p, const CVec& q)
{
    require_dim(d, p);
    require_dim(d, q);
    if (!contains(d, p) || !contains(d, q))
        throw Error(ErrorKind::DomainError, "distance queried outside " + d.describe());
    double k = 0.0;
    for (const auto& pc : pieces_of(d))
        k = std::max(k, atom_dist(pc.atom, slice(p, pc), slice(q, pc)));
    return k;
}

double siegel_kappa(int n, const CVec& p, const CVec& v)
{
    if (!contains(Domain::siegel(n), p))
        throw Error(ErrorKind::DomainError, "point outside the Siegel domain");
    const auto inv = cayley_inverse(n);
    return model_kappa(Domain::ball(n), inv.eval(p), inv.jacobian(p) * v);
}

double siegel_dist(int n, const CVec& p, const CVec& q)
{
    const auto inv = cayley_inverse(n);
    const auto s = Domain::siegel(n);
    if (!contains(s, p) || !contains(s, q))
        throw Error(ErrorKind::DomainError, "point outside the Siegel domain");
    return model_dist(Domain::ball(n), inv.eval(p), inv.eval(q));
}

HoloMap extremal_disc(const Domain& d, const CVec& p, const CVec& v)
{
    const double kappa = model_kappa(d, p, v);
    if (!(kappa > 0.0))
        throw Error(ErrorKind::DegenerateInput, "extremal disc in the zero direction");
    std::vector<Expr> comps(static_cast<std::size_t>(d.dim()));
    for (const auto& pc : pieces_of(d)) {
        const auto x = slice(p, pc);
        const auto vj = slice_vector(v, pc);
        std::vector<Expr> local;
        const double kj = vj.max_abs() == 0.0 ? 0.0 : atom_kappa(pc.atom, x, vj);
        if (kj == 0.0) {
            for (const auto& c : x)
                local.emplace_back(c);
        } else {
            local = atom_extremal(pc.atom, x, vj);
            if (kj < kappa) {
                const std::vector<Expr> scaled{Expr(kj / kappa) * zeta};
                for (auto& e : local)
                    e = substitute(e, scaled);
            }
        }
        for (int j = 0; j < pc.dim(); ++j)
            comps[static_cast<std::size_t>(pc.offset + j)] = local[static_cast<std::size_t>(j)] + pc.shift;
    }
    return HoloMap(1, std::move(comps));
}

CVec Chain::start() const
{
    if (links.empty())
        throw Error(ErrorKind::InvalidArgument, "empty chain");
    return links.front().disc.eval(CVec{0.0});
}

CVec Chain::end() const
{
    if (links.empty())
        throw Error(ErrorKind::InvalidArgument, "empty chain");
    return links.back().disc.eval(CVec{links.back().t});
}

Chain geodesic_chain(const Domain& d, const CVec& p, const CVec& q)
{
    require_dim(d, p);
    require_dim(d, q);
    if (p == q)
        throw Error(ErrorKind::DegenerateInput, "geodesic chain between coincident points");
    const double total = model_dist(d, p, q);
    const auto pieces = pieces_of(d);

    std::vector<double> dists;
    for (const auto& pc : pieces)
        dists.push_back(atom_dist(pc.atom, slice(p, pc), slice(q, pc)));
    // the dominating piece supplies t; ties go to the first piece
    const auto dom = static_cast<std::size_t>(std::max_element(dists.begin(), dists.end()) - dists.begin());

    std::vector<Expr> comps(static_cast<std::size_t>(d.dim()));
    double t = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& pc = pieces[k];
        const auto x = slice(p, pc);
        const auto y = slice(q, pc);
        std::vector<Expr> local;
        if (x == y) {
            for (const auto& c : x)
                local.emplace_back(c);
        } else {
            auto g = atom_geodesic(pc.atom, x, y);
            local = std::move(g.comps);
            if (k == dom) {
                t = g.t;
            } else if (dists[k] < total) {
                const std::vector<Expr> repar{contraction(zeta, dists[k] / total)};
                for (auto& e : local)
                    e = substitute(e, repar);
            }
        }
        for (int j = 0; j < pc.dim(); ++j)
            comps[static_cast<std::size_t>(pc.offset + j)] = local[static_cast<std::size_t>(j)] + pc.shift;
    }
    Chain c;
    c.links.push_back({HoloMap(1, std::move(comps)), t});
    return c;
}

Path canonical_path(const Domain& d, const CVec& p)
{
    require_dim(d, p);
    if (!contains(d, p))
        throw Error(ErrorKind::DomainError, "canonical path target " + p.to_string() + " outside " + d.describe());
    CVec current = basepoint(d);
    Path path;
    const Expr t = Expr::var(0);
    for (const auto& pc : pieces_of(d)) {
        const auto from = slice(current, pc);
        const auto to = slice(p, pc);
        if (from == to)
            continue;
        std::vector<Expr> comps;
        for (const auto& c : current)
            comps.emplace_back(c);
        for (int j = 0; j < pc.dim(); ++j) {
            const auto i = static_cast<std::size_t>(j);
            Expr local;
            if (pc.atom.kind() == Domain::Kind::PuncturedDisc) {
                const cplx lb = std::log(from[i]);
                const cplx lp = std::log(to[i]);
                local = exp(Expr(lb) + Expr(lp - lb) * t);
            } else {
                local = Expr(from[i]) + Expr(to[i] - from[i]) * t;
            }
            comps[static_cast<std::size_t>(pc.offset + j)] = local + pc.shift;
        }
        HoloMap seg(1, std::move(comps));
        // snap the joint so consecutive pieces match exactly
        std::vector<cplx> next(current.values());
        for (int j = 0; j < pc.dim(); ++j)
            next[static_cast<std::size_t>(pc.offset + j)] = p[static_cast<std::size_t>(pc.offset + j)];
        current = CVec(std::move(next));
        path = path.concat(Path({seg}));
    }
    return path;
}

Path circle_loop(const Domain& d, int coordinate, double radius, cplx center)
{
    if (coordinate < 0 || coordinate >= d.dim())
        throw Error(ErrorKind::InvalidArgument, "loop coordinate out of range");
    return Path::circle(basepoint(d), coordinate, center, radius);
}

} // namespace hcontact

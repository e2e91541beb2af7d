#include "hcontact/jet.hpp"

#include <cmath>
#include <numbers>

namespace hcontact {

namespace {

void require_same_order(const Jet& a, const Jet& b)
{
    if (a.order() != b.order())
        throw Error(ErrorKind::DimensionMismatch,
                    "jet orders " + std::to_string(a.order()) + " and " + std::to_string(b.order()));
}

void require_finite(const std::vector<cplx>& a)
{
    for (const auto& z : a)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorKind::DomainError, "non-finite jet coefficient");
}

} // namespace

Jet::Jet(std::vector<cplx> coeffs) : a_(std::move(coeffs))
{
    if (a_.empty())
        throw Error(ErrorKind::InvalidArgument, "jet needs at least one coefficient");
    require_finite(a_);
}

Jet Jet::constant(cplx c, int order)
{
    if (order < 0)
        throw Error(ErrorKind::InvalidArgument, "negative jet order");
    std::vector<cplx> a(static_cast<std::size_t>(order) + 1);
    a[0] = c;
    return Jet(std::move(a));
}

Jet Jet::linear(cplx c0, cplx c1, int order)
{
    auto j = constant(c0, order);
    if (order >= 1)
        j.a_[1] = c1;
    return j;
}

Jet operator+(const Jet& a, const Jet& b)
{
    require_same_order(a, b);
    auto r = a.a_;
    for (std::size_t n = 0; n < r.size(); ++n)
        r[n] += b.a_[n];
    return Jet(std::move(r));
}

Jet operator-(const Jet& a, const Jet& b)
{
    require_same_order(a, b);
    auto r = a.a_;
    for (std::size_t n = 0; n < r.size(); ++n)
        r[n] -= b.a_[n];
    return Jet(std::move(r));
}

Jet operator-(const Jet& a)
{
    auto r = a.a_;
    for (auto& z : r)
        z = -z;
    return Jet(std::move(r));
}

Jet operator*(cplx s, const Jet& a)
{
    auto r = a.a_;
    for (auto& z : r)
        z *= s;
    return Jet(std::move(r));
}

Jet operator*(const Jet& a, const Jet& b)
{
    require_same_order(a, b);
    const std::size_t m = a.a_.size();
    std::vector<cplx> r(m);
    for (std::size_t n = 0; n < m; ++n) {
        cplx s = 0.0;
        for (std::size_t k = 0; k <= n; ++k)
            s += a.a_[k] * b.a_[n - k];
        r[n] = s;
    }
    return Jet(std::move(r));
}

Jet operator/(const Jet& a, const Jet& b)
{
    require_same_order(a, b);
    if (b.a_[0] == 0.0)
        throw Error(ErrorKind::DomainError, "jet division by a series with zero constant term");
    const std::size_t m = a.a_.size();
    std::vector<cplx> q(m);
    for (std::size_t n = 0; n < m; ++n) {
        cplx s = a.a_[n];
        for (std::size_t k = 1; k <= n; ++k)
            s -= b.a_[k] * q[n - k];
        q[n] = s / b.a_[0];
    }
    return Jet(std::move(q));
}

Jet pow(const Jet& a, int k)
{
    if (k < 0)
        return Jet::constant(1.0, a.order()) / pow(a, -k);
    auto r = Jet::constant(1.0, a.order());
    auto b = a;
    auto e = static_cast<unsigned>(k);
    while (e) {
        if (e & 1u)
            r = r * b;
        e >>= 1u;
        if (e)
            b = b * b;
    }
    return r;
}

Jet exp(const Jet& a)
{
    const auto& x = a.coeffs();
    std::vector<cplx> b(x.size());
    b[0] = std::exp(x[0]);
    for (std::size_t n = 1; n < x.size(); ++n) {
        cplx s = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            s += static_cast<double>(k) * x[k] * b[n - k];
        b[n] = s / static_cast<double>(n);
    }
    return Jet(std::move(b));
}

Jet log(const Jet& a, int branch)
{
    const auto& x = a.coeffs();
    if (x[0] == 0.0)
        throw Error(ErrorKind::DomainError, "log of a series with zero constant term");
    std::vector<cplx> b(x.size());
    b[0] = std::log(x[0]) + cplx(0.0, 2.0 * std::numbers::pi * branch);
    for (std::size_t n = 1; n < x.size(); ++n) {
        cplx s = 0.0;
        for (std::size_t k = 1; k < n; ++k)
            s += static_cast<double>(k) * b[k] * x[n - k];
        b[n] = (x[n] - s / static_cast<double>(n)) / x[0];
    }
    return Jet(std::move(b));
}

Jet sqrt(const Jet& a, int branch)
{
    const auto& x = a.coeffs();
    if (x[0] == 0.0)
        throw Error(ErrorKind::DomainError, "sqrt of a series with zero constant term");
    std::vector<cplx> b(x.size());
    b[0] = branch ? -std::sqrt(x[0]) : std::sqrt(x[0]);
    for (std::size_t n = 1; n < x.size(); ++n) {
        cplx s = 0.0;
        for (std::size_t k = 1; k < n; ++k)
            s += b[k] * b[n - k];
        b[n] = (x[n] - s) / (2.0 * b[0]);
    }
    return Jet(std::move(b));
}

Jet compose(const Jet& outer, const Jet& inner)
{
    require_same_order(outer, inner);
    auto delta = inner.coeffs();
    delta[0] = 0.0;
    const Jet d(std::move(delta));
    // Horner in the shifted inner series
    auto r = Jet::constant(outer[outer.order()], outer.order());
    for (int n = outer.order() - 1; n >= 0; --n)
        r = r * d + Jet::constant(outer[n], outer.order());
    return r;
}

namespace {

Jet jet_node(const Expr& e, const CVec& p, const CVec& u, int order)
{
    using Op = Expr::Op;
    switch (e.op()) {
    case Op::Const: return Jet::constant(e.value(), order);
    case Op::Var: {
        const auto i = static_cast<std::size_t>(e.ival());
        if (i >= p.size())
            throw Error(ErrorKind::ArityMismatch, "variable x" + std::to_string(i) + " beyond point dimension");
        return Jet::linear(p[i], u[i], order);
    }
    case Op::Add: return jet_node(e.child(0), p, u, order) + jet_node(e.child(1), p, u, order);
    case Op::Sub: return jet_node(e.child(0), p, u, order) - jet_node(e.child(1), p, u, order);
    case Op::Neg: return -jet_node(e.child(0), p, u, order);
    case Op::Mul: return jet_node(e.child(0), p, u, order) * jet_node(e.child(1), p, u, order);
    case Op::Div: return jet_node(e.child(0), p, u, order) / jet_node(e.child(1), p, u, order);
    case Op::PowInt: return pow(jet_node(e.child(0), p, u, order), e.ival());
    case Op::Exp: return exp(jet_node(e.child(0), p, u, order));
    case Op::Log: return log(jet_node(e.child(0), p, u, order), e.ival());
    case Op::Sqrt: return sqrt(jet_node(e.child(0), p, u, order), e.ival());
    }
    throw Error(ErrorKind::InvalidArgument, "unknown node");
}

} // namespace

Jet jet_eval(const Expr& f, const CVec& p, const CVec& u, int order)
{
    if (order < 1)
        throw Error(ErrorKind::InvalidArgument, "jet order must be at least 1");
    require_same_size(p, u, "jet_eval");
    // evaluation first so domain errors carry the point
    f.eval(p);
    return jet_node(f, p, u, order);
}

} // namespace hcontact

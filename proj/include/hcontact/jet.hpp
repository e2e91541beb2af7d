#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/expr.hpp"

#include <vector>

namespace hcontact {

/// Truncated power series a_0 + a_1 t + ... + a_K t^K.
class Jet {
public:
    /// Requires at least one coefficient; the order is size - 1.
    explicit Jet(std::vector<cplx> coeffs);

    static Jet constant(cplx c, int order);
    /// The series c0 + c1 t.
    static Jet linear(cplx c0, cplx c1, int order);

    int order() const noexcept { return static_cast<int>(a_.size()) - 1; }
    const std::vector<cplx>& coeffs() const noexcept { return a_; }
    cplx operator[](int n) const { return a_.at(static_cast<std::size_t>(n)); }

    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(cplx s, const Jet& a);
    /// Raises DomainError when b has a zero constant term.
    friend Jet operator/(const Jet& a, const Jet& b);

private:
    std::vector<cplx> a_;
};

Jet pow(const Jet& a, int k);
Jet exp(const Jet& a);
/// Principal logarithm of a_0 plus 2*pi*i*branch in the constant term.
Jet log(const Jet& a, int branch = 0);
/// branch 0: principal root of a_0, branch 1: its negative. a_0 must be nonzero.
Jet sqrt(const Jet& a, int branch = 0);

/// Series of f(g(t)) where `outer` holds the Taylor coefficients of f about
/// g(0) and `inner` those of g. Orders must agree.
Jet compose(const Jet& outer, const Jet& inner);

/// Taylor coefficients of t -> f(p + t u) at t = 0 up to order K.
Jet jet_eval(const Expr& f, const CVec& p, const CVec& u, int order);

} // namespace hcontact

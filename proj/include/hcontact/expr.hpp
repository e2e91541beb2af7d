#pragma once

#include "hcontact/cvec.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hcontact {

/// Immutable expression tree for a holomorphic function of n complex
/// variables. Nodes are shared; copies are cheap. Constant subtrees are folded
/// at construction, together with the neutral-element rules (x+0, x*1, x*0).
class Expr {
public:
    enum class Op : std::uint8_t { Const, Var, Add, Sub, Neg, Mul, Div, PowInt, Exp, Log, Sqrt };

    /// The constant 0.
    Expr();
    Expr(cplx c); // NOLINT(google-explicit-constructor): constants read naturally
    Expr(double c) : Expr(cplx(c)) {} // NOLINT(google-explicit-constructor)

    static Expr constant(cplx c) { return Expr(c); }
    static Expr var(int index);

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr pow(const Expr& a, int k);
    friend Expr exp(const Expr& a);
    /// Principal logarithm plus 2*pi*i*branch.
    friend Expr log(const Expr& a, int branch);
    /// branch 0: principal square root, branch 1: its negative.
    friend Expr sqrt(const Expr& a, int branch);

    Op op() const noexcept;
    bool is_const() const noexcept { return op() == Op::Const; }
    bool is_zero() const noexcept;
    bool is_one() const noexcept;
    /// Constant value (Const nodes only).
    cplx value() const;
    /// Variable index (Var), exponent (PowInt) or branch (Log, Sqrt).
    int ival() const;
    int child_count() const noexcept;
    const Expr& child(int i) const;

    /// Largest variable index referenced, -1 for a constant expression.
    int max_var() const noexcept;
    std::size_t node_count() const noexcept;

    /// Exact recursive evaluation. Raises DomainError on division by zero,
    /// log(0), a zero base with a negative exponent, or a non-finite result.
    cplx eval(std::span<const cplx> p) const;
    cplx eval(const CVec& p) const { return eval(p.span()); }

    /// Infix rendering; `names` supplies variable names (defaults to x0, x1, ...).
    std::string to_string(std::span<const std::string> names = {}) const;

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Expr make(Op op, Expr a, Expr b = Expr(), int ival = 0);

    std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& a, int k);
Expr exp(const Expr& a);
Expr log(const Expr& a, int branch = 0);
Expr sqrt(const Expr& a, int branch = 0);

/// Symbolic partial derivative d expr / d z_i.
Expr derive(const Expr& expr, int i);

/// Replaces Var(j) by replacements[j]. Raises ArityMismatch if a referenced
/// variable has no replacement.
Expr substitute(const Expr& expr, std::span<const Expr> replacements);

/// Shifts every variable index by `offset` (used to embed a factor's
/// expression into a product's coordinates).
Expr shift_vars(const Expr& expr, int offset);

} // namespace hcontact

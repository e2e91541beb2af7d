#include "hcontact/expr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hcontact {

struct Expr::Node {
    Op op = Op::Const;
    cplx value{};
    int ival = 0;
    // leaf children stay empty so the shared zero node needs no recursion
    Expr a{std::shared_ptr<const Node>()};
    Expr b{std::shared_ptr<const Node>()};
    int max_var = -1;
    std::size_t count = 1;
};

namespace {

const char* op_name(Expr::Op op)
{
    switch (op) {
    case Expr::Op::Const: return "const";
    case Expr::Op::Var: return "var";
    case Expr::Op::Add: return "add";
    case Expr::Op::Sub: return "sub";
    case Expr::Op::Neg: return "neg";
    case Expr::Op::Mul: return "mul";
    case Expr::Op::Div: return "div";
    case Expr::Op::PowInt: return "pow";
    case Expr::Op::Exp: return "exp";
    case Expr::Op::Log: return "log";
    case Expr::Op::Sqrt: return "sqrt";
    }
    return "?";
}

int arity_of(Expr::Op op)
{
    switch (op) {
    case Expr::Op::Const:
    case Expr::Op::Var: return 0;
    case Expr::Op::Neg:
    case Expr::Op::PowInt:
    case Expr::Op::Exp:
    case Expr::Op::Log:
    case Expr::Op::Sqrt: return 1;
    default: return 2;
    }
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

cplx int_pow(cplx base, int k)
{
    if (k < 0) {
        if (base == 0.0)
            throw Error(ErrorKind::DomainError, "zero base with negative exponent");
        return 1.0 / int_pow(base, -k);
    }
    cplx r = 1.0;
    cplx b = base;
    unsigned e = static_cast<unsigned>(k);
    while (e) {
        if (e & 1u)
            r *= b;
        b *= b;
        e >>= 1u;
    }
    return r;
}

// Applies one node's operation to already-evaluated children. Shared by
// evaluation and constant folding.
cplx apply(Expr::Op op, cplx x, cplx y, int ival)
{
    switch (op) {
    case Expr::Op::Add: return x + y;
    case Expr::Op::Sub: return x - y;
    case Expr::Op::Neg: return -x;
    case Expr::Op::Mul: return x * y;
    case Expr::Op::Div:
        if (y == 0.0)
            throw Error(ErrorKind::DomainError, "division by zero");
        return x / y;
    case Expr::Op::PowInt: return int_pow(x, ival);
    case Expr::Op::Exp: return std::exp(x);
    case Expr::Op::Log:
        if (x == 0.0)
            throw Error(ErrorKind::DomainError, "log(0)");
        return std::log(x) + two_pi_i * static_cast<double>(ival);
    case Expr::Op::Sqrt: {
        const cplx r = std::sqrt(x);
        return ival ? -r : r;
    }
    default: break;
    }
    throw Error(ErrorKind::InvalidArgument, "apply on leaf node");
}

} // namespace

Expr::Expr()
{
    static const auto zero = std::make_shared<const Node>();
    node_ = zero;
}

Expr::Expr(cplx c)
{
    if (!finite(c))
        throw Error(ErrorKind::DomainError, "non-finite constant");
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = c;
    node_ = std::move(n);
}

Expr Expr::var(int index)
{
    if (index < 0)
        throw Error(ErrorKind::InvalidArgument, "negative variable index");
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->ival = index;
    n->max_var = index;
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make(Op op, Expr a, Expr b, int ival)
{
    const int ar = arity_of(op);
    // constant folding; a domain error during folding leaves the node in place
    // so the error surfaces at evaluation time
    if (a.is_const() && (ar == 1 || b.is_const())) {
        try {
            const cplx v = apply(op, a.value(), ar == 2 ? b.value() : cplx{}, ival);
            if (finite(v))
                return Expr(v);
        } catch (const Error&) {
        }
    }
    auto n = std::make_shared<Node>();
    n->op = op;
    n->ival = ival;
    n->max_var = std::max(a.max_var(), ar == 2 ? b.max_var() : -1);
    n->count = 1 + a.node_count() + (ar == 2 ? b.node_count() : 0);
    n->a = std::move(a);
    if (ar == 2)
        n->b = std::move(b);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    return Expr::make(Expr::Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (b.is_zero())
        return a;
    if (a.is_zero())
        return -b;
    return Expr::make(Expr::Op::Sub, a, b);
}

Expr operator-(const Expr& a)
{
    if (a.op() == Expr::Op::Neg)
        return a.child(0);
    return Expr::make(Expr::Op::Neg, a);
}

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.is_zero() || b.is_zero())
        return Expr();
    if (a.is_one())
        return b;
    if (b.is_one())
        return a;
    return Expr::make(Expr::Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (b.is_one())
        return a;
    if (a.is_zero() && !(b.is_zero()))
        return Expr();
    return Expr::make(Expr::Op::Div, a, b);
}

Expr pow(const Expr& a, int k)
{
    if (k == 0)
        return Expr(1.0);
    if (k == 1)
        return a;
    return Expr::make(Expr::Op::PowInt, a, Expr(), k);
}

Expr exp(const Expr& a) { return Expr::make(Expr::Op::Exp, a); }

Expr log(const Expr& a, int branch) { return Expr::make(Expr::Op::Log, a, Expr(), branch); }

Expr sqrt(const Expr& a, int branch)
{
    if (branch != 0 && branch != 1)
        throw Error(ErrorKind::InvalidArgument, "sqrt branch must be 0 or 1");
    return Expr::make(Expr::Op::Sqrt, a, Expr(), branch);
}

Expr::Op Expr::op() const noexcept { return node_->op; }

bool Expr::is_zero() const noexcept { return node_->op == Op::Const && node_->value == 0.0; }

bool Expr::is_one() const noexcept { return node_->op == Op::Const && node_->value == 1.0; }

cplx Expr::value() const
{
    if (node_->op != Op::Const)
        throw Error(ErrorKind::InvalidArgument, "value() on non-constant expression");
    return node_->value;
}

int Expr::ival() const { return node_->ival; }

int Expr::child_count() const noexcept { return arity_of(node_->op); }

const Expr& Expr::child(int i) const
{
    if (i < 0 || i >= child_count())
        throw Error(ErrorKind::InvalidArgument, "child index out of range");
    return i == 0 ? node_->a : node_->b;
}

int Expr::max_var() const noexcept { return node_->max_var; }

std::size_t Expr::node_count() const noexcept { return node_->count; }

namespace {

cplx eval_node(const Expr& e, std::span<const cplx> p)
{
    switch (e.op()) {
    case Expr::Op::Const: return e.value();
    case Expr::Op::Var: {
        const auto i = static_cast<std::size_t>(e.ival());
        if (i >= p.size())
            throw Error(ErrorKind::ArityMismatch,
                        "variable x" + std::to_string(i) + " not supplied by a point of dimension " +
                            std::to_string(p.size()));
        return p[i];
    }
    default: break;
    }
    const cplx x = eval_node(e.child(0), p);
    const cplx y = e.child_count() == 2 ? eval_node(e.child(1), p) : cplx{};
    cplx r;
    try {
        r = apply(e.op(), x, y, e.ival());
    } catch (const Error& err) {
        throw Error(ErrorKind::DomainError, std::string(op_name(e.op())) + " node: " + err.message() +
                                                " at " + CVec(std::vector<cplx>(p.begin(), p.end())).to_string());
    }
    if (!finite(r))
        throw Error(ErrorKind::DomainError, std::string(op_name(e.op())) + " node produced a non-finite value");
    return r;
}

} // namespace

cplx Expr::eval(std::span<const cplx> p) const { return eval_node(*this, p); }

bool operator==(const Expr& a, const Expr& b)
{
    if (a.node_ == b.node_)
        return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.op != y.op || x.ival != y.ival || x.value != y.value)
        return false;
    const int ar = arity_of(x.op);
    if (ar >= 1 && !(x.a == y.a))
        return false;
    if (ar == 2 && !(x.b == y.b))
        return false;
    return true;
}

// ---------------------------------------------------------------------------
// printing

namespace {

constexpr int prec_sum = 1;
constexpr int prec_product = 2;
constexpr int prec_unary = 3;
constexpr int prec_power = 4;
constexpr int prec_atom = 5;

int precedence(const Expr& e)
{
    switch (e.op()) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return prec_sum;
    case Expr::Op::Mul:
    case Expr::Op::Div: return prec_product;
    case Expr::Op::Neg: return prec_unary;
    case Expr::Op::PowInt: return prec_power;
    case Expr::Op::Const: {
        const cplx v = e.value();
        if (v.imag() == 0.0)
            return v.real() < 0.0 || std::signbit(v.real()) ? prec_unary : prec_atom;
        if (v.real() == 0.0)
            return v.imag() < 0.0 ? prec_unary : prec_atom;
        return prec_sum;
    }
    default: return prec_atom;
    }
}

std::string number(double x)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string render(const Expr& e, std::span<const std::string> names);

std::string wrap(const Expr& e, int min_prec, std::span<const std::string> names)
{
    auto s = render(e, names);
    if (precedence(e) < min_prec)
        return "(" + s + ")";
    return s;
}

std::string render(const Expr& e, std::span<const std::string> names)
{
    using Op = Expr::Op;
    switch (e.op()) {
    case Op::Const: {
        const cplx v = e.value();
        if (v.imag() == 0.0)
            return number(v.real());
        if (v.real() == 0.0)
            return number(v.imag()) + "i";
        return number(v.real()) + (v.imag() < 0 ? "-" : "+") + number(std::abs(v.imag())) + "i";
    }
    case Op::Var: {
        const auto i = static_cast<std::size_t>(e.ival());
        return i < names.size() ? names[i] : "x" + std::to_string(i);
    }
    case Op::Add: return wrap(e.child(0), prec_sum, names) + " + " + wrap(e.child(1), prec_product, names);
    case Op::Sub: return wrap(e.child(0), prec_sum, names) + " - " + wrap(e.child(1), prec_product, names);
    case Op::Neg: return "-" + wrap(e.child(0), prec_power, names);
    case Op::Mul: return wrap(e.child(0), prec_product, names) + "*" + wrap(e.child(1), prec_power, names);
    case Op::Div: return wrap(e.child(0), prec_product, names) + "/" + wrap(e.child(1), prec_power, names);
    case Op::PowInt: {
        const int k = e.ival();
        return wrap(e.child(0), prec_atom, names) + "^" + (k < 0 ? "(" + std::to_string(k) + ")" : std::to_string(k));
    }
    case Op::Exp: return "exp(" + render(e.child(0), names) + ")";
    case Op::Log:
        return "log(" + render(e.child(0), names) + (e.ival() ? "; " + std::to_string(e.ival()) : "") + ")";
    case Op::Sqrt:
        return "sqrt(" + render(e.child(0), names) + (e.ival() ? "; " + std::to_string(e.ival()) : "") + ")";
    }
    return "?";
}

} // namespace

std::string Expr::to_string(std::span<const std::string> names) const { return render(*this, names); }

// ---------------------------------------------------------------------------
// calculus

Expr derive(const Expr& e, int i)
{
    using Op = Expr::Op;
    if (e.max_var() < i)
        return Expr();
    switch (e.op()) {
    case Op::Const: return Expr();
    case Op::Var: return e.ival() == i ? Expr(1.0) : Expr();
    case Op::Add: return derive(e.child(0), i) + derive(e.child(1), i);
    case Op::Sub: return derive(e.child(0), i) - derive(e.child(1), i);
    case Op::Neg: return -derive(e.child(0), i);
    case Op::Mul: {
        const auto& f = e.child(0);
        const auto& g = e.child(1);
        return derive(f, i) * g + f * derive(g, i);
    }
    case Op::Div: {
        const auto& f = e.child(0);
        const auto& g = e.child(1);
        const auto df = derive(f, i);
        const auto dg = derive(g, i);
        if (dg.is_zero())
            return df / g;
        return (df * g - f * dg) / pow(g, 2);
    }
    case Op::PowInt: {
        const int k = e.ival();
        const auto& f = e.child(0);
        return Expr(static_cast<double>(k)) * pow(f, k - 1) * derive(f, i);
    }
    case Op::Exp: return e * derive(e.child(0), i);
    case Op::Log: return derive(e.child(0), i) / e.child(0);
    case Op::Sqrt: return derive(e.child(0), i) / (Expr(2.0) * e);
    }
    return Expr();
}

namespace {

template <class Leaf>
Expr rebuild(const Expr& e, const Leaf& leaf)
{
    using Op = Expr::Op;
    switch (e.op()) {
    case Op::Const: return e;
    case Op::Var: return leaf(e.ival());
    case Op::Add: return rebuild(e.child(0), leaf) + rebuild(e.child(1), leaf);
    case Op::Sub: return rebuild(e.child(0), leaf) - rebuild(e.child(1), leaf);
    case Op::Neg: return -rebuild(e.child(0), leaf);
    case Op::Mul: return rebuild(e.child(0), leaf) * rebuild(e.child(1), leaf);
    case Op::Div: return rebuild(e.child(0), leaf) / rebuild(e.child(1), leaf);
    case Op::PowInt: return pow(rebuild(e.child(0), leaf), e.ival());
    case Op::Exp: return exp(rebuild(e.child(0), leaf));
    case Op::Log: return log(rebuild(e.child(0), leaf), e.ival());
    case Op::Sqrt: return sqrt(rebuild(e.child(0), leaf), e.ival());
    }
    return e;
}

} // namespace

Expr substitute(const Expr& expr, std::span<const Expr> replacements)
{
    if (expr.max_var() >= static_cast<int>(replacements.size()))
        throw Error(ErrorKind::ArityMismatch, "substitution supplies " + std::to_string(replacements.size()) +
                                                  " expressions for variable x" + std::to_string(expr.max_var()));
    return rebuild(expr, [&](int j) { return replacements[static_cast<std::size_t>(j)]; });
}

Expr shift_vars(const Expr& expr, int offset)
{
    if (offset == 0)
        return expr;
    return rebuild(expr, [&](int j) { return Expr::var(j + offset); });
}

} // namespace hcontact

#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/expr.hpp"
#include "hcontact/holomap.hpp"
#include "hcontact/parse.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hcontact {

/// Strictly increasing index tuple stored as a bit set.
using Mask = std::uint64_t;

inline int degree_of(Mask m) noexcept { return __builtin_popcountll(m); }
std::vector<int> indices_of(Mask m);
/// Sorts `idx` into a mask; returns the permutation sign, or 0 on a repeat.
int mask_of(std::span<const int> idx, Mask& out);

/// Alternating k-tensor on C^n at a point: coefficients on dx_I for
/// increasing tuples I. Zero coefficients are not stored.
class FormValue {
public:
    FormValue(int n, int k);
    static FormValue scalar(int n, cplx c);
    /// c dx_{i1} ^ ... ^ dx_{ik} in the given (not necessarily sorted) order.
    static FormValue basis(int n, std::vector<int> idx, cplx c = 1.0);

    int dim() const noexcept { return n_; }
    int degree() const noexcept { return k_; }
    const std::map<Mask, cplx>& terms() const noexcept { return c_; }
    cplx coeff(Mask m) const;
    cplx coeff(std::vector<int> idx) const;
    /// Coefficient of dx_0 ^ ... ^ dx_{n-1} (degree n only).
    cplx top() const;
    double max_abs() const noexcept;

    void add(Mask m, cplx c);

    /// a(v_1, ..., v_k) = sum_I c_I det(v_j[i])_{i in I}.
    cplx apply(std::span<const CVec> vectors) const;

    friend FormValue operator+(const FormValue& a, const FormValue& b);
    friend FormValue operator-(const FormValue& a, const FormValue& b);
    friend FormValue operator*(cplx s, const FormValue& a);
    friend bool operator==(const FormValue&, const FormValue&) = default;

    std::string to_string(std::span<const std::string> names = {}) const;

private:
    int n_;
    int k_;
    std::map<Mask, cplx> c_;
};

FormValue wedge(const FormValue& a, const FormValue& b);
/// Contraction in the first slot.
FormValue interior(const CVec& v, const FormValue& a);
/// Pointwise pullback along a linear map with matrix `j` (target rows,
/// source columns): (j* a)(v_1..v_k) = a(j v_1, ..., j v_k).
FormValue pullback_value(const CMatrix& j, const FormValue& a);

/// Holomorphic differential form of degree k on C^n with expression
/// coefficients.
class DiffForm {
public:
    DiffForm(int n, int k);
    static DiffForm function(int n, Expr f);
    static DiffForm basis(int n, std::vector<int> idx, Expr c = Expr(1.0));
    /// sum_i coeffs[i] dx_i.
    static DiffForm one_form(std::vector<Expr> coeffs);

    int dim() const noexcept { return n_; }
    int degree() const noexcept { return k_; }
    const std::map<Mask, Expr>& terms() const noexcept { return c_; }
    Expr coeff(Mask m) const;
    bool is_zero() const noexcept { return c_.empty(); }

    FormValue eval(const CVec& p) const;

    /// Same coefficients regarded on C^m, m >= n (new coordinates appended).
    DiffForm extended(int m) const;

    friend DiffForm operator+(const DiffForm& a, const DiffForm& b);
    friend DiffForm operator-(const DiffForm& a, const DiffForm& b);
    friend DiffForm operator-(const DiffForm& a);
    friend DiffForm operator*(const Expr& f, const DiffForm& a);
    friend bool operator==(const DiffForm&, const DiffForm&) = default;

    /// Text form accepted by parse_form, e.g. "d[z]^d[w] : 2/(1 - z)^3".
    std::string to_string(std::span<const std::string> names = {}) const;

    /// Adds e to the coefficient of dx_m.
    void add(Mask m, const Expr& e);

private:
    int n_;
    int k_;
    std::map<Mask, Expr> c_;
};

DiffForm exterior_derivative(const DiffForm& a);
DiffForm wedge(const DiffForm& a, const DiffForm& b);
/// d f for a function f on C^n.
DiffForm differential(int n, const Expr& f);
/// Symbolic pullback F* a; F maps C^m into the n coordinates of a.
DiffForm pullback(const HoloMap& f, const DiffForm& a);
/// (F* a)_p evaluated pointwise through the Jacobian.
FormValue pullback(const HoloMap& f, const DiffForm& a, const CVec& p);

/// Parses "d[x]^d[y] : expr; d[z] : expr" (terms separated by top-level ';').
/// A term without "d[..] :" is a 0-form. The text "0" denotes the zero form of
/// degree `zero_degree`.
DiffForm parse_form(std::string_view text, const Symbols& symbols, int zero_degree = 0);

} // namespace hcontact

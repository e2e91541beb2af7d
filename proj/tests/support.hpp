#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/error.hpp"
#include "hcontact/expr.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace hctest {

using hcontact::cplx;
using hcontact::CVec;
using hcontact::Expr;

/// Seeded generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    cplx complex_in_box(double r) { return {uniform(-r, r), uniform(-r, r)}; }

    /// Uniform in the open disc of radius r.
    cplx complex_in_disc(double r)
    {
        for (;;) {
            const cplx z = complex_in_box(r);
            if (std::abs(z) < r)
                return z;
        }
    }

    CVec point(std::size_t n, double r)
    {
        std::vector<cplx> v(n);
        for (auto& z : v)
            z = complex_in_box(r);
        return CVec(std::move(v));
    }

    /// Point with Euclidean norm < r.
    CVec ball_point(std::size_t n, double r)
    {
        for (;;) {
            auto p = point(n, r);
            if (p.norm() < r)
                return p;
        }
    }

    /// Sum of up to five monomials of total degree <= max_degree.
    Expr polynomial(int arity, int max_degree)
    {
        Expr f;
        const int terms = integer(1, 5);
        for (int t = 0; t < terms; ++t) {
            Expr m(complex_in_box(2.0));
            int budget = integer(0, max_degree);
            while (budget > 0) {
                const int v = integer(0, arity - 1);
                const int k = integer(1, budget);
                m = m * pow(Expr::var(v), k);
                budget -= k;
            }
            f = f + m;
        }
        return f;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

/// Central finite difference of f along coordinate i.
inline cplx central_difference(const Expr& f, const CVec& p, std::size_t i, double h)
{
    return (f.eval(p.with(i, p[i] + h)) - f.eval(p.with(i, p[i] - h))) / (2.0 * h);
}

/// True iff fn raises hcontact::Error of the given kind.
template <class F>
bool throws_as_kind(hcontact::ErrorKind kind, F&& fn)
{
    try {
        fn();
    } catch (const hcontact::Error& e) {
        return e.kind() == kind;
    }
    return false;
}

} // namespace hctest

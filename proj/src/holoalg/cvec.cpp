#include "hcontact/cvec.hpp"
#include "hcontact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hcontact {

namespace {

void require_finite(const std::vector<cplx>& v)
{
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorKind::DomainError, "non-finite vector entry");
}

} // namespace

CVec::CVec(std::initializer_list<cplx> values) : v_(values) { require_finite(v_); }

CVec::CVec(std::vector<cplx> values) : v_(std::move(values)) { require_finite(v_); }

CVec CVec::with(std::size_t i, cplx value) const
{
    auto v = v_;
    v.at(i) = value;
    return CVec(std::move(v));
}

CVec CVec::head(std::size_t n) const
{
    if (n > v_.size())
        throw Error(ErrorKind::DimensionMismatch, "head longer than vector");
    return CVec(std::vector<cplx>(v_.begin(), v_.begin() + static_cast<std::ptrdiff_t>(n)));
}

CVec CVec::appended(cplx value) const
{
    auto v = v_;
    v.push_back(value);
    return CVec(std::move(v));
}

CVec CVec::concat(const CVec& other) const
{
    auto v = v_;
    v.insert(v.end(), other.v_.begin(), other.v_.end());
    return CVec(std::move(v));
}

double CVec::norm() const noexcept { return std::sqrt(norm2()); }

double CVec::norm2() const noexcept
{
    double s = 0.0;
    for (const auto& z : v_)
        s += std::norm(z);
    return s;
}

double CVec::max_abs() const noexcept
{
    double m = 0.0;
    for (const auto& z : v_)
        m = std::max(m, std::abs(z));
    return m;
}

CVec operator+(const CVec& a, const CVec& b)
{
    require_same_size(a, b, "operator+");
    std::vector<cplx> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = a[i] + b[i];
    return CVec(std::move(r));
}

CVec operator-(const CVec& a, const CVec& b)
{
    require_same_size(a, b, "operator-");
    std::vector<cplx> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = a[i] - b[i];
    return CVec(std::move(r));
}

CVec operator-(const CVec& a)
{
    std::vector<cplx> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = -a[i];
    return CVec(std::move(r));
}

CVec operator*(cplx s, const CVec& a)
{
    std::vector<cplx> r(a.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = s * a[i];
    return CVec(std::move(r));
}

std::string CVec::to_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < v_.size(); ++i) {
        if (i)
            s += ", ";
        s += format_complex(v_[i]);
    }
    return s + ")";
}

cplx inner(const CVec& a, const CVec& b)
{
    require_same_size(a, b, "inner");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * std::conj(b[i]);
    return s;
}

void require_same_size(const CVec& a, const CVec& b, const char* where)
{
    if (a.size() != b.size())
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(where) + ": sizes " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
}

std::string format_complex(cplx z)
{
    char buf[96];
    if (z.imag() == 0.0)
        std::snprintf(buf, sizeof buf, "%.17g", z.real());
    else if (z.real() == 0.0)
        std::snprintf(buf, sizeof buf, "%.17gi", z.imag());
    else
        std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

// ---------------------------------------------------------------------------
// CMatrix

CMatrix CMatrix::identity(int n)
{
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

double CMatrix::max_abs() const noexcept
{
    double m = 0.0;
    for (const auto& z : a_)
        m = std::max(m, std::abs(z));
    return m;
}

CVec operator*(const CMatrix& m, const CVec& v)
{
    if (static_cast<std::size_t>(m.cols()) != v.size())
        throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
    std::vector<cplx> r(static_cast<std::size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) {
        cplx s = 0.0;
        for (int j = 0; j < m.cols(); ++j)
            s += m(i, j) * v[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = s;
    }
    return CVec(std::move(r));
}

CMatrix operator*(const CMatrix& a, const CMatrix& b)
{
    if (a.cols() != b.rows())
        throw Error(ErrorKind::DimensionMismatch, "matrix product");
    CMatrix r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            cplx s = 0.0;
            for (int k = 0; k < a.cols(); ++k)
                s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

cplx determinant(CMatrix m)
{
    if (m.rows() != m.cols())
        throw Error(ErrorKind::DimensionMismatch, "determinant of non-square matrix");
    const int n = m.rows();
    cplx det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c)))
                piv = r;
        if (m(piv, c) == 0.0)
            return 0.0;
        if (piv != c) {
            for (int j = 0; j < n; ++j)
                std::swap(m(c, j), m(piv, j));
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            const cplx f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j)
                m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

CVec solve(CMatrix a, const CVec& b, double pivot_ratio)
{
    const int n = a.rows();
    if (a.cols() != n || static_cast<std::size_t>(n) != b.size())
        throw Error(ErrorKind::DimensionMismatch, "solve: shape mismatch");
    std::vector<cplx> x(b.values());
    const double scale = a.max_abs();
    if (scale == 0.0)
        throw Error(ErrorKind::SingularSystem, "zero matrix", 0.0);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c)))
                piv = r;
        const double ratio = std::abs(a(piv, c)) / scale;
        if (ratio < pivot_ratio)
            throw Error(ErrorKind::SingularSystem,
                        "pivot ratio below threshold in column " + std::to_string(c), ratio);
        if (piv != c) {
            for (int j = 0; j < n; ++j)
                std::swap(a(c, j), a(piv, j));
            std::swap(x[static_cast<std::size_t>(c)], x[static_cast<std::size_t>(piv)]);
        }
        for (int r = c + 1; r < n; ++r) {
            const cplx f = a(r, c) / a(c, c);
            if (f == 0.0)
                continue;
            for (int j = c; j < n; ++j)
                a(r, j) -= f * a(c, j);
            x[static_cast<std::size_t>(r)] -= f * x[static_cast<std::size_t>(c)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        cplx s = x[static_cast<std::size_t>(r)];
        for (int j = r + 1; j < n; ++j)
            s -= a(r, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(r)] = s / a(r, r);
    }
    return CVec(std::move(x));
}

} // namespace hcontact

#pragma once

#include "hcontact/error.hpp"

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hcontact {

/// A point or tangent vector in C^n. Entries are finite by construction.
class CVec {
public:
    CVec() = default;
    explicit CVec(std::size_t n) : v_(n) {}
    CVec(std::initializer_list<cplx> values);
    explicit CVec(std::vector<cplx> values);

    std::size_t size() const noexcept { return v_.size(); }
    bool empty() const noexcept { return v_.empty(); }
    const cplx& operator[](std::size_t i) const { return v_[i]; }
    std::span<const cplx> span() const noexcept { return v_; }
    const std::vector<cplx>& values() const noexcept { return v_; }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }

    /// Copy with entry `i` replaced.
    CVec with(std::size_t i, cplx value) const;
    /// First `n` entries.
    CVec head(std::size_t n) const;
    /// Copy with `value` appended.
    CVec appended(cplx value) const;
    CVec concat(const CVec& other) const;

    double norm() const noexcept;
    double norm2() const noexcept;
    double max_abs() const noexcept;

    friend CVec operator+(const CVec& a, const CVec& b);
    friend CVec operator-(const CVec& a, const CVec& b);
    friend CVec operator-(const CVec& a);
    friend CVec operator*(cplx s, const CVec& a);
    friend CVec operator*(const CVec& a, cplx s) { return s * a; }
    friend bool operator==(const CVec& a, const CVec& b) = default;

    std::string to_string() const;

private:
    std::vector<cplx> v_;
};

/// Hermitian inner product  sum a_i conj(b_i).
cplx inner(const CVec& a, const CVec& b);

/// Throws DimensionMismatch when the sizes differ.
void require_same_size(const CVec& a, const CVec& b, const char* where);

std::string format_complex(cplx z);

} // namespace hcontact

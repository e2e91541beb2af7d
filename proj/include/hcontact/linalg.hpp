#pragma once

#include "hcontact/cvec.hpp"

#include <vector>

namespace hcontact {

/// Small dense complex matrix, row-major.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    static CMatrix identity(int n);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    cplx& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    double max_abs() const noexcept;

    friend CVec operator*(const CMatrix& m, const CVec& v);
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> a_;
};

/// Determinant by partial-pivot elimination. Square matrices only.
cplx determinant(CMatrix m);

/// Solves A x = b by partial-pivot elimination. Raises SingularSystem when a
/// pivot falls below `pivot_ratio` times the largest entry of A.
CVec solve(CMatrix a, const CVec& b, double pivot_ratio = 1e-12);

} // namespace hcontact

#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/expr.hpp"
#include "hcontact/linalg.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hcontact {

/// Holomorphic map C^m -> C^n given by n component expressions in m variables.
/// Symbolic partial derivatives are built once at construction.
class HoloMap {
public:
    HoloMap() = default;
    /// Raises ArityMismatch if a component references a variable >= arity.
    HoloMap(int arity, std::vector<Expr> components);

    static HoloMap identity(int n);

    int arity() const noexcept { return arity_; }
    int dim() const noexcept { return static_cast<int>(components_.size()); }
    const Expr& component(int r) const { return components_.at(static_cast<std::size_t>(r)); }
    const std::vector<Expr>& components() const noexcept { return components_; }
    /// d F_r / d z_c.
    const Expr& partial(int r, int c) const;

    CVec eval(const CVec& p) const;
    CMatrix jacobian(const CVec& p) const;

    /// (*this) o inner.
    HoloMap compose(const HoloMap& inner) const;

    std::string to_string(std::span<const std::string> names = {}) const;

private:
    void require_point(const CVec& p) const;

    int arity_ = 0;
    std::vector<Expr> components_;
    std::shared_ptr<const std::vector<Expr>> partials_;
};

inline CMatrix jacobian(const HoloMap& f, const CVec& p) { return f.jacobian(p); }

} // namespace hcontact

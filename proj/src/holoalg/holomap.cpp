#include "hcontact/holomap.hpp"

namespace hcontact {

HoloMap::HoloMap(int arity, std::vector<Expr> components) : arity_(arity), components_(std::move(components))
{
    if (arity < 0)
        throw Error(ErrorKind::InvalidArgument, "negative map arity");
    auto partials = std::make_shared<std::vector<Expr>>();
    partials->reserve(components_.size() * static_cast<std::size_t>(arity));
    for (std::size_t r = 0; r < components_.size(); ++r) {
        if (components_[r].max_var() >= arity)
            throw Error(ErrorKind::ArityMismatch, "component " + std::to_string(r) + " references x" +
                                                      std::to_string(components_[r].max_var()) +
                                                      " but the map has arity " + std::to_string(arity));
        for (int c = 0; c < arity; ++c)
            partials->push_back(derive(components_[r], c));
    }
    partials_ = std::move(partials);
}

HoloMap HoloMap::identity(int n)
{
    std::vector<Expr> comps;
    for (int i = 0; i < n; ++i)
        comps.push_back(Expr::var(i));
    return HoloMap(n, std::move(comps));
}

const Expr& HoloMap::partial(int r, int c) const
{
    if (r < 0 || r >= dim() || c < 0 || c >= arity_)
        throw Error(ErrorKind::InvalidArgument, "partial index out of range");
    return (*partials_)[static_cast<std::size_t>(r) * static_cast<std::size_t>(arity_) + static_cast<std::size_t>(c)];
}

void HoloMap::require_point(const CVec& p) const
{
    if (p.size() != static_cast<std::size_t>(arity_))
        throw Error(ErrorKind::DimensionMismatch,
                    "map of arity " + std::to_string(arity_) + " applied to a point of dimension " +
                        std::to_string(p.size()));
}

CVec HoloMap::eval(const CVec& p) const
{
    require_point(p);
    std::vector<cplx> r;
    r.reserve(components_.size());
    for (const auto& e : components_)
        r.push_back(e.eval(p));
    return CVec(std::move(r));
}

CMatrix HoloMap::jacobian(const CVec& p) const
{
    require_point(p);
    CMatrix j(dim(), arity_);
    for (int r = 0; r < dim(); ++r)
        for (int c = 0; c < arity_; ++c)
            j(r, c) = partial(r, c).eval(p);
    return j;
}

HoloMap HoloMap::compose(const HoloMap& inner) const
{
    if (inner.dim() != arity_)
        throw Error(ErrorKind::DimensionMismatch, "composition: inner map has " + std::to_string(inner.dim()) +
                                                      " components, outer arity " + std::to_string(arity_));
    std::vector<Expr> comps;
    for (const auto& e : components_)
        comps.push_back(substitute(e, inner.components()));
    return HoloMap(inner.arity(), std::move(comps));
}

std::string HoloMap::to_string(std::span<const std::string> names) const
{
    std::string s = "(";
    for (std::size_t r = 0; r < components_.size(); ++r) {
        if (r)
            s += ", ";
        s += components_[r].to_string(names);
    }
    return s + ")";
}

} // namespace hcontact

#include "hcontact/path.hpp"

#include <numbers>

namespace hcontact {

namespace {

const Expr t_var = Expr::var(0);

void check_joint(const CVec& a, const CVec& b, std::size_t index)
{
    if ((a - b).max_abs() > Path::joint_tol)
        throw Error(ErrorKind::InvalidArgument, "path segment " + std::to_string(index) + " starts at " +
                                                    b.to_string() + " but the previous one ends at " + a.to_string());
}

} // namespace

Path::Path(std::vector<HoloMap> segments) : segs_(std::move(segments))
{
    for (std::size_t i = 0; i < segs_.size(); ++i) {
        if (segs_[i].arity() != 1)
            throw Error(ErrorKind::ArityMismatch, "path segments are maps of one parameter");
        if (i == 0)
            dim_ = segs_[i].dim();
        else if (segs_[i].dim() != dim_)
            throw Error(ErrorKind::DimensionMismatch, "path segments of different dimension");
        if (i > 0)
            check_joint(segs_[i - 1].eval(CVec{1.0}), segs_[i].eval(CVec{0.0}), i);
    }
}

Path Path::segment(const CVec& a, const CVec& b)
{
    require_same_size(a, b, "Path::segment");
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < a.size(); ++i)
        comps.push_back(Expr(a[i]) + Expr(b[i] - a[i]) * t_var);
    return Path({HoloMap(1, std::move(comps))});
}

Path Path::polyline(const std::vector<CVec>& points)
{
    std::vector<HoloMap> segs;
    for (std::size_t i = 1; i < points.size(); ++i)
        segs.push_back(segment(points[i - 1], points[i]).segment(0));
    return Path(std::move(segs));
}

Path Path::circle(const CVec& base, int coord, cplx center, double radius)
{
    if (coord < 0 || static_cast<std::size_t>(coord) >= base.size())
        throw Error(ErrorKind::InvalidArgument, "circle coordinate out of range");
    if (!(radius > 0.0))
        throw Error(ErrorKind::InvalidArgument, "circle radius must be positive");
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < base.size(); ++i)
        comps.push_back(static_cast<int>(i) == coord
                            ? Expr(center) + Expr(radius) * exp(Expr(cplx(0.0, 2.0 * std::numbers::pi)) * t_var)
                            : Expr(base[i]));
    return Path({HoloMap(1, std::move(comps))});
}

CVec Path::start() const
{
    if (segs_.empty())
        throw Error(ErrorKind::InvalidArgument, "empty path has no start");
    return segs_.front().eval(CVec{0.0});
}

CVec Path::end() const
{
    if (segs_.empty())
        throw Error(ErrorKind::InvalidArgument, "empty path has no end");
    return segs_.back().eval(CVec{1.0});
}

CVec Path::point(std::size_t seg, double t) const { return segment(seg).eval(CVec{t}); }

CVec Path::velocity(std::size_t seg, double t) const
{
    const auto& s = segment(seg);
    const CVec at{t};
    std::vector<cplx> v;
    for (int r = 0; r < s.dim(); ++r)
        v.push_back(s.partial(r, 0).eval(at));
    return CVec(std::move(v));
}

Path Path::reversed() const
{
    const HoloMap flip(1, {1.0 - t_var});
    std::vector<HoloMap> segs;
    for (auto it = segs_.rbegin(); it != segs_.rend(); ++it)
        segs.push_back(it->compose(flip));
    return Path(std::move(segs));
}

Path Path::concat(const Path& next) const
{
    if (segs_.empty())
        return next;
    if (next.segs_.empty())
        return *this;
    auto segs = segs_;
    segs.insert(segs.end(), next.segs_.begin(), next.segs_.end());
    return Path(std::move(segs));
}

} // namespace hcontact

#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/holomap.hpp"

#include <vector>

namespace hcontact {

/// Piecewise curve in C^n. Each segment is a holomorphic map of one variable
/// restricted to the real interval t in [0, 1]; consecutive segments join to
/// 1e-12. The empty path has no segments.
class Path {
public:
    static constexpr double joint_tol = 1e-12;

    Path() = default;
    explicit Path(std::vector<HoloMap> segments);

    /// Straight segment a -> b.
    static Path segment(const CVec& a, const CVec& b);
    static Path polyline(const std::vector<CVec>& points);
    /// Counterclockwise circle center + radius e^{2 pi i t} in coordinate
    /// `coord`, the other coordinates fixed at `base`.
    static Path circle(const CVec& base, int coord, cplx center, double radius);

    bool empty() const noexcept { return segs_.empty(); }
    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return segs_.size(); }
    const HoloMap& segment(std::size_t i) const { return segs_.at(i); }
    const std::vector<HoloMap>& segments() const noexcept { return segs_; }

    CVec start() const;
    CVec end() const;
    CVec point(std::size_t seg, double t) const;
    CVec velocity(std::size_t seg, double t) const;

    Path reversed() const;
    /// Appends `next`, whose start must match this path's end.
    Path concat(const Path& next) const;

private:
    int dim_ = 0;
    std::vector<HoloMap> segs_;
};

} // namespace hcontact

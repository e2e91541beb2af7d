#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/holomap.hpp"
#include "hcontact/path.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hcontact {

/// Model domain in C^n.
///   Disc(r)           |z| < r
///   PuncturedDisc(r)  0 < |z| < r
///   Ball(n, r)        |p| < r
///   Polydisc(radii)   |z_i| < r_i
///   HalfPlane         Re z > 0
///   Siegel(n)         Re z_1 > |z_2|^2 + ... + |z_n|^2
///   Product(factors)  coordinates of the factors in order (nested products flatten)
///   Box(center, radii) |z_i - c_i| < r_i
class Domain {
public:
    enum class Kind { Disc, PuncturedDisc, Ball, Polydisc, HalfPlane, Siegel, Product, Box };

    static Domain disc(double r = 1.0);
    static Domain punctured_disc(double r = 1.0);
    static Domain ball(int n, double r = 1.0);
    static Domain polydisc(std::vector<double> radii);
    static Domain half_plane();
    static Domain siegel(int n);
    static Domain product(std::vector<Domain> factors);
    static Domain box(CVec center, std::vector<double> radii);

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    /// Radius of Disc, PuncturedDisc and Ball.
    double radius() const noexcept { return r_; }
    /// Per-coordinate radii of Polydisc and Box.
    const std::vector<double>& radii() const noexcept { return radii_; }
    const CVec& center() const noexcept { return center_; }
    /// Factors of a Product (never themselves products).
    const std::vector<Domain>& factors() const noexcept { return factors_; }
    /// Offset of each factor's first coordinate.
    std::vector<int> factor_offsets() const;

    std::string describe() const;
    friend bool operator==(const Domain&, const Domain&);

private:
    Kind kind_ = Kind::Disc;
    int dim_ = 1;
    double r_ = 1.0;
    std::vector<double> radii_;
    CVec center_;
    std::vector<Domain> factors_;
};

std::string to_string(Domain::Kind kind);

/// Strict interior membership. Raises DimensionMismatch.
bool contains(const Domain& d, const CVec& p);
/// Euclidean distance to the boundary (a lower bound for Siegel); 0 outside.
double boundary_distance(const Domain& d, const CVec& p);
/// Fixed interior reference point: disc/ball/polydisc 0, punctured disc r/2,
/// half plane 1, Siegel (1, 0, ..), box center; products concatenate.
CVec basepoint(const Domain& d);

/// Deterministic interior samples at distance >= margin from the boundary:
/// a Halton sequence with a seeded Cranley-Patterson shift, mapped into the
/// domain with rejection.
std::vector<CVec> sample(const Domain& d, int count, std::uint64_t seed, double margin = 1e-6);

/// Kobayashi-Royden metric, normalized by kappa_disc(0; 1) = 1. Raises
/// UnsupportedDomain for Siegel (use siegel_kappa).
double model_kappa(const Domain& d, const CVec& p, const CVec& v);
/// Kobayashi distance, k_disc(0, t) = artanh t. Raises UnsupportedDomain for
/// Siegel (use siegel_dist).
double model_dist(const Domain& d, const CVec& p, const CVec& q);

/// Metric of Siegel(n) computed by pulling back to Ball(n) through the inverse
/// Cayley map.
double siegel_kappa(int n, const CVec& p, const CVec& v);
double siegel_dist(int n, const CVec& p, const CVec& q);

/// Holomorphic disc phi: D -> domain with phi(0) = p and phi'(0) = v / kappa(p; v),
/// i.e. extremal for the Kobayashi-Royden metric.
HoloMap extremal_disc(const Domain& d, const CVec& p, const CVec& v);

struct ChainLink {
    HoloMap disc;
    double t = 0.0;
};

/// Finite sequence of discs phi_j with parameters t_j in (0, 1) and
/// phi_j(t_j) = phi_{j+1}(0).
struct Chain {
    std::vector<ChainLink> links;

    CVec start() const;
    CVec end() const;
};

/// Single-disc chain realizing model_dist: phi(0) = p, phi(t) = q,
/// artanh t = model_dist. Raises DegenerateInput for p = q.
Chain geodesic_chain(const Domain& d, const CVec& p, const CVec& q);

/// Path from basepoint(d) to p: factors are moved one after another, convex
/// factors along straight segments, punctured discs along the zero-winding
/// logarithmic spiral. Empty when p is the basepoint.
Path canonical_path(const Domain& d, const CVec& p);

/// Counterclockwise circle of the given radius around `center` in one
/// coordinate; the remaining coordinates sit at the basepoint.
Path circle_loop(const Domain& d, int coordinate, double radius, cplx center = 0.0);

} // namespace hcontact

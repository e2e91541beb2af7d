#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hcontact/domains.hpp"
#include "hcontact/model_maps.hpp"
#include "hcontact/quadrature.hpp"
#include "support.hpp"

#include <numbers>

using namespace hcontact;
using hctest::Gen;

namespace {

bool throws_kind(ErrorKind kind, auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == kind;
    }
    return false;
}

const Domain disc = Domain::disc(1.0);
const Domain punctured = Domain::punctured_disc(1.0);
const Domain ball2 = Domain::ball(2, 1.0);
const Domain disc_punctured = Domain::product({disc, punctured});

// Oracle: hyperbolic length of the disc image between 0 and t, integrating the
// model metric along phi with phi' from the symbolic derivative.
double image_length(const Domain& d, const HoloMap& phi, double t)
{
    auto integrand = [&](double s) {
        const CVec at{s};
        std::vector<cplx> v;
        for (int r = 0; r < phi.dim(); ++r)
            v.push_back(phi.partial(r, 0).eval(at));
        return cplx(model_kappa(d, phi.eval(at), CVec(std::move(v))));
    };
    return integrate(integrand, 0.0, t, QuadOptions{1e-12}).value.real();
}

} // namespace

TEST_CASE("membership")
{
    CHECK(contains(ball2, CVec{0.5, 0.5}));
    CHECK_FALSE(contains(ball2, CVec{0.8, 0.8}));
    CHECK_FALSE(contains(punctured, CVec{0.0}));
    CHECK(contains(punctured, CVec{0.3}));
    CHECK(contains(Domain::siegel(2), CVec{1.0, 0.5}));
    CHECK_FALSE(contains(Domain::siegel(2), CVec{0.2, 0.5}));
    CHECK(contains(Domain::half_plane(), CVec{cplx(0.1, -5.0)}));
    CHECK(contains(Domain::box(CVec{1.0, 0.0}, {0.5, 2.0}), CVec{1.2, 1.9}));
    CHECK_FALSE(contains(Domain::box(CVec{1.0, 0.0}, {0.5, 2.0}), CVec{0.4, 0.0}));
    CHECK(disc_punctured.dim() == 2);
    CHECK(Domain::product({disc_punctured, disc}).factors().size() == 3);
    CHECK(throws_kind(ErrorKind::DimensionMismatch, [] { contains(ball2, CVec{0.1}); }));
    CHECK(throws_kind(ErrorKind::InvalidArgument, [] { Domain::disc(-1.0); }));
}

TEST_CASE("sampling is deterministic and keeps the margin")
{
    const std::vector<Domain> domains{disc,
                                      punctured,
                                      ball2,
                                      Domain::polydisc({1.0, 2.0}),
                                      Domain::half_plane(),
                                      Domain::siegel(2),
                                      disc_punctured,
                                      Domain::box(CVec{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}),
                                      Domain::ball(3, 0.5)};
    for (const auto& d : domains) {
        const auto a = sample(d, 64, 7);
        const auto b = sample(d, 64, 7);
        CHECK(a == b);
        CHECK(a.size() == 64);
        for (const auto& p : a) {
            CHECK(contains(d, p));
            CHECK(boundary_distance(d, p) >= 1e-6);
        }
        CHECK(sample(d, 8, 8) != sample(d, 8, 7));
    }
}

TEST_CASE("metric normalizations and worked values")
{
    CHECK(model_kappa(disc, CVec{0.0}, CVec{1.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(model_kappa(ball2, CVec{0.0, 0.0}, CVec{1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(model_kappa(ball2, CVec{0.5, 0.0}, CVec{0.0, 1.0}) - 1.0 / std::sqrt(0.75)) < 1e-14);

    // punctured disc: push the half-plane metric through w = e^{i x}
    const double e = std::numbers::e;
    const cplx w(1.0 / e);
    const cplx x = cplx(0.0, -1.0) * std::log(w);
    const double oracle = std::abs(1.0 / (cplx(0.0, 1.0) * w)) / (2.0 * x.imag());
    CHECK(std::abs(oracle - e / 2.0) < 1e-14);
    CHECK(std::abs(model_kappa(punctured, CVec{w}, CVec{1.0}) - e / 2.0) < 1e-14);
    // infinitesimal distance quotient agrees
    const double h = 1e-6;
    CHECK(std::abs(model_dist(punctured, CVec{w}, CVec{w + h}) / h - e / 2.0) < 1e-5);

    CHECK(std::abs(model_dist(disc, CVec{0.0}, CVec{0.5}) - 0.5 * std::log(3.0)) < 1e-15);
    CHECK(std::abs(model_dist(ball2, CVec{0.0, 0.0}, CVec{0.5, 0.0}) - std::atanh(0.5)) < 1e-15);
    CHECK(model_dist(ball2, CVec{0.3, 0.1}, CVec{0.3, 0.1}) == 0.0);
    CHECK(model_dist(Domain::polydisc({1.0, 1.0}), CVec{0.0, 0.0}, CVec{0.5, 0.25}) ==
          doctest::Approx(std::atanh(0.5)).epsilon(1e-15));
    // half plane Re z > 0 matches the disc through z -> (z - 1)/(z + 1)
    const cplx a(0.7, 0.2), b(2.0, -1.0);
    CHECK(std::abs(model_dist(Domain::half_plane(), CVec{a}, CVec{b}) -
                   model_dist(disc, CVec{(a - 1.0) / (a + 1.0)}, CVec{(b - 1.0) / (b + 1.0)})) < 1e-14);
    CHECK(throws_kind(ErrorKind::UnsupportedDomain,
                      [] { model_kappa(Domain::siegel(2), CVec{1.0, 0.0}, CVec{1.0, 0.0}); }));
}

TEST_CASE("Siegel metric through the Cayley map")
{
    const auto c = cayley(2);
    Gen g(3001);
    for (int t = 0; t < 20; ++t) {
        const auto p = g.ball_point(2, 0.9);
        const auto q = g.ball_point(2, 0.9);
        const auto v = g.point(2, 1.0);
        CHECK(std::abs(siegel_dist(2, c.eval(p), c.eval(q)) - model_dist(ball2, p, q)) < 1e-9);
        CHECK(std::abs(siegel_kappa(2, c.eval(p), c.jacobian(p) * v) - model_kappa(ball2, p, v)) <
              1e-9 * model_kappa(ball2, p, v));
    }
}

TEST_CASE("property: symmetry and triangle inequality")
{
    const std::vector<Domain> domains{disc, punctured, ball2, Domain::polydisc({1.0, 0.5}), Domain::half_plane(),
                                      disc_punctured, Domain::ball(3, 2.0)};
    std::uint64_t seed = 3100;
    for (const auto& d : domains) {
        const auto pts = sample(d, 300, seed++, 1e-3);
        for (int i = 0; i < 100; ++i) {
            const auto& p = pts[static_cast<std::size_t>(3 * i)];
            const auto& q = pts[static_cast<std::size_t>(3 * i + 1)];
            const auto& r = pts[static_cast<std::size_t>(3 * i + 2)];
            const double pq = model_dist(d, p, q);
            CHECK(std::abs(pq - model_dist(d, q, p)) < 1e-9);
            CHECK(model_dist(d, p, r) <= pq + model_dist(d, q, r) + 1e-9);
        }
    }
}

TEST_CASE("property: punctured distance is rotation invariant")
{
    Gen g(3002);
    const auto pts = sample(punctured, 100, 3003, 1e-3);
    for (int i = 0; i < 50; ++i) {
        const auto& p = pts[static_cast<std::size_t>(2 * i)];
        const auto& q = pts[static_cast<std::size_t>(2 * i + 1)];
        const cplx rot = std::polar(1.0, g.uniform(0.0, 2.0 * std::numbers::pi));
        CHECK(std::abs(model_dist(punctured, rot * p, rot * q) - model_dist(punctured, p, q)) < 1e-9);
    }
}

TEST_CASE("geodesic chains: worked examples")
{
    const auto c = geodesic_chain(disc, CVec{0.0}, CVec{0.5});
    CHECK(c.links.size() == 1);
    CHECK(c.links[0].t == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(c.links[0].disc.eval(CVec{0.3})[0] - 0.3) < 1e-15);

    const auto b = geodesic_chain(ball2, CVec{0.0, 0.0}, CVec{0.5, 0.0});
    CHECK(b.links[0].t == doctest::Approx(0.5).epsilon(1e-15));
    CHECK((b.links[0].disc.eval(CVec{cplx(0.2, 0.1)}) - CVec{cplx(0.2, 0.1), 0.0}).max_abs() < 1e-15);

    const auto pd = geodesic_chain(Domain::polydisc({1.0, 1.0}), CVec{0.0, 0.0}, CVec{0.5, 0.25});
    const auto& phi = pd.links[0].disc;
    CHECK(pd.links[0].t == doctest::Approx(0.5).epsilon(1e-15));
    const double alpha = std::atanh(0.25) / std::atanh(0.5);
    for (double s : {0.1, 0.3, -0.4}) {
        const auto v = phi.eval(CVec{s});
        CHECK(std::abs(v[0] - s) < 1e-15);
        CHECK(std::abs(v[1] - std::tanh(alpha * std::atanh(s))) < 1e-15);
    }
    CHECK((pd.end() - CVec{0.5, 0.25}).max_abs() < 1e-15);
    CHECK(throws_kind(ErrorKind::DegenerateInput, [] { geodesic_chain(disc, CVec{0.1}, CVec{0.1}); }));
    CHECK(throws_kind(ErrorKind::UnsupportedDomain,
                      [] { geodesic_chain(Domain::siegel(2), CVec{1.0, 0.0}, CVec{2.0, 0.0}); }));
}

TEST_CASE("property: geodesic chains realize the distance")
{
    const std::vector<Domain> domains{disc,         ball2,          Domain::polydisc({1.0, 0.7}), punctured,
                                      Domain::half_plane(), disc_punctured, Domain::ball(2, 1.5),
                                      Domain::box(CVec{cplx(1.0, 1.0)}, {0.5})};
    std::uint64_t seed = 3200;
    for (const auto& d : domains) {
        const auto pts = sample(d, 40, seed++, 1e-2);
        for (int i = 0; i < 20; ++i) {
            const auto& p = pts[static_cast<std::size_t>(2 * i)];
            const auto& q = pts[static_cast<std::size_t>(2 * i + 1)];
            const auto chain = geodesic_chain(d, p, q);
            const auto& link = chain.links[0];
            CHECK(chain.start() == p);
            CHECK((chain.end() - q).max_abs() < 1e-10);
            CHECK(std::abs(std::atanh(link.t) - model_dist(d, p, q)) < 1e-10);
            // the whole disc stays inside: check near the boundary circle
            for (int k = 0; k < 64; ++k) {
                const cplx zeta = std::polar(1.0 - 1e-3, 2.0 * std::numbers::pi * k / 64.0);
                CHECK(contains(d, link.disc.eval(CVec{zeta})));
            }
            if (d.kind() == Domain::Kind::Disc || d.kind() == Domain::Kind::Ball) {
                CHECK(std::abs(image_length(d, link.disc, link.t) - model_dist(d, p, q)) < 1e-6);
            }
        }
    }
}

TEST_CASE("property: extremal discs have the metric as derivative scale")
{
    const std::vector<Domain> domains{disc, ball2, punctured, Domain::half_plane(), disc_punctured,
                                      Domain::polydisc({1.0, 2.0}), Domain::ball(3, 1.0)};
    Gen g(3300);
    std::uint64_t seed = 3301;
    for (const auto& d : domains) {
        for (const auto& p : sample(d, 20, seed++, 1e-2)) {
            const auto v = g.point(static_cast<std::size_t>(d.dim()), 1.0);
            const auto phi = extremal_disc(d, p, v);
            CHECK(phi.eval(CVec{0.0}) == p);
            std::vector<cplx> dphi;
            for (int r = 0; r < phi.dim(); ++r)
                dphi.push_back(phi.partial(r, 0).eval(CVec{0.0}));
            const double k = model_kappa(d, p, v);
            CHECK((CVec(dphi) - (1.0 / k) * v).max_abs() < 1e-12 * (1.0 + v.max_abs() / k));
            for (int j = 0; j < 32; ++j)
                CHECK(contains(d, phi.eval(CVec{std::polar(1.0 - 1e-3, 2.0 * std::numbers::pi * j / 32.0)})));
        }
    }
}

TEST_CASE("canonical paths and loops")
{
    const CVec target{cplx(0.2, -0.3), cplx(-0.4, -0.1)};
    const auto path = canonical_path(disc_punctured, target);
    CHECK(path.size() == 2);
    CHECK(path.start() == basepoint(disc_punctured));
    CHECK(basepoint(disc_punctured) == CVec{0.0, 0.5});
    CHECK((path.end() - target).max_abs() < 1e-14);
    for (std::size_t s = 0; s < path.size(); ++s)
        for (int k = 0; k <= 50; ++k)
            CHECK(contains(disc_punctured, path.point(s, k / 50.0)));
    // zero winding: dw/w integrates to the principal log difference
    const auto dw_over_w = DiffForm::basis(2, {1}, 1.0 / Expr::var(1));
    CHECK(std::abs(path_integral(dw_over_w, path).value - (std::log(target[1]) - std::log(cplx(0.5)))) < 1e-12);
    CHECK(canonical_path(disc_punctured, basepoint(disc_punctured)).empty());

    const auto loop = circle_loop(disc_punctured, 1, 0.5);
    CHECK(std::abs(path_integral(dw_over_w, loop).value - cplx(0.0, 2.0 * std::numbers::pi)) < 1e-10);
}

TEST_CASE("model maps")
{
    const auto c = cayley(2);
    const auto ci = cayley_inverse(2);
    Gen g(3400);
    for (int t = 0; t < 20; ++t) {
        const auto p = g.ball_point(2, 1.0);
        CHECK(contains(Domain::siegel(2), c.eval(p)));
        CHECK((ci.eval(c.eval(p)) - p).max_abs() < 1e-12);
        for (cplx s : {cplx(1.0), cplx(0.0, 1.0), cplx(0.5, -0.5)})
            CHECK(contains(Domain::siegel(2), siegel_parabolic(s).eval(c.eval(p))));
        const auto f = ball_automorphism_fixing_one(cplx(0.8, 0.3), cplx(0.2, 0.1), 0.4);
        CHECK(contains(ball2, f.eval(p)));
        const auto u = linear_map(unitary2(0.3, 0.7, -1.1));
        CHECK(std::abs(u.eval(p).norm() - p.norm()) < 1e-14);
    }
    // the conjugated automorphism fixes (1, 0) as a boundary limit
    const auto f = ball_automorphism_fixing_one(cplx(0.8, 0.3), cplx(0.2, 0.1), 0.4);
    CHECK((f.eval(CVec{1.0 - 1e-9, 0.0}) - CVec{1.0, 0.0}).max_abs() < 1e-4);
}

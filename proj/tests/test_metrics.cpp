#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hcontact/metrics.hpp"
#include "support.hpp"

#include <numbers>

using namespace hcontact;
using hctest::Gen;
using hctest::throws_as_kind;

namespace {

constexpr double pi = std::numbers::pi;
const Symbols zw{{"z", "w"}, {}};
const Domain ball = Domain::ball(2);
const Domain punctured_base = Domain::product({Domain::disc(), Domain::punctured_disc()});

Lift standard_lift()
{
    return make_lift(make_symplectic(parse_form("d[z]^d[w] : 1", zw), ball), parse_form("d[w] : z", zw),
                     DiffForm(2, 1));
}

Lift alpha(cplx c)
{
    return make_lift(make_symplectic(parse_form("d[z]^d[w] : 1", zw), punctured_base), parse_form("d[w] : z", zw),
                     parse_form("d[w] : -c/w", Symbols{{"z", "w"}, {{"c", c}}}, 1));
}

// Horizontal lift of a base vector v at the total-space point p for dy - z dw.
CVec horizontal(const CVec& p, const CVec& v) { return CVec{v[0], v[1], p[0] * v[1]}; }

} // namespace

TEST_CASE("kappa_V: worked values")
{
    const auto L = standard_lift();
    const auto c = kappa_V(L, CVec{0.0, 0.0, 0.0}, CVec{1.0, 0.0, 0.0});
    CHECK(c.value == doctest::Approx(1.0).epsilon(1e-15));
    for (const cplx s : {cplx(0.3), cplx(0.1, 0.4)})
        CHECK((c.witness->eval(s) - CVec{s, 0.0, 0.0}).max_abs() < 1e-13);
    CHECK(std::abs(c.lambda - 1.0) < 1e-10);

    const CVec p{0.5, 0.0, cplx(0.2, 0.1)};
    const auto c2 = kappa_V(L, p, horizontal(p, CVec{0.0, 1.0}));
    CHECK(std::abs(c2.value - 1.0 / std::sqrt(0.75)) < 1e-14);
    CHECK(std::abs(std::abs(c2.lambda) * c2.value - 1.0) < 1e-8);

    CHECK(throws_as_kind(ErrorKind::NotInContactHyperplane, [&] { kappa_V(L, p, CVec{0.0, 0.0, 1.0}); }));
    CHECK(throws_as_kind(ErrorKind::DegenerateInput, [&] { kappa_V(L, p, CVec{0.0, 0.0, 0.0}); }));
}

TEST_CASE("property: kappa_V collapses to the base metric with a Legendrian witness")
{
    Gen g(6001);
    const auto L = standard_lift();
    const auto pts = sample(Domain::product({ball, Domain::disc()}), 30, 6002, 1e-2);
    for (const auto& p : pts) {
        const CVec u = horizontal(p, g.point(2, 1.0));
        const auto c = kappa_V(L, p, u);
        CHECK(std::abs(c.value - model_kappa(ball, p.head(2), u.head(2))) < 1e-10 * c.value);
        CHECK(c.legendrian < 1e-10);
        CHECK(c.proportionality < 1e-8);
        CHECK(std::abs(std::abs(c.lambda) * c.value - 1.0) < 1e-8);
        CHECK((c.witness->eval(0.0) - p).max_abs() == 0.0);
    }
}

TEST_CASE("property: kappa_V is invariant under lifted unitary automorphisms")
{
    Gen g(6010);
    const auto L = standard_lift();
    for (int trial = 0; trial < 10; ++trial) {
        const cplx rot = std::polar(1.0, g.uniform(0.0, 2.0 * pi));
        const auto F = lift_automorphism(L, HoloMap(2, {Expr::var(0), Expr(rot) * Expr::var(1)}), {});
        REQUIRE(F.liftable);
        CHECK(std::abs(std::abs(F.lambda) - 1.0) < 1e-14);
        const CVec p = g.ball_point(2, 0.9).appended(g.complex_in_disc(0.5));
        const CVec u = horizontal(p, g.point(2, 1.0));
        const CVec image = F.apply(p);
        const CVec pushed = F.jacobian(p) * u;
        CHECK(std::abs(kappa_V(L, p, u).value - kappa_V(L, image, pushed).value) < 1e-8);
    }
}

TEST_CASE("v_length")
{
    const auto L = standard_lift();
    const double a = 0.6, b = 0.3;
    const double T = 0.5 / std::hypot(a, b);
    const Expr t = Expr::var(0);
    // lift of the linear disc (a s, b s): y = a b s^2 / 2, traversed for s in [0, T]
    const Expr s = Expr(T) * t;
    const Path lifted({HoloMap(1, {a * s, b * s, Expr(a * b / 2.0) * s * s})});
    const auto len = v_length(L, lifted);
    CHECK(std::abs(len.value - std::atanh(0.5)) < 1e-10);
    CHECK(std::abs(len.value - model_dist(ball, CVec{0.0, 0.0}, CVec{a * T, b * T})) < 1e-10);
    CHECK(len.tangency < 1e-15);
    CHECK(std::abs(v_length(L, lifted.reversed()).value - len.value) < 1e-10);
    CHECK(v_length(L, Path({HoloMap(1, {Expr(0.1), Expr(0.2), Expr(0.3)})})).value == 0.0);
    CHECK(v_length(L, Path()).value == 0.0);
    try {
        v_length(L, Path({HoloMap(1, {0.5 * t, 0.5 * t, Expr(0.0)})}));
        FAIL("expected TangencyViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::TangencyViolation);
        CHECK(e.residual() == doctest::Approx(0.25 * 255.0 / 256.0));
    }
}

TEST_CASE("chain_length")
{
    const double one[] = {0.5};
    CHECK(chain_length(one) == doctest::Approx(0.5493061443340548).epsilon(1e-15));
    const double two[] = {0.5, 0.5};
    CHECK(chain_length(two) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    const double bad[] = {1.0};
    CHECK(throws_as_kind(ErrorKind::ParamOutOfRange, [&] { chain_length(bad); }));
    const double zero[] = {0.0};
    CHECK(throws_as_kind(ErrorKind::ParamOutOfRange, [&] { chain_length(zero); }));

    const auto L = standard_lift();
    const auto chain = geodesic_chain(ball, CVec{0.1, 0.2}, CVec{-0.3, 0.4});
    CHECK(chain_length(lift_chain(L, chain, 0.0)) == chain_length(chain));
}

TEST_CASE("dist_bounds: worked values")
{
    const auto L = standard_lift();
    const auto d = dist_bounds(L, CVec{0.0, 0.0, 0.0}, CVec{0.5, 0.0, 0.0});
    CHECK(d.lower == doctest::Approx(std::atanh(0.5)).epsilon(1e-15));
    CHECK(d.finite());
    CHECK(std::abs(d.upper - d.lower) < 1e-12);
    CHECK(d.gap < 1e-14);

    const auto miss = dist_bounds(L, CVec{0.0, 0.0, 0.0}, CVec{0.5, 0.0, 1.0});
    CHECK(miss.lower == doctest::Approx(std::atanh(0.5)).epsilon(1e-15));
    CHECK_FALSE(miss.finite());
    CHECK(std::abs(miss.gap - 1.0) < 1e-14);

    const auto same = dist_bounds(L, CVec{0.1, 0.2, 0.3}, CVec{0.1, 0.2, 0.3});
    CHECK(same.lower == 0.0);
    CHECK(same.upper == 0.0);
    const auto fiber_only = dist_bounds(L, CVec{0.1, 0.2, 0.3}, CVec{0.1, 0.2, 0.4});
    CHECK_FALSE(fiber_only.finite());
}

TEST_CASE("property: distance sandwich on fiber-matched pairs")
{
    Gen g(6020);
    const auto L = standard_lift();
    const auto pts = sample(ball, 100, 6021, 1e-2);
    for (int i = 0; i < 50; ++i) {
        const CVec pb = pts[static_cast<std::size_t>(2 * i)];
        const CVec qb = pts[static_cast<std::size_t>(2 * i + 1)];
        const CVec p = pb.appended(g.complex_in_disc(0.5));
        const auto reach = dist_to_fiber(L, p, qb);
        CHECK(std::abs(reach.value - model_dist(ball, pb, qb)) < 1e-8);
        CHECK((reach.chain.end.head(2) - qb).max_abs() < 1e-10);
        const auto d = dist_bounds(L, p, reach.chain.end);
        REQUIRE(d.finite());
        CHECK(d.lower <= d.upper + 1e-12);
        CHECK(d.upper - d.lower < 1e-6);
    }
}

TEST_CASE("property: Schwarz-Pick for lifted discs")
{
    Gen g(6030);
    const auto L = standard_lift();
    for (int trial = 0; trial < 10; ++trial) {
        const CVec p = g.ball_point(2, 0.7);
        const auto disc = extremal_disc(ball, p, g.point(2, 1.0));
        const auto lifted = lift_disc(L, disc, g.complex_in_disc(0.5));
        for (int k = 0; k < 5; ++k) {
            const cplx s1 = g.complex_in_disc(0.8), s2 = g.complex_in_disc(0.8);
            const double disc_dist = model_dist(Domain::disc(), CVec{s1}, CVec{s2});
            const auto d = dist_bounds(L, lifted.disc.eval(s1), lifted.disc.eval(s2));
            CHECK(d.lower <= disc_dist + 1e-8);
        }
    }
}

TEST_CASE("dist_to_fiber")
{
    const auto L = standard_lift();
    const auto r = dist_to_fiber(L, CVec{0.0, 0.0, 0.0}, CVec{0.5, 0.0});
    CHECK(r.value == doctest::Approx(std::atanh(0.5)).epsilon(1e-15));
    CHECK((r.chain.end - CVec{0.5, 0.0, 0.0}).max_abs() < 1e-12);

    // punctured factor through its universal cover x = -i log w in the upper half plane
    const cplx x1 = cplx(0.0, -1.0) * std::log(cplx(0.5));
    const cplx x2 = cplx(0.0, -1.0) * (std::log(0.5) + cplx(0.0, pi));
    const double oracle = std::atanh(std::abs(x1 - x2) / std::abs(x1 - std::conj(x2)));
    const auto a = alpha(1.0);
    const auto far = dist_to_fiber(a, CVec{0.0, 0.5, 0.0}, CVec{0.0, -0.5});
    CHECK(std::abs(far.value - oracle) < 1e-12);
    CHECK((far.chain.end.head(2) - CVec{0.0, -0.5}).max_abs() < 1e-10);
    // half a turn of -c dw/w
    CHECK(std::abs(std::abs(far.chain.end[2]) - pi) < 1e-9);

    const auto here = dist_to_fiber(L, CVec{0.1, 0.2, 0.3}, CVec{0.1, 0.2});
    CHECK(here.value == 0.0);
    CHECK(here.chain.discs.empty());
    const auto near = dist_to_fiber(L, CVec{0.1, 0.2, 0.3}, CVec{0.1 + 1e-7, 0.2});
    CHECK(near.value < 1e-6);
}

TEST_CASE("local_connect: worked curve")
{
    const CVec p{0.1, 0.1, 0.01};
    const auto curve = local_connect(1.0, p);
    REQUIRE(curve.size() == 6);
    const std::vector<CVec> corners{CVec{0.0, 0.1, 0.01}, CVec{0.0, 0.2, 0.01}, CVec{0.1, 0.2, 0.01},
                                    CVec{0.1, 0.1, 0.0},  CVec{0.0, 0.1, 0.0},  CVec{0.0, 0.0, 0.0}};
    CHECK(curve.start() == p);
    CHECK(curve.end() == CVec{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < 6; ++i)
        CHECK((curve.point(i, 1.0) - corners[i]).max_abs() < 1e-15);
    const auto xi = standard_contact(1);
    std::vector<cplx> nodes;
    for (double t : tangency_nodes())
        nodes.push_back(t);
    for (const auto& piece : curve.segments())
        CHECK(legendrian_residual(xi, piece, nodes) < 1e-12);

    const auto flat = local_connect(1.0, CVec{0.1, 0.1, 0.0});
    CHECK(flat.size() == 2);
    CHECK(flat.end() == CVec{0.0, 0.0, 0.0});
    CHECK(local_connect(1.0, CVec{0.0, 0.0, 0.0}).empty());
    CHECK(throws_as_kind(ErrorKind::IntermediatePointEscapes, [] { local_connect(1.0, CVec{0.0, 0.5, 0.8}); }));
}

TEST_CASE("property: local_connect curves are horizontal with exact ends")
{
    Gen g(6040);
    const auto xi = standard_contact(1);
    std::vector<cplx> nodes;
    for (double t : tangency_nodes())
        nodes.push_back(t);
    for (int trial = 0; trial < 50; ++trial) {
        const CVec p{g.complex_in_disc(0.2), g.complex_in_disc(0.2), g.complex_in_disc(0.04)};
        const auto curve = local_connect(1.0, p);
        CHECK(curve.start() == p);
        CHECK(curve.end() == CVec{0.0, 0.0, 0.0});
        for (const auto& piece : curve.segments())
            CHECK(legendrian_residual(xi, piece, nodes) < 1e-12);
        CHECK(box_length(1.0, curve).tangency < 1e-12);
    }
}

TEST_CASE("kappa_upper_box: worked values")
{
    const auto z = kappa_upper_box(1.0, CVec{0.0, 0.0, 0.0}, CVec{1.0, 0.0, 0.0});
    CHECK(z.rho == 1.0);
    CHECK(z.value == 1.0);
    const auto w = kappa_upper_box(1.0, CVec{0.0, 0.0, 0.0}, CVec{0.0, 1.0, 0.0});
    CHECK(w.value == 1.0);

    const CVec p{0.5, 0.0, 0.0};
    const auto h = kappa_upper_box(1.0, p, CVec{0.0, 1.0, 0.5});
    CHECK(h.base_slack == 0.5);
    CHECK(h.fiber_rho == 2.0);
    CHECK(h.rho == 0.5);
    CHECK(h.value == 2.0);
    // the lifted linear disc y = 0.5 rho zeta reaches |y| = r exactly on |zeta| = fiber_rho / rho
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
        const cplx zeta = std::polar(1.0, 2.0 * pi * k / 64.0);
        worst = std::max(worst, std::abs(0.5 * h.fiber_rho * zeta));
    }
    CHECK(std::abs(worst - 1.0) < 1e-15);

    CHECK(throws_as_kind(ErrorKind::NotInContactHyperplane,
                         [&] { kappa_upper_box(1.0, p, CVec{0.0, 0.0, 1.0}); }));
    CHECK(throws_as_kind(ErrorKind::DegenerateDirection, [&] { kappa_upper_box(1.0, p, CVec{0.0, 0.0, 0.0}); }));
}

TEST_CASE("property: box bound dominates kappa_V and its fiber estimate is sharp")
{
    Gen g(6050);
    const auto L = make_lift(make_symplectic(parse_form("d[z]^d[w] : 1", zw), ball), parse_form("d[w] : z", zw),
                             DiffForm(2, 1));
    for (int trial = 0; trial < 100; ++trial) {
        const CVec p = g.ball_point(2, 0.8).appended(g.complex_in_disc(0.8));
        const CVec u = horizontal(p, g.point(2, 1.0));
        const auto bound = kappa_upper_box(1.0, p, u);
        CHECK(bound.value >= kappa_V(L, p, u).value - 1e-12);
        // oracle: the closed-form lift y0 + rho b (z0 zeta + rho a zeta^2 / 2) stays in |y| < r
        const double len = u.head(2).norm();
        const cplx a = u[0] / len, b = u[1] / len;
        double ymax = 0.0;
        for (int k = 0; k < 256; ++k) {
            const cplx zeta = std::polar(1.0, 2.0 * pi * k / 256.0);
            const cplx y = p[2] + bound.rho * b * (p[0] * zeta + bound.rho * a * zeta * zeta / 2.0);
            ymax = std::max(ymax, std::abs(y));
        }
        CHECK(ymax <= 1.0 + 1e-12);
        CHECK(bound.rho <= 1.0 - p.head(2).norm() + 1e-15);
    }
}

TEST_CASE("property: certified local_connect length decreases toward the origin")
{
    double previous = 1e300;
    for (int k = 0; k <= 6; ++k) {
        const double f = std::ldexp(1.0, -k);
        const auto len = box_length(1.0, local_connect(1.0, CVec{0.2 * f, 0.2 * f, 0.04 * f}));
        CHECK(len.value < previous);
        previous = len.value;
    }
}

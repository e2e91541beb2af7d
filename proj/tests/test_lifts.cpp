#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hcontact/lifts.hpp"
#include "hcontact/model_maps.hpp"
#include "support.hpp"

#include <numbers>

using namespace hcontact;
using hctest::Gen;
using hctest::throws_as_kind;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);
const Symbols zw{{"z", "w"}, {}};
const Symbols zwy{{"z", "w", "y"}, {}};
const Domain punctured_base = Domain::product({Domain::disc(), Domain::punctured_disc()});
const Domain ball = Domain::ball(2);

Symbols with_c(cplx c) { return Symbols{{"z", "w"}, {{"c", c}}}; }

Lift standard_lift(const Domain& d = ball)
{
    return make_lift(make_symplectic(parse_form("d[z]^d[w] : 1", zw), d), parse_form("d[w] : z", zw),
                     DiffForm(2, 1));
}

Lift alpha(cplx c)
{
    return make_lift(make_symplectic(parse_form("d[z]^d[w] : 1", zw), punctured_base), parse_form("d[w] : z", zw),
                     parse_form("d[w] : -c/w", with_c(c), 1));
}

std::vector<Path> w_circle() { return {circle_loop(punctured_base, 1, 0.5)}; }

std::vector<CVec> total_points(const Domain& base, int count, std::uint64_t seed)
{
    return sample(Domain::product({base, Domain::disc()}), count, seed, 1e-3);
}

// Polynomial sum c_k s^k from its coefficient list.
Expr poly(const std::vector<cplx>& c)
{
    Expr e;
    for (std::size_t k = 0; k < c.size(); ++k)
        e = e + Expr(c[k]) * pow(Expr::var(0), static_cast<int>(k));
    return e;
}

cplx eval_poly(const std::vector<cplx>& c, cplx s)
{
    cplx r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;)
        r = r * s + c[k];
    return r;
}

// Coefficients of the antiderivative of p q' vanishing at 0.
std::vector<cplx> antiderivative_of_p_dq(const std::vector<cplx>& p, const std::vector<cplx>& q)
{
    std::vector<cplx> prod(p.size() + q.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 1; j < q.size(); ++j)
            prod[i + j - 1] += p[i] * static_cast<double>(j) * q[j];
    std::vector<cplx> out(prod.size() + 1, 0.0);
    for (std::size_t k = 0; k < prod.size(); ++k)
        out[k + 1] = prod[k] / static_cast<double>(k + 1);
    return out;
}

} // namespace

TEST_CASE("make_lift")
{
    const auto std_lift = standard_lift();
    CHECK(std_lift.contact.xi == parse_form("d[y] : 1; d[w] : -z", zwy));
    CHECK(std_lift.total_dim() == 3);
    const auto a = alpha(2.0);
    const DiffForm expected = parse_form("d[y] : 1; d[w] : -(z - c/w)", Symbols{{"z", "w", "y"}, {{"c", 2.0}}});
    for (const auto& p : total_points(punctured_base, 20, 5000))
        CHECK((a.contact.xi.eval(p) - expected.eval(p)).max_abs() < 1e-15);

    const auto omega = make_symplectic(parse_form("d[z]^d[w] : 1", zw), ball);
    try {
        make_lift(omega, parse_form("d[z] : w", zw), DiffForm(2, 1));
        FAIL("expected PotentialMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PotentialMismatch);
        CHECK(e.residual() == doctest::Approx(2.0));
    }
    CHECK(throws_as_kind(ErrorKind::TwistNotClosed,
                         [&] { make_lift(omega, parse_form("d[w] : z", zw), parse_form("d[w] : z", zw)); }));
}

TEST_CASE("validate_lift on the twisted family")
{
    for (cplx c : {cplx(0.0), cplx(1.0), I, cplx(2.0, -3.0)}) {
        const auto a = alpha(c);
        const auto r = validate_lift(a, total_points(punctured_base, 200, 5001), 1e-10);
        CHECK(r.pass);
        CHECK(r.max_residual() < 1e-10);
        CHECK(std::abs(r.contact.min_volume - 1.0) < 1e-12);
    }
    const auto r = validate_lift(standard_lift(), total_points(ball, 100, 5002));
    CHECK(r.pass);
    CHECK(r.max_residual() == 0.0);
}

TEST_CASE("lift_disc: worked values")
{
    const auto L = standard_lift();
    const Expr s = Expr::var(0);
    const auto lifted = lift_disc(L, HoloMap(1, {s / 2.0, s / 2.0}), 0.0);
    CHECK(lifted.residual < 1e-11);
    double worst = 0.0;
    for (const cplx zeta : certificate_params())
        worst = std::max(worst, std::abs(lifted.disc.fiber(zeta) - zeta * zeta / 8.0));
    CHECK(worst < 1e-10);

    const auto constant = lift_disc(L, HoloMap(1, {Expr(0.2), Expr(0.1)}), cplx(0.3, 0.1));
    for (const cplx zeta : certificate_params())
        CHECK(constant.disc.fiber(zeta) == cplx(0.3, 0.1));

    for (cplx c : {cplx(1.0), I}) {
        const auto a = alpha(c);
        const cplx w0(0.3, 0.4);
        const double rad = (1.0 - std::abs(w0)) / 2.0;
        const auto d = lift_disc(a, HoloMap(1, {Expr(0.0), Expr(w0) + Expr(rad) * s}), 0.0);
        for (const cplx zeta : certificate_params()) {
            const cplx w = w0 + zeta * rad;
            CHECK(std::abs(d.disc.fiber(zeta) + c * (std::log(w) - std::log(w0))) < 1e-11);
        }
    }

    CHECK(throws_as_kind(ErrorKind::ImageEscapesDomain, [&] { lift_disc(L, HoloMap(1, {s, s}), 0.0); }));
    CHECK(throws_as_kind(ErrorKind::ImageEscapesDomain,
                         [&] { lift_disc(alpha(1.0), HoloMap(1, {Expr(0.0), 0.5 * s}), 0.0); }));
}

TEST_CASE("property: lifted polynomial discs match the closed-form antiderivative")
{
    Gen g(5010);
    const auto L = standard_lift();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> p{g.complex_in_disc(0.2)}, q{g.complex_in_disc(0.2)};
        for (int k = 1; k <= 3; ++k) {
            p.push_back(g.complex_in_disc(0.15));
            q.push_back(g.complex_in_disc(0.15));
        }
        const cplx y0 = g.complex_in_disc(1.0);
        const auto d = lift_disc(L, HoloMap(1, {poly(p), poly(q)}), y0);
        const auto anti = antiderivative_of_p_dq(p, q);
        for (const cplx zeta : certificate_params())
            CHECK(std::abs(d.disc.fiber(zeta) - (y0 + eval_poly(anti, zeta))) < 1e-11);
        CHECK(d.residual < 1e-10);
        // uniqueness: a second lift computed with a different quadrature agrees
        const auto again = lift_disc(L, HoloMap(1, {poly(p), poly(q)}), y0, DiscLiftOptions{QuadOptions{1e-12}});
        for (const cplx zeta : certificate_params())
            CHECK(std::abs(again.disc.fiber(zeta) - d.disc.fiber(zeta)) < 1e-10);
    }
}

TEST_CASE("lift_chain")
{
    const auto L = standard_lift();
    const auto chain = geodesic_chain(ball, CVec{0.0, 0.0}, CVec{0.5, 0.0});
    const auto v = lift_chain(L, chain, 0.0);
    CHECK(v.t == std::vector<double>{0.5});
    CHECK((v.end - CVec{0.5, 0.0, 0.0}).max_abs() < 1e-12);
    CHECK(v.start == CVec{0.0, 0.0, 0.0});

    const auto constant_w = lift_chain(L, geodesic_chain(ball, CVec{0.1, 0.3}, CVec{-0.2, 0.3}), cplx(0.7, 0.2));
    CHECK(std::abs(constant_w.end[2] - cplx(0.7, 0.2)) < 1e-14);

    // four geodesic discs around the puncture
    for (cplx c : {cplx(1.0), I}) {
        const auto a = alpha(c);
        Chain around;
        for (int k = 0; k < 4; ++k) {
            const CVec from{0.0, std::polar(0.5, pi * k / 2.0)};
            const CVec to{0.0, std::polar(0.5, pi * (k + 1) / 2.0)};
            around.links.push_back(geodesic_chain(punctured_base, from, to).links[0]);
        }
        const auto lifted = lift_chain(a, around, 0.0);
        const cplx oracle = path_integral(a.eta, w_circle()[0], QuadOptions{1e-12}).value;
        CHECK(std::abs(oracle + 2.0 * pi * I * c) < 1e-10);
        CHECK(std::abs(lifted.end[2] - oracle) < 1e-9);
        CHECK((lifted.end.head(2) - CVec{0.0, 0.5}).max_abs() < 1e-10);
    }
}

TEST_CASE("property: lift_chain is unchanged by subdividing a disc")
{
    Gen g(5020);
    for (cplx c : {cplx(0.0), cplx(1.0), cplx(2.0, -3.0)}) {
        const auto a = alpha(c);
        const auto pts = sample(punctured_base, 10, 5021, 0.2);
        for (int i = 0; i < 3; ++i) {
            const auto chain = geodesic_chain(punctured_base, pts[static_cast<std::size_t>(2 * i)],
                                              pts[static_cast<std::size_t>(2 * i + 1)]);
            const auto& link = chain.links[0];
            const double t1 = link.t * g.uniform(0.2, 0.5);
            // psi = phi o m with m(zeta) = (zeta + t1)/(1 + t1 zeta), so psi(0) = phi(t1)
            const Expr s = Expr::var(0);
            const HoloMap m(1, {(s + t1) / (1.0 + Expr(t1) * s)});
            Chain split;
            split.links.push_back({link.disc, t1});
            split.links.push_back({link.disc.compose(m), (link.t - t1) / (1.0 - t1 * link.t)});
            const cplx y0 = g.complex_in_disc(1.0);
            const auto whole = lift_chain(a, chain, y0);
            const auto parts = lift_chain(a, split, y0);
            CHECK((whole.end - parts.end).max_abs() < 1e-10);
            CHECK(std::abs(std::atanh(split.links[0].t) + std::atanh(split.links[1].t) - std::atanh(link.t)) < 1e-12);
        }
    }
}

TEST_CASE("scale_factor")
{
    const auto tilde = make_symplectic(parse_form("d[z]^d[w] : 2/(1 - z)^3", zw), ball);
    const auto flat_siegel = make_symplectic(parse_form("d[z]^d[w] : 1", zw), Domain::siegel(2));
    const auto pts = sample(ball, 200, 5030);
    const auto cay = scale_factor(cayley(2), tilde, flat_siegel, pts);
    CHECK(std::abs(cay.lambda - 1.0) < 1e-12);
    CHECK(cay.residual < 1e-12);

    const auto spts = sample(Domain::siegel(2), 100, 5031);
    for (cplx s : {cplx(1.0), I, cplx(0.5, -0.5)}) {
        const auto r = scale_factor(siegel_parabolic(s), flat_siegel, spts);
        CHECK(r.lambda == cplx(1.0));
        CHECK(r.residual < 1e-12);
    }
    const auto bidisc = make_symplectic(parse_form("d[z]^d[w] : 1", zw), Domain::polydisc({1.0, 2.0}));
    const auto two = scale_factor(HoloMap(2, {Expr::var(0), 2.0 * Expr::var(1)}), bidisc,
                                  sample(Domain::polydisc({1.0, 1.0}), 50, 5032));
    CHECK(std::abs(two.lambda - 2.0) < 1e-15);

    const auto ball_omega = make_symplectic(parse_form("d[z]^d[w] : 1", zw), ball);
    try {
        scale_factor(HoloMap(2, {Expr::var(0) * Expr::var(0), Expr::var(1)}), ball_omega, pts);
        FAIL("expected NotScaleSymplectic");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotScaleSymplectic);
        CHECK(e.residual() > 1e-3);
    }
}

TEST_CASE("theta_class and equivalence on the twisted family")
{
    const std::vector<cplx> cs{0.0, 1.0, I, cplx(2.0, -3.0)};
    for (cplx c : cs) {
        for (cplx c2 : cs) {
            const auto th = theta_class(alpha(c), alpha(c2), w_circle());
            REQUIRE(th.values.size() == 1);
            // residue theorem: (c' - c) times the winding integral of dw/w
            CHECK(std::abs(th.values[0] - 2.0 * pi * I * (c2 - c)) < 1e-9);
            const auto eq = are_equivalent(alpha(c), alpha(c2), w_circle());
            CHECK(eq.equivalent == (c == c2));
            CHECK(eq.equivalent == (th.max_abs() < 1e-9));
            if (eq.equivalent)
                CHECK(eq.residual < 1e-9);
        }
    }
    const auto obstruction = are_equivalent(alpha(1.0), alpha(0.0), w_circle());
    CHECK_FALSE(obstruction.equivalent);
    CHECK(std::abs(obstruction.periods.values[0] + 2.0 * pi * I) < 1e-9);
    CHECK_FALSE(obstruction.shift.has_value());
}

TEST_CASE("equivalence through an exact change of potential")
{
    const auto base = make_symplectic(parse_form("d[z]^d[w] : 1", zw), punctured_base);
    const auto a0 = alpha(0.0);
    const auto shifted = make_lift(base, parse_form("d[w] : z; d[z] : w; d[w] : z", zw), DiffForm(2, 1));
    CHECK(std::abs(theta_class(a0, shifted, w_circle()).values[0]) < 1e-12);
    const auto eq = are_equivalent(a0, shifted, w_circle());
    REQUIRE(eq.equivalent);
    CHECK(eq.residual < 1e-9);
    Gen g(5040);
    for (const auto& p : sample(punctured_base, 20, 5041)) {
        const cplx y = g.complex_in_disc(1.0);
        const CVec image = eq.apply(p.appended(y));
        CHECK(std::abs(image[2] - (y + p[0] * p[1] - 0.0 * 0.5)) < 1e-10);
    }
    const auto self = are_equivalent(a0, a0, w_circle());
    CHECK(self.equivalent);
    CHECK(self.apply(CVec{0.1, 0.2, 0.3}) == CVec{0.1, 0.2, 0.3});

    const auto L = standard_lift();
    const auto L2 = make_lift(L.base, L.nu + differential(2, pow(Expr::var(0), 2) * Expr::var(1)), DiffForm(2, 1));
    CHECK(theta_class(L, L2, {}).values.empty());
    CHECK(are_equivalent(L, L2, {}).equivalent);
    CHECK(throws_as_kind(ErrorKind::BaseMismatch, [&] { theta_class(L, alpha(0.0), {}); }));
}

TEST_CASE("property: theta antisymmetry and additivity")
{
    Gen g(5050);
    for (int trial = 0; trial < 10; ++trial) {
        const cplx c1 = g.complex_in_box(3.0), c2 = g.complex_in_box(3.0), c3 = g.complex_in_box(3.0);
        const auto l1 = alpha(c1), l2 = alpha(c2), l3 = alpha(c3);
        const cplx t12 = theta_class(l1, l2, w_circle()).values[0];
        const cplx t21 = theta_class(l2, l1, w_circle()).values[0];
        const cplx t23 = theta_class(l2, l3, w_circle()).values[0];
        const cplx t13 = theta_class(l1, l3, w_circle()).values[0];
        CHECK(std::abs(t12 + t21) < 1e-9);
        CHECK(std::abs(t13 - (t12 + t23)) < 1e-9);
        // theta is the difference of monodromies against a common reference
        const DiffForm ref = parse_form("d[w] : z", zw);
        const auto loop = w_circle()[0];
        CHECK(std::abs(t12 - (monodromy(l1, ref, loop) - monodromy(l2, ref, loop))) < 1e-9);
    }
}

TEST_CASE("monodromy and fitness")
{
    const DiffForm ref = parse_form("d[w] : z", zw);
    for (cplx c : {cplx(0.0), cplx(1.0), I}) {
        CHECK(std::abs(monodromy(alpha(c), ref, w_circle()[0]) + 2.0 * pi * I * c) < 1e-9);
        const auto fit = is_fit(alpha(c), ref, w_circle());
        CHECK(fit.fit == (c == 0.0));
        CHECK(std::abs(fit.periods.values[0] + 2.0 * pi * I * c) < 1e-9);
        if (fit.fit)
            CHECK(fit.residual < 1e-9);
    }
    const auto L = standard_lift();
    const Path loop = Path::circle(CVec{0.1, 0.2}, 0, 0.1, 0.3);
    CHECK(std::abs(monodromy(L, ref, loop)) < 1e-12);
    const auto vacuous = is_fit(L, ref, {});
    CHECK(vacuous.fit);
    CHECK(vacuous.periods.values.empty());
    CHECK(throws_as_kind(ErrorKind::NotAPotential, [&] { monodromy(L, parse_form("d[z] : w", zw), loop); }));

    // a fit lift written in shifted coordinates: the section recovers them
    const auto shifted = make_lift(L.base, parse_form("d[w] : z; d[z] : 2*z", zw), DiffForm(2, 1));
    const auto fit = is_fit(shifted, ref, {});
    REQUIRE(fit.section.has_value());
    for (const auto& p : sample(ball, 10, 5060))
        CHECK(std::abs((*fit.section)(p) + p[0] * p[0]) < 1e-11);
}

TEST_CASE("property: monodromy is additive and depends on the class of the reference")
{
    Gen g(5070);
    const auto a = alpha(cplx(0.7, -0.2));
    const DiffForm ref = parse_form("d[w] : z", zw);
    for (int trial = 0; trial < 20; ++trial) {
        const Expr h = g.polynomial(2, 3);
        const DiffForm shifted = ref + differential(2, h);
        const double r1 = g.uniform(0.2, 0.8), r2 = g.uniform(0.2, 0.8);
        const CVec base_point{g.complex_in_disc(0.5), r1};
        const Path g1 = Path::circle(base_point, 1, 0.0, r1);
        const Path detour = Path::segment(base_point, base_point.with(1, r2));
        const Path g2 = detour.concat(Path::circle(base_point.with(1, r2), 1, 0.0, r2)).concat(detour.reversed());
        const cplx m1 = monodromy(a, ref, g1);
        const cplx m2 = monodromy(a, ref, g2);
        CHECK(std::abs(monodromy(a, ref, g1.concat(g2)) - (m1 + m2)) < 1e-9);
        CHECK(std::abs(monodromy(a, shifted, g1) - m1) < 1e-9);
    }
}

TEST_CASE("lift_automorphism")
{
    const auto L = standard_lift();
    const auto id = lift_automorphism(L, HoloMap::identity(2), {});
    CHECK(id.liftable);
    CHECK(std::abs(id.lambda - 1.0) < 1e-15);
    CHECK(id.apply(CVec{0.1, 0.2, 0.3}) == CVec{0.1, 0.2, 0.3});

    const double theta = 0.7;
    const cplx rot = std::polar(1.0, theta);
    const auto r = lift_automorphism(L, HoloMap(2, {Expr::var(0), Expr(rot) * Expr::var(1)}), {});
    CHECK(r.liftable);
    CHECK(std::abs(r.lambda - rot) < 1e-14);
    CHECK(r.residual < 1e-12);
    CHECK((r.apply(CVec{0.1, 0.2, 0.3}) - CVec{0.1, rot * 0.2, rot * 0.3}).max_abs() < 1e-15);

    const Expr z = Expr::var(0), w = Expr::var(1);
    const HoloMap f(2, {z * w * w, -1.0 / w});
    const auto obstructed = lift_automorphism(alpha(1.0), f, w_circle());
    CHECK_FALSE(obstructed.liftable);
    CHECK(std::abs(obstructed.lambda - 1.0) < 1e-12);
    CHECK(std::abs(obstructed.periods.values[0] - 4.0 * pi * I) < 1e-8);

    const auto free_lift = lift_automorphism(alpha(0.0), f, w_circle(), sample(punctured_base, 100, 5080, 1e-2));
    CHECK(free_lift.liftable);
    CHECK(free_lift.residual < 1e-8);

    // a nonzero exact rho: the shear (z + w, w) on the standard lift gives rho = w dw
    const auto shear = lift_automorphism(L, HoloMap(2, {z + w, w}), {});
    REQUIRE(shear.liftable);
    CHECK(shear.residual < 1e-9);
    for (const auto& p : sample(ball, 10, 5081))
        CHECK(std::abs((*shear.h)(p) - p[1] * p[1] / 2.0) < 1e-11);
}

TEST_CASE("pullback_lift")
{
    const auto polydisc = Domain::polydisc({1.0, 2.0});
    const auto target = standard_lift(Domain::polydisc({1.0, 3.0}));
    const auto pts = sample(polydisc, 50, 5090, 1e-2);

    const auto same = pullback_lift(HoloMap::identity(2), target, polydisc, pts);
    CHECK(same.lift.nu == target.nu);
    CHECK(same.lift.base.omega == target.base.omega);
    CHECK(same.morphism_residual == 0.0);

    const Expr z = Expr::var(0), w = Expr::var(1);
    const auto shear = pullback_lift(HoloMap(2, {z, w + z * z}), target, polydisc, pts);
    for (const auto& p : pts) {
        CHECK((shear.lift.base.omega.eval(p) - parse_form("d[z]^d[w] : 1", zw).eval(p)).max_abs() < 1e-14);
        CHECK((shear.lift.nu.eval(p) - parse_form("d[w] : z; d[z] : 2*z^2", zw).eval(p)).max_abs() < 1e-14);
    }
    CHECK(validate_lift(shear.lift, total_points(polydisc, 50, 5091)).pass);
    CHECK(shear.morphism_residual < 1e-14);

    try {
        pullback_lift(HoloMap(2, {z, z}), target, Domain::polydisc({1.0, 1.0}), sample(Domain::polydisc({1.0, 1.0}), 20, 5092));
        FAIL("expected DegeneratePullback");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegeneratePullback);
        CHECK(e.residual() == 0.0);
    }
}

TEST_CASE("Cech atlas validation")
{
    for (cplx c : {cplx(0.0), cplx(1.0), I}) {
        const auto atlas = punctured_sector_atlas(c);
        REQUIRE(atlas.transitions.size() == 3);
        REQUIRE(atlas.triples.size() == 1);
        CHECK(atlas.triples[0].samples.size() == 64);
        const auto r = validate_atlas(atlas);
        CHECK(r.pass);
        CHECK(r.cocycle < 1e-10);
        CHECK(r.differential < 1e-10);
    }
    // the transition between sectors 0 and 2 jumps by a multiple of 2 pi i c
    const auto atlas = punctured_sector_atlas(1.0);
    const auto& t02 = atlas.transitions[2];
    bool saw_jump = false;
    for (const auto& p : t02.samples) {
        const cplx v = t02.f.eval(p) + 2.0 * p[0] * p[1];
        CHECK((std::abs(v) < 1e-12 || std::abs(v + 2.0 * pi * I) < 1e-12));
        saw_jump = saw_jump || std::abs(v) > 1.0;
    }
    CHECK(saw_jump);

    CechAtlas single{punctured_base, {{"all", parse_form("d[w] : z", zw)}}, {}, {}};
    CHECK(validate_atlas(single).pass);

    auto broken = punctured_sector_atlas(1.0);
    broken.transitions[0].f = broken.transitions[0].f + Expr::var(0);
    const auto r = validate_atlas(broken);
    CHECK_FALSE(r.pass);
    CHECK(std::abs(r.differential - 1.0) < 1e-12);
    CHECK(r.worst_transition == 0);
}

#include "hcontact/runner.hpp"
#include "hcontact/contact.hpp"
#include "hcontact/domains.hpp"
#include "hcontact/forms.hpp"
#include "hcontact/lifts.hpp"
#include "hcontact/metrics.hpp"
#include "hcontact/parse.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <functional>
#include <random>
#include <set>

namespace hcontact {

namespace {

using Task = std::function<void(CheckResult&)>;

Json point_json(const CVec& p)
{
    Json a = Json::array();
    for (const auto& z : p)
        a.push_back(Json::array({json_number(z.real()), json_number(z.imag())}));
    return a;
}

Json complex_json(cplx z) { return Json::array({json_number(z.real()), json_number(z.imag())}); }

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

bool residuals_below(const CheckResult& r, double tol)
{
    return std::all_of(r.residuals.begin(), r.residuals.end(), [&](const auto& kv) { return kv.second < tol; });
}

[[noreturn]] void config_error(const std::string& id, const std::string& msg)
{
    throw Error(ErrorKind::InvalidArgument, "check " + id + ": " + msg);
}

// Parameter record of one check; unused keys are configuration errors.
class Params {
public:
    Params(const Json& j, std::string id) : j_(j), id_(std::move(id)) {}

    const std::string& id() const noexcept { return id_; }
    bool has(const std::string& k) const { return j_.contains(k); }

    const Json& get(const std::string& k)
    {
        if (!j_.contains(k))
            config_error(id_, "missing parameter '" + k + "'");
        used_.insert(k);
        return j_.at(k);
    }

    std::string str(const std::string& k, const std::string& def)
    {
        if (!has(k))
            return def;
        const auto& v = get(k);
        if (!v.is_string())
            config_error(id_, "parameter '" + k + "' must be a string");
        return v.get<std::string>();
    }

    double real(const std::string& k, double def)
    {
        if (!has(k))
            return def;
        const auto& v = get(k);
        if (!v.is_number())
            config_error(id_, "parameter '" + k + "' must be a number");
        return v.get<double>();
    }

    int integer(const std::string& k, int def)
    {
        if (!has(k))
            return def;
        const auto& v = get(k);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            config_error(id_, "parameter '" + k + "' must be a non-negative integer");
        return v.get<int>();
    }

    void finish() const
    {
        for (const auto& [k, v] : j_.items())
            if (!used_.count(k))
                config_error(id_, "unknown parameter '" + k + "'");
    }

private:
    const Json& j_;
    std::string id_;
    std::set<std::string> used_;
};

class Context {
public:
    Context(const Scenario& s, const RunOptions& o)
        : s_(s),
          tol(o.tolerance.value_or(s.samples.tolerance)),
          seed(o.seed.value_or(s.samples.seed)),
          count(o.samples.value_or(s.samples.count)),
          margin(s.samples.margin)
    {
        if (count < 1 || !(tol > 0.0))
            throw Error(ErrorKind::InvalidArgument, "sample count and tolerance must be positive");
        std::map<std::string, std::string> pending = s.constants;
        while (!pending.empty()) {
            bool progress = false;
            for (auto it = pending.begin(); it != pending.end();) {
                try {
                    constants_[it->first] =
                        parse_expr(it->second, Symbols{{}, constants_}).eval(std::span<const cplx>{});
                    it = pending.erase(it);
                    progress = true;
                } catch (const ParseError&) {
                    ++it;
                }
            }
            if (!progress)
                throw Error(ErrorKind::UnknownName, "unresolved constant '" + pending.begin()->first + "'");
        }
    }

    const Scenario& scenario() const noexcept { return s_; }
    int base_dim() const noexcept { return static_cast<int>(s_.variables.size()); }

    Symbols symbols(bool total) const
    {
        Symbols sym{s_.variables, constants_};
        if (total)
            sym.variables.push_back(s_.fiber);
        return sym;
    }

    cplx number(const Json& j, const std::string& id) const
    {
        if (j.is_number())
            return j.get<double>();
        if (j.is_string())
            return parse_expr(j.get<std::string>(), Symbols{{}, constants_}).eval(std::span<const cplx>{});
        if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
            return {j[0].get<double>(), j[1].get<double>()};
        config_error(id, "expected a complex number, got " + j.dump());
    }

    CVec point(const Json& j, const std::string& id, int dim) const
    {
        if (!j.is_array())
            config_error(id, "expected a point, got " + j.dump());
        std::vector<cplx> v;
        for (const auto& e : j)
            v.push_back(number(e, id));
        if (dim >= 0 && static_cast<int>(v.size()) != dim)
            throw Error(ErrorKind::ArityMismatch, "check " + id + ": point " + j.dump() + " needs " +
                                                      std::to_string(dim) + " coordinates");
        return CVec(std::move(v));
    }

    Domain build(const DomainSpec& d) const
    {
        if (d.kind == "disc")
            return Domain::disc(d.radius);
        if (d.kind == "punctured_disc")
            return Domain::punctured_disc(d.radius);
        if (d.kind == "ball")
            return Domain::ball(d.dim > 0 ? d.dim : 2, d.radius);
        if (d.kind == "polydisc")
            return Domain::polydisc(d.radii.empty() ? std::vector<double>(static_cast<std::size_t>(d.dim > 0 ? d.dim : 2), 1.0)
                                                    : d.radii);
        if (d.kind == "half_plane")
            return Domain::half_plane();
        if (d.kind == "siegel")
            return Domain::siegel(d.dim > 0 ? d.dim : 2);
        if (d.kind == "box") {
            std::vector<cplx> c;
            for (const auto& e : d.center)
                c.push_back(parse_expr(e, Symbols{{}, constants_}).eval(std::span<const cplx>{}));
            return Domain::box(CVec(std::move(c)), d.radii);
        }
        std::vector<Domain> f;
        for (const auto& x : d.factors)
            f.push_back(build(x));
        return Domain::product(std::move(f));
    }

    Domain domain(const std::string& name) const
    {
        if (name == "main")
            return build(s_.domain);
        const auto it = s_.domains.find(name);
        if (it == s_.domains.end())
            throw Error(ErrorKind::UnknownName, "unknown domain '" + name + "'");
        return build(it->second);
    }

    /// A name in [forms] or inline form text.
    DiffForm form(const std::string& ref, bool total, int zero_degree) const
    {
        const auto it = s_.forms.find(ref);
        if (it == s_.forms.end())
            return parse_form(ref, symbols(total), zero_degree);
        const FormSpec& f = it->second;
        const int deg = f.degree >= 0 ? f.degree : zero_degree;
        DiffForm out = parse_form(f.text(), symbols(f.space == "total"), deg);
        if (total && f.space == "base")
            out = out.extended(base_dim() + 1);
        if (!total && f.space == "total")
            throw Error(ErrorKind::ArityMismatch, "form '" + ref + "' lives on the total space");
        return out;
    }

    HoloMap map(const std::string& name) const
    {
        const auto it = s_.maps.find(name);
        if (it == s_.maps.end())
            throw Error(ErrorKind::UnknownName, "unknown map '" + name + "'");
        const MapSpec& m = it->second;
        if (!m.compose.empty()) {
            HoloMap out = map(m.compose.back());
            for (auto c = m.compose.rbegin() + 1; c != m.compose.rend(); ++c)
                out = map(*c).compose(out);
            return out;
        }
        std::vector<Expr> comps;
        const Symbols sym{m.vars, constants_};
        for (const auto& c : m.components)
            comps.push_back(parse_expr(c, sym));
        return HoloMap(static_cast<int>(m.vars.size()), std::move(comps));
    }

    /// Variable names of a map's source (the first map of a composition).
    std::vector<std::string> map_vars(const std::string& name) const
    {
        const MapSpec& m = s_.maps.at(name);
        return m.compose.empty() ? m.vars : map_vars(m.compose.back());
    }

    LiftSpec lift_spec(const Json& j, const std::string& id) const
    {
        if (j.is_string()) {
            const auto it = s_.lifts.find(j.get<std::string>());
            if (it == s_.lifts.end())
                throw Error(ErrorKind::UnknownName, "unknown lift '" + j.get<std::string>() + "'");
            return it->second;
        }
        if (!j.is_object())
            config_error(id, "a lift is a name or { base, omega, nu, twist }");
        LiftSpec l;
        for (const auto& [k, v] : j.items()) {
            if (!v.is_string() || (k != "base" && k != "omega" && k != "nu" && k != "twist"))
                config_error(id, "bad lift field '" + k + "'");
            (k == "base" ? l.base : k == "omega" ? l.omega : k == "nu" ? l.nu : l.twist) = v.get<std::string>();
        }
        if (l.omega.empty() || l.nu.empty())
            config_error(id, "inline lift needs omega and nu");
        if (l.twist.empty())
            l.twist = "0";
        // Resolve everything now so that malformed forms are configuration errors.
        domain(l.base);
        form(l.omega, false, 2);
        form(l.nu, false, 1);
        form(l.twist, false, 1);
        return l;
    }

    /// Raises the lift construction errors (PotentialMismatch, ...) at run time.
    Lift build_lift(const LiftSpec& l) const
    {
        const Domain d = domain(l.base);
        const SymplecticData base = make_symplectic(form(l.omega, false, 2), d);
        return make_lift(base, form(l.nu, false, 1), form(l.twist, false, 1), samples(d, count, seed),
                         std::max(tol, 1e-10));
    }

    Path loop(const LoopSpec& l) const
    {
        const auto c = std::find(s_.variables.begin(), s_.variables.end(), l.coordinate);
        if (c == s_.variables.end())
            throw Error(ErrorKind::UnknownName, "unknown loop coordinate '" + l.coordinate + "'");
        const cplx center = parse_expr(l.center, Symbols{{}, constants_}).eval(std::span<const cplx>{});
        return circle_loop(domain(l.base), static_cast<int>(c - s_.variables.begin()), l.radius, center);
    }

    Path loop(const Json& j, const std::string& id) const
    {
        if (j.is_string()) {
            const auto it = s_.loops.find(j.get<std::string>());
            if (it == s_.loops.end())
                throw Error(ErrorKind::UnknownName, "unknown loop '" + j.get<std::string>() + "'");
            return loop(it->second);
        }
        if (!j.is_object())
            config_error(id, "a loop is a name or { kind, coordinate, radius, center }");
        LoopSpec l;
        for (const auto& [k, v] : j.items()) {
            if (k == "kind" && v.is_string())
                l.kind = v.get<std::string>();
            else if (k == "coordinate" && v.is_string())
                l.coordinate = v.get<std::string>();
            else if (k == "radius" && v.is_number())
                l.radius = v.get<double>();
            else if (k == "center")
                l.center = v.is_string() ? v.get<std::string>() : v.dump();
            else if (k == "base" && v.is_string())
                l.base = v.get<std::string>();
            else
                config_error(id, "bad loop field '" + k + "'");
        }
        if (l.kind != "circle")
            config_error(id, "unsupported loop kind '" + l.kind + "'");
        return loop(l);
    }

    std::vector<Path> loops(const Json& j, const std::string& id) const
    {
        std::vector<Path> out;
        if (j.is_array())
            for (const auto& e : j)
                out.push_back(loop(e, id));
        else
            out.push_back(loop(j, id));
        return out;
    }

    std::vector<CVec> samples(const Domain& d, int n, std::uint64_t sd) const
    {
        return sample(d, n, sd, margin);
    }

    const Scenario& s_;
    double tol;
    std::uint64_t seed;
    int count;
    double margin;

private:
    std::map<std::string, cplx> constants_;
};

// Shorthands for the common parameters.
struct Common {
    double tol;
    int count;
};

Common common(Context& cx, Params& p) { return {p.real("tol", cx.tol), p.integer("samples", cx.count)}; }

void require_curve(const HoloMap& phi, int dim, const std::string& id)
{
    if (phi.arity() != 1 || phi.dim() != dim)
        throw Error(ErrorKind::ArityMismatch, "check " + id + ": expected a map of one variable into C^" +
                                                  std::to_string(dim));
}

// Lift given by "lift", or a total-space contact form "form" over "domain".
struct ContactSource {
    std::optional<LiftSpec> lift;
    DiffForm xi{1, 1};
    Domain base;

    std::pair<ContactData, std::vector<CVec>> build(const Context& cx, int count) const
    {
        if (lift) {
            Lift l = cx.build_lift(*lift);
            auto pts = total_space_samples(cx.samples(l.base.domain, count, cx.seed));
            return {l.contact, pts};
        }
        if (xi.dim() == base.dim() + 1) {
            const auto pts = total_space_samples(cx.samples(base, count, cx.seed));
            return {make_contact(xi, Domain::product({base, Domain::disc(1.0)})), pts};
        }
        return {make_contact(xi, base), cx.samples(base, count, cx.seed)};
    }
};

ContactSource contact_source(Context& cx, Params& p)
{
    ContactSource src;
    if (p.has("lift")) {
        src.lift = cx.lift_spec(p.get("lift"), p.id());
        return src;
    }
    src.base = cx.domain(p.str("domain", "main"));
    src.xi = cx.form(p.str("form", "xi"), true, 1);
    return src;
}

bool expects(const CheckSpec& c, const char* flag) { return c.expect.contains(flag); }

// ---------------------------------------------------------------------------
// operations

Task op_symplectic_check(Context& cx, Params& p, const CheckSpec&)
{
    const auto [tol, count] = common(cx, p);
    const Domain d = cx.domain(p.str("domain", "main"));
    const DiffForm omega = cx.form(p.str("form", "omega"), false, 2);
    return [&cx, tol, count, d, omega](CheckResult& r) {
        const auto rep = symplectic_check(make_symplectic(omega, d), cx.samples(d, count, cx.seed), tol);
        r.residuals = {{"dclosed", rep.max_dclosed}};
        r.values = {{"min_top", {rep.min_top}}};
        r.certificates["worst_point"] = point_json(rep.worst_point);
        r.certificates["sample_failures"] = rep.failures.size();
        r.pass = rep.pass;
    };
}

Task op_contact_check(Context& cx, Params& p, const CheckSpec&)
{
    const auto [tol, count] = common(cx, p);
    const ContactSource src = contact_source(cx, p);
    return [&cx, tol, count, src](CheckResult& r) {
        const auto [data, pts] = src.build(cx, count);
        const auto rep = contact_check(data, pts, tol);
        r.values = {{"min_volume", {rep.min_volume}}};
        r.certificates["worst_point"] = point_json(rep.worst_point);
        r.certificates["sample_failures"] = rep.failures.size();
        if (!rep.failures.empty())
            r.message = rep.failures.front().message;
        r.pass = rep.pass;
    };
}

Task op_reeb(Context& cx, Params& p, const CheckSpec& c)
{
    const auto [tol, count] = common(cx, p);
    const ContactSource src = contact_source(cx, p);
    std::optional<CVec> at;
    if (p.has("point"))
        at = cx.point(p.get("point"), c.id, -1);
    return [&cx, tol, count, src, at](CheckResult& r) {
        auto [data, pts] = src.build(cx, count);
        if (at)
            pts = {*at};
        double norm = 0.0;
        double horiz = 0.0;
        double vertical = 0.0;
        CVec first;
        for (const auto& q : pts) {
            const auto rr = reeb_solve(data, q);
            if (first.empty())
                first = rr.v;
            norm = std::max(norm, rr.normalization);
            horiz = std::max(horiz, rr.horizontal);
            if (src.lift) {
                CVec dy(rr.v.size());
                dy = dy.with(rr.v.size() - 1, 1.0);
                vertical = std::max(vertical, (rr.v - dy).max_abs());
            }
        }
        r.residuals = {{"normalization", norm}, {"horizontal", horiz}};
        if (src.lift)
            r.residuals.emplace_back("vertical", vertical);
        r.values = {{"reeb", first.values()}};
        r.pass = residuals_below(r, tol);
    };
}

Task op_legendrian_residual(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const ContactSource src = contact_source(cx, p);
    const HoloMap phi = cx.map(p.str("map", ""));
    require_curve(phi, src.lift ? cx.base_dim() + 1 : src.xi.dim(), c.id);
    return [&cx, tol, src, phi](CheckResult& r) {
        const DiffForm xi = src.lift ? cx.build_lift(*src.lift).contact.xi : src.xi;
        const auto params = certificate_params();
        r.residuals = {{"legendrian", legendrian_residual(xi, phi, params)}};
        r.pass = residuals_below(r, tol);
    };
}

Task op_validate_lift(Context& cx, Params& p, const CheckSpec& c)
{
    const auto [tol, count] = common(cx, p);
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    return [&cx, tol, count, spec](CheckResult& r) {
        const Lift lift = cx.build_lift(spec);
        const auto pts = total_space_samples(cx.samples(lift.base.domain, count, cx.seed));
        const auto rep = validate_lift(lift, pts, tol);
        r.residuals = {{"curvature", rep.curvature},
                       {"reeb_normalization", rep.reeb_normalization},
                       {"reeb_horizontal", rep.reeb_horizontal}};
        r.values = {{"min_volume", {rep.contact.min_volume}}};
        r.certificates["samples"] = pts.size();
        r.certificates["sample_failures"] = rep.failures.size() + rep.contact.failures.size();
        r.pass = rep.pass;
    };
}

Task op_make_lift(Context& cx, Params& p, const CheckSpec& c)
{
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    return [&cx, spec](CheckResult& r) {
        const Lift lift = cx.build_lift(spec);
        r.certificates["total_dim"] = lift.total_dim();
        r.pass = true;
    };
}

Task op_lift_disc(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const std::string map_name = p.str("map", "");
    const HoloMap phi = cx.map(map_name);
    require_curve(phi, cx.base_dim(), c.id);
    const cplx y0 = p.has("y0") ? cx.number(p.get("y0"), c.id) : cplx(0.0);
    std::optional<Expr> oracle;
    if (p.has("oracle"))
        oracle = parse_expr(p.str("oracle", ""), Symbols{cx.map_vars(map_name), {}});
    std::vector<cplx> at{0.5};
    if (p.has("at"))
        at = cx.point(p.get("at"), c.id, -1).values();
    return [&cx, tol, spec, phi, y0, oracle, at](CheckResult& r) {
        const Lift lift = cx.build_lift(spec);
        DiscLiftOptions opts;
        opts.tol = std::max(tol, 1e-12);
        const DiscLift dl = lift_disc(lift, phi, y0, opts);
        r.residuals = {{"legendrian", dl.residual}};
        if (oracle) {
            double err = 0.0;
            for (const cplx z : certificate_params())
                err = std::max(err, std::abs(dl.disc.fiber(z) - oracle->eval(std::span<const cplx>(&z, 1))));
            r.residuals.emplace_back("oracle", err);
        }
        std::vector<cplx> fib;
        for (const cplx z : at)
            fib.push_back(dl.disc.fiber(z));
        r.values = {{"fiber", fib}};
        r.pass = residuals_below(r, tol);
    };
}

Task op_lift_chain(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const CVec from = cx.point(p.get("from"), c.id, cx.base_dim());
    const CVec to = cx.point(p.get("to"), c.id, cx.base_dim());
    const cplx y0 = p.has("y0") ? cx.number(p.get("y0"), c.id) : cplx(0.0);
    return [&cx, tol, spec, from, to, y0](CheckResult& r) {
        const Lift lift = cx.build_lift(spec);
        const Chain chain = geodesic_chain(lift.base.domain, from, to);
        DiscLiftOptions opts;
        opts.tol = std::max(tol, 1e-12);
        const VChain vc = lift_chain(lift, chain, y0, opts);
        r.residuals = {{"legendrian", vc.residual}, {"endpoint", (vc.end.head(to.size()) - to).max_abs()}};
        r.values = {{"length", {chain_length(vc)}}, {"end", vc.end.values()}};
        Json t = Json::array();
        for (double x : vc.t)
            t.push_back(x);
        r.certificates["t"] = t;
        r.pass = residuals_below(r, tol);
    };
}

Task op_scale_factor(Context& cx, Params& p, const CheckSpec&)
{
    const auto [tol, count] = common(cx, p);
    const HoloMap f = cx.map(p.str("map", ""));
    const std::string source = p.str("source", "omega");
    const DiffForm src = cx.form(source, false, 2);
    const DiffForm tgt = cx.form(p.str("target", source), false, 2);
    const Domain d = cx.domain(p.str("domain", "main"));
    return [&cx, tol, count, f, src, tgt, d](CheckResult& r) {
        const auto res =
            scale_factor(f, make_symplectic(src, d), make_symplectic(tgt, d), cx.samples(d, count, cx.seed), tol);
        r.residuals = {{"scale", res.residual}};
        r.values = {{"lambda", {res.lambda}}};
        r.certificates["fit_point"] = point_json(res.fit_point);
        r.pass = residuals_below(r, tol);
    };
}

Task op_pullback_equals(Context& cx, Params& p, const CheckSpec&)
{
    const auto [tol, count] = common(cx, p);
    const HoloMap f = cx.map(p.str("map", ""));
    const DiffForm target = cx.form(p.str("target", ""), false, 0);
    const DiffForm expected = cx.form(p.str("expected", ""), false, 0);
    const Domain d = cx.domain(p.str("domain", "main"));
    if (f.dim() != target.dim() || f.arity() != expected.dim() || target.degree() != expected.degree())
        throw Error(ErrorKind::ArityMismatch, "pullback_equals: map and forms do not fit");
    return [&cx, tol, count, f, target, expected, d](CheckResult& r) {
        double rel = 0.0;
        const auto pts = cx.samples(d, count, cx.seed);
        cplx first = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const FormValue got = pullback(f, target, pts[i]);
            const FormValue want = expected.eval(pts[i]);
            const double scale = want.max_abs();
            rel = std::max(rel, (got - want).max_abs() / (scale > 0.0 ? scale : 1.0));
            if (i == 0 && !got.terms().empty())
                first = got.terms().begin()->second;
        }
        r.residuals = {{"relative", rel}};
        r.values = {{"pulled_coefficient", {first}}};
        r.certificates["samples"] = pts.size();
        r.pass = residuals_below(r, tol);
    };
}

Task op_theta_class(Context& cx, Params& p, const CheckSpec& c)
{
    const LiftSpec l1 = cx.lift_spec(p.get("lift1"), c.id);
    const LiftSpec l2 = cx.lift_spec(p.get("lift2"), c.id);
    const std::vector<Path> loops = cx.loops(p.get("loops"), c.id);
    const double tol = p.real("tol", cx.tol);
    return [&cx, l1, l2, loops, tol](CheckResult& r) {
        const PeriodVector pv = theta_class(cx.build_lift(l1), cx.build_lift(l2), loops, {}, tol);
        r.values = {{"periods", pv.values}};
        r.pass = true;
    };
}

Task op_are_equivalent(Context& cx, Params& p, const CheckSpec& c)
{
    const LiftSpec l1 = cx.lift_spec(p.get("lift1"), c.id);
    const LiftSpec l2 = cx.lift_spec(p.get("lift2"), c.id);
    const std::vector<Path> loops = cx.loops(p.get("loops"), c.id);
    const double tol = p.real("tol", cx.tol);
    const bool stated = expects(c, "equivalent");
    return [&cx, l1, l2, loops, tol, stated](CheckResult& r) {
        const Equivalence e = are_equivalent(cx.build_lift(l1), cx.build_lift(l2), loops, {}, tol);
        r.values = {{"periods", e.periods.values}};
        if (e.equivalent)
            r.residuals = {{"pullback", e.residual}};
        r.certificates["equivalent"] = e.equivalent;
        r.pass = residuals_below(r, tol) && (stated || e.equivalent);
    };
}

Task op_monodromy(Context& cx, Params& p, const CheckSpec& c)
{
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const DiffForm potential = cx.form(p.str("potential", ""), false, 1);
    const Path loop = cx.loop(p.get("loop"), c.id);
    const double tol = p.real("tol", cx.tol);
    return [&cx, spec, potential, loop, tol](CheckResult& r) {
        r.values = {{"monodromy", {monodromy(cx.build_lift(spec), potential, loop, {}, tol)}}};
        r.pass = true;
    };
}

Task op_is_fit(Context& cx, Params& p, const CheckSpec& c)
{
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const DiffForm potential = cx.form(p.str("potential", ""), false, 1);
    const std::vector<Path> loops = cx.loops(p.get("loops"), c.id);
    const double tol = p.real("tol", cx.tol);
    const bool stated = expects(c, "fit");
    return [&cx, spec, potential, loops, tol, stated](CheckResult& r) {
        const FitResult f = is_fit(cx.build_lift(spec), potential, loops, {}, tol);
        r.values = {{"periods", f.periods.values}};
        if (f.fit)
            r.residuals = {{"section", f.residual}};
        r.certificates["fit"] = f.fit;
        r.pass = residuals_below(r, tol) && (stated || f.fit);
    };
}

Task op_lift_automorphism(Context& cx, Params& p, const CheckSpec& c)
{
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const HoloMap f = cx.map(p.str("map", ""));
    const std::vector<Path> loops = cx.loops(p.get("loops"), c.id);
    const double tol = p.real("tol", std::max(cx.tol, 1e-8));
    const bool stated = expects(c, "liftable");
    return [&cx, spec, f, loops, tol, stated](CheckResult& r) {
        const AutomorphismLift a = lift_automorphism(cx.build_lift(spec), f, loops, {}, tol);
        r.values = {{"lambda", {a.lambda}}, {"periods", a.periods.values}};
        r.residuals = {{"scale", a.scale_residual}};
        if (a.liftable)
            r.residuals.emplace_back("lift", a.residual);
        r.certificates["liftable"] = a.liftable;
        r.pass = residuals_below(r, tol) && (stated || a.liftable);
    };
}

Task op_pullback_lift(Context& cx, Params& p, const CheckSpec& c)
{
    const auto [tol, count] = common(cx, p);
    const HoloMap phi = cx.map(p.str("map", ""));
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const Domain d = cx.domain(p.str("domain", "main"));
    return [&cx, tol, count, phi, spec, d](CheckResult& r) {
        const PulledLift pl = pullback_lift(phi, cx.build_lift(spec), d, cx.samples(d, count, cx.seed), tol);
        r.residuals = {{"morphism", pl.morphism_residual}};
        r.values = {{"min_top", {pl.min_top}}};
        r.pass = residuals_below(r, tol);
    };
}

Task op_validate_atlas(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const std::string name = p.str("atlas", "");
    const auto it = cx.scenario().atlases.find(name);
    if (it == cx.scenario().atlases.end())
        throw Error(ErrorKind::UnknownName, "check " + c.id + ": unknown atlas '" + name + "'");
    const AtlasSpec a = it->second;
    const cplx cc = cx.number(Json(a.c), c.id);
    std::optional<Expr> defect;
    if (!a.defect.empty())
        defect = parse_expr(a.defect, cx.symbols(false));
    return [&cx, tol, a, cc, defect](CheckResult& r) {
        CechAtlas atlas = punctured_sector_atlas(cc, a.samples, cx.seed);
        if (defect)
            atlas.transitions.front().f = atlas.transitions.front().f + *defect;
        const AtlasReport rep = validate_atlas(atlas, tol);
        r.residuals = {{"cocycle", rep.cocycle}, {"differential", rep.differential}};
        r.certificates["charts"] = atlas.charts.size();
        r.certificates["worst_transition"] = rep.worst_transition;
        r.certificates["sample_failures"] = rep.failures.size();
        r.pass = rep.pass;
    };
}

// Seeded horizontal test data over a lift: total points and directions in V.
struct HorizontalSample {
    CVec point;
    CVec direction;
};

std::vector<HorizontalSample> horizontal_samples(const Lift& lift, int n, std::uint64_t seed, const Context& cx)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto base = cx.samples(lift.base.domain, n, seed);
    std::vector<HorizontalSample> out;
    for (const auto& b : base) {
        std::vector<cplx> ub(b.size());
        for (auto& x : ub)
            x = {u(rng), u(rng)};
        const CVec dir(ub);
        const cplx fiber = lift.eta.eval(b).apply(std::vector<CVec>{dir});
        out.push_back({b.appended(cplx(0.5 * u(rng), 0.5 * u(rng))), dir.appended(fiber)});
    }
    return out;
}

Task op_kappa_V(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const int n = p.integer("random", 0);
    std::optional<HorizontalSample> given;
    if (n == 0)
        given = HorizontalSample{cx.point(p.get("point"), c.id, cx.base_dim() + 1),
                                 cx.point(p.get("direction"), c.id, cx.base_dim() + 1)};
    return [&cx, tol, spec, n, given](CheckResult& r) {
        const Lift lift = cx.build_lift(spec);
        const auto pts = given ? std::vector<HorizontalSample>{*given} : horizontal_samples(lift, n, cx.seed, cx);
        double model = 0.0;
        double legendrian = 0.0;
        double prop = 0.0;
        std::vector<cplx> values;
        for (const auto& h : pts) {
            const MetricCertificate m = kappa_V(lift, h.point, h.direction, tol);
            const std::size_t nb = h.point.size() - 1;
            const double k = model_kappa(lift.base.domain, h.point.head(nb), h.direction.head(nb));
            model = std::max(model, std::abs(m.value - k));
            legendrian = std::max(legendrian, m.legendrian);
            prop = std::max(prop, m.proportionality);
            values.push_back(m.value);
            if (values.size() == 1)
                r.certificates["lambda"] = complex_json(m.lambda);
        }
        r.residuals = {{"model", model}, {"legendrian", legendrian}, {"proportionality", prop}};
        r.values = {{"kappa", values}};
        r.certificates["samples"] = pts.size();
        r.pass = residuals_below(r, tol);
    };
}

Json bounds_json(const DistBounds& b)
{
    Json summary = Json::object();
    if (b.chain) {
        summary["discs"] = b.chain->discs.size();
        summary["legendrian"] = json_number(b.chain->residual);
        summary["length"] = json_number(chain_length(*b.chain));
    }
    return {{"lower", json_number(b.lower)},
            {"upper", json_number(b.upper)},
            {"gap", json_number(b.gap)},
            {"certificate_summary", summary}};
}

Task op_dist_bounds(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const int n = p.integer("pairs", 0);
    std::optional<std::pair<CVec, CVec>> given;
    if (n == 0)
        given = std::pair{cx.point(p.get("from"), c.id, cx.base_dim() + 1),
                          cx.point(p.get("to"), c.id, cx.base_dim() + 1)};
    return [&cx, tol, spec, n, given](CheckResult& r) {
        const Lift lift = cx.build_lift(spec);
        std::vector<std::pair<CVec, CVec>> pairs;
        if (given) {
            pairs.push_back(*given);
        } else {
            // q' is placed on the fiber reached by the lifted geodesic chain.
            const auto a = cx.samples(lift.base.domain, n, cx.seed);
            const auto b = cx.samples(lift.base.domain, n, cx.seed + 1);
            for (int i = 0; i < n; ++i) {
                const CVec pp = a[static_cast<std::size_t>(i)].appended(cplx(0.1 * (i % 5), 0.05 * (i % 3)));
                const Chain ch = geodesic_chain(lift.base.domain, a[static_cast<std::size_t>(i)],
                                                b[static_cast<std::size_t>(i)]);
                pairs.emplace_back(pp, lift_chain(lift, ch, pp[pp.size() - 1]).end);
            }
        }
        double sandwich = 0.0;
        double gap = 0.0;
        std::vector<cplx> lower;
        std::vector<cplx> upper;
        for (const auto& [a, b] : pairs) {
            const DistBounds db = dist_bounds(lift, a, b, tol);
            sandwich = std::max(sandwich, db.upper - db.lower);
            gap = std::max(gap, db.gap);
            lower.push_back(db.lower);
            upper.push_back(db.finite() ? cplx(db.upper) : cplx(std::numeric_limits<double>::infinity()));
            if (lower.size() == 1)
                r.certificates["first"] = bounds_json(db);
        }
        r.residuals = {{"sandwich", sandwich}, {"gap", gap}};
        r.values = {{"lower", lower}, {"upper", upper}};
        r.certificates["pairs"] = pairs.size();
        r.pass = residuals_below(r, tol);
    };
}

Task op_dist_to_fiber(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const LiftSpec spec = cx.lift_spec(p.get("lift"), c.id);
    const int n = p.integer("random", 0);
    std::optional<std::pair<CVec, CVec>> given;
    if (n == 0)
        given = std::pair{cx.point(p.get("point"), c.id, cx.base_dim() + 1),
                          cx.point(p.get("target"), c.id, cx.base_dim())};
    return [&cx, tol, spec, n, given](CheckResult& r) {
        const Lift lift = cx.build_lift(spec);
        const Domain& d = lift.base.domain;
        std::vector<std::pair<CVec, CVec>> pairs;
        if (given) {
            pairs.push_back(*given);
        } else {
            const auto a = cx.samples(d, n, cx.seed);
            const auto b = cx.samples(d, n, cx.seed + 1);
            for (int i = 0; i < n; ++i)
                pairs.emplace_back(a[static_cast<std::size_t>(i)].appended(cplx(0.25, -0.1)),
                                   b[static_cast<std::size_t>(i)]);
        }
        double model = 0.0;
        double endpoint = 0.0;
        double legendrian = 0.0;
        std::vector<cplx> values;
        for (const auto& [pp, q] : pairs) {
            const FiberDistance fd = dist_to_fiber(lift, pp, q);
            model = std::max(model, std::abs(fd.value - model_dist(d, pp.head(q.size()), q)));
            if (!fd.chain.discs.empty()) {
                endpoint = std::max(endpoint, (fd.chain.end.head(q.size()) - q).max_abs());
                legendrian = std::max(legendrian, fd.chain.residual);
                model = std::max(model, std::abs(chain_length(fd.chain) - fd.value));
            }
            values.push_back(fd.value);
        }
        r.residuals = {{"model", model}, {"endpoint", endpoint}, {"legendrian", legendrian}};
        r.values = {{"distance", values}};
        r.pass = residuals_below(r, tol);
    };
}

Task op_local_connect(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const double radius = p.real("r", 1.0);
    std::vector<CVec> pts;
    if (p.has("points")) {
        for (const auto& e : p.get("points"))
            pts.push_back(cx.point(e, c.id, 3));
    } else {
        const CVec start = cx.point(p.get("start"), c.id, 3);
        const int halvings = p.integer("halvings", 0);
        for (int k = 0; k <= halvings; ++k)
            pts.push_back(std::ldexp(1.0, -k) * start);
    }
    return [tol, radius, pts](CheckResult& r) {
        double endpoints = 0.0;
        double legendrian = 0.0;
        std::vector<cplx> lengths;
        for (const auto& q : pts) {
            const Path path = local_connect(radius, q);
            if (path.empty()) {
                endpoints = std::max(endpoints, q.max_abs());
                lengths.push_back(0.0);
                continue;
            }
            endpoints = std::max(endpoints, (path.start() - q).max_abs() + path.end().max_abs());
            for (std::size_t s = 0; s < path.size(); ++s)
                for (double t : tangency_nodes()) {
                    const CVec g = path.point(s, t);
                    const CVec v = path.velocity(s, t);
                    legendrian = std::max(legendrian, std::abs(v[2] - g[0] * v[1]));
                }
            lengths.push_back(box_length(radius, path).value);
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < lengths.size(); ++i)
            decreasing = decreasing && lengths[i].real() < lengths[i - 1].real();
        r.residuals = {{"endpoints", endpoints}, {"legendrian", legendrian}};
        r.values = {{"lengths", lengths}};
        r.certificates["decreasing"] = decreasing;
        r.pass = residuals_below(r, tol);
    };
}

Task op_kappa_upper_box(Context& cx, Params& p, const CheckSpec& c)
{
    const double tol = p.real("tol", cx.tol);
    const double radius = p.real("r", 1.0);
    const CVec pt = cx.point(p.get("point"), c.id, 3);
    const CVec dir = cx.point(p.get("direction"), c.id, 3);
    return [tol, radius, pt, dir](CheckResult& r) {
        const BoxBound b = kappa_upper_box(radius, pt, dir, tol);
        r.values = {{"bound", {b.value}}};
        r.certificates["rho"] = json_number(b.rho);
        r.certificates["base_slack"] = json_number(b.base_slack);
        r.certificates["fiber_rho"] = json_number(b.fiber_rho);
        r.pass = true;
    };
}

Task op_chain_length(Context&, Params& p, const CheckSpec& c)
{
    const Json& tj = p.get("t");
    std::vector<double> t;
    for (const auto& e : tj) {
        if (!e.is_number())
            config_error(c.id, "chain parameters must be numbers");
        t.push_back(e.get<double>());
    }
    return [t](CheckResult& r) {
        r.values = {{"length", {chain_length(t)}}};
        r.pass = true;
    };
}

Task op_model_dist(Context& cx, Params& p, const CheckSpec& c)
{
    const Domain d = cx.domain(p.str("domain", "main"));
    const CVec a = cx.point(p.get("from"), c.id, d.dim());
    const CVec b = cx.point(p.get("to"), c.id, d.dim());
    return [d, a, b](CheckResult& r) {
        const double v = d.kind() == Domain::Kind::Siegel ? siegel_dist(d.dim(), a, b) : model_dist(d, a, b);
        r.values = {{"distance", {v}}};
        r.pass = true;
    };
}

Task op_bracket(Context& cx, Params& p, const CheckSpec& c)
{
    const int n = std::max(1, p.integer("N", 1));
    const int i = p.integer("i", 0);
    const int j = p.integer("j", 1);
    if (i >= 2 * n || j >= 2 * n)
        throw Error(ErrorKind::ArityMismatch, "check " + c.id + ": field index out of range");
    const CVec pt = cx.point(p.get("point"), c.id, 2 * n + 1);
    const double s = p.real("s", 1e-2);
    const bool stated = expects(c, "transverse");
    return [n, i, j, pt, s, stated](CheckResult& r) {
        const auto fields = standard_horizontal_fields(n);
        const CVec b = bracket_surrogate(fields[static_cast<std::size_t>(i)], fields[static_cast<std::size_t>(j)], pt, s);
        const cplx xi_b = standard_contact(n).xi.eval(pt).apply(std::vector<CVec>{b});
        const bool transverse = std::abs(xi_b) > 0.5;
        r.values = {{"bracket", b.values()}, {"xi_of_bracket", {xi_b}}};
        r.certificates["transverse"] = transverse;
        r.pass = stated || transverse;
    };
}

using Binder = Task (*)(Context&, Params&, const CheckSpec&);

const std::map<std::string, Binder>& binders()
{
    static const std::map<std::string, Binder> b{
        {"symplectic_check", op_symplectic_check},
        {"contact_check", op_contact_check},
        {"reeb", op_reeb},
        {"legendrian_residual", op_legendrian_residual},
        {"validate_lift", op_validate_lift},
        {"make_lift", op_make_lift},
        {"lift_disc", op_lift_disc},
        {"lift_chain", op_lift_chain},
        {"scale_factor", op_scale_factor},
        {"pullback_equals", op_pullback_equals},
        {"theta_class", op_theta_class},
        {"are_equivalent", op_are_equivalent},
        {"monodromy", op_monodromy},
        {"is_fit", op_is_fit},
        {"lift_automorphism", op_lift_automorphism},
        {"pullback_lift", op_pullback_lift},
        {"validate_atlas", op_validate_atlas},
        {"kappa_V", op_kappa_V},
        {"dist_bounds", op_dist_bounds},
        {"dist_to_fiber", op_dist_to_fiber},
        {"local_connect", op_local_connect},
        {"kappa_upper_box", op_kappa_upper_box},
        {"chain_length", op_chain_length},
        {"model_dist", op_model_dist},
        {"bracket", op_bracket},
    };
    return b;
}

// ---------------------------------------------------------------------------
// expectations

std::vector<cplx> expected_list(const Context& cx, const Json& j, const std::string& id)
{
    if (j.is_array()) {
        std::vector<cplx> v;
        for (const auto& e : j)
            v.push_back(cx.number(e, id));
        return v;
    }
    return {cx.number(j, id)};
}

// A named quantity: residual, first entry of a value (modulus), or a numeric
// certificate.
std::optional<double> quantity(const CheckResult& r, const std::string& name)
{
    for (const auto& [k, v] : r.residuals)
        if (k == name)
            return v;
    for (const auto& [k, v] : r.values)
        if (k == name && !v.empty())
            return std::abs(v.front());
    if (r.certificates.contains(name) && r.certificates[name].is_number())
        return r.certificates[name].get<double>();
    return std::nullopt;
}

// Validates the expect record before any check runs.
void validate_expect(const Context& cx, const CheckSpec& c)
{
    for (const auto& [k, v] : c.expect.items()) {
        if (k == "tol") {
            if (!v.is_number())
                config_error(c.id, "expect.tol must be a number");
        } else if (k == "value") {
            expected_list(cx, v, c.id);
        } else if (k == "values" || k == "below" || k == "above") {
            if (!v.is_object())
                config_error(c.id, "expect." + k + " must be a table");
            for (const auto& [n, x] : v.items()) {
                if (k == "values")
                    expected_list(cx, x, c.id);
                else if (!x.is_number())
                    config_error(c.id, "expect." + k + "." + n + " must be a number");
            }
        } else if (!v.is_boolean()) {
            config_error(c.id, "unknown expectation '" + k + "'");
        }
    }
}

// Applies the expect record; returns false with a message on the first miss.
bool meet_expectations(const Context& cx, const CheckSpec& c, CheckResult& r, double tol, bool failed_check)
{
    const double etol = c.expect.contains("tol") ? c.expect["tol"].get<double>() : tol;
    bool ok = true;
    auto miss = [&](const std::string& m) {
        if (ok)
            r.message = r.message.empty() ? m : r.message + "; " + m;
        ok = false;
    };
    auto compare = [&](const std::string& name, const std::vector<cplx>& got, const std::vector<cplx>& want) {
        double err = got.size() == want.size() ? 0.0 : std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i)
            err = std::max(err, std::abs(got[i] - want[i]));
        r.residuals.emplace_back("expect_" + name, err);
        if (!(err < etol))
            miss("value " + name + " off by " + sci(err));
    };
    for (const auto& [k, v] : c.expect.items()) {
        if (k == "tol")
            continue;
        if (k == "below" || k == "above") {
            for (const auto& [n, bound] : v.items()) {
                const auto q = quantity(r, n);
                const double b = bound.get<double>();
                if (!q)
                    miss("no quantity '" + n + "'");
                else if (k == "below" ? !(*q < b) : !(*q > b))
                    miss(n + " = " + sci(*q) + " not " + k + " " + sci(b));
            }
            continue;
        }
        if (failed_check)
            continue;
        if (k == "value") {
            if (r.values.empty())
                miss("no value to compare");
            else
                compare(r.values.front().first, r.values.front().second, expected_list(cx, v, c.id));
        } else if (k == "values") {
            for (const auto& [n, x] : v.items()) {
                const auto it = std::find_if(r.values.begin(), r.values.end(), [&](const auto& e) { return e.first == n; });
                if (it == r.values.end())
                    miss("no value '" + n + "'");
                else
                    compare(n, it->second, expected_list(cx, x, c.id));
            }
        } else if (!r.certificates.contains(k) || r.certificates[k] != v) {
            miss(k + " expected " + v.dump());
        }
    }
    return ok;
}

} // namespace

Report run_scenario(const Scenario& s, const RunOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    Context cx(s, opts);

    // Resolve every check before running any.
    std::vector<Task> tasks;
    std::vector<double> tols;
    for (const auto& c : s.checks) {
        const auto b = binders().find(c.op);
        if (b == binders().end())
            throw Error(ErrorKind::UnknownName, "unknown operation '" + c.op + "'");
        Params p(c.params, c.id);
        tols.push_back(c.params.contains("tol") && c.params["tol"].is_number() ? c.params["tol"].get<double>() : cx.tol);
        tasks.push_back(b->second(cx, p, c));
        p.finish();
        validate_expect(cx, c);
    }

    Report rep;
    rep.scenario = s.name;
    rep.seed = cx.seed;
    rep.tolerance = cx.tol;
    rep.samples = cx.count;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const CheckSpec& c = s.checks[i];
        CheckResult r;
        r.id = c.id;
        r.op = c.op;
        r.expected_failure = c.expect_fail;
        bool raised = false;
        try {
            tasks[i](r);
        } catch (const Error& e) {
            raised = true;
            r.pass = false;
            r.error = std::string(to_string(e.kind()));
            r.message = e.what();
            if (!std::isnan(e.residual()))
                r.certificates["error_residual"] = json_number(e.residual());
        } catch (const std::exception& e) {
            raised = true;
            r.pass = false;
            r.error = "InternalError";
            r.message = e.what();
        }
        const bool met = meet_expectations(cx, c, r, tols[i], raised || (c.expect_fail && !r.pass));
        if (c.expect_fail) {
            const bool right_error = c.expect_error.empty() || c.expect_error == r.error;
            r.ok = !r.pass && right_error && met;
            if (!right_error)
                r.message = "expected " + c.expect_error + ", got " + (r.error.empty() ? "no error" : r.error) +
                            (r.message.empty() ? "" : ": " + r.message);
        } else {
            r.pass = r.pass && met;
            r.ok = r.pass;
        }
        if (!r.pass && r.message.empty() && !raised) {
            for (const auto& [k, v] : r.residuals)
                if (!(v < tols[i])) {
                    r.message = "residual " + k + " = " + sci(v);
                    break;
                }
        }
        rep.checks.push_back(std::move(r));
    }
    rep.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

int exit_code(const Report& r) { return r.all_ok() ? 0 : 1; }

} // namespace hcontact

#include "hcontact/scenario.hpp"
#include "hcontact/forms.hpp"
#include "hcontact/parse.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace hcontact {

namespace {

const std::set<std::string>& domain_kinds()
{
    static const std::set<std::string> k{"disc",   "punctured_disc", "ball", "polydisc", "half_plane",
                                         "siegel", "product",        "box"};
    return k;
}

std::string fmt_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Source text split into lines, for tokens at error locations and quote
// detection on keys.
class Source {
public:
    explicit Source(std::string_view text)
    {
        std::size_t start = 0;
        for (;;) {
            const auto nl = text.find('\n', start);
            lines_.emplace_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
            if (nl == std::string_view::npos)
                break;
            start = nl + 1;
        }
    }

    char at(int line, int col) const
    {
        if (line < 1 || line > static_cast<int>(lines_.size()))
            return '\0';
        const auto& l = lines_[static_cast<std::size_t>(line - 1)];
        return col >= 1 && col <= static_cast<int>(l.size()) ? l[static_cast<std::size_t>(col - 1)] : '\0';
    }

    std::string token(int line, int col) const
    {
        std::string t;
        for (int c = col;; ++c) {
            const char ch = at(line, c);
            if (ch == '\0' || ch == ' ' || ch == '\t' || ch == '\r')
                break;
            t += ch;
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
                break;
        }
        return t;
    }

private:
    std::vector<std::string> lines_;
};

struct Loc {
    int line = 0;
    int col = 0;
};

Loc loc_of(const toml::node& n)
{
    const auto& b = n.source().begin;
    return {static_cast<int>(b.line), static_cast<int>(b.column)};
}

Loc loc_of(const toml::key& k)
{
    const auto& b = k.source().begin;
    return {static_cast<int>(b.line), static_cast<int>(b.column)};
}

class Parser {
public:
    Parser(std::string_view text, std::string_view origin) : src_(text), origin_(origin) {}

    Scenario run(std::string_view text);

private:
    [[noreturn]] void fail(const std::string& msg, Loc at, std::string token = {}) const
    {
        throw ParseError(msg, at.line, at.col, token.empty() ? src_.token(at.line, at.col) : std::move(token));
    }

    [[noreturn]] void fail_kind(ErrorKind kind, const std::string& msg, Loc at) const
    {
        throw Error(kind, msg + " at " + std::to_string(at.line) + ":" + std::to_string(at.col));
    }

    void allow_keys(const toml::table& t, std::initializer_list<std::string_view> keys, const std::string& where) const
    {
        for (auto&& [k, v] : t)
            if (std::find(keys.begin(), keys.end(), k.str()) == keys.end())
                fail("unknown key '" + std::string(k.str()) + "' in " + where, loc_of(k), std::string(k.str()));
    }

    const toml::table& table(const toml::node& n, const std::string& what) const
    {
        if (const auto* t = n.as_table())
            return *t;
        fail("expected a table for " + what, loc_of(n));
    }

    std::string str(const toml::node& n, const std::string& what) const
    {
        if (const auto* s = n.as_string())
            return s->get();
        fail("expected a string for " + what, loc_of(n));
    }

    // Strings or numbers; numbers are kept as their decimal text.
    std::string expr_text(const toml::node& n, const std::string& what) const
    {
        if (const auto* s = n.as_string())
            return s->get();
        if (const auto* i = n.as_integer())
            return std::to_string(i->get());
        if (const auto* d = n.as_floating_point())
            return fmt_double(d->get());
        fail("expected an expression for " + what, loc_of(n));
    }

    double num(const toml::node& n, const std::string& what) const
    {
        if (const auto* i = n.as_integer())
            return static_cast<double>(i->get());
        if (const auto* d = n.as_floating_point())
            return d->get();
        fail("expected a number for " + what, loc_of(n));
    }

    std::int64_t integer(const toml::node& n, const std::string& what) const
    {
        if (const auto* i = n.as_integer())
            return i->get();
        fail("expected an integer for " + what, loc_of(n));
    }

    bool boolean(const toml::node& n, const std::string& what) const
    {
        if (const auto* b = n.as_boolean())
            return b->get();
        fail("expected a boolean for " + what, loc_of(n));
    }

    std::vector<std::string> str_list(const toml::node& n, const std::string& what) const
    {
        const auto* a = n.as_array();
        if (!a)
            fail("expected an array of strings for " + what, loc_of(n));
        std::vector<std::string> out;
        for (const auto& e : *a)
            out.push_back(str(e, what));
        return out;
    }

    // Column offset such that column 1 of an embedded string maps onto its
    // first character.
    int string_offset(Loc at) const
    {
        const char c = src_.at(at.line, at.col);
        return c == '"' || c == '\'' ? at.col : at.col - 1;
    }

    template <class F>
    auto relocating(Loc at, F&& f) const -> decltype(f())
    {
        try {
            return f();
        } catch (const ParseError& e) {
            throw e.relocated(at.line, string_offset(at));
        }
    }

    DomainSpec domain(const toml::node& n, const std::string& where);
    FormSpec form(const toml::node& n, const std::string& name);
    Json to_json(const toml::node& n) const;

    void resolve_constants(Scenario& s, const std::map<std::string, Loc>& locs);
    void check_form(const Scenario& s, const FormSpec& f, Loc at, const std::map<std::string, Loc>& term_locs,
                    const std::map<std::string, Loc>& key_locs) const;
    void check_reference(const Scenario& s, const std::string& key, const Json& value, Loc at) const;
    void check_inline_form(const Scenario& s, const std::string& text, Loc at) const;

    Source src_;
    std::string origin_;
    std::map<std::string, cplx> constants_;
};

DomainSpec Parser::domain(const toml::node& n, const std::string& where)
{
    if (const auto* s = n.as_string()) {
        DomainSpec d;
        d.kind = s->get();
        if (!domain_kinds().count(d.kind))
            fail("unknown domain kind '" + d.kind + "' in " + where, loc_of(n));
        return d;
    }
    const auto& t = table(n, where);
    allow_keys(t, {"kind", "radius", "dim", "radii", "center", "factors"}, where);
    DomainSpec d;
    const auto* kind = t.get("kind");
    if (!kind)
        fail("domain without kind in " + where, loc_of(n));
    d.kind = str(*kind, "kind");
    if (!domain_kinds().count(d.kind))
        fail("unknown domain kind '" + d.kind + "' in " + where, loc_of(*kind));
    if (const auto* r = t.get("radius"))
        d.radius = num(*r, "radius");
    if (const auto* r = t.get("dim"))
        d.dim = static_cast<int>(integer(*r, "dim"));
    if (const auto* r = t.get("radii")) {
        const auto* a = r->as_array();
        if (!a)
            fail("expected an array for radii", loc_of(*r));
        for (const auto& e : *a)
            d.radii.push_back(num(e, "radii"));
    }
    if (const auto* r = t.get("center")) {
        const auto* a = r->as_array();
        if (!a)
            fail("expected an array for center", loc_of(*r));
        for (const auto& e : *a) {
            d.center.push_back(expr_text(e, "center"));
            relocating(loc_of(e), [&] { return parse_expr(d.center.back(), Symbols{{}, constants_}); });
        }
    }
    if (const auto* r = t.get("factors")) {
        const auto* a = r->as_array();
        if (!a)
            fail("expected an array for factors", loc_of(*r));
        for (const auto& e : *a)
            d.factors.push_back(domain(e, where));
    }
    if (d.kind == "product" && d.factors.empty())
        fail("product domain without factors in " + where, loc_of(n));
    if (d.kind == "box" && (d.center.empty() || d.center.size() != d.radii.size()))
        throw Error(ErrorKind::ArityMismatch, "box domain needs center and radii of equal length in " + where);
    return d;
}

FormSpec Parser::form(const toml::node& n, const std::string& name)
{
    FormSpec f;
    const toml::node* body = &n;
    if (const auto* t = n.as_table(); t && (t->contains("text") || t->contains("space") || t->contains("degree"))) {
        allow_keys(*t, {"text", "space", "degree"}, "form " + name);
        if (const auto* sp = t->get("space")) {
            f.space = str(*sp, "space");
            if (f.space != "base" && f.space != "total")
                fail("form space must be 'base' or 'total'", loc_of(*sp));
        }
        if (const auto* dg = t->get("degree"))
            f.degree = static_cast<int>(integer(*dg, "degree"));
        body = t->get("text");
        if (!body)
            fail("form " + name + " without text", loc_of(n));
    }
    if (const auto* t = body->as_table()) {
        f.as_table = true;
        for (auto&& [k, v] : *t)
            f.terms.emplace_back(std::string(k.str()), expr_text(v, "form " + name));
    } else {
        f.terms.emplace_back("", expr_text(*body, "form " + name));
    }
    return f;
}

Json Parser::to_json(const toml::node& n) const
{
    if (const auto* t = n.as_table()) {
        Json j = Json::object();
        for (auto&& [k, v] : *t)
            j[std::string(k.str())] = to_json(v);
        return j;
    }
    if (const auto* a = n.as_array()) {
        Json j = Json::array();
        for (const auto& e : *a)
            j.push_back(to_json(e));
        return j;
    }
    if (const auto* s = n.as_string())
        return s->get();
    if (const auto* i = n.as_integer())
        return i->get();
    if (const auto* d = n.as_floating_point())
        return d->get();
    if (const auto* b = n.as_boolean())
        return b->get();
    fail("unsupported value type", loc_of(n));
}

void Parser::resolve_constants(Scenario& s, const std::map<std::string, Loc>& locs)
{
    // Constants may refer to each other in any order; resolve in passes.
    std::map<std::string, std::string> pending = s.constants;
    while (!pending.empty()) {
        bool progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            try {
                constants_[it->first] = parse_expr(it->second, Symbols{{}, constants_}).eval(std::span<const cplx>{});
                it = pending.erase(it);
                progress = true;
            } catch (const ParseError&) {
                ++it;
            }
        }
        if (!progress) {
            const auto& [name, text] = *pending.begin();
            const Loc at = locs.at(name);
            relocating(at, [&] { return parse_expr(text, Symbols{{}, constants_}); });
            fail("cyclic constant '" + name + "'", at, name);
        }
    }
}

void Parser::check_form(const Scenario& s, const FormSpec& f, Loc at, const std::map<std::string, Loc>& term_locs,
                        const std::map<std::string, Loc>& key_locs) const
{
    Symbols sym{s.variables, constants_};
    if (f.space == "total")
        sym.variables.push_back(s.fiber);
    if (!f.as_table) {
        relocating(at, [&] { return parse_form(f.terms.front().second, sym, std::max(f.degree, 0)); });
        return;
    }
    int degree = -1;
    for (const auto& [key, text] : f.terms) {
        const std::string joined = key + " : " + text;
        try {
            const auto term = parse_form(joined, sym);
            if (degree >= 0 && term.degree() != degree)
                fail("mixed degrees in form", key_locs.at(key), key);
            degree = term.degree();
        } catch (const ParseError& e) {
            if (e.column() <= static_cast<int>(key.size())) {
                const Loc k = key_locs.at(key);
                throw e.relocated(k.line, string_offset(k));
            }
            const Loc v = term_locs.at(key);
            throw e.relocated(v.line, string_offset(v) - static_cast<int>(key.size()) - 3);
        }
    }
}

void Parser::check_inline_form(const Scenario& s, const std::string& text, Loc at) const
{
    if (s.forms.count(text))
        return;
    relocating(at, [&] { return parse_form(text, Symbols{s.variables, constants_}); });
}

void Parser::check_reference(const Scenario& s, const std::string& key, const Json& value, Loc at) const
{
    auto need = [&](const auto& table, const std::string& name, const char* what) {
        if (!table.count(name))
            fail_kind(ErrorKind::UnknownName, std::string("unknown ") + what + " '" + name + "'", at);
    };
    auto names = [&](const Json& v, auto&& each) {
        if (v.is_string())
            each(v.get<std::string>());
        else if (v.is_array())
            for (const auto& e : v)
                if (e.is_string())
                    each(e.get<std::string>());
    };
    if (key == "lift" || key == "lift1" || key == "lift2" || key == "target_lift") {
        if (value.is_string())
            need(s.lifts, value.get<std::string>(), "lift");
    } else if (key == "form" || key == "source" || key == "target" || key == "expected" || key == "potential") {
        if (value.is_string() && !s.forms.count(value.get<std::string>()))
            check_inline_form(s, value.get<std::string>(), at);
    } else if (key == "map" || key == "maps") {
        names(value, [&](const std::string& n) { need(s.maps, n, "map"); });
    } else if (key == "loop" || key == "loops") {
        names(value, [&](const std::string& n) { need(s.loops, n, "loop"); });
    } else if (key == "atlas") {
        if (value.is_string())
            need(s.atlases, value.get<std::string>(), "atlas");
    } else if (key == "domain" || key == "source_domain") {
        if (value.is_string() && value.get<std::string>() != "main")
            need(s.domains, value.get<std::string>(), "domain");
    }
}

int domain_dim(const Scenario& s, const DomainSpec& d)
{
    if (d.kind == "disc" || d.kind == "punctured_disc" || d.kind == "half_plane")
        return 1;
    if (d.kind == "ball" || d.kind == "siegel")
        return d.dim > 0 ? d.dim : 2;
    if (d.kind == "polydisc")
        return d.radii.empty() ? (d.dim > 0 ? d.dim : 2) : static_cast<int>(d.radii.size());
    if (d.kind == "box")
        return static_cast<int>(d.center.size());
    int n = 0;
    for (const auto& f : d.factors)
        n += domain_dim(s, f);
    return n;
}

Scenario Parser::run(std::string_view text)
{
    toml::table doc;
    try {
        doc = toml::parse(text, origin_);
    } catch (const toml::parse_error& e) {
        const auto& b = e.source().begin;
        const Loc at{static_cast<int>(b.line), static_cast<int>(b.column)};
        fail(std::string(e.description()), at);
    }
    allow_keys(doc,
               {"name", "description", "variables", "fiber", "constants", "domain", "domains", "forms", "maps",
                "lifts", "loops", "atlases", "samples", "output", "check"},
               "scenario");

    Scenario s;
    if (const auto* n = doc.get("name"))
        s.name = str(*n, "name");
    if (const auto* n = doc.get("description"))
        s.description = str(*n, "description");
    if (const auto* n = doc.get("fiber"))
        s.fiber = str(*n, "fiber");
    const auto* vars = doc.get("variables");
    if (!vars)
        fail("scenario declares no variables", Loc{1, 1}, "");
    s.variables = str_list(*vars, "variables");
    {
        std::set<std::string> seen;
        for (const auto& v : s.variables)
            if (!seen.insert(v).second || v == s.fiber)
                fail("duplicate variable '" + v + "'", loc_of(*vars), v);
        if (s.variables.empty())
            fail("scenario declares no variables", loc_of(*vars));
    }

    std::map<std::string, Loc> const_locs;
    if (const auto* n = doc.get("constants"))
        for (auto&& [k, v] : table(*n, "constants")) {
            s.constants[std::string(k.str())] = expr_text(v, "constant");
            const_locs[std::string(k.str())] = loc_of(v);
        }
    resolve_constants(s, const_locs);

    const auto* dom = doc.get("domain");
    if (!dom)
        fail("scenario declares no domain", Loc{1, 1}, "");
    s.domain = domain(*dom, "domain");
    if (domain_dim(s, s.domain) != static_cast<int>(s.variables.size()))
        fail_kind(ErrorKind::ArityMismatch,
                  "domain of dimension " + std::to_string(domain_dim(s, s.domain)) + " for " +
                      std::to_string(s.variables.size()) + " variables",
                  loc_of(*dom));
    if (const auto* n = doc.get("domains"))
        for (auto&& [k, v] : table(*n, "domains"))
            s.domains[std::string(k.str())] = domain(v, "domain " + std::string(k.str()));

    if (const auto* n = doc.get("forms"))
        for (auto&& [k, v] : table(*n, "forms")) {
            const std::string name(k.str());
            FormSpec f = form(v, name);
            // Positions of the term keys and values for error relocation.
            std::map<std::string, Loc> term_locs;
            std::map<std::string, Loc> key_locs;
            Loc at = loc_of(v);
            const toml::node* body = &v;
            if (const auto* t = v.as_table(); t && t->contains("text"))
                body = t->get("text");
            at = loc_of(*body);
            if (const auto* t = body->as_table())
                for (auto&& [tk, tv] : *t) {
                    key_locs[std::string(tk.str())] = loc_of(tk);
                    term_locs[std::string(tk.str())] = loc_of(tv);
                }
            check_form(s, f, at, term_locs, key_locs);
            s.forms[name] = std::move(f);
        }

    if (const auto* n = doc.get("maps"))
        for (auto&& [k, v] : table(*n, "maps")) {
            const std::string name(k.str());
            const auto& t = table(v, "map " + name);
            allow_keys(t, {"vars", "components", "compose"}, "map " + name);
            MapSpec m;
            if (const auto* c = t.get("compose")) {
                m.compose = str_list(*c, "compose");
                if (t.contains("components") || t.contains("vars"))
                    fail("map " + name + " mixes compose with components", loc_of(*c));
            } else {
                if (const auto* vv = t.get("vars"))
                    m.vars = str_list(*vv, "vars");
                else
                    m.vars = s.variables;
                const auto* comps = t.get("components");
                if (!comps || !comps->as_array())
                    fail("map " + name + " needs components", loc_of(v));
                for (const auto& e : *comps->as_array()) {
                    m.components.push_back(expr_text(e, "component"));
                    relocating(loc_of(e),
                               [&] { return parse_expr(m.components.back(), Symbols{m.vars, constants_}); });
                }
            }
            s.maps[name] = std::move(m);
        }
    // Compositions resolve against the full map table.
    for (const auto& [name, m] : s.maps) {
        if (m.compose.empty())
            continue;
        int arity = -1;
        for (auto it = m.compose.rbegin(); it != m.compose.rend(); ++it) {
            const auto f = s.maps.find(*it);
            if (f == s.maps.end())
                throw Error(ErrorKind::UnknownName, "map " + name + " composes unknown map '" + *it + "'");
            if (!f->second.compose.empty())
                throw Error(ErrorKind::InvalidArgument, "map " + name + " composes the composition '" + *it + "'");
            if (arity >= 0 && static_cast<int>(f->second.vars.size()) != arity)
                throw Error(ErrorKind::ArityMismatch, "map " + name + ": '" + *it + "' takes " +
                                                          std::to_string(f->second.vars.size()) + " arguments, got " +
                                                          std::to_string(arity));
            arity = static_cast<int>(f->second.components.size());
        }
    }

    if (const auto* n = doc.get("lifts"))
        for (auto&& [k, v] : table(*n, "lifts")) {
            const std::string name(k.str());
            const auto& t = table(v, "lift " + name);
            allow_keys(t, {"base", "omega", "nu", "twist"}, "lift " + name);
            LiftSpec l;
            if (const auto* b = t.get("base"))
                l.base = str(*b, "base");
            if (l.base != "main" && !s.domains.count(l.base))
                fail_kind(ErrorKind::UnknownName, "lift " + name + " over unknown domain '" + l.base + "'", loc_of(v));
            const DomainSpec& base = l.base == "main" ? s.domain : s.domains.at(l.base);
            if (domain_dim(s, base) != static_cast<int>(s.variables.size()))
                fail_kind(ErrorKind::ArityMismatch, "lift " + name + " over a domain of the wrong dimension", loc_of(v));
            auto field = [&](const char* key, std::string& out, bool required) {
                const auto* f = t.get(key);
                if (!f) {
                    if (required)
                        fail("lift " + name + " needs " + key, loc_of(v), name);
                    out = "0";
                    return;
                }
                out = str(*f, key);
                check_inline_form(s, out, loc_of(*f));
            };
            field("omega", l.omega, true);
            field("nu", l.nu, true);
            field("twist", l.twist, false);
            s.lifts[name] = std::move(l);
        }

    if (const auto* n = doc.get("loops"))
        for (auto&& [k, v] : table(*n, "loops")) {
            const std::string name(k.str());
            const auto& t = table(v, "loop " + name);
            allow_keys(t, {"kind", "coordinate", "radius", "center", "base"}, "loop " + name);
            LoopSpec l;
            if (const auto* f = t.get("kind"))
                l.kind = str(*f, "kind");
            if (l.kind != "circle")
                fail("unsupported loop kind '" + l.kind + "'", loc_of(v));
            if (const auto* f = t.get("coordinate"))
                l.coordinate = str(*f, "coordinate");
            if (std::find(s.variables.begin(), s.variables.end(), l.coordinate) == s.variables.end())
                fail_kind(ErrorKind::UnknownName, "loop " + name + " on unknown coordinate '" + l.coordinate + "'",
                          loc_of(v));
            if (const auto* f = t.get("radius"))
                l.radius = num(*f, "radius");
            if (const auto* f = t.get("center")) {
                l.center = expr_text(*f, "center");
                relocating(loc_of(*f), [&] { return parse_expr(l.center, Symbols{{}, constants_}); });
            }
            if (const auto* f = t.get("base"))
                l.base = str(*f, "base");
            if (l.base != "main" && !s.domains.count(l.base))
                fail_kind(ErrorKind::UnknownName, "loop " + name + " in unknown domain '" + l.base + "'", loc_of(v));
            s.loops[name] = std::move(l);
        }

    if (const auto* n = doc.get("atlases"))
        for (auto&& [k, v] : table(*n, "atlases")) {
            const std::string name(k.str());
            const auto& t = table(v, "atlas " + name);
            allow_keys(t, {"kind", "c", "defect", "samples"}, "atlas " + name);
            AtlasSpec a;
            if (const auto* f = t.get("kind"))
                a.kind = str(*f, "kind");
            if (a.kind != "punctured_sectors")
                fail("unsupported atlas kind '" + a.kind + "'", loc_of(v));
            if (s.variables.size() != 2)
                fail_kind(ErrorKind::ArityMismatch, "punctured_sectors atlas needs two variables", loc_of(v));
            if (const auto* f = t.get("c")) {
                a.c = expr_text(*f, "c");
                relocating(loc_of(*f), [&] { return parse_expr(a.c, Symbols{{}, constants_}); });
            }
            if (const auto* f = t.get("defect")) {
                a.defect = expr_text(*f, "defect");
                relocating(loc_of(*f), [&] { return parse_expr(a.defect, Symbols{s.variables, constants_}); });
            }
            if (const auto* f = t.get("samples"))
                a.samples = static_cast<int>(integer(*f, "samples"));
            s.atlases[name] = std::move(a);
        }

    if (const auto* n = doc.get("samples")) {
        const auto& t = table(*n, "samples");
        allow_keys(t, {"count", "seed", "tolerance", "margin"}, "samples");
        if (const auto* f = t.get("count"))
            s.samples.count = static_cast<int>(integer(*f, "count"));
        if (const auto* f = t.get("seed")) {
            const auto seed = integer(*f, "seed");
            if (seed < 0)
                fail("negative seed", loc_of(*f));
            s.samples.seed = static_cast<std::uint64_t>(seed);
        }
        if (const auto* f = t.get("tolerance"))
            s.samples.tolerance = num(*f, "tolerance");
        if (const auto* f = t.get("margin"))
            s.samples.margin = num(*f, "margin");
        if (s.samples.count < 1 || !(s.samples.tolerance > 0.0))
            fail("sample count and tolerance must be positive", loc_of(*n));
    }

    if (const auto* n = doc.get("output")) {
        const auto& t = table(*n, "output");
        allow_keys(t, {"format", "path"}, "output");
        if (const auto* f = t.get("format"))
            s.output.format = str(*f, "format");
        if (s.output.format != "text" && s.output.format != "json" && s.output.format != "csv")
            fail("output format must be text, json or csv", loc_of(*n));
        if (const auto* f = t.get("path"))
            s.output.path = str(*f, "path");
    }

    if (const auto* n = doc.get("check")) {
        const auto* arr = n->as_array();
        if (!arr)
            fail("check must be an array of tables ([[check]])", loc_of(*n));
        std::set<std::string> ids;
        for (const auto& e : *arr) {
            const auto& t = table(e, "check");
            allow_keys(t, {"id", "op", "expect_fail", "expect_error", "params", "expect"}, "check");
            CheckSpec c;
            c.line = loc_of(e).line;
            const auto* op = t.get("op");
            if (!op)
                fail("check without op", loc_of(e));
            c.op = str(*op, "op");
            const auto& ops = known_operations();
            if (std::find(ops.begin(), ops.end(), c.op) == ops.end())
                fail_kind(ErrorKind::UnknownName, "unknown operation '" + c.op + "'", loc_of(*op));
            c.id = t.contains("id") ? str(*t.get("id"), "id") : c.op + "_" + std::to_string(s.checks.size() + 1);
            if (!ids.insert(c.id).second)
                fail("duplicate check id '" + c.id + "'", loc_of(e), c.id);
            if (const auto* f = t.get("expect_fail"))
                c.expect_fail = boolean(*f, "expect_fail");
            if (const auto* f = t.get("expect_error")) {
                c.expect_error = str(*f, "expect_error");
                c.expect_fail = true;
            }
            if (const auto* f = t.get("params")) {
                const auto& pt = table(*f, "params");
                c.params = to_json(pt);
                for (auto&& [pk, pv] : pt)
                    check_reference(s, std::string(pk.str()), c.params[std::string(pk.str())], loc_of(pv));
            }
            if (const auto* f = t.get("expect"))
                c.expect = to_json(table(*f, "expect"));
            s.checks.push_back(std::move(c));
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// printing

toml::array to_toml_array(const std::vector<std::string>& v)
{
    toml::array a;
    for (const auto& s : v)
        a.push_back(s);
    return a;
}

toml::table domain_table(const DomainSpec& d)
{
    toml::table t;
    t.insert("kind", d.kind);
    if (d.radius != 1.0)
        t.insert("radius", d.radius);
    if (d.dim != 0)
        t.insert("dim", d.dim);
    if (!d.radii.empty()) {
        toml::array a;
        for (double r : d.radii)
            a.push_back(r);
        t.insert("radii", a);
    }
    if (!d.center.empty())
        t.insert("center", to_toml_array(d.center));
    if (!d.factors.empty()) {
        toml::array a;
        for (const auto& f : d.factors) {
            auto ft = domain_table(f);
            ft.is_inline(true);
            a.push_back(std::move(ft));
        }
        t.insert("factors", a);
    }
    t.is_inline(true);
    return t;
}

void insert_json(toml::table& t, const std::string& key, const Json& j);

toml::array json_array(const Json& j);

toml::table json_table(const Json& j)
{
    toml::table t;
    for (const auto& [k, v] : j.items())
        insert_json(t, k, v);
    t.is_inline(true);
    return t;
}

template <class Sink>
void put_json(Sink&& put, const Json& v)
{
    if (v.is_object())
        put(json_table(v));
    else if (v.is_array())
        put(json_array(v));
    else if (v.is_string())
        put(v.get<std::string>());
    else if (v.is_boolean())
        put(v.get<bool>());
    else if (v.is_number_integer())
        put(v.get<std::int64_t>());
    else if (v.is_number_float())
        put(v.get<double>());
    else
        throw Error(ErrorKind::InvalidArgument, "cannot print a null parameter");
}

toml::array json_array(const Json& j)
{
    toml::array a;
    for (const auto& e : j)
        put_json([&](auto&& x) { a.push_back(std::forward<decltype(x)>(x)); }, e);
    return a;
}

void insert_json(toml::table& t, const std::string& key, const Json& j)
{
    put_json([&](auto&& x) { t.insert(key, std::forward<decltype(x)>(x)); }, j);
}

} // namespace

bool same_json(const Json& a, const Json& b)
{
    if (a.is_object() && b.is_object()) {
        if (a.size() != b.size())
            return false;
        for (const auto& [k, v] : a.items())
            if (!b.contains(k) || !same_json(v, b.at(k)))
                return false;
        return true;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!same_json(a[i], b[i]))
                return false;
        return true;
    }
    return a == b;
}

std::string FormSpec::text() const
{
    if (!as_table)
        return terms.empty() ? "0" : terms.front().second;
    std::string out;
    for (const auto& [k, v] : terms) {
        if (!out.empty())
            out += "; ";
        out += k + " : " + v;
    }
    return out.empty() ? "0" : out;
}

const std::vector<std::string>& known_operations()
{
    static const std::vector<std::string> ops{
        "symplectic_check", "contact_check", "reeb",          "legendrian_residual", "validate_lift",
        "make_lift",        "lift_disc",     "lift_chain",    "scale_factor",        "pullback_equals",
        "theta_class",      "are_equivalent", "monodromy",    "is_fit",              "lift_automorphism",
        "pullback_lift",    "validate_atlas", "kappa_V",      "dist_bounds",         "dist_to_fiber",
        "local_connect",    "kappa_upper_box", "chain_length", "model_dist",         "bracket"};
    return ops;
}

Scenario parse_scenario(std::string_view text, std::string_view origin)
{
    Parser p(text, origin);
    return p.run(text);
}

std::string print_scenario(const Scenario& s)
{
    toml::table doc;
    doc.insert("name", s.name);
    if (!s.description.empty())
        doc.insert("description", s.description);
    doc.insert("variables", to_toml_array(s.variables));
    doc.insert("fiber", s.fiber);
    doc.insert("domain", domain_table(s.domain));
    if (!s.constants.empty()) {
        toml::table t;
        for (const auto& [k, v] : s.constants)
            t.insert(k, v);
        doc.insert("constants", t);
    }
    if (!s.domains.empty()) {
        toml::table t;
        for (const auto& [k, v] : s.domains) {
            auto d = domain_table(v);
            d.is_inline(false);
            t.insert(k, d);
        }
        doc.insert("domains", t);
    }
    if (!s.forms.empty()) {
        toml::table t;
        for (const auto& [k, f] : s.forms) {
            toml::table terms;
            for (const auto& [tk, tv] : f.terms)
                terms.insert(tk, tv);
            terms.is_inline(true);
            if (f.space == "base" && f.degree < 0) {
                if (f.as_table)
                    t.insert(k, terms);
                else
                    t.insert(k, f.terms.front().second);
                continue;
            }
            toml::table ft;
            if (f.as_table)
                ft.insert("text", terms);
            else
                ft.insert("text", f.terms.front().second);
            ft.insert("space", f.space);
            if (f.degree >= 0)
                ft.insert("degree", f.degree);
            ft.is_inline(true);
            t.insert(k, ft);
        }
        doc.insert("forms", t);
    }
    if (!s.maps.empty()) {
        toml::table t;
        for (const auto& [k, m] : s.maps) {
            toml::table mt;
            if (!m.compose.empty()) {
                mt.insert("compose", to_toml_array(m.compose));
            } else {
                mt.insert("vars", to_toml_array(m.vars));
                mt.insert("components", to_toml_array(m.components));
            }
            t.insert(k, mt);
        }
        doc.insert("maps", t);
    }
    if (!s.lifts.empty()) {
        toml::table t;
        for (const auto& [k, l] : s.lifts)
            t.insert(k, toml::table{{"base", l.base}, {"omega", l.omega}, {"nu", l.nu}, {"twist", l.twist}});
        doc.insert("lifts", t);
    }
    if (!s.loops.empty()) {
        toml::table t;
        for (const auto& [k, l] : s.loops)
            t.insert(k, toml::table{{"kind", l.kind},
                                    {"coordinate", l.coordinate},
                                    {"radius", l.radius},
                                    {"center", l.center},
                                    {"base", l.base}});
        doc.insert("loops", t);
    }
    if (!s.atlases.empty()) {
        toml::table t;
        for (const auto& [k, a] : s.atlases) {
            toml::table at{{"kind", a.kind}, {"c", a.c}, {"samples", a.samples}};
            if (!a.defect.empty())
                at.insert("defect", a.defect);
            t.insert(k, at);
        }
        doc.insert("atlases", t);
    }
    doc.insert("samples", toml::table{{"count", s.samples.count},
                                      {"seed", static_cast<std::int64_t>(s.samples.seed)},
                                      {"tolerance", s.samples.tolerance},
                                      {"margin", s.samples.margin}});
    toml::table out{{"format", s.output.format}};
    if (!s.output.path.empty())
        out.insert("path", s.output.path);
    doc.insert("output", out);
    if (!s.checks.empty()) {
        toml::array checks;
        for (const auto& c : s.checks) {
            toml::table ct{{"id", c.id}, {"op", c.op}};
            if (c.expect_fail)
                ct.insert("expect_fail", true);
            if (!c.expect_error.empty())
                ct.insert("expect_error", c.expect_error);
            if (!c.params.empty())
                ct.insert("params", json_table(c.params));
            if (!c.expect.empty())
                ct.insert("expect", json_table(c.expect));
            checks.push_back(std::move(ct));
        }
        doc.insert("check", checks);
    }
    std::ostringstream os;
    os << doc << '\n';
    return os.str();
}

} // namespace hcontact

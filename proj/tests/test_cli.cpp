#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcontact/forms.hpp"
#include "hcontact/runner.hpp"
#include "support.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <numbers>

using namespace hcontact;
using hctest::Gen;
using hctest::throws_as_kind;

namespace {

const char* minimal = R"toml(
name = "minimal"
variables = ["z", "w"]
domain = { kind = "polydisc", radii = [1.0, 1.0] }

[forms]
omega = "d[z]^d[w] : 1"

[[check]]
id = "omega"
op = "symplectic_check"
params = { form = "omega" }
)toml";

std::string with_checks(const std::string& checks)
{
    return std::string(minimal) + checks;
}

ParseError parse_failure(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("no ParseError for:\n" << text);
    return ParseError("", 0, 0, "");
}

Json strip_time(Json j)
{
    j.erase("wall_time_ms");
    return j;
}

int run_tool(const std::string& args)
{
    const std::string cmd = std::string(HCONTACT_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("minimal scenario parses to one check")
{
    const Scenario s = parse_scenario(minimal);
    CHECK(s.name == "minimal");
    CHECK(s.variables == std::vector<std::string>{"z", "w"});
    CHECK(s.domain.kind == "polydisc");
    REQUIRE(s.checks.size() == 1);
    CHECK(s.checks[0].op == "symplectic_check");
    const Report r = run_scenario(s);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.checks[0].pass);
    CHECK(exit_code(r) == 0);
}

TEST_CASE("density expression parses to 2/(1-z)^3")
{
    const Scenario s = parse_scenario(R"toml(
name = "density"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }
[forms]
omega = { "d[z]^d[w]" = "2/(1-z)^3" }
)toml");
    const auto& f = s.forms.at("omega");
    CHECK(f.as_table);
    const DiffForm omega = parse_form(f.text(), Symbols{s.variables, {}});
    Gen g(21);
    for (int k = 0; k < 50; ++k) {
        const CVec p = g.ball_point(2, 0.95);
        const cplx want = 2.0 / std::pow(1.0 - p[0], 3);
        CHECK(std::abs(omega.eval(p).top() - want) <= 1e-13 * std::abs(want));
    }
}

TEST_CASE("parse errors carry line, column and token")
{
    SUBCASE("doubled wedge in a table key")
    {
        const auto e = parse_failure(R"toml(name = "x"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }
[forms]
omega = { "d[z]^^d[w]" = "1" }
)toml");
        CHECK(e.line() == 5);
        // Key content starts at column 12; the second '^' is its sixth character.
        CHECK(e.column() == 17);
        CHECK(e.token() == "^");
    }
    SUBCASE("doubled wedge in form text")
    {
        const auto e = parse_failure(R"toml(name = "x"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }
[forms]
omega = "d[z]^^d[w] : 1"
)toml");
        CHECK(e.line() == 5);
        CHECK(e.column() == 15);
        CHECK(e.token() == "^");
    }
    SUBCASE("bad expression in a term value")
    {
        const auto e = parse_failure(R"toml(name = "x"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }
[forms]
omega = { "d[z]^d[w]" = "1 + * 2" }
)toml");
        CHECK(e.line() == 5);
        CHECK(e.column() == 30);
        CHECK(e.token() == "*");
    }
    SUBCASE("undeclared variable in a map")
    {
        const auto e = parse_failure(R"toml(name = "x"
variables = ["z", "w"]
domain = { kind = "ball", dim = 2 }
[maps]
f = { vars = ["z", "w"], components = ["z", "q + 1"] }
)toml");
        CHECK(e.line() == 5);
        CHECK(e.column() == 46);
        CHECK(e.token() == "q");
    }
    SUBCASE("TOML syntax")
    {
        const auto e = parse_failure("name = \"x\"\nvariables = [\"z\"\n");
        CHECK(e.line() >= 2);
    }
    SUBCASE("unknown key")
    {
        const auto e = parse_failure(with_checks("\n[sample]\ncount = 3\n"));
        CHECK(e.token() == "sample");
    }
}

TEST_CASE("dangling references and misfit arities")
{
    CHECK(throws_as_kind(ErrorKind::UnknownName, [] {
        parse_scenario(with_checks("\n[[check]]\nop = \"no_such_op\"\n"));
    }));
    CHECK(throws_as_kind(ErrorKind::UnknownName, [] {
        parse_scenario(with_checks("\n[[check]]\nop = \"validate_lift\"\nparams = { lift = \"nowhere\" }\n"));
    }));
    CHECK(throws_as_kind(ErrorKind::UnknownName, [] {
        parse_scenario(with_checks("\n[loops.c]\ncoordinate = \"u\"\n"));
    }));
    CHECK(throws_as_kind(ErrorKind::ArityMismatch, [] {
        parse_scenario(R"toml(name = "x"
variables = ["z", "w"]
domain = { kind = "disc" }
)toml");
    }));
    CHECK(throws_as_kind(ErrorKind::ArityMismatch, [] {
        parse_scenario(with_checks(R"toml(
[maps]
curve = { vars = ["t"], components = ["t", "t"] }
square = { compose = ["curve", "curve"] }
)toml"));
    }));
}

TEST_CASE("configuration errors raise before any check runs")
{
    // A valid first check and a second one with a malformed point.
    const Scenario s = parse_scenario(with_checks(R"toml(
[[check]]
op = "model_dist"
params = { from = ["0", "0"], to = ["0.5"] }
)toml"));
    CHECK(throws_as_kind(ErrorKind::ArityMismatch, [&] { run_scenario(s); }));
    const Scenario t = parse_scenario(with_checks(R"toml(
[[check]]
op = "chain_length"
params = { t = [0.5], bogus = 1 }
)toml"));
    CHECK(throws_as_kind(ErrorKind::InvalidArgument, [&] { run_scenario(t); }));
}

TEST_CASE("spec record syntax: inline lifts and loops")
{
    const Scenario s = parse_scenario(R"toml(
name = "inline"
variables = ["z", "w"]
domain = { kind = "product", factors = [{ kind = "disc" }, { kind = "punctured_disc" }] }

[[check]]
op = "monodromy"
params = { lift = { base = "main", omega = "d[z]^d[w] : 1", nu = "d[w] : z", twist = "d[w] : -1/w" }, potential = "d[w] : z", loop = { kind = "circle", coordinate = "w", radius = 0.5 } }
expect = { value = "-2*pi*i" }

[[check]]
op = "theta_class"
params = { lift1 = { omega = "d[z]^d[w] : 1", nu = "d[w] : z" }, lift2 = { omega = "d[z]^d[w] : 1", nu = "d[w] : z", twist = "d[w] : -i/w" }, loops = [{ kind = "circle", coordinate = "w", radius = 0.7 }] }
expect = { value = ["2*pi*i*i"] }
)toml");
    const Report r = run_scenario(s);
    REQUIRE(r.checks.size() == 2);
    CHECK(r.checks[0].ok);
    CHECK(r.checks[1].ok);
    CHECK(r.checks[0].id == "monodromy_1");
}

TEST_CASE("print then parse is the identity on builtins")
{
    for (const auto& b : list_builtins()) {
        const Scenario s = builtin_scenario(b.name);
        const std::string printed = print_scenario(s);
        const Scenario back = parse_scenario(printed);
        CHECK_MESSAGE(back == s, b.name << "\n" << printed);
        CHECK(print_scenario(back) == printed);
    }
}

TEST_CASE("print then parse is the identity on generated scenarios")
{
    Gen g(99);
    for (int trial = 0; trial < 40; ++trial) {
        Scenario s;
        s.name = "gen" + std::to_string(trial);
        s.variables = {"z", "w"};
        s.domain.kind = "ball";
        s.domain.dim = 2;
        s.constants["a"] = std::to_string(g.integer(-5, 5));
        s.constants["b"] = "a*i + " + std::to_string(g.integer(0, 9));
        FormSpec f;
        f.as_table = true;
        f.terms = {{"d[z]^d[w]", "b + " + std::to_string(g.integer(1, 4)) + "*z"}};
        s.forms["omega"] = f;
        FormSpec t;
        t.terms = {{"", "d[w] : z*a"}};
        s.forms["nu"] = t;
        FormSpec x;
        x.terms = {{"", "d[y] : 1; d[w] : -z"}};
        x.space = "total";
        s.forms["xi"] = x;
        s.maps["m"] = MapSpec{{"z", "w"}, {"w", "z^" + std::to_string(g.integer(1, 3))}, {}};
        s.lifts["l"] = LiftSpec{"main", "omega", "nu", "0"};
        s.loops["c"] = LoopSpec{"circle", "w", g.uniform(0.1, 0.9), "0", "main"};
        s.samples.count = g.integer(1, 500);
        s.samples.seed = static_cast<std::uint64_t>(g.integer(0, 1 << 30));
        s.samples.tolerance = g.uniform(1e-12, 1e-6);
        s.output.format = "json";
        for (int k = 0; k < 3; ++k) {
            CheckSpec c;
            c.id = "c" + std::to_string(k);
            c.op = "chain_length";
            Json arr = Json::array();
            for (int j = 0; j < g.integer(1, 4); ++j)
                arr.push_back(g.uniform(0.0, 1.0));
            c.params = {{"t", arr}, {"nested", {{"x", g.integer(-100, 100)}, {"flag", g.integer(0, 1) == 1}}}};
            c.expect = {{"tol", g.uniform(0.0, 1.0)}};
            c.expect_fail = g.integer(0, 1) == 1;
            s.checks.push_back(c);
        }
        const Scenario back = parse_scenario(print_scenario(s));
        CHECK(back == s);
    }
}

TEST_CASE("every builtin runs; punctured_family has twelve passing checks")
{
    const auto names = list_builtins();
    std::vector<std::string> listed;
    for (const auto& b : names) {
        listed.push_back(b.name);
        CHECK(!b.description.empty());
    }
    for (const char* want : {"standard_box", "ball_extremal", "punctured_family", "lift_metric_equality", "pullback_demo"})
        CHECK(std::find(listed.begin(), listed.end(), want) != listed.end());
    for (const auto& b : names) {
        const Report r = run_scenario(builtin_scenario(b.name));
        CHECK_MESSAGE(exit_code(r) == 0, to_text(r));
        if (b.name == "punctured_family") {
            CHECK(r.checks.size() == 12);
            for (const auto& c : r.checks)
                CHECK(c.pass);
        }
        if (b.name == "ball_extremal") {
            const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                                         [](const CheckResult& c) { return c.error == "NotScaleSymplectic"; });
            REQUIRE(it != r.checks.end());
            CHECK(it->expected_failure);
            CHECK(it->ok);
        }
    }
}

TEST_CASE("an injected cocycle fault fails exactly that check")
{
    std::string text = builtin_text("pullback_demo");
    const auto pos = text.find("expect_fail = true");
    REQUIRE(pos != std::string::npos);
    text.erase(pos, std::string("expect_fail = true").size());
    const Report r = run_scenario(parse_scenario(text));
    int failed = 0;
    for (const auto& c : r.checks)
        if (!c.ok) {
            ++failed;
            CHECK(c.id == "broken_cocycle");
            CHECK(!c.pass);
        }
    CHECK(failed == 1);
    CHECK(exit_code(r) == 1);
}

TEST_CASE("expected failures need the declared error")
{
    const Scenario s = parse_scenario(with_checks(R"toml(
[maps]
swap = { vars = ["z", "w"], components = ["w", "2*z"] }

[[check]]
id = "wrong_kind"
op = "scale_factor"
params = { map = "swap" }
expect_error = "DegeneratePullback"

[[check]]
id = "passes_unexpectedly"
op = "chain_length"
params = { t = [0.5] }
expect_fail = true
)toml"));
    const Report r = run_scenario(s);
    REQUIRE(r.checks.size() == 3);
    CHECK(r.checks[0].ok);
    // swap* (dz^dw) = -2 dz^dw is scale symplectic, so the expected error never comes.
    CHECK(r.checks[1].pass);
    CHECK(!r.checks[1].ok);
    CHECK(!r.checks[2].ok);
    CHECK(exit_code(r) == 1);
}

TEST_CASE("reports are deterministic and round-trip through JSON")
{
    for (const auto& b : list_builtins()) {
        const Scenario s = builtin_scenario(b.name);
        const Report a = run_scenario(s);
        const Report c = run_scenario(s);
        CHECK(strip_time(to_json(a)).dump() == strip_time(to_json(c)).dump());
        const Report back = report_from_json(Json::parse(to_json(a).dump()));
        CHECK(back == a);
    }
    Report r;
    r.scenario = "inf";
    r.seed = 3;
    r.tolerance = 1e-9;
    r.samples = 4;
    CheckResult c;
    c.id = "x";
    c.op = "dist_bounds";
    c.values = {{"upper", {cplx(std::numeric_limits<double>::infinity(), 0.0)}}};
    c.residuals = {{"gap", 0.25}};
    r.checks.push_back(c);
    CHECK(report_from_json(Json::parse(to_json(r).dump())) == r);
}

TEST_CASE("overrides and output formats")
{
    const Scenario s = builtin_scenario("standard_box");
    const Report r = run_scenario(s, RunOptions{1e-9, 42, 16});
    CHECK(r.seed == 42);
    CHECK(r.samples == 16);
    CHECK(r.tolerance == 1e-9);
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("check_id,pass,max_residual,value_re,value_im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.checks.size()) + 1);
    CHECK(to_text(r).find("checks ok") != std::string::npos);
    CHECK(throws_as_kind(ErrorKind::InvalidArgument, [&] { format_report(r, "xml"); }));
}

TEST_CASE("command line exit codes")
{
    CHECK(run_tool("list") == 0);
    CHECK(run_tool("builtin standard_box --format json") == 0);
    CHECK(run_tool("builtin no_such_scenario") == 2);
    CHECK(run_tool("verify /nonexistent/file.toml") == 2);
    CHECK(run_tool("frobnicate") == 2);

    const std::string dir = std::string(HCONTACT_TMP);
    std::string text = builtin_text("pullback_demo");
    text.erase(text.find("expect_fail = true"), std::string("expect_fail = true").size());
    {
        std::ofstream os(dir + "/faulty.toml");
        os << text;
    }
    CHECK(run_tool("verify " + dir + "/faulty.toml --format csv") == 1);
    {
        std::ofstream os(dir + "/bad.toml");
        os << "name = \"bad\"\nvariables = [\"z\", \"w\"]\ndomain = { kind = \"ball\" }\n[forms]\nomega = \"d[z]^^d[w] : 1\"\n";
    }
    CHECK(run_tool("verify " + dir + "/bad.toml") == 2);
    CHECK(run_tool("builtin punctured_family --format json --out " + dir + "/pf.json") == 0);
    std::ifstream is(dir + "/pf.json");
    const Json j = Json::parse(is);
    CHECK(j["summary"]["total"] == 12);
    CHECK(j["summary"]["all_ok"] == true);
}

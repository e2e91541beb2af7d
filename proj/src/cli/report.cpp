#include "hcontact/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hcontact {

Json json_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    return x;
}

namespace {

double num_from(const Json& j, const char* what)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
    }
    throw ParseError(std::string("expected a number for ") + what, 1, 1, j.dump());
}

const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw ParseError(std::string("report lacks '") + key + "'", 1, 1, key);
    return j.at(key);
}

std::string g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

cplx primary(const CheckResult& c)
{
    if (c.values.empty() || c.values.front().second.empty())
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    return c.values.front().second.front();
}

} // namespace

double CheckResult::max_residual() const
{
    double m = 0.0;
    for (const auto& [k, v] : residuals)
        m = std::isnan(v) ? v : std::max(m, v);
    return m;
}

bool Report::all_ok() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok; });
}

Json to_json(const Report& r)
{
    Json j;
    j["scenario"] = r.scenario;
    j["seed"] = r.seed;
    j["tolerance"] = json_number(r.tolerance);
    j["samples"] = r.samples;
    j["wall_time_ms"] = json_number(r.wall_time_ms);
    Json checks = Json::array();
    int passed = 0;
    int expected = 0;
    int ok = 0;
    for (const auto& c : r.checks) {
        Json cj;
        cj["id"] = c.id;
        cj["op"] = c.op;
        cj["pass"] = c.pass;
        cj["ok"] = c.ok;
        cj["expected_failure"] = c.expected_failure;
        cj["error"] = c.error;
        cj["message"] = c.message;
        Json res = Json::object();
        for (const auto& [k, v] : c.residuals)
            res[k] = json_number(v);
        cj["residuals"] = res;
        Json vals = Json::object();
        for (const auto& [k, v] : c.values) {
            Json arr = Json::array();
            for (const auto& z : v)
                arr.push_back(Json::array({json_number(z.real()), json_number(z.imag())}));
            vals[k] = arr;
        }
        cj["values"] = vals;
        cj["certificates"] = c.certificates;
        cj["max_residual"] = json_number(c.max_residual());
        checks.push_back(cj);
        passed += c.pass;
        expected += c.expected_failure;
        ok += c.ok;
    }
    j["checks"] = checks;
    j["summary"] = {{"total", r.checks.size()},
                    {"passed", passed},
                    {"expected_failures", expected},
                    {"ok", ok},
                    {"all_ok", r.all_ok()}};
    return j;
}

Report report_from_json(const Json& j)
{
    Report r;
    r.scenario = field(j, "scenario").get<std::string>();
    r.seed = field(j, "seed").get<std::uint64_t>();
    r.tolerance = num_from(field(j, "tolerance"), "tolerance");
    r.samples = field(j, "samples").get<int>();
    r.wall_time_ms = num_from(field(j, "wall_time_ms"), "wall_time_ms");
    for (const auto& cj : field(j, "checks")) {
        CheckResult c;
        c.id = field(cj, "id").get<std::string>();
        c.op = field(cj, "op").get<std::string>();
        c.pass = field(cj, "pass").get<bool>();
        c.ok = field(cj, "ok").get<bool>();
        c.expected_failure = field(cj, "expected_failure").get<bool>();
        c.error = field(cj, "error").get<std::string>();
        c.message = field(cj, "message").get<std::string>();
        for (const auto& [k, v] : field(cj, "residuals").items())
            c.residuals.emplace_back(k, num_from(v, "residual"));
        for (const auto& [k, v] : field(cj, "values").items()) {
            std::vector<cplx> zs;
            for (const auto& z : v) {
                if (!z.is_array() || z.size() != 2)
                    throw ParseError("complex values are [re, im] pairs", 1, 1, z.dump());
                zs.emplace_back(num_from(z[0], "value"), num_from(z[1], "value"));
            }
            c.values.emplace_back(k, std::move(zs));
        }
        c.certificates = field(cj, "certificates");
        r.checks.push_back(std::move(c));
    }
    return r;
}

std::string to_csv(const Report& r)
{
    std::string out = "check_id,pass,max_residual,value_re,value_im\n";
    for (const auto& c : r.checks) {
        const cplx v = primary(c);
        out += c.id + "," + (c.pass ? "true" : "false") + "," + g17(c.max_residual()) + "," + g17(v.real()) + "," +
               g17(v.imag()) + "\n";
    }
    return out;
}

std::string to_text(const Report& r)
{
    std::ostringstream os;
    os << "scenario " << r.scenario << " (seed " << r.seed << ", tolerance " << short_num(r.tolerance) << ", "
       << r.samples << " samples)\n";
    int ok = 0;
    for (const auto& c : r.checks) {
        ok += c.ok;
        const char* tag = c.ok ? (c.expected_failure ? "XFAIL" : "PASS ") : (c.expected_failure ? "XPASS" : "FAIL ");
        os << tag << " " << c.id << " [" << c.op << "]";
        if (!c.residuals.empty())
            os << " max_residual=" << short_num(c.max_residual());
        if (!c.values.empty() && !c.values.front().second.empty())
            os << " " << c.values.front().first << "=" << format_complex(c.values.front().second.front());
        if (!c.error.empty())
            os << " error=" << c.error;
        os << "\n";
        if (!c.message.empty() && !c.ok)
            os << "      " << c.message << "\n";
    }
    os << ok << "/" << r.checks.size() << " checks ok\n";
    return os.str();
}

std::string format_report(const Report& r, const std::string& format)
{
    if (format == "json")
        return to_json(r).dump(2) + "\n";
    if (format == "csv")
        return to_csv(r);
    if (format == "text")
        return to_text(r);
    throw Error(ErrorKind::InvalidArgument, "unknown report format '" + format + "'");
}

} // namespace hcontact

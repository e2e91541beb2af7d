#pragma once

#include "hcontact/cvec.hpp"
#include "hcontact/scenario.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hcontact {

struct CheckResult {
    std::string id;
    std::string op;
    /// Outcome of the check itself.
    bool pass = false;
    /// pass, or the failure the check was declared to expect.
    bool ok = false;
    bool expected_failure = false;
    /// ErrorKind name when the operation raised, empty otherwise.
    std::string error;
    std::string message;
    /// Named residuals; the check passes only if each is below its tolerance.
    std::vector<std::pair<std::string, double>> residuals;
    /// Named complex values; the first entry of the first value is the
    /// check's primary value.
    std::vector<std::pair<std::string, std::vector<cplx>>> values;
    /// Op-specific evidence (witness summaries, flags, error residuals).
    Json certificates = Json::object();

    double max_residual() const;
    friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct Report {
    std::string scenario;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    int samples = 0;
    /// Excluded from determinism comparisons.
    double wall_time_ms = 0.0;
    std::vector<CheckResult> checks;

    bool all_ok() const;
    friend bool operator==(const Report&, const Report&) = default;
};

/// JSON number, or "inf", "-inf", "nan" for non-finite values.
Json json_number(double x);

/// Non-finite doubles are written as the strings "inf", "-inf" and "nan".
Json to_json(const Report& r);
/// Inverse of to_json; raises ParseError on a malformed document.
Report report_from_json(const Json& j);
/// One row per check: check_id, pass, max_residual, value_re, value_im.
std::string to_csv(const Report& r);
std::string to_text(const Report& r);
/// Serializes in "text", "json" or "csv".
std::string format_report(const Report& r, const std::string& format);

} // namespace hcontact

#pragma once

#include "hcontact/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hcontact {

using Json = nlohmann::ordered_json;

/// Domain record, e.g. { kind = "product", factors = [{kind = "disc"}, {kind = "punctured_disc"}] }.
/// Numeric fields not used by the kind keep their defaults.
struct DomainSpec {
    std::string kind;
    double radius = 1.0;
    int dim = 0;
    std::vector<double> radii;
    /// Box center entries as constant expressions.
    std::vector<std::string> center;
    std::vector<DomainSpec> factors;

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// A form given either as text ("d[z]^d[w] : 1") or as a table
/// { "d[z]^d[w]" = "1" }; `terms` keeps the table order.
struct FormSpec {
    std::vector<std::pair<std::string, std::string>> terms;
    bool as_table = false;
    /// "base" (scenario variables) or "total" (variables plus the fiber).
    std::string space = "base";
    /// Degree of the zero form "0"; -1 when implied by the text.
    int degree = -1;

    /// The "d[..] : expr; ..." text.
    std::string text() const;
    friend bool operator==(const FormSpec&, const FormSpec&) = default;
};

/// Holomorphic map given by component expressions, or a composition of named
/// maps applied right to left.
struct MapSpec {
    std::vector<std::string> vars;
    std::vector<std::string> components;
    std::vector<std::string> compose;

    friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

/// Lift over a named domain ("main" is the scenario domain). omega, nu and
/// twist are names in [forms] or inline form text.
struct LiftSpec {
    std::string base = "main";
    std::string omega;
    std::string nu;
    std::string twist;

    friend bool operator==(const LiftSpec&, const LiftSpec&) = default;
};

/// { kind = "circle", coordinate = "w", radius = 0.5, center = "0" }.
struct LoopSpec {
    std::string kind = "circle";
    std::string coordinate;
    double radius = 0.5;
    std::string center = "0";
    std::string base = "main";

    friend bool operator==(const LoopSpec&, const LoopSpec&) = default;
};

/// { kind = "punctured_sectors", c = "1", defect = "z" }: the three-sector
/// atlas of the twisted lift, with `defect` added to the first transition.
struct AtlasSpec {
    std::string kind = "punctured_sectors";
    std::string c = "0";
    std::string defect;
    int samples = 64;

    friend bool operator==(const AtlasSpec&, const AtlasSpec&) = default;
};

struct SampleSpec {
    int count = 64;
    std::uint64_t seed = 1;
    double tolerance = 1e-9;
    double margin = 1e-2;

    friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

struct OutputSpec {
    std::string format = "text";
    std::string path;

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

/// Structural equality that ignores the order of object keys (TOML tables
/// are unordered).
bool same_json(const Json& a, const Json& b);

struct CheckSpec {
    std::string id;
    std::string op;
    /// The check is expected to fail (optionally with this error kind).
    bool expect_fail = false;
    std::string expect_error;
    Json params = Json::object();
    Json expect = Json::object();
    /// Source line of the [[check]] header, 0 when built in code.
    int line = 0;

    friend bool operator==(const CheckSpec& a, const CheckSpec& b)
    {
        return a.id == b.id && a.op == b.op && a.expect_fail == b.expect_fail && a.expect_error == b.expect_error &&
               same_json(a.params, b.params) && same_json(a.expect, b.expect);
    }
};

struct Scenario {
    std::string name;
    std::string description;
    std::vector<std::string> variables;
    std::string fiber = "y";
    /// Named constants as expressions in earlier constants.
    std::map<std::string, std::string> constants;
    DomainSpec domain;
    std::map<std::string, DomainSpec> domains;
    std::map<std::string, FormSpec> forms;
    std::map<std::string, MapSpec> maps;
    std::map<std::string, LiftSpec> lifts;
    std::map<std::string, LoopSpec> loops;
    std::map<std::string, AtlasSpec> atlases;
    SampleSpec samples;
    OutputSpec output;
    std::vector<CheckSpec> checks;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses the TOML scenario format documented in the README. Raises
/// ParseError (line, column, token) for syntax errors, malformed expressions
/// and forms; UnknownName for dangling references and unknown operations;
/// ArityMismatch for maps whose variables do not fit.
Scenario parse_scenario(std::string_view text, std::string_view origin = "scenario");

/// TOML text that parses back to an equal scenario.
std::string print_scenario(const Scenario& s);

/// Operations accepted in [[check]] records.
const std::vector<std::string>& known_operations();

} // namespace hcontact

#pragma once

#include "hcontact/report.hpp"
#include "hcontact/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hcontact {

/// Command-line overrides of the scenario's [samples] record.
struct RunOptions {
    std::optional<double> tolerance;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
};

/// Resolves every check first (configuration errors raise before any check
/// runs), then executes the checks in declaration order. A failing check is
/// recorded and the run continues.
Report run_scenario(const Scenario& s, const RunOptions& opts = {});

/// 0 iff every check is ok, 1 otherwise.
int exit_code(const Report& r);

struct BuiltinInfo {
    std::string name;
    std::string description;
};

std::vector<BuiltinInfo> list_builtins();
/// TOML text of a built-in scenario. Raises UnknownName.
std::string builtin_text(const std::string& name);
Scenario builtin_scenario(const std::string& name);

} // namespace hcontact

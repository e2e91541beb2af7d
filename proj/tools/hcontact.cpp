#include "hcontact/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hcontact;

struct Flags {
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::string format;
    std::string out;
};

void add_flags(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--tol", f.tol, "default tolerance");
    cmd->add_option("--seed", f.seed, "sample seed");
    cmd->add_option("--samples", f.samples, "default sample count")->check(CLI::PositiveNumber);
    cmd->add_option("--format", f.format, "report format")->check(CLI::IsMember({"text", "json", "csv"}));
    cmd->add_option("--out", f.out, "write the report to this file");
}

// Returns the process exit code.
int run(const Scenario& s, const Flags& f)
{
    const Report r = run_scenario(s, RunOptions{f.tol, f.seed, f.samples});
    const std::string format = f.format.empty() ? s.output.format : f.format;
    const std::string path = f.out.empty() ? s.output.path : f.out;
    const std::string text = format_report(r, format);
    if (path.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(path);
        if (!os)
            throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
        os << text;
        if (format != "text")
            std::cout << to_text(r);
    }
    return exit_code(r);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical checks for holomorphic contact structures and their lifts"};
    app.require_subcommand(1);

    Flags flags;
    std::string file;
    auto* verify = app.add_subcommand("verify", "run a scenario file");
    verify->add_option("file", file, "scenario (TOML)")->required();
    add_flags(verify, flags);

    std::string name;
    auto* builtin = app.add_subcommand("builtin", "run a built-in scenario");
    builtin->add_option("name", name, "scenario name (see list)")->required();
    add_flags(builtin, flags);

    auto* list = app.add_subcommand("list", "list built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& b : list_builtins())
                std::cout << b.name << "  " << b.description << "\n";
            return 0;
        }
        if (verify->parsed()) {
            std::ifstream is(file);
            if (!is) {
                std::cerr << "error: cannot read " << file << "\n";
                return 2;
            }
            std::stringstream ss;
            ss << is.rdbuf();
            return run(parse_scenario(ss.str(), file), flags);
        }
        return run(builtin_scenario(name), flags);
    } catch (const Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
}

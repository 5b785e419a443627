#ifndef RESET_RUIN_CLI_HPP
#define RESET_RUIN_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reset_ruin/montecarlo.hpp"

namespace reset_ruin::cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Command { exact, spectral, mc, table, derivative, critical, sweep, validate };
enum class OutputFormat { csv, json };

struct RunSpec {
    Command command = Command::exact;
    std::optional<int> a;
    std::optional<int> z;
    std::optional<double> p;
    std::optional<double> gamma;
    std::vector<double> gammas;
    std::vector<double> ps;
    std::optional<OutputFormat> format; ///< unset: json for critical/validate, csv otherwise
    std::optional<std::string> preset;
    std::optional<std::string> out;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t n_sim = kDefaultTrajectories;
};

/// One line of the shared output schema a,z,p,gamma,method,value,stderr,seed.
struct ResultRow {
    std::optional<int> a;
    std::optional<int> z;
    std::optional<double> p;
    std::optional<double> gamma;
    std::string method;
    double value = 0.0;
    std::optional<double> std_error;
    std::optional<std::uint64_t> seed;
};

struct Check {
    std::string name;
    double tolerance;
    double observed;
    bool pass;
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<Check> checks;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool all_checks_pass() const;
};

std::string to_string(Command command);
OutputFormat effective_format(const RunSpec& spec);

/// Flat key=value lines; '#' starts a comment. Keys use the flag names
/// without dashes (a, z, p, gamma, gammas, ps, n-sim, seed, format, preset, out).
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Fills every field of `spec` named in `values` unless `given` says the
/// matching flag was passed on the command line.
void apply_config(RunSpec& spec, const std::map<std::string, std::string>& values,
                  const std::map<std::string, bool>& given);

RunResult execute(const RunSpec& spec);
std::string render(const RunSpec& spec, const RunResult& result);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_atomically(const std::string& path, const std::string& contents);

/// Parses argv and runs. Exit status: 0 success, 1 failed check or numeric
/// failure, 2 usage error.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace reset_ruin::cli

#endif // RESET_RUIN_CLI_HPP

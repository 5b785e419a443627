#include "reset_ruin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "reset_ruin/critical.hpp"
#include "reset_ruin/numdiff.hpp"
#include "reset_ruin/oracle.hpp"
#include "reset_ruin/renewal.hpp"
#include "reset_ruin/spectral.hpp"

namespace reset_ruin::cli {

namespace {

using Json = nlohmann::ordered_json;

// Ten significant digits, shared by CSV text and JSON numbers.
std::string format_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

double rounded(double x) { return std::stod(format_number(x)); }

int require_int(const std::optional<int>& v, const char* flag)
{
    if (!v)
        throw UsageError(std::string("missing required flag --") + flag);
    return *v;
}

double require_real(const std::optional<double>& v, const char* flag)
{
    if (!v)
        throw UsageError(std::string("missing required flag --") + flag);
    return *v;
}

struct Series {
    double p;
    double gamma;
};

struct Preset {
    int a;
    std::vector<Series> series;
};

std::optional<Preset> find_preset(Command command, const std::string& name)
{
    const std::vector<double> table_gammas{0.3, 0.6, 0.9};
    const std::vector<double> figure_gammas{0.0, 0.3, 0.6, 0.9};
    auto grid = [](double p, const std::vector<double>& gammas) {
        std::vector<Series> s;
        for (double g : gammas)
            s.push_back({p, g});
        return s;
    };
    const std::vector<Series> derivative_series{
        {0.5, 0.3}, {0.5, 0.6}, {0.5, 0.9}, {0.4, 0.3}, {0.6, 0.3}};

    if (command == Command::table && name == "paper-table-1")
        return Preset{5, grid(0.6, table_gammas)};
    if (command == Command::table && name == "paper-table-2")
        return Preset{5, grid(0.5, table_gammas)};
    if (command == Command::sweep && name == "paper-fig-2")
        return Preset{5, grid(0.6, figure_gammas)};
    if (command == Command::sweep && name == "paper-fig-3")
        return Preset{5, grid(0.5, figure_gammas)};
    if (command == Command::derivative && name == "paper-fig-4")
        return Preset{10, derivative_series};
    if (command == Command::derivative && name == "paper-fig-5")
        return Preset{11, derivative_series};
    return std::nullopt;
}

/// Preset if given, else --a with the cross product of (--p | --ps) and (--gamma | --gammas).
Preset resolve_grid(const RunSpec& spec)
{
    if (spec.preset) {
        auto preset = find_preset(spec.command, *spec.preset);
        if (!preset)
            throw UsageError("unknown preset '" + *spec.preset + "' for command " +
                             to_string(spec.command));
        return *preset;
    }
    Preset out{require_int(spec.a, "a"), {}};
    std::vector<double> ps = spec.ps;
    if (ps.empty())
        ps.push_back(require_real(spec.p, "p"));
    std::vector<double> gammas = spec.gammas;
    if (gammas.empty())
        gammas.push_back(require_real(spec.gamma, "gamma"));
    for (double p : ps)
        for (double g : gammas)
            out.series.push_back({p, g});
    return out;
}

WalkConfig<double> single_config(const RunSpec& spec)
{
    return WalkConfig<double>(require_int(spec.a, "a"), require_int(spec.z, "z"),
                              require_real(spec.p, "p"), require_real(spec.gamma, "gamma"));
}

ResultRow row(const WalkConfig<double>& c, std::string method, double value)
{
    return {c.a(), c.z(), c.p(), c.gamma(), std::move(method), value, std::nullopt, std::nullopt};
}

void run_table(const RunSpec& spec, RunResult& result)
{
    const Preset grid = resolve_grid(spec);
    const int a = grid.a;
    for (int z = 0; z <= a; ++z) {
        for (const auto& s : grid.series) {
            ResultRow theory{a, z, s.p, s.gamma, "spectral", 0.0, std::nullopt, std::nullopt};
            ResultRow mc{a, z, s.p, s.gamma, "mc", 0.0, 0.0, spec.seed};
            if (z == 0 || z == a) {
                theory.value = mc.value = z == 0 ? 1.0 : 0.0;
            } else {
                const WalkConfig<double> c(a, z, s.p, s.gamma);
                theory.value = ruin_probability_spectral(c);
                const auto est = estimate_ruin(c, spec.n_sim, spec.seed);
                mc.value = est.p_hat;
                mc.std_error = est.std_error;
            }
            result.rows.push_back(theory);
            result.rows.push_back(mc);
        }
    }
}

void run_sweep(const RunSpec& spec, RunResult& result)
{
    const Preset grid = resolve_grid(spec);
    const int a = grid.a;
    for (const auto& s : grid.series) {
        for (int z = 0; z <= a; ++z) {
            double value = z == 0 ? 1.0 : 0.0;
            if (z > 0 && z < a)
                value = s.gamma == 0.0 ? classical_ruin(a, z, s.p)
                                       : ruin_probability_spectral(WalkConfig<double>(a, z, s.p, s.gamma));
            result.rows.push_back({a, z, s.p, s.gamma, s.gamma == 0.0 ? "classical" : "spectral",
                                   value, std::nullopt, std::nullopt});
        }
    }
}

void run_derivative(const RunSpec& spec, RunResult& result)
{
    if (!spec.preset && spec.z) {
        const auto c = single_config(spec);
        result.rows.push_back(row(c, "derivative", derivative(c).h));
        return;
    }
    const Preset grid = resolve_grid(spec);
    for (const auto& s : grid.series)
        for (int z = 1; z < grid.a; ++z) {
            const WalkConfig<double> c(grid.a, z, s.p, s.gamma);
            result.rows.push_back(row(c, "derivative", derivative(c).h));
        }
}

void run_critical(const RunSpec& spec, RunResult& result)
{
    const int a = require_int(spec.a, "a");
    const double p = require_real(spec.p, "p");
    const double gamma = require_real(spec.gamma, "gamma");
    const auto report = sign_change(a, p, gamma);
    for (int z = 1; z < a; ++z)
        result.rows.push_back({a, z, p, gamma, "derivative", report.h(z), report.h_errors[z - 1],
                               std::nullopt});
    result.rows.push_back({a, std::nullopt, p, gamma, "z_cross", report.z_cross, std::nullopt,
                           std::nullopt});

    Json critical = Json::object();
    critical["z_dagger"] = report.exact_zero_site ? Json(*report.exact_zero_site)
                                                  : Json(rounded(report.z_cross));
    critical["bracket"] = {report.bracket.first, report.bracket.second};
    critical["exact_zero_site"] =
        report.exact_zero_site ? Json(*report.exact_zero_site) : Json(nullptr);
    critical["z_cross"] = rounded(report.z_cross);
    critical["z_cross_convention"] = "linear interpolation between adjacent integer sites";
    critical["midpoint_exact"] = report.midpoint_exact;
    critical["unresolved_sites"] = report.unresolved_sites;
    result.extra["critical"] = critical;

    result.checks.push_back({"one_sign_change", 0.0, 1.0, true});
    result.checks.push_back({"h_first_positive", 0.0, report.h(1), report.first_positive});
    result.checks.push_back({"h_last_negative", 0.0, report.h(a - 1), report.last_negative});
    if (a % 2 == 0)
        result.checks.push_back({"midpoint_exact_zero", kExactZeroTolerance,
                                 std::abs(report.h(a / 2)), report.midpoint_exact});
}

template <typename Fn>
double max_over_grid(int a_max, const std::vector<double>& ps, const std::vector<double>& gammas,
                     Fn&& deviation)
{
    double worst = 0.0;
    for (int a = 2; a <= a_max; ++a)
        for (int z = 1; z < a; ++z)
            for (double p : ps)
                for (double g : gammas)
                    worst = std::max(worst, deviation(WalkConfig<double>(a, z, p, g)));
    return worst;
}

Check make_check(std::string name, double tolerance, double observed)
{
    return {std::move(name), tolerance, observed, observed <= tolerance};
}

// Theory columns of the a = 5 reference tables, z = 1..4 by gamma = 0.3, 0.6, 0.9.
constexpr double kPrintedBiased[4][3] = {
    {0.8731, 0.9780, 0.9997}, {0.4829, 0.6404, 0.8808}, {0.1236, 0.0689, 0.0175}, {0.0188, 0.0029, 0.0000}};
constexpr double kPrintedSymmetric[4][3] = {
    {0.9463, 0.9914, 0.9999}, {0.7149, 0.8276, 0.9523}, {0.2851, 0.1724, 0.0477}, {0.0537, 0.0086, 0.0001}};

double printed_table_deviation(double p, const double (&printed)[4][3])
{
    const double gammas[3] = {0.3, 0.6, 0.9};
    double worst = 0.0;
    for (int z = 1; z <= 4; ++z)
        for (int j = 0; j < 3; ++j) {
            const WalkConfig<double> c(5, z, p, gammas[j]);
            worst = std::max({worst, std::abs(ruin_probability_spectral(c) - printed[z - 1][j]),
                              std::abs(exact_ruin(c) - printed[z - 1][j])});
        }
    return worst;
}

void run_validate(RunResult& result)
{
    const std::vector<double> ps{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    const std::vector<double> gammas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

    result.checks.push_back(make_check(
        "spectral_vs_linear_solve", 1e-10, max_over_grid(30, ps, gammas, [](const auto& c) {
            return std::abs(ruin_probability_spectral(c) - exact_ruin(c));
        })));
    result.checks.push_back(make_check(
        "renewal_vs_spectral", 1e-12, max_over_grid(30, ps, gammas, [](const auto& c) {
            return std::abs(ruin_probability_renewal(c) - ruin_probability_spectral(c));
        })));
    result.checks.push_back(make_check(
        "gamma0_vs_classical", 1e-10, max_over_grid(20, ps, {0.0}, [](const auto& c) {
            return std::abs(ruin_probability_spectral(c) - classical_ruin(c.a(), c.z(), c.p()));
        })));
    result.checks.push_back(make_check(
        "reflection_symmetry", 1e-10, max_over_grid(30, ps, gammas, [](const auto& c) {
            const WalkConfig<double> mirror(c.a(), c.a() - c.z(), 1.0 - c.p(), c.gamma());
            return std::abs(ruin_probability_spectral(c) + ruin_probability_spectral(mirror) - 1.0);
        })));

    std::vector<double> fine_gammas;
    for (int i = 1; i <= 99; ++i)
        fine_gammas.push_back(i / 100.0);
    double flat = 0.0;
    for (int a : {2, 4, 10, 20, 50})
        flat = std::max(flat, midpoint_invariance_sweep<double>(a, ps, fine_gammas));
    result.checks.push_back(make_check("midpoint_flatness", 1e-10, flat));

    double finite_time = 0.0;
    for (int a = 2; a <= 12; ++a)
        for (int z = 1; z < a; ++z)
            for (double p : ps) {
                const auto spectral = finite_time_spectral(WalkConfig<double>(a, z, p, 0.0), 60);
                const auto dp = finite_time_dp(a, z, p, 60);
                for (std::size_t k = 0; k < 60; ++k)
                    finite_time = std::max({finite_time, std::abs(spectral.u[k] - dp.u[k]),
                                            std::abs(spectral.v[k] - dp.v[k])});
            }
    result.checks.push_back(make_check("finite_time_vs_propagation", 1e-12, finite_time));

    double asym = 0.0;
    double eig = 0.0;
    for (int a = 2; a <= 20; ++a)
        for (int i = 1; i <= 9; ++i) {
            const double p = i / 10.0;
            asym = std::max(asym, doob_symmetry_check(a, p));
            const auto values = doob_eigenvalues(a, p);
            for (int nu = 1; nu < a; ++nu)
                eig = std::max(eig, std::abs(values(nu - 1) - eigenvalue(a, p, nu)));
        }
    result.checks.push_back(make_check("doob_symmetry", 1e-13, asym));
    result.checks.push_back(make_check("doob_eigenvalues", 1e-12, eig));

    // Relative error on resolvable values; below the difference quotient's
    // rounding floor the comparison is absolute.
    double deriv = 0.0;
    const double floor = central_difference_noise<double>();
    for (int a : {5, 10, 11, 20})
        for (int z = 1; z < a; ++z)
            for (double p : {0.4, 0.5, 0.6})
                for (double g : {0.1, 0.3, 0.6, 0.9}) {
                    const WalkConfig<double> c(a, z, p, g);
                    const double h = derivative(c).h;
                    const double fd = gamma_central_difference(
                        c, [](const auto& cc) { return exact_ruin(cc); });
                    deriv = std::max(deriv, std::abs(h - fd) / std::max(std::abs(fd), floor * 1e6));
                }
    result.checks.push_back(make_check("derivative_vs_finite_difference", 1e-6, deriv));

    result.checks.push_back(
        make_check("printed_table_biased", 5e-5, printed_table_deviation(0.6, kPrintedBiased)));
    result.checks.push_back(make_check("printed_table_symmetric", 5e-5,
                                       printed_table_deviation(0.5, kPrintedSymmetric)));
}

void emit_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    os << "a,z,p,gamma,method,value,stderr,seed\n";
    for (const auto& r : rows) {
        if (r.a)
            os << *r.a;
        os << ',';
        if (r.z)
            os << *r.z;
        os << ',';
        if (r.p)
            os << format_number(*r.p);
        os << ',';
        if (r.gamma)
            os << format_number(*r.gamma);
        os << ',' << r.method << ',' << format_number(r.value) << ',';
        if (r.std_error)
            os << format_number(*r.std_error);
        os << ',';
        if (r.seed)
            os << *r.seed;
        os << '\n';
    }
}

template <typename T>
Json optional_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(rounded(*v)) : Json(nullptr);
}

Json spec_json(const RunSpec& spec)
{
    Json j = Json::object();
    j["command"] = to_string(spec.command);
    j["a"] = optional_json(spec.a);
    j["z"] = optional_json(spec.z);
    j["p"] = optional_number(spec.p);
    j["gamma"] = optional_number(spec.gamma);
    j["ps"] = spec.ps;
    j["gammas"] = spec.gammas;
    j["n_sim"] = spec.n_sim;
    j["seed"] = spec.seed;
    j["format"] = effective_format(spec) == OutputFormat::csv ? "csv" : "json";
    j["preset"] = optional_json(spec.preset);
    return j;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    try {
        const auto v = std::stoull(text, &used);
        if (used == text.size())
            return v;
    } catch (const std::exception&) {
    }
    throw UsageError("config key '" + key + "' needs a non-negative integer, got '" + text + "'");
}

double parse_real(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    try {
        const double v = std::stod(text, &used);
        if (used == text.size())
            return v;
    } catch (const std::exception&) {
    }
    throw UsageError("config key '" + key + "' needs a number, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_real(key, item));
    if (out.empty())
        throw UsageError("config key '" + key + "' needs a non-empty list");
    return out;
}

OutputFormat parse_format(const std::string& text)
{
    if (text == "csv")
        return OutputFormat::csv;
    if (text == "json")
        return OutputFormat::json;
    throw UsageError("format must be csv or json, got '" + text + "'");
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

bool RunResult::all_checks_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string to_string(Command command)
{
    switch (command) {
    case Command::exact: return "exact";
    case Command::spectral: return "spectral";
    case Command::mc: return "mc";
    case Command::table: return "table";
    case Command::derivative: return "derivative";
    case Command::critical: return "critical";
    case Command::sweep: return "sweep";
    case Command::validate: return "validate";
    }
    return "unknown";
}

OutputFormat effective_format(const RunSpec& spec)
{
    if (spec.format)
        return *spec.format;
    return spec.command == Command::critical || spec.command == Command::validate
               ? OutputFormat::json
               : OutputFormat::csv;
}

std::map<std::string, std::string> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> values;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return values;
}

void apply_config(RunSpec& spec, const std::map<std::string, std::string>& values,
                  const std::map<std::string, bool>& given)
{
    auto flagged = [&](const std::string& key) {
        const auto it = given.find(key);
        return it != given.end() && it->second;
    };
    for (const auto& [key, text] : values) {
        if (flagged(key))
            continue;
        if (key == "a")
            spec.a = static_cast<int>(parse_u64(key, text));
        else if (key == "z")
            spec.z = static_cast<int>(parse_u64(key, text));
        else if (key == "p")
            spec.p = parse_real(key, text);
        else if (key == "gamma")
            spec.gamma = parse_real(key, text);
        else if (key == "gammas")
            spec.gammas = parse_list(key, text);
        else if (key == "ps")
            spec.ps = parse_list(key, text);
        else if (key == "n-sim")
            spec.n_sim = parse_u64(key, text);
        else if (key == "seed")
            spec.seed = parse_u64(key, text);
        else if (key == "format")
            spec.format = parse_format(text);
        else if (key == "preset")
            spec.preset = text;
        else if (key == "out")
            spec.out = text;
        else
            throw UsageError("unknown config key '" + key + "'");
    }
}

RunResult execute(const RunSpec& spec)
{
    if (spec.n_sim < 1)
        throw UsageError("--n-sim must be >= 1");
    RunResult result;
    switch (spec.command) {
    case Command::exact: {
        const auto c = single_config(spec);
        result.rows.push_back(row(c, "exact", exact_ruin(c)));
        break;
    }
    case Command::spectral: {
        const auto c = single_config(spec);
        result.rows.push_back(row(c, "spectral", ruin_probability_spectral(c)));
        break;
    }
    case Command::mc: {
        const auto c = single_config(spec);
        const auto est = estimate_ruin(c, spec.n_sim, spec.seed);
        ResultRow r = row(c, "mc", est.p_hat);
        r.std_error = est.std_error;
        r.seed = spec.seed;
        result.rows.push_back(r);
        result.extra["mean_steps"] = rounded(est.mean_steps);
        result.extra["mean_resets"] = rounded(est.mean_resets);
        break;
    }
    case Command::table: run_table(spec, result); break;
    case Command::derivative: run_derivative(spec, result); break;
    case Command::critical: run_critical(spec, result); break;
    case Command::sweep: run_sweep(spec, result); break;
    case Command::validate: run_validate(result); break;
    }
    return result;
}

std::string render(const RunSpec& spec, const RunResult& result)
{
    std::ostringstream os;
    if (effective_format(spec) == OutputFormat::csv) {
        std::vector<ResultRow> rows = result.rows;
        for (const auto& c : result.checks)
            rows.push_back({std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                            "check:" + c.name + (c.pass ? ":pass" : ":fail"), c.observed,
                            std::nullopt, std::nullopt});
        emit_csv(os, rows);
        return os.str();
    }

    Json doc = Json::object();
    doc["spec"] = spec_json(spec);
    Json rows = Json::array();
    for (const auto& r : result.rows) {
        Json j = Json::object();
        j["a"] = optional_json(r.a);
        j["z"] = optional_json(r.z);
        j["p"] = optional_number(r.p);
        j["gamma"] = optional_number(r.gamma);
        j["method"] = r.method;
        j["value"] = rounded(r.value);
        j["stderr"] = optional_number(r.std_error);
        j["seed"] = optional_json(r.seed);
        rows.push_back(j);
    }
    doc["results"] = rows;
    Json checks = Json::array();
    for (const auto& c : result.checks)
        checks.push_back({{"name", c.name},
                          {"tolerance", rounded(c.tolerance)},
                          {"observed", rounded(c.observed)},
                          {"pass", c.pass}});
    doc["checks"] = checks;
    for (const auto& [key, value] : result.extra.items())
        doc[key] = value;
    return doc.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path temp = target;
    temp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open '" + temp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out)
            throw std::runtime_error("write to '" + temp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp);
        throw std::runtime_error("cannot move output into '" + path + "': " + ec.message());
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunSpec spec;
    std::string config_path;
    std::string format_text;

    CLI::App app{"Ruin probabilities of a biased random walk under geometric resetting"};
    app.require_subcommand(1);

    struct Bound {
        Command command;
        CLI::App* sub;
        std::map<std::string, CLI::Option*> options;
    };
    std::vector<Bound> subs;
    const std::vector<std::pair<Command, const char*>> commands{
        {Command::exact, "ruin probability from the dense linear solve"},
        {Command::spectral, "ruin probability from the spectral formula"},
        {Command::mc, "Monte Carlo ruin estimate"},
        {Command::table, "theory and Monte Carlo table over z (presets paper-table-1, paper-table-2)"},
        {Command::derivative, "gamma-derivative of the ruin probability (presets paper-fig-4, paper-fig-5)"},
        {Command::critical, "sign-change analysis of the derivative over z"},
        {Command::sweep, "ruin probability over z for a gamma grid (presets paper-fig-2, paper-fig-3)"},
        {Command::validate, "three-route cross-check with tolerances; exit 1 on any failure"},
    };
    for (const auto& [command, help] : commands) {
        Bound b{command, app.add_subcommand(to_string(command), help), {}};
        auto* s = b.sub;
        b.options["a"] = s->add_option("--a", spec.a, "domain size");
        b.options["z"] = s->add_option("--z", spec.z, "start site");
        b.options["p"] = s->add_option("--p", spec.p, "right-step probability");
        b.options["gamma"] = s->add_option("--gamma", spec.gamma, "per-step reset probability");
        b.options["gammas"] = s->add_option("--gammas", spec.gammas, "comma-separated gamma grid")
                                  ->delimiter(',');
        b.options["ps"] = s->add_option("--ps", spec.ps, "comma-separated p grid")->delimiter(',');
        b.options["n-sim"] = s->add_option("--n-sim", spec.n_sim, "trajectories per Monte Carlo cell");
        b.options["seed"] = s->add_option("--seed", spec.seed, "64-bit Monte Carlo seed");
        b.options["format"] = s->add_option("--format", format_text, "csv or json")
                                  ->check(CLI::IsMember({"csv", "json"}));
        b.options["preset"] = s->add_option("--preset", spec.preset, "named parameter set");
        b.options["out"] = s->add_option("--out", spec.out, "write output to this file");
        s->add_option("--config", config_path, "key=value file; flags override it");
        subs.push_back(std::move(b));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        const auto chosen = std::find_if(subs.begin(), subs.end(),
                                         [](const Bound& b) { return b.sub->parsed(); });
        spec.command = chosen->command;
        if (!format_text.empty())
            spec.format = parse_format(format_text);
        if (!config_path.empty()) {
            std::map<std::string, bool> given;
            for (const auto& [key, option] : chosen->options)
                given[key] = option->count() > 0;
            apply_config(spec, read_config_file(config_path), given);
        }

        const RunResult result = execute(spec);
        const std::string text = render(spec, result);
        if (spec.out)
            write_atomically(*spec.out, text);
        else
            out << text;

        for (const auto& c : result.checks)
            if (!c.pass)
                err << "FAIL " << c.name << ": observed " << format_number(c.observed)
                    << ", tolerance " << format_number(c.tolerance) << "\n";
        return result.all_checks_pass() ? 0 : 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const StructuralViolation& e) {
        err << "structural violation: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace reset_ruin::cli

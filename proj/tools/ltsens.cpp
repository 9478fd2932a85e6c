// Command-line front end: each subcommand loads a JSON config, calls the
// library and writes the library's serialization unchanged.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ltsens/coefficients.hpp"
#include "ltsens/config.hpp"
#include "ltsens/report.hpp"
#include "ltsens/sensitivities.hpp"
#include "ltsens/simulation.hpp"
#include "ltsens/verify.hpp"

namespace {

using namespace ltsens;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions
{
    std::string config;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--config", o.config, "JSON run configuration")->required();
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", o.seed, "overrides sim.seed");
    cmd->add_option("--workers", o.workers, "worker threads for simulation");
}

struct Loaded
{
    RunConfig cfg;
    OutputFormat format;
    std::optional<std::string> out;
};

Loaded load(const CommonOptions& o)
{
    RunConfig cfg = load_config(o.config);
    if (cfg.sim)
    {
        if (o.seed)
            cfg.sim->seed = *o.seed;
        if (o.workers)
            cfg.sim->workers = *o.workers;
    }
    Loaded l{std::move(cfg), OutputFormat::json, std::nullopt};
    l.format = o.format.empty() ? l.cfg.format : output_format_from_string(o.format);
    if (!o.out.empty())
        l.out = o.out;
    else
        l.out = l.cfg.output_path;
    return l;
}

void emit(const Loaded& l, const std::string& text)
{
    std::string body = text;
    if (body.empty() || body.back() != '\n')
        body += '\n';
    if (l.out)
    {
        std::ofstream f(*l.out, std::ios::binary);
        if (!f)
            throw ConfigError("cannot write output file '" + *l.out + "'");
        f << body;
    }
    else
    {
        std::cout << body;
    }
}

std::string render(const Loaded& l, const Json& j)
{
    return l.format == OutputFormat::json ? dump_json(j) : flat_object_csv(j);
}

SimConfig require_sim(const RunConfig& cfg, const char* cmd)
{
    if (!cfg.sim)
        throw ConfigError(std::string(cmd) + " needs a 'sim' block in the config");
    return *cfg.sim;
}

int cmd_eigenpair(const CommonOptions& o)
{
    const auto l = load(o);
    emit(l, render(l, eigenpair_json(l.cfg.model)));
    return kExitOk;
}

int cmd_value(const CommonOptions& o)
{
    const auto l = load(o);
    const auto& m = l.cfg.model;
    emit(l, render(l, value_json(m, m.initial_factor(), l.cfg.horizon)));
    return kExitOk;
}

int cmd_riccati(const CommonOptions& o)
{
    const auto l = load(o);
    const auto grid = uniform_grid(l.cfg.horizon, l.cfg.grid_points - 1);
    const auto path = coefficient_path(l.cfg.model, grid);
    emit(l, l.format == OutputFormat::json ? dump_json(coefficient_path_json(path))
                                           : coefficient_path_csv(path));
    return kExitOk;
}

int cmd_sensitivities(const CommonOptions& o)
{
    const auto l = load(o);
    const auto report = long_term_sensitivities(l.cfg.model);
    emit(l, l.format == OutputFormat::json ? dump_json(sensitivities_json(report))
                                           : sensitivities_csv(report));
    for (const auto& e : report.entries)
        if (e.flagged)
            std::cerr << "flagged: " << e.name << " printed " << format_double(e.closed_form)
                      << " oracle " << format_double(e.fd_check) << '\n';
    return report.any_flagged() ? kExitFailure : kExitOk;
}

int cmd_diagnose(const CommonOptions& o)
{
    const auto l = load(o);
    if (!l.cfg.sweep || l.cfg.sweep->parameter.empty())
        throw ConfigError("diagnose needs sweep.parameter");
    std::vector<double> horizons = l.cfg.sweep->horizons;
    if (horizons.empty())
        horizons = {5.0, 10.0, 25.0, 50.0};
    const SimConfig* sim = l.cfg.sim ? &*l.cfg.sim : nullptr;
    const auto rows = convergence_diagnostic(l.cfg.model, l.cfg.sweep->parameter, horizons, sim);
    emit(l, l.format == OutputFormat::json
                ? dump_json(diagnostic_json(l.cfg.sweep->parameter, rows))
                : diagnostic_csv(rows));
    return kExitOk;
}

int cmd_simulate(const CommonOptions& o)
{
    const auto l = load(o);
    const auto sim = require_sim(l.cfg, "simulate");
    const auto& m = l.cfg.model;
    if (m.kind() == ModelKind::ou_complete)
    {
        const auto est = simulate_phat_value(m, m.initial_factor(), sim);
        emit(l, render(l, value_estimate_json(m, m.initial_factor(), sim, est)));
        return kExitOk;
    }
    std::vector<double> horizons;
    if (l.cfg.sweep && !l.cfg.sweep->horizons.empty())
        horizons = l.cfg.sweep->horizons;
    else
        horizons = {sim.T};
    std::vector<DecompositionResult> results;
    for (double T : horizons)
    {
        SimConfig c = sim;
        c.T = T;
        results.push_back(decomposition_check(m, m.initial_factor(), c));
    }
    bool pass = true;
    for (const auto& r : results)
        pass = pass && r.pass;
    if (l.format == OutputFormat::csv)
        emit(l, decomposition_csv(results));
    else if (results.size() == 1)
        emit(l, dump_json(decomposition_json(results.front())));
    else
    {
        Json arr = Json::array();
        for (const auto& r : results)
            arr.push_back(decomposition_json(r));
        emit(l, dump_json(arr));
    }
    return pass ? kExitOk : kExitFailure;
}

int cmd_verify(const CommonOptions& o)
{
    const auto l = load(o);
    const auto sim = require_sim(l.cfg, "verify");
    const auto report = run_verify(l.cfg.model, sim);
    for (const auto& c : report.checks)
        std::cerr << to_string(c.status) << "  " << c.name << ": " << c.summary << '\n';
    emit(l, dump_json(verify_json(report)));
    return report.all_pass() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Long-horizon utility, eigenpairs and sensitivities"};
    app.require_subcommand(1);
    CommonOptions opts;
    struct Entry
    {
        const char* name;
        const char* help;
        int (*run)(const CommonOptions&);
    };
    const Entry entries[] = {
        {"eigenpair", "recurrent eigenpair and derived constants", cmd_eigenpair},
        {"value", "finite-horizon dual value and utility", cmd_value},
        {"riccati", "coefficient paths beta, gamma, Lambda", cmd_riccati},
        {"sensitivities", "long-term sensitivities vs lambda oracle", cmd_sensitivities},
        {"diagnose", "finite-horizon convergence table", cmd_diagnose},
        {"simulate", "Monte Carlo decomposition check", cmd_simulate},
        {"verify", "full verification suite", cmd_verify},
    };
    int (*selected)(const CommonOptions&) = nullptr;
    for (const auto& e : entries)
    {
        auto* cmd = app.add_subcommand(e.name, e.help);
        add_common(cmd, opts);
        cmd->callback([&selected, run = e.run] { selected = run; });
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        return selected(opts);
    }
    catch (const ValidationError& e)
    {
        std::cerr << "invalid parameters [" << e.condition() << "]: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const Json::exception& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const UnsupportedModelError& e)
    {
        std::cerr << "unsupported: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const SimulationError& e)
    {
        std::cerr << "simulation config error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

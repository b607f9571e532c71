// config.cpp: defaults, strict JSON parsing and validation

#include "superabsorb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "superabsorb/dicke.hpp"
#include "superabsorb/e2ls.hpp"
#include "superabsorb/environment.hpp"
#include "superabsorb/errors.hpp"
#include "superabsorb/lindblad.hpp"
#include "superabsorb/site.hpp"

namespace superabsorb::config {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SystemConfig, n_atoms, omega_a, omega_hop, interaction_model, gamma)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EnvironmentConfig, spectral, kappa_bad_ratio, notch_width_fraction, occupation,
                                   n_good, filter_halfwidth_fraction, temperature)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrapConfig, mode, rate, rate_over_emit, coupling, trap_frequency)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolverConfig, tol, solvers, scenario, t_end, n_times, grid, n_trajectories,
                                   jump_tolerance, block_size, dimension_cap, e2ls_loss_factor, refine_cutoff,
                                   secular_cutoff, cutoff_start, convergence_tol, term_budget)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SweepConfig, n_values, rate_n_values, cost_models)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DisorderConfig, mode, sigma_values, omega_hops, n_realizations, topology)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ResolutionConfig, n_values, r_values, lambda_values, dipole_moment)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunConfig, schema_version, command, system, environment, trap, solver, sweep,
                                   disorder, resolution, seed, threads, output_dir)

namespace {

std::vector<int> even_range(int first, int last)
{
    std::vector<int> out;
    for (int n = first; n <= last; n += 2) out.push_back(n);
    return out;
}

// Every key of `given` must exist in `reference`, recursively through objects.
void check_keys(const nlohmann::json& given, const nlohmann::json& reference, const std::string& path)
{
    if (given.is_null()) throw ConfigError("null value at '" + path + "'");
    if (!given.is_object()) return;
    if (!reference.is_object()) throw ConfigError("'" + path + "' is not a section");
    for (const auto& [key, value] : given.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!reference.contains(key)) throw ConfigError("unknown key '" + where + "'");
        check_keys(value, reference.at(key), where);
    }
}

template <class F>
void expect(bool ok, F&& message)
{
    if (!ok) throw ConfigError(message());
}

} // namespace

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> names{"ladder", "fig2",      "fig3",      "fig4",
                                                "si-validate", "disorder", "resolution"};
    return names;
}

RunConfig defaults(const std::string& command)
{
    RunConfig cfg;
    cfg.command = command;
    if (command == "ladder") {
        cfg.system.n_atoms = 4;
        cfg.system.omega_hop = 1.0;
    } else if (command == "fig2") {
        cfg.environment.n_good = 1e-4;
        cfg.sweep.n_values = even_range(4, 40);
        cfg.sweep.rate_n_values = even_range(10, 100);
    } else if (command == "fig3") {
        cfg.system.n_atoms = 20;
        cfg.solver.n_times = 401;
        cfg.solver.grid = "log";
    } else if (command == "fig4") {
        cfg.sweep.n_values = even_range(4, 20);
    } else if (command == "si-validate") {
        cfg.system.n_atoms = 8;
        cfg.trap.rate_over_emit = 10.0;
        cfg.solver.n_times = 101;
    } else if (command == "disorder") {
        cfg.system.n_atoms = 4;
        cfg.system.gamma = 0.01;
        cfg.environment.spectral = "flat";
        cfg.environment.occupation = "vacuum";
        cfg.solver.t_end = 300.0;
        cfg.solver.n_times = 301;
    } else if (command == "resolution") {
        // grid defaults only
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    return cfg;
}

nlohmann::json to_json(const RunConfig& cfg)
{
    nlohmann::json j = cfg;
    return j;
}

RunConfig from_json(const nlohmann::json& j)
{
    check_keys(j, to_json(RunConfig{}), "");
    try {
        return j.get<RunConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
}

RunConfig resolve(const std::string& command, const nlohmann::json& overrides)
{
    if (!overrides.is_object()) throw ConfigError("configuration must be a JSON object");
    nlohmann::json base = to_json(defaults(command));
    check_keys(overrides, base, "");
    if (overrides.contains("command") && overrides.at("command") != command) {
        throw ConfigError("configuration is for command '" + overrides.at("command").dump() +
                          "', not '" + command + "'");
    }
    if (overrides.contains("schema_version") && overrides.at("schema_version") != schema_version) {
        throw ConfigError("unsupported schema_version " + overrides.at("schema_version").dump());
    }
    base.merge_patch(overrides);
    return from_json(base);
}

RunConfig load(const std::string& command, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return resolve(command, j);
}

void validate(const RunConfig& cfg)
{
    expect(cfg.schema_version == schema_version, [] { return std::string("unsupported schema_version"); });
    expect(std::find(commands().begin(), commands().end(), cfg.command) != commands().end(),
           [&] { return "unknown command '" + cfg.command + "'"; });

    const auto& s = cfg.system;
    expect(s.n_atoms >= 1, [] { return std::string("system.n_atoms must be positive"); });
    expect(std::isfinite(s.omega_a) && s.omega_a > 0.0, [] { return std::string("system.omega_a must be positive"); });
    expect(std::isfinite(s.omega_hop), [] { return std::string("system.omega_hop must be finite"); });
    expect(std::isfinite(s.gamma) && s.gamma > 0.0, [] { return std::string("system.gamma must be positive"); });
    dicke::interaction_model_from_string(s.interaction_model);

    const auto& e = cfg.environment;
    const auto spectral = env::spectral_kind_from_string(e.spectral);
    expect(spectral != env::SpectralKind::tabulated,
           [] { return std::string("environment.spectral: tabulated models are library-only"); });
    env::occupation_kind_from_string(e.occupation);
    expect(e.kappa_bad_ratio >= 0.0 && e.kappa_bad_ratio <= 1.0,
           [] { return std::string("environment.kappa_bad_ratio must lie in [0, 1]"); });
    expect(e.notch_width_fraction > 0.0 && e.filter_halfwidth_fraction > 0.0,
           [] { return std::string("environment window fractions must be positive"); });
    expect(e.n_good >= 0.0 && std::isfinite(e.n_good), [] { return std::string("environment.n_good must be >= 0"); });
    expect(e.temperature > 0.0, [] { return std::string("environment.temperature must be positive"); });

    const auto& t = cfg.trap;
    lindblad::trap_mode_from_string(t.mode);
    expect(t.rate >= 0.0 && t.rate_over_emit >= 0.0 && t.coupling >= 0.0 && t.trap_frequency >= 0.0,
           [] { return std::string("trap parameters must be non-negative"); });

    const auto& v = cfg.solver;
    expect(v.tol > 0.0 && v.tol < 1.0, [] { return std::string("solver.tol must lie in (0, 1)"); });
    expect(v.t_end >= 0.0, [] { return std::string("solver.t_end must be >= 0"); });
    expect(v.grid == "linear" || v.grid == "log", [&] { return "unknown solver.grid '" + v.grid + "'"; });
    expect(v.n_times >= 2, [] { return std::string("solver.n_times must be at least 2"); });
    expect(v.n_trajectories >= 1 && v.block_size >= 1,
           [] { return std::string("solver.n_trajectories and block_size must be positive"); });
    expect(v.jump_tolerance > 0.0, [] { return std::string("solver.jump_tolerance must be positive"); });
    expect(v.e2ls_loss_factor >= 0.0, [] { return std::string("solver.e2ls_loss_factor must be >= 0"); });
    expect(v.secular_cutoff >= 0.0 && v.cutoff_start > 0.0 && v.convergence_tol > 0.0,
           [] { return std::string("solver cutoff settings must be positive"); });
    for (const auto& name : v.solvers) {
        expect(name == "e2ls" || name == "lindblad" || name == "mcwf" || name == "full",
               [&] { return "unknown solver '" + name + "'"; });
    }
    expect(v.scenario == "mcwf_check" || v.scenario == "trap_site",
           [&] { return "unknown scenario '" + v.scenario + "'"; });

    for (int n : cfg.sweep.n_values) expect(n >= 1, [] { return std::string("sweep.n_values must be positive"); });
    for (int n : cfg.sweep.rate_n_values) {
        expect(n >= 2 && n % 2 == 0, [] { return std::string("sweep.rate_n_values must be even"); });
    }
    for (const auto& name : cfg.sweep.cost_models) e2ls::cost_model_from_string(name);

    const auto& d = cfg.disorder;
    expect(d.mode == "superradiance" || d.mode == "superabsorption",
           [&] { return "unknown disorder.mode '" + d.mode + "'"; });
    for (double sigma : d.sigma_values) {
        expect(sigma >= 0.0 && std::isfinite(sigma), [] { return std::string("disorder sigma must be >= 0"); });
    }
    expect(d.n_realizations >= 1, [] { return std::string("disorder.n_realizations must be positive"); });
    site::topology_from_string(d.topology);

    const auto& r = cfg.resolution;
    expect(r.dipole_moment > 0.0, [] { return std::string("resolution.dipole_moment must be positive"); });
    for (int n : r.n_values) expect(n >= 1, [] { return std::string("resolution.n_values must be positive"); });
    for (double x : r.r_values) expect(x > 0.0, [] { return std::string("resolution.r_values must be positive"); });
    for (double x : r.lambda_values) {
        expect(x > 0.0, [] { return std::string("resolution.lambda_values must be positive"); });
    }
    expect(cfg.threads >= 1, [] { return std::string("threads must be at least 1"); });
}

} // namespace superabsorb::config

// config.hpp: run configuration for the command-line front end

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace superabsorb::config {

inline constexpr const char* schema_version = "1";

struct SystemConfig {
    int n_atoms = 4;
    double omega_a = 10.0;
    double omega_hop = -1.0;
    std::string interaction_model = "nearest_neighbour";
    double gamma = 1.0;
};

// The notch sits on omega_bad and the filter window on omega_good. Widths are
// fractions of the ladder spacing 4|Omega|/(N-1).
struct EnvironmentConfig {
    std::string spectral = "top_hat_notch"; // flat | top_hat_notch
    double kappa_bad_ratio = 0.01;          // floor of the notch
    double notch_width_fraction = 0.5;
    std::string occupation = "filtered_single_mode"; // vacuum | planck | filtered_single_mode
    double n_good = 10.0;
    double filter_halfwidth_fraction = 0.5;
    double temperature = 1.0;
};

struct TrapConfig {
    std::string mode = "phenomenological"; // phenomenological | explicit_site
    double rate = 0.0;              // Gamma_trap; 0 means rate_over_emit * Gamma_emit
    double rate_over_emit = 1000.0;
    double coupling = 1.0;          // g (explicit_site)
    double trap_frequency = 0.0;    // 0 means omega_good
};

struct SolverConfig {
    double tol = 1e-8;
    std::vector<std::string> solvers{"e2ls", "lindblad", "mcwf"};
    std::string scenario = "mcwf_check"; // si-validate: mcwf_check | trap_site
    double t_end = 0.0;                  // 0 picks a command-specific horizon
    int n_times = 201;
    std::string grid = "linear"; // linear | log (log starts near 1/Gamma_total)
    std::size_t n_trajectories = 10000;
    double jump_tolerance = 1e-8;
    std::size_t block_size = 64;
    std::size_t dimension_cap = 4096;
    double e2ls_loss_factor = 1.0; // multiplies Gamma_loss in the E2LS comparison
    bool refine_cutoff = true;
    double secular_cutoff = 0.0;
    double cutoff_start = 1e-3;
    double convergence_tol = 1e-3;
    std::size_t term_budget = 20'000'000;
};

struct SweepConfig {
    std::vector<int> n_values;
    std::vector<int> rate_n_values; // fig2 rate column
    std::vector<std::string> cost_models{"zero_cost", "single_exciton", "full_reinit", "feedback"};
};

struct DisorderConfig {
    std::string mode = "superradiance"; // superradiance | superabsorption
    std::vector<double> sigma_values{0.0, 0.01, 0.1, 1.0};
    std::vector<double> omega_hops{0.0, -1.0};
    std::size_t n_realizations = 200;
    std::string topology = "ring_nn";
};

struct ResolutionConfig {
    std::vector<int> n_values{2, 4, 8, 16, 32};
    std::vector<double> r_values{0.1, 0.5, 1.0, 2.0};
    std::vector<double> lambda_values{10.0, 100.0, 1000.0};
    double dipole_moment = 1.0;
};

struct RunConfig {
    std::string schema_version = config::schema_version;
    std::string command = "ladder";
    SystemConfig system;
    EnvironmentConfig environment;
    TrapConfig trap;
    SolverConfig solver;
    SweepConfig sweep;
    DisorderConfig disorder;
    ResolutionConfig resolution;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string output_dir = "out";
};

const std::vector<std::string>& commands();

// Defaults for one subcommand; ConfigError for unknown names.
RunConfig defaults(const std::string& command);

nlohmann::json to_json(const RunConfig& cfg);

// Strict parse of a complete document: every key must be present and known.
RunConfig from_json(const nlohmann::json& j);

// Overlays a partial document on defaults(command). Unknown keys, nulls and a
// mismatching "command" are ConfigErrors.
RunConfig resolve(const std::string& command, const nlohmann::json& overrides);
RunConfig load(const std::string& command, const std::string& path);

// Checks enum spellings and numeric ranges before any computation.
void validate(const RunConfig& cfg);

} // namespace superabsorb::config

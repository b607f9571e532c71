// trajectories.hpp: Monte Carlo wavefunction unravelling of a LindbladGenerator

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "superabsorb/lindblad.hpp"
#include "superabsorb/series.hpp"

namespace superabsorb::mcwf {

inline constexpr const char* rng_name = "std::mt19937_64 (seed = base_seed + trajectory index)";

struct TrajectoryConfig {
    std::size_t n_trajectories = 1000;
    std::uint64_t base_seed = 1;
    std::vector<double> t_grid;
    double jump_tolerance = 1e-6; // time resolution of jump detection
    unsigned threads = 1;
    std::size_t block_size = 64;  // trajectories per reduction block
};

struct TrajectoryRecord {
    ObservableSeries series; // same columns as lindblad::evolve
    std::size_t jumps = 0;
};

// Non-Hermitian propagators exp(-i H_eff dt / 2^k), built once per grid.
class Propagator {
public:
    Propagator(const lindblad::LindbladGenerator& gen, const std::vector<double>& t_grid,
               double jump_tolerance);

    TrajectoryRecord run(const Eigen::VectorXcd& psi0, std::uint64_t seed) const;
    const std::vector<std::string>& names() const { return names_; }

private:
    struct Ladder {
        std::vector<Eigen::MatrixXcd> steps; // steps[k] = exp(-i H_eff dt / 2^k)
    };
    struct Jump {
        double rate;
        lindblad::SparseOperator op;
        int counter; // 0 emitted, 1 absorbed, 2 extracted, -1 none
    };

    Eigen::Index dim_ = 0;
    std::vector<double> t_grid_;
    std::vector<std::size_t> interval_ladder_;
    std::vector<Ladder> ladders_;
    std::vector<Jump> jumps_;
    std::vector<std::string> names_;
    std::vector<Eigen::MatrixXcd> populations_;
    std::vector<std::pair<int, Eigen::MatrixXcd>> rate_ops_; // column, sum of r L^dag L
};

TrajectoryRecord mcwf_run(const lindblad::LindbladGenerator& gen, const Eigen::VectorXcd& psi0,
                          const TrajectoryConfig& config, std::size_t trajectory_index);

// Means and standard errors over n_trajectories runs. Blocks of block_size
// trajectories are reduced in index order, so the result does not depend on
// the thread count.
EnsembleResult mcwf_ensemble(const lindblad::LindbladGenerator& gen, const Eigen::VectorXcd& psi0,
                             const TrajectoryConfig& config);

} // namespace superabsorb::mcwf

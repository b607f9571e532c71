// trajectories.cpp: Monte Carlo wavefunction solver

#include "superabsorb/trajectories.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "superabsorb/errors.hpp"

namespace superabsorb::mcwf {

namespace {

using cd = std::complex<double>;

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int counter_for(lindblad::ChannelKind kind, bool explicit_trap)
{
    switch (kind) {
    case lindblad::ChannelKind::emission: return 0;
    case lindblad::ChannelKind::absorption: return 1;
    case lindblad::ChannelKind::trap: return explicit_trap ? -1 : 2;
    case lindblad::ChannelKind::trap_decay: return explicit_trap ? 2 : -1;
    default: return -1;
    }
}

} // namespace

Propagator::Propagator(const lindblad::LindbladGenerator& gen, const std::vector<double>& t_grid,
                       double jump_tolerance)
    : t_grid_(t_grid)
{
    gen.validate();
    if (!(jump_tolerance > 0.0)) throw ConfigError("jump_tolerance must be positive");
    if (t_grid_.size() < 1 || t_grid_.front() != 0.0) throw DomainError("time grid must start at 0");
    for (std::size_t i = 1; i < t_grid_.size(); ++i) {
        if (!(t_grid_[i] > t_grid_[i - 1])) throw DomainError("time grid must be strictly increasing");
    }

    const Eigen::Index d = gen.dim();
    dim_ = d;
    const bool explicit_trap = gen.trap && gen.trap->mode == lindblad::TrapMode::explicit_site;
    Eigen::MatrixXcd k_half = Eigen::MatrixXcd::Zero(d, d);
    std::array<Eigen::MatrixXcd, 3> rate_sum;
    for (auto& m : rate_sum) m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& c : gen.channels) {
        if (c.rate == 0.0) continue;
        const Eigen::MatrixXcd ldl = c.op.adjoint() * c.op;
        k_half += 0.5 * c.rate * ldl;
        const int counter = counter_for(c.kind, explicit_trap);
        jumps_.push_back({c.rate, c.op.sparseView(), counter});
        if (counter >= 0) rate_sum[static_cast<std::size_t>(counter)] += c.rate * ldl;
    }
    const Eigen::MatrixXcd h_eff = gen.hamiltonian - cd(0.0, 1.0) * k_half;

    for (const auto& p : gen.populations) {
        names_.push_back(p.first);
        populations_.push_back(p.second);
    }
    const int n_pop = static_cast<int>(populations_.size());
    for (const char* extra : {"emission", "absorption", "i_trap", "emitted", "absorbed", "extracted"}) {
        names_.emplace_back(extra);
    }
    for (int c = 0; c < 3; ++c) rate_ops_.emplace_back(n_pop + c, rate_sum[static_cast<std::size_t>(c)]);

    std::vector<double> ladder_dt;
    for (std::size_t i = 0; i + 1 < t_grid_.size(); ++i) {
        const double dt = t_grid_[i + 1] - t_grid_[i];
        auto same = std::find_if(ladder_dt.begin(), ladder_dt.end(),
                                 [&](double other) { return std::abs(other - dt) <= 1e-12 * dt; });
        if (same != ladder_dt.end()) {
            interval_ladder_.push_back(static_cast<std::size_t>(same - ladder_dt.begin()));
            continue;
        }
        const int levels = std::clamp(static_cast<int>(std::ceil(std::log2(dt / jump_tolerance))), 0, 60);
        Ladder ladder;
        ladder.steps.resize(static_cast<std::size_t>(levels) + 1);
        const Eigen::MatrixXcd generator = cd(0.0, -1.0) * std::ldexp(dt, -levels) * h_eff;
        ladder.steps[static_cast<std::size_t>(levels)] = generator.exp();
        for (int k = levels - 1; k >= 0; --k) {
            const auto& finer = ladder.steps[static_cast<std::size_t>(k) + 1];
            ladder.steps[static_cast<std::size_t>(k)] = finer * finer;
        }
        interval_ladder_.push_back(ladders_.size());
        ladders_.push_back(std::move(ladder));
        ladder_dt.push_back(dt);
    }
}

TrajectoryRecord Propagator::run(const Eigen::VectorXcd& psi0, std::uint64_t seed) const
{
    if (psi0.size() != dim_) throw DomainError("initial state dimension mismatch");
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-10) throw DomainError("initial state must be normalized");

    std::mt19937_64 rng(seed);
    TrajectoryRecord record;
    record.series = ObservableSeries(t_grid_, names_);
    Eigen::VectorXcd psi = psi0;
    Eigen::VectorXcd phi(psi.size());
    std::array<double, 3> counts{0.0, 0.0, 0.0};
    const bool can_jump = !jumps_.empty();
    double threshold = 1.0 - uniform01(rng);

    auto observe = [&](std::size_t i) {
        const double norm2 = psi.squaredNorm();
        auto row = record.series.values().row(static_cast<Eigen::Index>(i));
        for (std::size_t p = 0; p < populations_.size(); ++p) {
            row(static_cast<Eigen::Index>(p)) = psi.dot(populations_[p] * psi).real() / norm2;
        }
        for (const auto& [col, op] : rate_ops_) row(col) = psi.dot(op * psi).real() / norm2;
        for (int c = 0; c < 3; ++c) row(rate_ops_[0].first + 3 + c) = counts[static_cast<std::size_t>(c)];
    };

    auto jump = [&]() {
        double total = 0.0;
        std::vector<double> weights(jumps_.size());
        for (std::size_t c = 0; c < jumps_.size(); ++c) {
            weights[c] = jumps_[c].rate * (jumps_[c].op * psi).squaredNorm();
            total += weights[c];
        }
        if (!(total > 0.0)) {
            throw NumericalError("jump requested but every channel has zero weight; "
                                 "reduce jump_tolerance");
        }
        const double pick = uniform01(rng) * total;
        std::size_t chosen = jumps_.size() - 1;
        double acc = 0.0;
        for (std::size_t c = 0; c < jumps_.size(); ++c) {
            acc += weights[c];
            if (pick < acc && weights[c] > 0.0) {
                chosen = c;
                break;
            }
        }
        while (weights[chosen] == 0.0) --chosen; // rounding at the top end
        psi = jumps_[chosen].op * psi;
        psi /= psi.norm();
        if (jumps_[chosen].counter >= 0) counts[static_cast<std::size_t>(jumps_[chosen].counter)] += 1.0;
        ++record.jumps;
        threshold = 1.0 - uniform01(rng);
    };

    observe(0);
    for (std::size_t i = 0; i + 1 < t_grid_.size(); ++i) {
        const auto& steps = ladders_[interval_ladder_[i]].steps;
        const std::size_t levels = steps.size() - 1;
        if (!can_jump) {
            psi = steps[0] * psi;
            observe(i + 1);
            continue;
        }
        const std::uint64_t ticks = std::uint64_t{1} << levels;
        std::uint64_t position = 0;
        while (position < ticks) {
            for (std::size_t k = 0; k <= levels; ++k) {
                const std::uint64_t size = ticks >> k;
                if (position + size > ticks) continue;
                phi.noalias() = steps[k] * psi;
                if (phi.squaredNorm() > threshold) {
                    psi.swap(phi);
                    position += size;
                    break;
                }
                if (k == levels) {
                    // The norm crossed the threshold within one tick.
                    psi.swap(phi);
                    position += size;
                    jump();
                }
            }
        }
        observe(i + 1);
    }
    return record;
}

TrajectoryRecord mcwf_run(const lindblad::LindbladGenerator& gen, const Eigen::VectorXcd& psi0,
                          const TrajectoryConfig& config, std::size_t trajectory_index)
{
    const Propagator propagator(gen, config.t_grid, config.jump_tolerance);
    return propagator.run(psi0, config.base_seed + trajectory_index);
}

EnsembleResult mcwf_ensemble(const lindblad::LindbladGenerator& gen, const Eigen::VectorXcd& psi0,
                             const TrajectoryConfig& config)
{
    if (config.n_trajectories == 0) throw ConfigError("n_trajectories must be at least 1");
    if (config.block_size == 0) throw ConfigError("block_size must be at least 1");
    const Propagator propagator(gen, config.t_grid, config.jump_tolerance);

    const std::size_t n_blocks = (config.n_trajectories + config.block_size - 1) / config.block_size;
    std::vector<SeriesAccumulator> blocks(n_blocks, SeriesAccumulator(config.t_grid, propagator.names()));
    std::atomic<std::size_t> next_block{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        try {
            for (std::size_t b = next_block++; b < n_blocks; b = next_block++) {
                const std::size_t first = b * config.block_size;
                const std::size_t last = std::min(first + config.block_size, config.n_trajectories);
                for (std::size_t idx = first; idx < last; ++idx) {
                    blocks[b].add(propagator.run(psi0, config.base_seed + idx).series.values());
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next_block = n_blocks;
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(n_blocks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    SeriesAccumulator total(config.t_grid, propagator.names());
    for (const auto& b : blocks) total.merge(b);
    return total.result();
}

} // namespace superabsorb::mcwf

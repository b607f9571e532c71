#include <doctest.h>

#include <cmath>

#include "superabsorb/lindblad.hpp"
#include "superabsorb/trajectories.hpp"

using namespace superabsorb;
using dicke::HalfInt;

namespace {

std::vector<double> linspace(double t_end, int n)
{
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t_end * i / (n - 1);
    return t;
}

lindblad::LindbladGenerator cascade(int n, double gamma)
{
    const dicke::DickeLadder ladder(n, 10.0, 0.0);
    return lindblad::build_collective_generator(ladder, env::SpectralDensityModel::flat(),
                                                env::OccupationModel::vacuum(), gamma);
}

// One atom decaying at rate gamma; basis (ground, excited).
lindblad::LindbladGenerator two_level(double omega, double gamma)
{
    lindblad::LindbladGenerator gen;
    gen.hamiltonian = Eigen::MatrixXcd::Zero(2, 2);
    gen.hamiltonian(1, 1) = omega;
    lindblad::Channel c;
    c.op = Eigen::MatrixXcd::Zero(2, 2);
    c.op(0, 1) = 1.0;
    c.rate = gamma;
    c.kind = lindblad::ChannelKind::emission;
    gen.channels.push_back(c);
    Eigen::MatrixXcd pe = Eigen::MatrixXcd::Zero(2, 2);
    pe(1, 1) = 1.0;
    gen.populations = {{"p_e", pe}};
    return gen;
}

mcwf::TrajectoryConfig config(std::size_t n, std::vector<double> grid)
{
    mcwf::TrajectoryConfig c;
    c.n_trajectories = n;
    c.base_seed = 17;
    c.t_grid = std::move(grid);
    c.jump_tolerance = 1e-8;
    return c;
}

} // namespace

TEST_CASE("no channels: unitary evolution")
{
    lindblad::LindbladGenerator gen;
    gen.hamiltonian = Eigen::MatrixXcd::Zero(2, 2);
    gen.hamiltonian(0, 1) = gen.hamiltonian(1, 0) = 0.8;
    Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(2, 2), p1 = Eigen::MatrixXcd::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    gen.populations = {{"p0", p0}, {"p1", p1}};
    const auto t = linspace(4.0, 41);
    const auto rec = mcwf::mcwf_run(gen, Eigen::Vector2cd(1.0, 0.0), config(1, t), 0);
    CHECK(rec.jumps == 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(rec.series.at(i, "p0") + rec.series.at(i, "p1") - 1.0) < 1e-10);
        CHECK(std::abs(rec.series.at(i, "p0") - std::pow(std::cos(0.8 * t[i]), 2)) < 1e-10);
    }
}

TEST_CASE("single two-level decay within three standard errors")
{
    const auto gen = two_level(5.0, 1.3);
    const auto t = linspace(3.0, 31);
    const auto ens = mcwf::mcwf_ensemble(gen, Eigen::Vector2cd(0.0, 1.0), config(10000, t));
    CHECK(ens.samples == 10000);
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double mean = ens.mean.at(i, "p_e");
        const double se = ens.standard_error.at(i, "p_e");
        CHECK(se >= 0.0);
        CHECK(std::abs(mean - std::exp(-1.3 * t[i])) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("N = 2 cascade against the master equation")
{
    const auto gen = cascade(2, 1.0);
    const auto t = linspace(3.0, 16);
    const auto me = lindblad::evolve(gen, lindblad::ladder_state(2, HalfInt::from_int(1), false), t, 1e-10);
    const auto ens = mcwf::mcwf_ensemble(gen, lindblad::ladder_ket(2, HalfInt::from_int(1), false), config(10000, t));
    int outside = 0, total = 0;
    for (const char* name : {"p_M=1", "p_M=0", "p_M=-1", "emission", "emitted"}) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double z = std::abs(ens.mean.at(i, name) - me.at(i, name)) / ens.standard_error.at(i, name);
            ++total;
            if (z > 3.0) ++outside;
        }
    }
    // correlated in time, so allow the odd excursion rather than demanding every point
    CHECK(outside <= total / 20);
}

TEST_CASE("ensemble bookkeeping")
{
    const auto gen = cascade(2, 1.0);
    const auto t = linspace(2.0, 11);
    const auto psi = lindblad::ladder_ket(2, HalfInt::from_int(1), false);

    auto one = config(1, t);
    const auto ens1 = mcwf::mcwf_ensemble(gen, psi, one);
    const auto run0 = mcwf::mcwf_run(gen, psi, one, 0);
    CHECK(ens1.mean.values() == run0.series.values());
    CHECK(mcwf::mcwf_run(gen, psi, one, 5).series.values() == mcwf::mcwf_run(gen, psi, one, 5).series.values());

    auto serial = config(1000, t);
    serial.block_size = 32;
    auto parallel = serial;
    parallel.threads = 3;
    const auto a = mcwf::mcwf_ensemble(gen, psi, serial);
    const auto b = mcwf::mcwf_ensemble(gen, psi, parallel);
    CHECK(a.mean.values() == b.mean.values());
    CHECK(a.standard_error.values() == b.standard_error.values());

    auto empty = config(0, t);
    CHECK_THROWS_AS(mcwf::mcwf_ensemble(gen, psi, empty), ConfigError);
}

TEST_CASE("standard error shrinks as one over root n")
{
    const auto gen = cascade(2, 1.0);
    const auto t = linspace(2.0, 5);
    const auto psi = lindblad::ladder_ket(2, HalfInt::from_int(1), false);
    const auto small = mcwf::mcwf_ensemble(gen, psi, config(1000, t));
    auto big_cfg = config(4000, t);
    big_cfg.base_seed = 100000;
    const auto big = mcwf::mcwf_ensemble(gen, psi, big_cfg);
    const double ratio = small.standard_error.at(2, "p_M=0") / big.standard_error.at(2, "p_M=0");
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

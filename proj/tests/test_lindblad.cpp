#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "superabsorb/e2ls.hpp"
#include "superabsorb/lindblad.hpp"

using namespace superabsorb;
using dicke::HalfInt;
using Eigen::MatrixXcd;

namespace {

std::vector<double> linspace(double t_end, int n)
{
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t_end * i / (n - 1);
    return t;
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

struct Engineered {
    dicke::DickeLadder ladder;
    env::SpectralDensityModel sd;
    env::OccupationModel occ;
    env::RateSet rates;
};

// Ideal stop band at the bad transition, n_good photons at the good one,
// trap at trap_over_emit times the emission rate.
Engineered engineered(int n, double n_good, double trap_over_emit, double floor = 0.0)
{
    dicke::DickeLadder ladder(n, 10.0, -1.0);
    const double spacing = 4.0 / (n - 1);
    auto sd = env::SpectralDensityModel::notch(ladder.omega_bad(), 0.5 * spacing, floor);
    auto occ = env::OccupationModel::filtered(ladder.omega_good(), 0.25 * spacing, n_good);
    auto r = env::engineered_rates(ladder, sd, occ, 1.0, 0.0);
    r = env::engineered_rates(ladder, sd, occ, 1.0, trap_over_emit * r.emit);
    return {std::move(ladder), sd, occ, r};
}

} // namespace

TEST_CASE("dissipator")
{
    MatrixXcd sm = MatrixXcd::Zero(2, 2);
    sm(0, 1) = 1.0;
    MatrixXcd excited = MatrixXcd::Zero(2, 2);
    excited(1, 1) = 1.0;
    MatrixXcd ground = MatrixXcd::Zero(2, 2);
    ground(0, 0) = 1.0;
    CHECK((lindblad::dissipator(sm, excited) - (ground - excited)).norm() < 1e-15);
    CHECK(lindblad::dissipator(sm, ground).norm() < 1e-15);
    CHECK_THROWS_AS(lindblad::dissipator(sm, MatrixXcd::Identity(3, 3).eval()), DomainError);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index d = 2 + i % 7;
        const MatrixXcd l = oracle::random_matrix(d, rng);
        const MatrixXcd rho = oracle::random_density(d, rng);
        CHECK(std::abs(lindblad::dissipator(l, rho).trace()) < 1e-12 * std::max(1.0, l.squaredNorm()));
    }
}

TEST_CASE("collective generator structure")
{
    const dicke::DickeLadder two(2, 10.0, 0.0);
    const auto gen = lindblad::build_collective_generator(two, env::SpectralDensityModel::flat(),
                                                          env::OccupationModel::vacuum(), 1.0);
    std::vector<double> down;
    for (const auto& c : gen.channels) {
        if (c.kind == lindblad::ChannelKind::emission) down.push_back(c.rate);
        if (c.kind == lindblad::ChannelKind::absorption) CHECK(c.rate == 0.0);
    }
    REQUIRE(down.size() == 2);
    CHECK(down[0] == doctest::Approx(2.0));
    CHECK(down[1] == doctest::Approx(2.0));
    CHECK(gen.dim() == 3);

    const auto sys = engineered(8, 10.0, 10.0);
    const auto g8 = lindblad::build_collective_generator(sys.ladder, sys.sd, sys.occ, 1.0);
    for (const auto& c : g8.channels) {
        if (c.kind == lindblad::ChannelKind::emission && std::abs(c.frequency - sys.ladder.omega_bad()) < 1e-12) {
            CHECK(c.rate == 0.0);
        }
    }

    lindblad::TrapSpec trap{1.0, sys.ladder.omega_good(), 4.0, lindblad::TrapMode::explicit_site};
    const dicke::DickeLadder four(4, 10.0, -1.0);
    CHECK(lindblad::build_collective_generator(four, env::SpectralDensityModel::flat(), env::OccupationModel::vacuum(),
                                               1e-4, trap)
              .dim() == 10);
    CHECK_THROWS_AS(lindblad::build_collective_generator(sys.ladder, sys.sd, sys.occ, 1.0, trap, 12), CapacityError);
    CHECK(lindblad::trap_mode_from_string(lindblad::to_string(lindblad::TrapMode::explicit_site)) ==
          lindblad::TrapMode::explicit_site);
}

TEST_CASE("single two-level decay")
{
    const auto gen = two_level(5.0, 0.7);
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(2, 2);
    rho0(1, 1) = 1.0;
    const auto t = linspace(5.0, 21);
    const auto s = lindblad::evolve(gen, rho0, t, 1e-10);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(s.at(i, "p_e") - std::exp(-0.7 * t[i])) < 1e-8);
        CHECK(std::abs(s.at(i, "emitted") - (1.0 - std::exp(-0.7 * t[i]))) < 1e-7);
    }
}

TEST_CASE("master equation reproduces the effective two-level system")
{
    const auto sys = engineered(8, 10.0, 10.0);
    lindblad::TrapSpec trap{0.0, 0.0, sys.rates.trap, lindblad::TrapMode::phenomenological};
    const auto gen = lindblad::build_collective_generator(sys.ladder, sys.sd, sys.occ, 1.0, trap);
    const auto t = linspace(20.0 / sys.rates.total, 201);
    const auto s = lindblad::evolve(gen, lindblad::ladder_state(8, HalfInt::from_int(-1), false), t, 1e-10);
    const Eigen::VectorXd numeric = lindblad::trap_current_numeric(s, trap);
    CHECK(numeric.isApprox(s.column("i_trap"), 1e-12));
    double peak = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ref = e2ls::trap_current(t[i], sys.rates);
        peak = std::max(peak, ref);
        worst = std::max(worst, std::abs(numeric[static_cast<Eigen::Index>(i)] - ref));
    }
    CHECK(worst < 0.01 * peak);
    CHECK(std::abs(numeric.maxCoeff() - peak) < 0.01 * peak);

    // the integrated current is the extracted count, up to the quadrature error
    const Eigen::VectorXd extracted = s.column("extracted");
    const auto fine_t = linspace(t.back(), 4001);
    const auto fine = lindblad::evolve(gen, lindblad::ladder_state(8, HalfInt::from_int(-1), false), fine_t, 1e-10);
    const Eigen::VectorXd fi = fine.column("i_trap");
    // Simpson on the fine grid
    double area = 0.0;
    const double h = fine_t[1] - fine_t[0];
    for (std::size_t i = 0; i + 2 < fine_t.size(); i += 2) {
        const auto k = static_cast<Eigen::Index>(i);
        area += h / 3.0 * (fi[k] + 4.0 * fi[k + 1] + fi[k + 2]);
    }
    CHECK(std::abs(area - extracted[extracted.size() - 1]) < 1e-6);
}

TEST_CASE("vacuum cascade peak scales quadratically")
{
    double lo = 1e300, hi = 0.0;
    for (int n = 8; n <= 20; n += 2) {
        const dicke::DickeLadder ladder(n, 10.0, 0.0);
        const auto gen = lindblad::build_collective_generator(ladder, env::SpectralDensityModel::flat(),
                                                              env::OccupationModel::vacuum(), 1.0);
        const double j = 0.5 * n;
        const auto t = linspace(8.0 / n, 401);
        const auto s = lindblad::evolve(gen, lindblad::ladder_state(n, HalfInt::from_int(n / 2), false), t, 1e-9);
        const Eigen::VectorXd e = s.column("emission");
        Eigen::Index at = 0;
        const double peak = e.maxCoeff(&at);
        const double scaled = peak / (j * j);
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
                double mean_m = 0.0;
        for (std::size_t k = 0; k < ladder.size(); ++k) {
            mean_m += ladder.m_of(k).value() * s.at(static_cast<std::size_t>(at), "p_M=" + ladder.m_of(k).str());
        }
        // finite-N fluctuations put the peak slightly above M = 0
        CHECK(std::abs(mean_m) < 0.5 * j);
    }
    CHECK(hi / lo <= 1.15);
}

TEST_CASE("detuned trap suppresses the bad transition")
{
    // spacing 4|Omega|/(N-1) = 4 = 20 g; trap linewidth 0.4 < 4
    const dicke::DickeLadder ladder(4, 10.0, -3.0);
    lindblad::TrapSpec trap{0.2, ladder.omega_good(), 0.4, lindblad::TrapMode::explicit_site};
    const auto gen = lindblad::build_collective_generator(ladder, env::SpectralDensityModel::flat(),
                                                          env::OccupationModel::vacuum(), 1e-6, trap);
    const auto t = linspace(20.0, 201);
    const auto good = lindblad::evolve(gen, lindblad::ladder_state(4, HalfInt::from_int(0), true), t, 1e-9);
    const auto bad = lindblad::evolve(gen, lindblad::ladder_state(4, HalfInt::from_int(-1), true), t, 1e-9);
    const double g_out = good.at(t.size() - 1, "extracted");
    const double b_out = bad.at(t.size() - 1, "extracted");
    CHECK(g_out > 0.5);
    CHECK(b_out <= 0.1 * g_out);
}

TEST_CASE("conservation and validation")
{
    const auto sys = engineered(6, 2.0, 3.0, 0.1);
    lindblad::TrapSpec trap{0.0, 0.0, sys.rates.trap, lindblad::TrapMode::phenomenological};
    const auto gen = lindblad::build_collective_generator(sys.ladder, sys.sd, sys.occ, 1.0, trap);
    for (double tol : {1e-6, 1e-8}) {
        const auto s = lindblad::evolve(gen, lindblad::ladder_state(6, HalfInt::from_int(3), false), linspace(3.0, 61), tol);
        CHECK(s.diagnostics.max_trace_drift <= 10.0 * tol);
        CHECK(s.diagnostics.min_eigenvalue >= -100.0 * tol);
    }
    MatrixXcd bad = MatrixXcd::Identity(3, 3);
    CHECK_THROWS_AS(lindblad::validate_density(bad), DomainError);
    bad /= 3.0;
    CHECK_NOTHROW(lindblad::validate_density(bad));
    CHECK_THROWS_AS(lindblad::ladder_state(4, HalfInt::from_twice(1), false), DomainError);
}

#include <doctest.h>

#include <random>

#include "superabsorb/environment.hpp"
#include "superabsorb/errors.hpp"

using namespace superabsorb;
using dicke::HalfInt;

TEST_CASE("spectral density models")
{
    CHECK(env::kappa(env::SpectralDensityModel::flat(), 3.7) == 1.0);
    const auto notch = env::SpectralDensityModel::notch(10.0, 2.0, 0.0);
    CHECK(env::kappa(notch, 10.0) == 0.0);
    CHECK(env::kappa(notch, 11.0) == 0.0);
    CHECK(env::kappa(notch, 11.01) == 1.0);
    const auto leaky = env::SpectralDensityModel::notch(10.0, 2.0, 0.01);
    CHECK(env::kappa(leaky, 10.0) / env::kappa(leaky, 12.0) == doctest::Approx(0.01));
    CHECK_THROWS_AS(env::SpectralDensityModel::notch(10.0, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(env::SpectralDensityModel::notch(10.0, 1.0, 1.5), DomainError);

    CHECK_THROWS_AS(env::kappa(env::SpectralDensityModel::tabulated({}), 1.0), ConfigError);
    const auto tab = env::SpectralDensityModel::tabulated({{1.0, 0.2}, {2.0, 0.4}, {4.0, 0.9}});
    CHECK(env::kappa(tab, 2.0) == 0.4);
    CHECK(env::kappa(tab, 1.4) == 0.2);
    CHECK(env::kappa(tab, 2.9) == 0.4);
    CHECK(env::kappa(tab, 3.1) == 0.9);
    CHECK(env::kappa(tab, 0.1) == 0.2);
    CHECK(env::kappa(tab, 50.0) == 0.9);
}

TEST_CASE("occupation models")
{
    CHECK(env::occupation(env::OccupationModel::vacuum(), 5.0) == 0.0);
    const auto filt = env::OccupationModel::filtered(10.0, 0.5, 10.0);
    CHECK(env::occupation(filt, 10.0) == 10.0);
    CHECK(env::occupation(filt, 10.5) == 10.0);
    CHECK(env::occupation(filt, 10.6) == 0.0);

    const auto hot = env::OccupationModel::planck(2.0);
    CHECK_THROWS_AS(env::occupation(hot, 0.0), DomainError);
    CHECK_THROWS_AS(env::OccupationModel::planck(0.0), DomainError);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const double t = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const double w = std::uniform_real_distribution<double>(0.01, 20.0)(rng);
        const auto p = env::OccupationModel::planck(t);
        CHECK(env::occupation(p, -w) == doctest::Approx(-(1.0 + env::occupation(p, w))).epsilon(1e-12));
        CHECK(env::occupation(p, w) >= 0.0);
    }
}

TEST_CASE("kind names round trip")
{
    for (auto k : {env::SpectralKind::flat, env::SpectralKind::top_hat_notch, env::SpectralKind::tabulated}) {
        CHECK(env::spectral_kind_from_string(env::to_string(k)) == k);
    }
    for (auto k : {env::OccupationKind::vacuum, env::OccupationKind::planck, env::OccupationKind::filtered_single_mode}) {
        CHECK(env::occupation_kind_from_string(env::to_string(k)) == k);
    }
    CHECK_THROWS_AS(env::spectral_kind_from_string("lorentzian"), ConfigError);
}

TEST_CASE("rate set")
{
    const auto r = env::RateSet::make(1.0, 2.0, 3.0, 4.0);
    CHECK(r.total == 10.0);
    CHECK_THROWS_AS(env::RateSet::make(-1.0, 0.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(env::RateSet::make(1.0, std::nan(""), 0.0, 0.0), DomainError);
}

namespace {

env::RateSet engineered(int n, double floor, double n_good, double gamma = 1.0)
{
    const dicke::DickeLadder ladder(n, 10.0, -1.0);
    const double spacing = 4.0 / (n - 1);
    const auto sd = env::SpectralDensityModel::notch(ladder.omega_bad(), 0.5 * spacing, floor);
    const auto occ = env::OccupationModel::filtered(ladder.omega_good(), 0.25 * spacing, n_good);
    return env::engineered_rates(ladder, sd, occ, gamma, 0.0);
}

} // namespace

TEST_CASE("engineered rates")
{
    const auto r20 = engineered(20, 0.0, 10.0);
    CHECK(r20.absorb == doctest::Approx(1100.0));
    CHECK(r20.emit == doctest::Approx(1210.0));
    CHECK(r20.loss == 0.0);
    CHECK(r20.emit / r20.absorb == doctest::Approx(11.0 / 10.0));

    for (int n = 4; n <= 40; n += 2) {
        const auto r = engineered(n, 0.01, 10.0, 0.3);
        CHECK(r.mu == doctest::Approx(3.0));
        CHECK(r.absorb == doctest::Approx(r.mu * (0.5 * n + 0.25 * n * n)).epsilon(1e-12));
        const double lossy = dicke::transition_rate(n, HalfInt::from_int(-1), dicke::Process::emit, 1.0);
        CHECK(r.loss == doctest::Approx(0.3 * 0.01 * lossy));
        CHECK(r.sigma_loss == doctest::Approx(0.003));
    }

    // loss grows with kappa_bad
    double last = -1.0;
    for (double floor : {0.0, 0.001, 0.01, 0.1, 1.0}) {
        const double loss = engineered(8, floor, 10.0).loss;
        CHECK(loss >= last);
        last = loss;
    }
    // and with n_bad: a Planck bath heats the bad transition
    const dicke::DickeLadder ladder(8, 10.0, -1.0);
    last = -1.0;
    for (double temp : {0.5, 1.0, 2.0, 5.0}) {
        const auto r = env::engineered_rates(ladder, env::SpectralDensityModel::flat(),
                                             env::OccupationModel::planck(temp), 1.0, 0.0);
        CHECK(r.loss >= last);
        last = r.loss;
    }

    // flat kappa and vacuum give the bare cascade rates
    const auto bare = env::engineered_rates(ladder, env::SpectralDensityModel::flat(), env::OccupationModel::vacuum(), 2.0, 0.0);
    CHECK(bare.absorb == 0.0);
    CHECK(bare.emit == doctest::Approx(dicke::transition_rate(8, HalfInt::from_int(0), dicke::Process::emit, 2.0)));
    CHECK(bare.loss == doctest::Approx(dicke::transition_rate(8, HalfInt::from_int(-1), dicke::Process::emit, 2.0)));

    CHECK_THROWS_AS(engineered(2, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(env::engineered_rates(ladder, env::SpectralDensityModel::flat(), env::OccupationModel::vacuum(), -1.0, 0.0),
                    DomainError);
}

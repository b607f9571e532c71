// environment.cpp: spectral density and mode occupation models

#include "superabsorb/environment.hpp"

#include <cmath>
#include <iterator>

#include "superabsorb/errors.hpp"

namespace superabsorb::env {

std::string to_string(SpectralKind kind)
{
    switch (kind) {
    case SpectralKind::flat: return "flat";
    case SpectralKind::top_hat_notch: return "top_hat_notch";
    case SpectralKind::tabulated: return "tabulated";
    }
    return "flat";
}

std::string to_string(OccupationKind kind)
{
    switch (kind) {
    case OccupationKind::vacuum: return "vacuum";
    case OccupationKind::planck: return "planck";
    case OccupationKind::filtered_single_mode: return "filtered_single_mode";
    }
    return "vacuum";
}

SpectralKind spectral_kind_from_string(const std::string& name)
{
    if (name == "flat") return SpectralKind::flat;
    if (name == "top_hat_notch") return SpectralKind::top_hat_notch;
    if (name == "tabulated") return SpectralKind::tabulated;
    throw ConfigError("unknown spectral density kind '" + name + "'");
}

OccupationKind occupation_kind_from_string(const std::string& name)
{
    if (name == "vacuum") return OccupationKind::vacuum;
    if (name == "planck") return OccupationKind::planck;
    if (name == "filtered_single_mode") return OccupationKind::filtered_single_mode;
    throw ConfigError("unknown occupation kind '" + name + "'");
}

SpectralDensityModel SpectralDensityModel::notch(double center, double width, double floor_value)
{
    if (width < 0.0) throw DomainError("notch width must be non-negative");
    if (floor_value < 0.0 || floor_value > 1.0) throw DomainError("notch floor must lie in [0, 1]");
    SpectralDensityModel m;
    m.kind = SpectralKind::top_hat_notch;
    m.notch_center = center;
    m.notch_width = width;
    m.floor = floor_value;
    return m;
}

SpectralDensityModel SpectralDensityModel::tabulated(std::map<double, double> entries)
{
    SpectralDensityModel m;
    m.kind = SpectralKind::tabulated;
    m.table = std::move(entries);
    return m;
}

OccupationModel OccupationModel::planck(double temperature)
{
    if (!(temperature > 0.0)) throw DomainError("planck temperature must be positive");
    OccupationModel m;
    m.kind = OccupationKind::planck;
    m.temperature = temperature;
    return m;
}

OccupationModel OccupationModel::filtered(double center, double halfwidth, double n_good)
{
    if (halfwidth < 0.0) throw DomainError("filter half-width must be non-negative");
    if (n_good < 0.0) throw DomainError("filter occupation must be non-negative");
    OccupationModel m;
    m.kind = OccupationKind::filtered_single_mode;
    m.filter_center = center;
    m.filter_halfwidth = halfwidth;
    m.filter_occupation = n_good;
    return m;
}

double kappa(const SpectralDensityModel& model, double omega, double tol)
{
    switch (model.kind) {
    case SpectralKind::flat:
        return 1.0;
    case SpectralKind::top_hat_notch:
        if (std::abs(omega - model.notch_center) <= 0.5 * model.notch_width + tol) return model.floor;
        return 1.0;
    case SpectralKind::tabulated: {
        if (model.table.empty()) throw ConfigError("tabulated spectral density has no entries");
        auto hi = model.table.lower_bound(omega - tol);
        if (hi != model.table.end() && std::abs(hi->first - omega) <= tol) return hi->second;
        if (hi == model.table.end()) return std::prev(hi)->second;
        if (hi == model.table.begin()) return hi->second;
        auto lo = std::prev(hi);
        return (omega - lo->first) <= (hi->first - omega) ? lo->second : hi->second;
    }
    }
    return 1.0;
}

double occupation(const OccupationModel& model, double omega, double tol)
{
    switch (model.kind) {
    case OccupationKind::vacuum:
        return 0.0;
    case OccupationKind::planck:
        if (omega == 0.0) throw DomainError("planck occupation diverges at omega = 0");
        return 1.0 / std::expm1(omega / model.temperature);
    case OccupationKind::filtered_single_mode:
        if (std::abs(omega - model.filter_center) <= model.filter_halfwidth + tol) {
            return model.filter_occupation;
        }
        return 0.0;
    }
    return 0.0;
}

RateSet RateSet::make(double absorb, double emit, double loss, double trap)
{
    RateSet r;
    r.absorb = absorb;
    r.emit = emit;
    r.loss = loss;
    r.trap = trap;
    r.total = absorb + emit + loss + trap;
    r.validate();
    return r;
}

void RateSet::validate() const
{
    for (double v : {absorb, emit, loss, trap}) {
        if (!std::isfinite(v) || v < 0.0) throw DomainError("rates must be finite and non-negative");
    }
}

RateSet engineered_rates(const dicke::DickeLadder& ladder, const SpectralDensityModel& sd,
                         const OccupationModel& occ, double gamma, double trap_rate)
{
    if (gamma < 0.0 || trap_rate < 0.0) throw DomainError("rates must be non-negative");
    using dicke::HalfInt;
    using dicke::Process;
    const int n = ladder.n_atoms();
    const double tol = matching_tolerance(ladder.omega_a());
    const double w_good = ladder.omega_good();
    const double w_bad = ladder.omega_bad();

    const double k_good = kappa(sd, w_good, tol);
    const double k_bad = kappa(sd, w_bad, tol);
    const double n_good = occupation(occ, w_good, tol);
    const double n_bad = occupation(occ, w_bad, tol);

    // Ladder factors without gamma; gamma enters once through mu and sigma_loss.
    const double up = dicke::transition_rate(n, HalfInt::from_int(-1), Process::absorb, 1.0);
    const double down = dicke::transition_rate(n, HalfInt::from_int(0), Process::emit, 1.0);
    const double lossy = dicke::transition_rate(n, HalfInt::from_int(-1), Process::emit, 1.0);

    RateSet r = RateSet::make(gamma * k_good * n_good * up, gamma * k_good * (n_good + 1.0) * down,
                              gamma * k_bad * (n_bad + 1.0) * lossy, trap_rate);
    r.mu = gamma * k_good * n_good;
    r.sigma_loss = gamma * k_bad * (1.0 + n_bad);
    return r;
}

} // namespace superabsorb::env

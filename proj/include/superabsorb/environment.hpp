// environment.hpp: spectral density and mode occupation models, engineered rates

#pragma once

#include <cmath>
#include <map>
#include <string>

#include "superabsorb/dicke.hpp"

namespace superabsorb::env {

enum class SpectralKind { flat, top_hat_notch, tabulated };
enum class OccupationKind { vacuum, planck, filtered_single_mode };

std::string to_string(SpectralKind kind);
std::string to_string(OccupationKind kind);
SpectralKind spectral_kind_from_string(const std::string& name);
OccupationKind occupation_kind_from_string(const std::string& name);

struct SpectralDensityModel {
    SpectralKind kind = SpectralKind::flat;
    double notch_center = 0.0;
    double notch_width = 0.0;
    double floor = 0.0;               // kappa inside the stop band
    std::map<double, double> table;   // frequency -> kappa

    static SpectralDensityModel flat() { return {}; }
    static SpectralDensityModel notch(double center, double width, double floor_value);
    static SpectralDensityModel tabulated(std::map<double, double> entries);
};

struct OccupationModel {
    OccupationKind kind = OccupationKind::vacuum;
    double temperature = 0.0;
    double filter_center = 0.0;
    double filter_halfwidth = 0.0;
    double filter_occupation = 0.0;

    static OccupationModel vacuum() { return {}; }
    static OccupationModel planck(double temperature);
    static OccupationModel filtered(double center, double halfwidth, double n_good);
};

// tol widens window edges and the exact-match test of tabulated lookups.
double kappa(const SpectralDensityModel& model, double omega, double tol = 0.0);
double occupation(const OccupationModel& model, double omega, double tol = 0.0);

// Window tolerance used when sampling at ladder frequencies.
inline double matching_tolerance(double omega_a) { return 1e-9 * std::abs(omega_a); }

struct RateSet {
    double absorb = 0.0;
    double emit = 0.0;
    double loss = 0.0;
    double trap = 0.0;
    double total = 0.0;
    double mu = 0.0;         // gamma kappa_good n_good
    double sigma_loss = 0.0; // gamma kappa_bad (1 + n_bad)

    // Fills total; throws DomainError on negative or non-finite entries.
    static RateSet make(double absorb, double emit, double loss, double trap);
    void validate() const;
};

// Effective two-level rates sampled at omega_good = omega(0 -> -1) and
// omega_bad = omega(-1 -> -2). Needs even N >= 4.
RateSet engineered_rates(const dicke::DickeLadder& ladder, const SpectralDensityModel& sd,
                         const OccupationModel& occ, double gamma, double trap_rate);

} // namespace superabsorb::env

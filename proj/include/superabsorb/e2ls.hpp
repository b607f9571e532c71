// e2ls.hpp: closed-form effective two-level system (M = -1 <-> M = 0 with trap)

#pragma once

#include <string>
#include <vector>

#include "superabsorb/environment.hpp"

namespace superabsorb::e2ls {

// Population of |J,0> starting from |J,-1>. Rate equations:
//   dU/dt = absorb L - (emit + trap) U
//   dL/dt = -(absorb + loss) L + (emit + trap) U
double population(double t, const env::RateSet& rates);
double trap_current(double t, const env::RateSet& rates);

// Integral of trap_current over [0, t_end].
double integrated_trap_current(double t_end, const env::RateSet& rates);

double max_current(int n_atoms, double mu);
double feedback_current(int n_atoms, double mu, double sigma_loss);

struct AbsorptionProbability {
    double lifetime = 0.0;
    double e2ls_prob = 0.0;
    double independent_prob = 0.0;
    double advantage = 0.0;
};

AbsorptionProbability absorption_probability_within_lifetime(int n_atoms, const env::RateSet& rates);

enum class CostModel { zero_cost, single_exciton, full_reinit, feedback };

std::string to_string(CostModel cost);
CostModel cost_model_from_string(const std::string& name);
double reinitialisation_cost(int n_atoms, CostModel cost);

// Cycle models: excitons trapped in one lifetime 1/loss minus the cost.
// feedback: the continuous extraction rate (excitons per unit time).
double excitons_per_cycle(int n_atoms, const env::RateSet& rates, CostModel cost);

// Net excitons collected during `window`, counting window*loss cycles for the
// cycle models.
double excitons_in_window(int n_atoms, const env::RateSet& rates, CostModel cost, double window);

struct E2LSResult {
    std::vector<double> time_grid;
    std::vector<double> population_m0;
    std::vector<double> trap_current;
    double net_excitons = 0.0; // integral of trap_current over the grid span
};

E2LSResult evaluate(const env::RateSet& rates, const std::vector<double>& time_grid);

namespace detail {

// Same kernel without sign checks so the oscillatory branch of the general
// linear system can be exercised. s = emit + trap.
double population_kernel(double absorb, double s, double loss, double t);

} // namespace detail

} // namespace superabsorb::e2ls

// e2ls.cpp: closed-form effective two-level system

#include "superabsorb/e2ls.hpp"

#include <cmath>

#include "superabsorb/errors.hpp"

namespace superabsorb::e2ls {

namespace {

// (1 - e^{-rT}) / r with the r -> 0 limit.
double decay_integral(double r, double t_end)
{
    if (r == 0.0) return t_end;
    return -std::expm1(-r * t_end) / r;
}

// D^2 = total^2 - 4 loss s written without cancellation for non-negative rates.
double discriminant_squared(double absorb, double s, double loss)
{
    const double a = absorb + loss - s;
    return a * a + 4.0 * absorb * s;
}

void require_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
}

} // namespace

namespace detail {

double population_kernel(double absorb, double s, double loss, double t)
{
    const double total = absorb + s + loss;
    const double d2 = discriminant_squared(absorb, s, loss);
    if (d2 < 0.0) {
        const double w = std::sqrt(-d2);
        return 2.0 * absorb / w * std::exp(-0.5 * total * t) * std::sin(0.5 * w * t);
    }
    if (d2 == 0.0) return absorb * t * std::exp(-0.5 * total * t);
    const double d = std::sqrt(d2);
    if (total + d > 0.0) {
        const double r_slow = 2.0 * loss * s / (total + d);
        return absorb * std::exp(-r_slow * t) * (-std::expm1(-d * t) / d);
    }
    return absorb / d * (std::exp(0.5 * (d - total) * t) - std::exp(-0.5 * (d + total) * t));
}

} // namespace detail

double population(double t, const env::RateSet& rates)
{
    rates.validate();
    require_time(t);
    return detail::population_kernel(rates.absorb, rates.emit + rates.trap, rates.loss, t);
}

double trap_current(double t, const env::RateSet& rates)
{
    return rates.trap * population(t, rates);
}

double integrated_trap_current(double t_end, const env::RateSet& rates)
{
    rates.validate();
    require_time(t_end);
    if (rates.trap == 0.0 || rates.absorb == 0.0) return 0.0;
    const double s = rates.emit + rates.trap;
    const double total = rates.absorb + s + rates.loss;
    const double d = std::sqrt(discriminant_squared(rates.absorb, s, rates.loss));
    if (d < 1e-6 * total) {
        const double r = 0.5 * total;
        const double rt = r * t_end;
        // Gamma_a * integral of t e^{-rt}.
        const double area = rates.absorb * (1.0 - std::exp(-rt) * (1.0 + rt)) / (r * r);
        return rates.trap * area;
    }
    const double r_slow = 2.0 * rates.loss * s / (total + d);
    const double r_fast = 0.5 * (total + d);
    return rates.trap * rates.absorb * (decay_integral(r_slow, t_end) - decay_integral(r_fast, t_end)) / d;
}

double max_current(int n_atoms, double mu)
{
    if (n_atoms < 2) throw DomainError("max_current needs N >= 2");
    if (mu < 0.0) throw DomainError("mu must be non-negative");
    const double n = n_atoms;
    return mu * (0.5 * n + 0.25 * n * n);
}

double feedback_current(int n_atoms, double mu, double sigma_loss)
{
    if (n_atoms < 2) throw DomainError("feedback_current needs N >= 2");
    if (mu < 0.0 || sigma_loss < 0.0) throw DomainError("mu and sigma must be non-negative");
    const double n = n_atoms;
    return (mu - sigma_loss) * (0.5 * n + 0.25 * n * n) + 2.0 * sigma_loss;
}

AbsorptionProbability absorption_probability_within_lifetime(int n_atoms, const env::RateSet& rates)
{
    rates.validate();
    if (n_atoms < 1) throw DomainError("need at least one atom");
    if (rates.loss <= 0.0) {
        throw DomainError("lifetime is infinite when loss = 0; use max_current instead");
    }
    AbsorptionProbability out;
    out.lifetime = 1.0 / rates.loss;
    out.e2ls_prob = -std::expm1(-rates.absorb * out.lifetime);
    out.independent_prob = -std::expm1(-static_cast<double>(n_atoms) * rates.mu * out.lifetime);
    out.advantage = out.independent_prob > 0.0 ? out.e2ls_prob / out.independent_prob : 0.0;
    return out;
}

std::string to_string(CostModel cost)
{
    switch (cost) {
    case CostModel::zero_cost: return "zero_cost";
    case CostModel::single_exciton: return "single_exciton";
    case CostModel::full_reinit: return "full_reinit";
    case CostModel::feedback: return "feedback";
    }
    return "zero_cost";
}

CostModel cost_model_from_string(const std::string& name)
{
    if (name == "zero_cost") return CostModel::zero_cost;
    if (name == "single_exciton") return CostModel::single_exciton;
    if (name == "full_reinit") return CostModel::full_reinit;
    if (name == "feedback") return CostModel::feedback;
    throw ConfigError("unknown cost model '" + name + "'");
}

double reinitialisation_cost(int n_atoms, CostModel cost)
{
    switch (cost) {
    case CostModel::single_exciton: return 1.0;
    case CostModel::full_reinit: return 0.5 * n_atoms;
    default: return 0.0;
    }
}

double excitons_per_cycle(int n_atoms, const env::RateSet& rates, CostModel cost)
{
    rates.validate();
    if (cost == CostModel::feedback) return feedback_current(n_atoms, rates.mu, rates.sigma_loss);
    if (rates.loss <= 0.0) throw DomainError("cycle-based cost models need loss > 0");
    return integrated_trap_current(1.0 / rates.loss, rates) - reinitialisation_cost(n_atoms, cost);
}

double excitons_in_window(int n_atoms, const env::RateSet& rates, CostModel cost, double window)
{
    require_time(window);
    const double per = excitons_per_cycle(n_atoms, rates, cost);
    if (cost == CostModel::feedback) return per * window;
    return per * window * rates.loss;
}

E2LSResult evaluate(const env::RateSet& rates, const std::vector<double>& time_grid)
{
    E2LSResult out;
    out.time_grid = time_grid;
    out.population_m0.reserve(time_grid.size());
    out.trap_current.reserve(time_grid.size());
    for (double t : time_grid) {
        const double p = population(t, rates);
        out.population_m0.push_back(p);
        out.trap_current.push_back(rates.trap * p);
    }
    if (!time_grid.empty()) {
        out.net_excitons = integrated_trap_current(time_grid.back(), rates) -
                           integrated_trap_current(time_grid.front(), rates);
    }
    return out;
}

} // namespace superabsorb::e2ls

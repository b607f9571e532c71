// ode.hpp: Dormand-Prince 5(4) integrator for Eigen vector states

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "superabsorb/errors.hpp"

namespace superabsorb::ode {

struct Options {
    double tol = 1e-8;             // local error per step, scaled by 1 + |y|
    double initial_step = 0.0;     // 0 picks one from |f(t0, y0)|
    double max_step = 0.0;         // 0 means unbounded
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

// Integrates dy/dt = rhs(t, y, dydt) across `grid` (strictly increasing) and
// calls observe(i, t_i, y) at every grid point, including the first. Steps are
// clipped so each grid point is hit exactly.
template <class Vector, class Rhs, class Observer>
Stats integrate(Rhs&& rhs, Vector y, const std::vector<double>& grid, const Options& opt,
                Observer&& observe)
{
    // Dormand-Prince tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Stats stats;
    if (grid.empty()) return stats;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DomainError("time grid must be strictly increasing");
    }

    const auto n = y.size();
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
    double t = grid.front();
    rhs(t, y, k1);
    observe(std::size_t{0}, t, y);
    if (grid.size() == 1) return stats;

    auto error_norm = [&](const Vector& err, const Vector& y0, const Vector& y1) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double scale = opt.tol * (1.0 + std::max(std::abs(y0[i]), std::abs(y1[i])));
            worst = std::max(worst, std::abs(err[i]) / scale);
        }
        return worst;
    };

    double h = opt.initial_step;
    if (h <= 0.0) {
        const double fn = k1.cwiseAbs().maxCoeff();
        const double yn = 1.0 + y.cwiseAbs().maxCoeff();
        h = fn > 0.0 ? 0.01 * std::pow(opt.tol, 0.2) * yn / fn : grid[1] - grid[0];
        h = std::min(h, grid.back() - grid.front());
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

    std::size_t next = 1;
    while (next < grid.size()) {
        const double target = grid[next];
        bool hits_grid = false;
        double step = h;
        if (t + step >= target || target - (t + step) < 1e-12 * std::abs(target)) {
            step = target - t;
            hits_grid = true;
        }
        if (step < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            std::ostringstream msg;
            msg << "step size underflow at t = " << t
                << "; the problem is too stiff for the explicit integrator. Reduce the rates or "
                   "refine the time grid.";
            throw NumericalError(msg.str());
        }

        tmp = y + step * a21 * k1;
        rhs(t + c2 * step, tmp, k2);
        tmp = y + step * (a31 * k1 + a32 * k2);
        rhs(t + c3 * step, tmp, k3);
        tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * step, tmp, k4);
        tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * step, tmp, k5);
        tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + step, tmp, k6);
        y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + step, y_new, k7);
        tmp = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err = error_norm(tmp, y, y_new);
        if (!std::isfinite(err)) {
            throw NumericalError("non-finite state encountered during integration");
        }
        const double factor =
            err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            ++stats.accepted;
            t = hits_grid ? target : t + step;
            y.swap(y_new);
            k1.swap(k7);
            if (hits_grid) {
                observe(next, t, y);
                ++next;
            }
            // A grid-clipped step says nothing about the natural step size.
            h = hits_grid ? std::max(h, step * factor) : step * factor;
        } else {
            ++stats.rejected;
            h = step * std::max(0.2, factor);
        }
        if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
        if (stats.accepted + stats.rejected > opt.max_steps) {
            throw NumericalError("integration exceeded the maximum number of steps");
        }
    }
    return stats;
}

} // namespace superabsorb::ode

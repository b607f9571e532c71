// reports.cpp: subcommand drivers behind the CLI

#include "superabsorb/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "superabsorb/e2ls.hpp"
#include "superabsorb/errors.hpp"
#include "superabsorb/lindblad.hpp"
#include "superabsorb/site.hpp"
#include "superabsorb/trajectories.hpp"

namespace superabsorb::reports {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

using dicke::HalfInt;

std::pair<env::SpectralDensityModel, env::OccupationModel> environment_models(const config::RunConfig& cfg,
                                                                               const dicke::DickeLadder& ladder)
{
    const auto& e = cfg.environment;
    const int n = ladder.n_atoms();
    const double spacing = n > 1 ? std::abs(ladder.transition_frequencies()[1] - ladder.transition_frequencies()[0])
                                 : 0.0;
    env::SpectralDensityModel sd;
    if (env::spectral_kind_from_string(e.spectral) == env::SpectralKind::top_hat_notch) {
        sd = env::SpectralDensityModel::notch(ladder.omega_bad(), e.notch_width_fraction * spacing, e.kappa_bad_ratio);
    }
    env::OccupationModel occ;
    switch (env::occupation_kind_from_string(e.occupation)) {
    case env::OccupationKind::vacuum: break;
    case env::OccupationKind::planck: occ = env::OccupationModel::planck(e.temperature); break;
    case env::OccupationKind::filtered_single_mode:
        occ = env::OccupationModel::filtered(ladder.omega_good(), e.filter_halfwidth_fraction * spacing, e.n_good);
        break;
    }
    return {sd, occ};
}

double trapz(const std::vector<double>& t, const Eigen::VectorXd& y)
{
    double area = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        area += 0.5 * (t[i] - t[i - 1]) * (y[static_cast<Eigen::Index>(i)] + y[static_cast<Eigen::Index>(i) - 1]);
    }
    return area;
}

std::string label(double x)
{
    std::ostringstream os;
    os << x;
    return os.str();
}

// Largest sigma on the grid (linearly interpolated) before `excess` first
// drops to half its sigma = 0 value; infinity when it never does.
double halving_sigma(const std::vector<double>& sigma, const std::vector<double>& excess)
{
    if (sigma.empty()) return nan;
    const double half = 0.5 * excess.front();
    for (std::size_t i = 1; i < sigma.size(); ++i) {
        if (excess[i] <= half) {
            const double f = (excess[i - 1] - half) / (excess[i - 1] - excess[i]);
            return sigma[i - 1] + f * (sigma[i] - sigma[i - 1]);
        }
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace

void CsvTable::add_row(std::vector<double> row)
{
    if (row.size() != header.size()) throw DomainError("CSV row width differs from header in " + name);
    rows.push_back(std::move(row));
}

std::vector<double> CsvTable::column(std::size_t k) const
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(k));
    return out;
}

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const CsvTable& table)
{
    std::string out;
    for (std::size_t k = 0; k < table.header.size(); ++k) {
        out += (k ? "," : "") + table.header[k];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += format_number(row[k]);
        }
        out += '\n';
    }
    return out;
}

void write_bundle(const ResultBundle& bundle, const std::string& directory)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw ConfigError("cannot create output directory '" + directory + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(fs::path(directory) / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + name + "' in '" + directory + "'");
        out << text;
    };
    for (const auto& table : bundle.tables) write(table.name + ".csv", to_csv(table));
    write("metadata.json", bundle.metadata.dump(2) + "\n");
    if (bundle.metadata.contains("config")) write("resolved_config.json", bundle.metadata["config"].dump(2) + "\n");
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line needs two or more paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_loglog needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

EngineeredSystem engineered_system(const config::RunConfig& cfg, int n_atoms)
{
    const auto& s = cfg.system;
    dicke::DickeLadder ladder(n_atoms, s.omega_a, s.omega_hop, dicke::interaction_model_from_string(s.interaction_model));
    auto [sd, occ] = environment_models(cfg, ladder);
    env::RateSet rates = env::engineered_rates(ladder, sd, occ, s.gamma, 0.0);
    const double trap = cfg.trap.rate > 0.0 ? cfg.trap.rate : cfg.trap.rate_over_emit * rates.emit;
    rates = env::engineered_rates(ladder, sd, occ, s.gamma, trap);
    return {std::move(ladder), sd, occ, rates};
}

std::vector<double> time_grid(const std::string& kind, int n_times, double t_end, double t_first)
{
    if (n_times < 2 || !(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("time grid needs t_end > 0");
    std::vector<double> t(static_cast<std::size_t>(n_times));
    if (kind == "linear") {
        for (int i = 0; i < n_times; ++i) t[static_cast<std::size_t>(i)] = t_end * i / (n_times - 1);
    } else if (kind == "log") {
        if (!(t_first > 0.0 && t_first < t_end)) throw DomainError("log grid needs 0 < t_first < t_end");
        t[0] = 0.0;
        const double ratio = std::log(t_end / t_first);
        for (int i = 1; i < n_times; ++i) {
            t[static_cast<std::size_t>(i)] = t_first * std::exp(ratio * (i - 1) / (n_times - 2));
        }
        t.back() = t_end;
    } else {
        throw ConfigError("unknown grid kind '" + kind + "'");
    }
    return t;
}

ResultBundle cmd_ladder(const config::RunConfig& cfg)
{
    const auto& s = cfg.system;
    const dicke::DickeLadder ladder(s.n_atoms, s.omega_a, s.omega_hop,
                                    dicke::interaction_model_from_string(s.interaction_model));
    CsvTable table{"ladder",
                   {"M (dimensionless)", "E_M (frequency)", "shift (frequency)", "omega_down (frequency)",
                    "emit_rate (rate)", "absorb_rate (rate)"},
                   {}};
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        const auto& level = ladder.levels()[k];
        const double down = k == 0 ? nan : ladder.transition_frequencies()[k - 1];
        table.add_row({level.m.value(), level.energy, level.energy_shift, down,
                       dicke::transition_rate(s.n_atoms, level.m, dicke::Process::emit, s.gamma),
                       dicke::transition_rate(s.n_atoms, level.m, dicke::Process::absorb, s.gamma)});
    }
    ResultBundle bundle;
    bundle.tables.push_back(std::move(table));
    bundle.summary["levels"] = ladder.size();
    return bundle;
}

ResultBundle cmd_fig2(const config::RunConfig& cfg)
{
    const double gamma = cfg.system.gamma;
    CsvTable prob{"fig2_probability",
                  {"N (atoms)", "e2ls_prob (probability)", "independent_prob (probability)",
                   "advantage (dimensionless)", "lifetime (time)", "lifetime_ratio (dimensionless)"},
                  {}};
    const double tau4 = 1.0 / engineered_system(cfg, 4).rates.loss;
    for (int n : cfg.sweep.n_values) {
        const auto sys = engineered_system(cfg, n);
        const auto p = e2ls::absorption_probability_within_lifetime(n, sys.rates);
        prob.add_row({double(n), p.e2ls_prob, p.independent_prob, p.advantage, p.lifetime, p.lifetime / tau4});
    }
    CsvTable rate{"fig2_rate", {"N (atoms)", "absorb_rate_M0 (rate)", "independent_rate (rate)"}, {}};
    for (int n : cfg.sweep.rate_n_values) {
        rate.add_row({double(n), dicke::transition_rate(n, HalfInt::from_int(0), dicke::Process::absorb, gamma),
                      n * gamma});
    }

    ResultBundle bundle;
    if (prob.rows.size() >= 2) {
        const auto fit = fit_line(prob.column(0), prob.column(3));
        bundle.summary["advantage_fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
        const auto life = prob.column(5);
        bundle.summary["lifetime_decreasing"] = std::is_sorted(life.rbegin(), life.rend());
    }
    if (rate.rows.size() >= 2) {
        const auto fit = fit_loglog(rate.column(0), rate.column(1));
        bundle.summary["rate_loglog_slope"] = fit.slope;
    }
    bundle.tables.push_back(std::move(prob));
    bundle.tables.push_back(std::move(rate));
    return bundle;
}

ResultBundle cmd_fig3(const config::RunConfig& cfg)
{
    const int n = cfg.system.n_atoms;
    const auto sys = engineered_system(cfg, n);
    const auto& r = sys.rates;
    const double kappa_good = env::kappa(sys.sd, sys.ladder.omega_good(), env::matching_tolerance(cfg.system.omega_a));
    const double n_good = env::occupation(sys.occ, sys.ladder.omega_good(), env::matching_tolerance(cfg.system.omega_a));
    const double gamma_ind = kappa_good * n_good * n * cfg.system.gamma;
    const double t_end = cfg.solver.t_end > 0.0 ? cfg.solver.t_end : (r.loss > 0.0 ? 4.0 / r.loss : 50.0 / r.total);
    const auto grid = time_grid(cfg.solver.grid, cfg.solver.n_times, t_end, 1e-2 / r.total);
    const auto res = e2ls::evaluate(r, grid);

    CsvTable table{"fig3_current",
                   {"t (time)", "I_trap (rate)", "Gamma_ind (rate)", "population_M0 (probability)",
                    "superabsorbing (flag)"},
                   {}};
    double peak = 0.0;
    std::size_t peak_at = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double current = res.trap_current[i];
        if (current > peak) {
            peak = current;
            peak_at = i;
        }
        table.add_row({grid[i], current, gamma_ind, res.population_m0[i], current > gamma_ind ? 1.0 : 0.0});
    }
    double crossing = nan;
    for (std::size_t i = peak_at; i < grid.size(); ++i) {
        if (res.trap_current[i] < gamma_ind) {
            crossing = grid[i];
            break;
        }
    }
    ResultBundle bundle;
    bundle.summary = {{"gamma_ind", gamma_ind},       {"peak_current", peak},
                      {"peak_time", grid[peak_at]},   {"plateau_ratio", peak / gamma_ind},
                      {"absorb_over_ind", r.absorb / gamma_ind},
                      {"crossing_time", crossing},    {"net_excitons", res.net_excitons},
                      {"rates", {{"absorb", r.absorb}, {"emit", r.emit}, {"loss", r.loss}, {"trap", r.trap}}}};
    bundle.tables.push_back(std::move(table));
    return bundle;
}

ResultBundle cmd_fig4(const config::RunConfig& cfg)
{
    std::vector<e2ls::CostModel> costs;
    for (const auto& name : cfg.sweep.cost_models) costs.push_back(e2ls::cost_model_from_string(name));
    const double window = 1.0 / engineered_system(cfg, 4).rates.loss;

    CsvTable table{"fig4_excitons", {"N (atoms)"}, {}};
    for (auto c : costs) table.header.push_back(e2ls::to_string(c) + " (excitons)");
    table.header.push_back("independent (excitons)");
    table.header.push_back("ideal_N2 (excitons)");
    for (int n : cfg.sweep.n_values) {
        const auto sys = engineered_system(cfg, n);
        std::vector<double> row{double(n)};
        for (auto c : costs) row.push_back(e2ls::excitons_in_window(n, sys.rates, c, window));
        const double tol = env::matching_tolerance(cfg.system.omega_a);
        const double independent = env::kappa(sys.sd, sys.ladder.omega_good(), tol) *
                                    env::occupation(sys.occ, sys.ladder.omega_good(), tol) * n * cfg.system.gamma;
        row.push_back(independent * window);
        row.push_back(e2ls::max_current(n, sys.rates.mu) * window);
        table.add_row(std::move(row));
    }
    ResultBundle bundle;
    bundle.summary["window"] = window;
    if (table.rows.size() >= 2) {
        for (std::size_t k = 0; k < costs.size(); ++k) {
            const auto y = table.column(k + 1);
            if (std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; })) {
                bundle.summary["loglog_slope"][e2ls::to_string(costs[k])] = fit_loglog(table.column(0), y).slope;
            } else {
                bundle.summary["loglog_slope"][e2ls::to_string(costs[k])] = nullptr;
            }
        }
    }
    bundle.tables.push_back(std::move(table));
    return bundle;
}

ResultBundle cmd_si_validation(const config::RunConfig& cfg)
{
    const auto& v = cfg.solver;
    const int n = cfg.system.n_atoms;
    const auto sys = engineered_system(cfg, n);
    const bool trap_site = v.scenario == "trap_site";
    const auto mode = trap_site ? lindblad::TrapMode::explicit_site : lindblad::TrapMode::phenomenological;
    if (lindblad::trap_mode_from_string(cfg.trap.mode) != mode) {
        throw ConfigError("scenario '" + v.scenario + "' needs trap.mode = " + lindblad::to_string(mode));
    }

    env::RateSet e2 = env::RateSet::make(sys.rates.absorb, sys.rates.emit, sys.rates.loss * v.e2ls_loss_factor,
                                         sys.rates.trap);
    e2.mu = sys.rates.mu;
    e2.sigma_loss = sys.rates.sigma_loss;
    const double t_end = v.t_end > 0.0 ? v.t_end
                                       : (trap_site && e2.loss > 0.0 ? 1.0 / e2.loss : 20.0 / sys.rates.total);
    const auto grid = time_grid(v.grid, v.n_times, t_end, 1e-2 / sys.rates.total);

    lindblad::TrapSpec trap;
    trap.extraction_rate = sys.rates.trap;
    trap.coupling = cfg.trap.coupling;
    trap.trap_frequency = cfg.trap.trap_frequency > 0.0 ? cfg.trap.trap_frequency : sys.ladder.omega_good();
    trap.mode = mode;

    CsvTable table{"si_validation", {"t (time)"}, {}};
    std::vector<Eigen::VectorXd> columns;
    std::vector<std::string> names;
    ResultBundle bundle;
    Eigen::VectorXd lindblad_current;
    Eigen::VectorXd mcwf_mean, mcwf_err;

    for (const auto& solver : v.solvers) {
        Eigen::VectorXd current(static_cast<Eigen::Index>(grid.size()));
        if (solver == "e2ls") {
            for (std::size_t i = 0; i < grid.size(); ++i) current[static_cast<Eigen::Index>(i)] = e2ls::trap_current(grid[i], e2);
        } else if (solver == "lindblad" || solver == "mcwf") {
            const auto gen = lindblad::build_collective_generator(sys.ladder, sys.sd, sys.occ, cfg.system.gamma, trap,
                                                                  v.dimension_cap);
            if (solver == "lindblad") {
                const auto series = lindblad::evolve(gen, lindblad::ladder_state(n, HalfInt::from_int(-1), trap_site),
                                                     grid, v.tol);
                current = series.column("i_trap");
                lindblad_current = current;
                bundle.summary["lindblad_diagnostics"] = {{"max_trace_drift", series.diagnostics.max_trace_drift},
                                                          {"min_eigenvalue", series.diagnostics.min_eigenvalue}};
            } else {
                mcwf::TrajectoryConfig tc;
                tc.n_trajectories = v.n_trajectories;
                tc.base_seed = cfg.seed;
                tc.t_grid = grid;
                tc.jump_tolerance = v.jump_tolerance;
                tc.threads = cfg.threads;
                tc.block_size = v.block_size;
                const auto ens = mcwf::mcwf_ensemble(gen, lindblad::ladder_ket(n, HalfInt::from_int(-1), trap_site), tc);
                current = ens.mean.column("i_trap");
                mcwf_mean = current;
                mcwf_err = ens.standard_error.column("i_trap");
            }
        } else if (solver == "full") {
            if (!trap_site) throw ConfigError("solver 'full' needs scenario trap_site");
            auto spec = site::uniform_spec(n, cfg.system.omega_a, cfg.system.omega_hop,
                                           site::topology_from_string(cfg.disorder.topology));
            spec.trap = trap;
            spec.dimension_cap = v.dimension_cap;
            const site::SiteEnvironment se{sys.sd, sys.occ, cfg.system.gamma, cfg.system.omega_a};
            site::SecularPolicy policy;
            policy.cutoff = v.secular_cutoff;
            policy.cutoff_start = v.cutoff_start;
            policy.convergence_tol = v.convergence_tol;
            policy.term_budget = v.term_budget;
            const Eigen::VectorXd psi = site::dicke_state(spec, HalfInt::from_int(-1));
            const Eigen::MatrixXcd rho0 = (psi * psi.transpose()).cast<std::complex<double>>();
            if (v.refine_cutoff) {
                const auto conv = site::converge_cutoff(spec, se, policy, rho0, grid, v.tol);
                policy.cutoff = conv.cutoff;
                bundle.summary["full_cutoff"] = {{"cutoff", conv.cutoff}, {"converged", conv.converged}};
            }
            const auto gen = site::build_generator(spec, se, policy);
            current = site::evolve(gen, rho0, grid, v.tol).column("i_trap");
        } else {
            throw ConfigError("unknown solver '" + solver + "'");
        }
        names.push_back(solver);
        columns.push_back(current);
        table.header.push_back("I_trap_" + solver + " (rate)");
        if (solver == "mcwf") {
            names.push_back("mcwf_stderr");
            columns.push_back(mcwf_err);
            table.header.push_back("I_trap_mcwf_stderr (rate)");
        }
        bundle.summary["peak"][solver] = current.maxCoeff();
        bundle.summary["area"][solver] = trapz(grid, current);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& c : columns) row.push_back(c[static_cast<Eigen::Index>(i)]);
        table.add_row(std::move(row));
    }

    // Deviations against the first solver listed.
    if (!columns.empty()) {
        for (std::size_t k = 1; k < columns.size(); ++k) {
            if (names[k] == "mcwf_stderr") continue;
            bundle.summary["max_abs_deviation"][names[k]] = (columns[k] - columns[0]).cwiseAbs().maxCoeff();
        }
    }
    if (lindblad_current.size() > 0 && mcwf_mean.size() > 0) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < mcwf_mean.size(); ++i) {
            const double diff = std::abs(mcwf_mean[i] - lindblad_current[i]);
            if (mcwf_err[i] > 0.0) worst = std::max(worst, diff / mcwf_err[i]);
            else if (diff > 1e-12 * std::max(1.0, std::abs(lindblad_current[i]))) worst = std::numeric_limits<double>::infinity();
        }
        bundle.summary["mcwf_max_z"] = worst;
    }
    bundle.summary["rates"] = {{"absorb", e2.absorb}, {"emit", e2.emit}, {"loss", e2.loss}, {"trap", e2.trap}};
    bundle.tables.push_back(std::move(table));
    return bundle;
}

ResultBundle cmd_disorder(const config::RunConfig& cfg)
{
    const auto& d = cfg.disorder;
    const auto& v = cfg.solver;
    const int n = cfg.system.n_atoms;
    const double gamma = cfg.system.gamma;
    const bool absorption = d.mode == "superabsorption";
    const double t_end = v.t_end > 0.0 ? v.t_end : 3.0 / (n * gamma);
    const auto grid = time_grid(v.grid, v.n_times, t_end, 1e-3 * t_end);
    const std::string observable = absorption ? "absorption" : "emission";

    CsvTable summary{"disorder",
                     {"omega_hop (frequency)", "sigma (frequency)", "peak (rate)", "peak_stderr (rate)",
                      "enhancement (dimensionless)", "enhancement_stderr (dimensionless)", "cutoff (frequency)",
                      "cutoff_converged (flag)"},
                     {}};
    CsvTable series{"disorder_series", {"t (time)"}, {}};
    std::vector<Eigen::VectorXd> series_cols;
    ResultBundle bundle;

    for (double hop : d.omega_hops) {
        config::RunConfig local = cfg;
        local.system.omega_hop = hop;
        const dicke::DickeLadder ladder(n, cfg.system.omega_a, hop,
                                        dicke::interaction_model_from_string(cfg.system.interaction_model));
        const auto [sd, occ] = environment_models(local, ladder);
        const site::SiteEnvironment se{sd, occ, gamma, cfg.system.omega_a};
        double baseline = n * gamma;
        if (absorption) {
            const double tol = env::matching_tolerance(cfg.system.omega_a);
            baseline *= env::kappa(sd, ladder.omega_good(), tol) * env::occupation(occ, ladder.omega_good(), tol);
        }
        auto spec = site::uniform_spec(n, cfg.system.omega_a, hop, site::topology_from_string(d.topology));
        spec.dimension_cap = v.dimension_cap;
        const Eigen::VectorXd psi =
            site::dicke_state(spec, absorption ? HalfInt::from_int(-1) : dicke::total_spin(n));
        const Eigen::MatrixXcd rho0 = (psi * psi.transpose()).cast<std::complex<double>>();

        site::SecularPolicy policy;
        policy.cutoff = v.secular_cutoff;
        policy.cutoff_start = v.cutoff_start;
        policy.convergence_tol = v.convergence_tol;
        policy.term_budget = v.term_budget;

        std::vector<double> sigmas, excess;
        for (double sigma : d.sigma_values) {
            site::DisorderConfig dc;
            dc.mean = cfg.system.omega_a;
            dc.stddev = sigma;
            dc.n_realizations = d.n_realizations;
            dc.base_seed = cfg.seed;
            const auto run = site::disorder_ensemble_average(spec, dc, se, policy, v.refine_cutoff, rho0, grid, v.tol,
                                                             cfg.threads);
            const Eigen::VectorXd mean = run.ensemble.mean.column(observable);
            const Eigen::VectorXd err = run.ensemble.standard_error.column(observable);
            Eigen::Index at = 0;
            const double peak = mean.maxCoeff(&at);
            summary.add_row({hop, sigma, peak, err[at], peak / baseline, err[at] / baseline, run.cutoff,
                             run.cutoff_converged ? 1.0 : 0.0});
            series.header.push_back(observable + "[hop=" + label(hop) + ";sigma=" + label(sigma) + "] (rate)");
            series.header.push_back(observable + "_stderr[hop=" + label(hop) + ";sigma=" + label(sigma) + "] (rate)");
            series_cols.push_back(mean);
            series_cols.push_back(err);
            sigmas.push_back(sigma);
            excess.push_back(peak - baseline);
        }
        bundle.summary["halving_sigma"][label(hop)] = halving_sigma(sigmas, excess);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row{grid[i]};
        for (const auto& c : series_cols) row.push_back(c[static_cast<Eigen::Index>(i)]);
        series.add_row(std::move(row));
    }
    bundle.tables.push_back(std::move(summary));
    bundle.tables.push_back(std::move(series));
    return bundle;
}

ResultBundle cmd_resolution(const config::RunConfig& cfg)
{
    const auto& r = cfg.resolution;
    CsvTable table{"resolution",
                   {"N (atoms)", "r (length)", "lambda (length)", "gamma (rate)", "broadening (rate)",
                    "shift (rate)", "resolvable (flag)", "small_sample (flag)", "tests_agree (flag)"},
                   {}};
    std::size_t agree = 0;
    for (int n : r.n_values) {
        for (double dist : r.r_values) {
            for (double lambda : r.lambda_values) {
                dicke::GeometrySpec g;
                g.dipole_moment = r.dipole_moment;
                g.nn_distance = dist;
                g.wavelength = lambda;
                const auto m = dicke::resolution_margin(g, n);
                agree += m.tests_agree ? 1 : 0;
                table.add_row({double(n), dist, lambda, m.gamma, m.broadening, m.shift, m.resolvable ? 1.0 : 0.0,
                               m.small_sample ? 1.0 : 0.0, m.tests_agree ? 1.0 : 0.0});
            }
        }
    }
    ResultBundle bundle;
    bundle.summary = {{"rows", table.rows.size()}, {"tests_agree", agree}};
    bundle.tables.push_back(std::move(table));
    return bundle;
}

ResultBundle run(const config::RunConfig& cfg)
{
    config::validate(cfg);
    ResultBundle bundle;
    const std::string& c = cfg.command;
    if (c == "ladder") bundle = cmd_ladder(cfg);
    else if (c == "fig2") bundle = cmd_fig2(cfg);
    else if (c == "fig3") bundle = cmd_fig3(cfg);
    else if (c == "fig4") bundle = cmd_fig4(cfg);
    else if (c == "si-validate") bundle = cmd_si_validation(cfg);
    else if (c == "disorder") bundle = cmd_disorder(cfg);
    else if (c == "resolution") bundle = cmd_resolution(cfg);
    else throw ConfigError("unknown command '" + c + "'");

    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : bundle.tables) tables.push_back(t.name + ".csv");
    bundle.metadata = {
        {"artifact_version", artifact_version},
        {"command", c},
        {"schema_version", cfg.schema_version},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"solver_tol", cfg.solver.tol},
        {"rng",
         {{"trajectories", mcwf::rng_name},
          {"disorder", "std::normal_distribution over std::mt19937_64 (seed = seed + realization)"}}},
        {"tables", tables},
        {"summary", bundle.summary},
        {"config", config::to_json(cfg)},
    };
    return bundle;
}

} // namespace superabsorb::reports

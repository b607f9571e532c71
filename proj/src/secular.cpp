// secular.cpp: partial-secular master equation, cutoff refinement, disorder averaging

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "superabsorb/errors.hpp"
#include "superabsorb/ode.hpp"
#include "superabsorb/site.hpp"

namespace superabsorb::site {

namespace {

using cd = std::complex<double>;

enum class Family { optical, trap };

struct Bin {
    double omega;
    double weight; // gamma(omega) / 2
    const Eigen::SparseMatrix<double>* op;
};

double optical_rate(const SiteEnvironment& environment, double omega)
{
    const double tol = env::matching_tolerance(environment.omega_a);
    const double w = std::abs(omega);
    if (w <= tol) return 0.0;
    const double k = env::kappa(environment.sd, w, tol);
    const double n = env::occupation(environment.occ, w, tol);
    return omega > 0.0 ? environment.gamma * k * (1.0 + n) : environment.gamma * k * n;
}

std::string ring_number_name(int k) { return "p_n=" + std::to_string(k); }

} // namespace

void PartialSecularGenerator::apply_dissipator(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const
{
    out.noalias() = -(k_matrix_ * rho);
    out.noalias() -= rho * k_matrix_.transpose();
    const cd* in = rho.data();
    cd* dst = out.data();
    for (const Term& t : terms_) dst[t.out] += t.coef * in[t.in];
}

double PartialSecularGenerator::rate(lindblad::ChannelKind kind, const Eigen::MatrixXcd& rho) const
{
    const Eigen::MatrixXd* op = nullptr;
    switch (kind) {
    case lindblad::ChannelKind::emission: op = &emission_op_; break;
    case lindblad::ChannelKind::absorption: op = &absorption_op_; break;
    case lindblad::ChannelKind::trap_decay: op = &trap_op_; break;
    default: return 0.0;
    }
    return (op->transpose().cast<cd>().cwiseProduct(rho)).sum().real();
}

PartialSecularGenerator partial_secular_generator(const SiteHamiltonianSpec& spec, const EigenoperatorSet& optical,
                                                  const EigenoperatorSet* trap_ops,
                                                  const SiteEnvironment& environment, const SecularPolicy& policy)
{
    if (!(policy.cutoff >= 0.0)) throw DomainError("secular cutoff must be non-negative");
    if (environment.gamma < 0.0) throw DomainError("gamma must be non-negative");
    if (spec.has_trap() && trap_ops == nullptr) throw ConfigError("trap eigenoperators are required");

    PartialSecularGenerator gen;
    const Eigen::Index dim = optical.energies.size();
    if (static_cast<std::uint64_t>(dim) * static_cast<std::uint64_t>(dim) >
        std::numeric_limits<std::uint32_t>::max()) {
        throw CapacityError("system too large for the partial-secular term list");
    }
    gen.energies_ = optical.energies;
    gen.eigenvectors_ = optical.eigenvectors;
    gen.cutoff_ = policy.cutoff;
    gen.k_matrix_ = Eigen::MatrixXd::Zero(dim, dim);
    gen.emission_op_ = Eigen::MatrixXd::Zero(dim, dim);
    gen.absorption_op_ = Eigen::MatrixXd::Zero(dim, dim);
    gen.trap_op_ = Eigen::MatrixXd::Zero(dim, dim);

    auto collect = [&](const EigenoperatorSet& set, Family family) {
        std::vector<Bin> bins;
        for (std::size_t i = 0; i < set.size(); ++i) {
            const double omega = set.frequencies[i];
            double rate = 0.0;
            if (family == Family::optical) {
                rate = optical_rate(environment, omega);
            } else if (omega > 0.0) {
                rate = spec.trap->extraction_rate;
            }
            if (rate > 0.0) bins.push_back({omega, 0.5 * rate, &set.operators[i]});
        }
        return bins;
    };

    std::vector<std::pair<Family, std::vector<Bin>>> families;
    families.emplace_back(Family::optical, collect(optical, Family::optical));
    if (spec.has_trap()) families.emplace_back(Family::trap, collect(*trap_ops, Family::trap));

    // Size the term list before allocating it.
    std::uint64_t expected_terms = 0;
    for (const auto& [family, bins] : families) {
        for (const Bin& a : bins) {
            for (const Bin& b : bins) {
                if (std::abs(a.omega - b.omega) <= policy.cutoff) {
                    expected_terms += static_cast<std::uint64_t>(a.op->nonZeros()) *
                                      static_cast<std::uint64_t>(b.op->nonZeros());
                }
            }
        }
    }
    if (expected_terms > policy.term_budget) {
        throw CapacityError("partial-secular generator needs " + std::to_string(expected_terms) +
                            " terms, above the budget of " + std::to_string(policy.term_budget) +
                            "; lower the cutoff or raise term_budget");
    }

    std::vector<PartialSecularGenerator::Term> terms;
    terms.reserve(static_cast<std::size_t>(expected_terms));
    for (const auto& [family, bins] : families) {
        for (const Bin& a : bins) {
            for (const Bin& b : bins) {
                if (!(std::abs(a.omega - b.omega) <= policy.cutoff)) continue;
                ++gen.pair_count_;
                const Eigen::SparseMatrix<double>& op_a = *a.op;
                const Eigen::SparseMatrix<double>& op_b = *b.op;
                const Eigen::MatrixXd ba = Eigen::MatrixXd(Eigen::SparseMatrix<double>(op_b.transpose()) * op_a);
                gen.k_matrix_ += a.weight * ba;
                const double both = a.weight + b.weight;
                if (family == Family::trap) {
                    gen.trap_op_ += both * ba;
                } else if (a.omega > 0.0 && b.omega > 0.0) {
                    gen.emission_op_ += both * ba;
                } else if (a.omega < 0.0 && b.omega < 0.0) {
                    gen.absorption_op_ += both * ba;
                }
                // (A_a rho A_b^T)_{rc} += A_a(r, s) rho(s, u) A_b(c, u)
                for (Eigen::Index ca = 0; ca < op_a.outerSize(); ++ca) {
                    for (Eigen::SparseMatrix<double>::InnerIterator ia(op_a, ca); ia; ++ia) {
                        for (Eigen::Index cb = 0; cb < op_b.outerSize(); ++cb) {
                            for (Eigen::SparseMatrix<double>::InnerIterator ib(op_b, cb); ib; ++ib) {
                                const auto out = static_cast<std::uint32_t>(ia.row() + ib.row() * dim);
                                const auto in = static_cast<std::uint32_t>(ia.col() + ib.col() * dim);
                                terms.push_back({out, in, both * ia.value() * ib.value()});
                            }
                        }
                    }
                }
            }
        }
    }

    std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
        return x.out != y.out ? x.out < y.out : x.in < y.in;
    });
    for (const auto& t : terms) {
        if (!gen.terms_.empty() && gen.terms_.back().out == t.out && gen.terms_.back().in == t.in) {
            gen.terms_.back().coef += t.coef;
        } else {
            gen.terms_.push_back(t);
        }
    }
    std::erase_if(gen.terms_, [](const auto& t) { return t.coef == 0.0; });

    const Eigen::MatrixXd& v = gen.eigenvectors_;
    const int n = spec.n_atoms;
    for (int k = 0; k <= n; ++k) {
        const Eigen::VectorXd s = v.transpose() * dicke_state(spec, dicke::HalfInt::from_twice(2 * k - n));
        gen.observables_.emplace_back("p_M=" + dicke::HalfInt::from_twice(2 * k - n).str(),
                                      (s * s.transpose()).cast<cd>());
    }
    for (int k = 0; k <= n; ++k) {
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const auto ring = static_cast<unsigned>(spec.has_trap() ? i >> 1 : i);
            if (std::popcount(ring) == k) diag(i) = 1.0;
        }
        gen.observables_.emplace_back(ring_number_name(k),
                                      (v.transpose() * diag.asDiagonal() * v).cast<cd>());
    }
    if (spec.has_trap()) {
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index i = 1; i < dim; i += 2) diag(i) = 1.0;
        gen.observables_.emplace_back("p_trap", (v.transpose() * diag.asDiagonal() * v).cast<cd>());
    }
    return gen;
}

PartialSecularGenerator build_generator(const SiteHamiltonianSpec& spec, const SiteEnvironment& environment,
                                        const SecularPolicy& policy)
{
    const Diagonalisation eig = diagonalise(build_site_hamiltonian(spec));
    const double tol = 1e-9 * std::abs(environment.omega_a);
    const EigenoperatorSet optical = eigenoperators(eig, collective_dipole(spec), tol);
    if (!spec.has_trap()) return partial_secular_generator(spec, optical, nullptr, environment, policy);
    const EigenoperatorSet trap = eigenoperators(eig, trap_lowering(spec), tol);
    return partial_secular_generator(spec, optical, &trap, environment, policy);
}

ObservableSeries evolve(const PartialSecularGenerator& gen, const Eigen::MatrixXcd& rho0_site,
                        const std::vector<double>& t_grid, double tol)
{
    const Eigen::Index d = gen.dim();
    if (rho0_site.rows() != d || rho0_site.cols() != d) throw DomainError("initial state dimension mismatch");
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("time grid must start at 0");
    lindblad::validate_density(rho0_site);

    std::vector<std::string> names;
    for (const auto& o : gen.observables()) names.push_back(o.first);
    for (const char* extra : {"emission", "absorption", "i_trap", "emitted", "absorbed", "extracted"}) {
        names.emplace_back(extra);
    }
    ObservableSeries series(t_grid, names);
    const auto n_obs = static_cast<Eigen::Index>(gen.observables().size());

    const Eigen::MatrixXcd v = gen.eigenvectors().cast<cd>();
    const Eigen::Index n_rho = d * d;
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n_rho + 3);
    Eigen::Map<Eigen::MatrixXcd>(y.data(), d, d) = v.adjoint() * rho0_site * v;

    const Eigen::VectorXd& energies = gen.energies();
    Eigen::VectorXcd phase(d);
    Eigen::MatrixXcd rho(d, d), out(d, d);
    auto to_schroedinger = [&](double t, const Eigen::VectorXcd& state) {
        for (Eigen::Index a = 0; a < d; ++a) phase(a) = std::polar(1.0, -energies(a) * t);
        const Eigen::Map<const Eigen::MatrixXcd> tilde(state.data(), d, d);
        rho = phase.asDiagonal() * tilde * phase.conjugate().asDiagonal();
    };

    auto rhs = [&](double t, const Eigen::VectorXcd& state, Eigen::VectorXcd& dydt) {
        to_schroedinger(t, state);
        gen.apply_dissipator(rho, out);
        Eigen::Map<Eigen::MatrixXcd>(dydt.data(), d, d) = phase.conjugate().asDiagonal() * out * phase.asDiagonal();
        dydt(n_rho) = gen.rate(lindblad::ChannelKind::emission, rho);
        dydt(n_rho + 1) = gen.rate(lindblad::ChannelKind::absorption, rho);
        dydt(n_rho + 2) = gen.rate(lindblad::ChannelKind::trap_decay, rho);
    };

    SeriesDiagnostics& diag = series.diagnostics;
    diag.min_eigenvalue = std::numeric_limits<double>::infinity();
    auto observe = [&](std::size_t i, double t, const Eigen::VectorXcd& state) {
        to_schroedinger(t, state);
        auto row = series.values().row(static_cast<Eigen::Index>(i));
        for (Eigen::Index k = 0; k < n_obs; ++k) {
            row(k) = gen.observables()[static_cast<std::size_t>(k)].second.transpose().cwiseProduct(rho).sum().real();
        }
        row(n_obs) = gen.rate(lindblad::ChannelKind::emission, rho);
        row(n_obs + 1) = gen.rate(lindblad::ChannelKind::absorption, rho);
        row(n_obs + 2) = gen.rate(lindblad::ChannelKind::trap_decay, rho);
        row(n_obs + 3) = state(n_rho).real();
        row(n_obs + 4) = state(n_rho + 1).real();
        row(n_obs + 5) = state(n_rho + 2).real();
        diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(rho.trace() - 1.0));
        diag.max_hermiticity_error =
            std::max(diag.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
        diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues().minCoeff());
    };

    ode::Options opt;
    opt.tol = tol;
    const ode::Stats stats = ode::integrate(rhs, y, t_grid, opt, observe);
    diag.steps_accepted = stats.accepted;
    diag.steps_rejected = stats.rejected;
    return series;
}

CutoffConvergence converge_cutoff(const SiteHamiltonianSpec& spec, const SiteEnvironment& environment,
                                  const SecularPolicy& policy, const Eigen::MatrixXcd& rho0_site,
                                  const std::vector<double>& t_grid, double tol)
{
    if (!(policy.cutoff_start > 0.0) || !(policy.growth > 1.0)) {
        throw ConfigError("cutoff refinement needs cutoff_start > 0 and growth > 1");
    }
    const Diagonalisation eig = diagonalise(build_site_hamiltonian(spec));
    const double deg_tol = 1e-9 * std::abs(environment.omega_a);
    const EigenoperatorSet optical = eigenoperators(eig, collective_dipole(spec), deg_tol);
    std::optional<EigenoperatorSet> trap;
    if (spec.has_trap()) trap = eigenoperators(eig, trap_lowering(spec), deg_tol);
    double spread = 0.0;
    if (!optical.frequencies.empty()) spread = optical.frequencies.back() - optical.frequencies.front();
    if (trap && !trap->frequencies.empty()) {
        spread = std::max(spread, trap->frequencies.back() - trap->frequencies.front());
    }

    auto generator_for = [&](double cutoff) {
        SecularPolicy p = policy;
        p.cutoff = cutoff;
        return partial_secular_generator(spec, optical, trap ? &*trap : nullptr, environment, p);
    };

    CutoffConvergence out;
    double cutoff = policy.cutoff_start;
    auto gen = generator_for(cutoff);
    if (policy.start_at_decay_scale && gen.max_decay_rate() > cutoff) {
        // Pairs closer than the relaxation rates never average out; start there.
        cutoff = gen.max_decay_rate();
        gen = generator_for(cutoff);
    }
    std::size_t pairs = gen.pair_count();
    // Rate observables; each column is compared relative to its own peak.
    auto rates = [&](const PartialSecularGenerator& g) {
        const auto series = evolve(g, rho0_site, t_grid, tol);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(t_grid.size()), 3);
        out.col(0) = series.column("emission");
        out.col(1) = series.column("absorption");
        out.col(2) = series.column("i_trap");
        return out;
    };
    Eigen::MatrixXd previous = rates(gen);
    out.tried.push_back(cutoff);
    std::size_t quiet = 0;
    for (std::size_t r = 0; r < policy.max_refinements; ++r) {
        if (cutoff > spread) {
            // Every pair is already retained; further growth changes nothing.
            out.converged = true;
            break;
        }
        cutoff *= policy.growth;
        gen = generator_for(cutoff);
        out.tried.push_back(cutoff);
        // Only refinements that admit new frequency pairs can change anything.
        if (gen.pair_count() == pairs) {
            out.changes.push_back(0.0);
            continue;
        }
        pairs = gen.pair_count();
        const Eigen::MatrixXd current = rates(gen);
        double change = 0.0;
        for (Eigen::Index c = 0; c < current.cols(); ++c) {
            const double scale = current.col(c).cwiseAbs().maxCoeff();
            if (scale > 0.0) change = std::max(change, (current.col(c) - previous.col(c)).cwiseAbs().maxCoeff() / scale);
        }
        out.changes.push_back(change);
        previous = current;
        quiet = change < policy.convergence_tol ? quiet + 1 : 0;
        if (quiet >= policy.patience) {
            out.converged = true;
            break;
        }
    }
    out.cutoff = cutoff;
    return out;
}

DisorderRun disorder_ensemble_average(const SiteHamiltonianSpec& spec_template, const DisorderConfig& cfg,
                                      const SiteEnvironment& environment, const SecularPolicy& policy,
                                      bool refine_cutoff, const Eigen::MatrixXcd& rho0_site,
                                      const std::vector<double>& t_grid, double tol, unsigned threads)
{
    if (cfg.n_realizations == 0) throw ConfigError("n_realizations must be at least 1");
    DisorderRun result;
    SecularPolicy used = policy;

    auto spec_for = [&](std::size_t r) {
        SiteHamiltonianSpec spec = spec_template;
        spec.site_frequencies = sample_disorder(cfg, spec.n_atoms, r);
        return spec;
    };

    if (refine_cutoff) {
        const CutoffConvergence conv = converge_cutoff(spec_for(0), environment, policy, rho0_site, t_grid, tol);
        used.cutoff = conv.cutoff;
        result.cutoff_converged = conv.converged;
    }
    result.cutoff = used.cutoff;

    constexpr std::size_t block_size = 8;
    const std::size_t n_blocks = (cfg.n_realizations + block_size - 1) / block_size;
    std::vector<SeriesAccumulator> blocks(n_blocks);
    std::vector<std::string> names;
    std::mutex mutex;
    std::exception_ptr failure;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        try {
            for (std::size_t b = next++; b < n_blocks; b = next++) {
                const std::size_t first = b * block_size;
                const std::size_t last = std::min(first + block_size, cfg.n_realizations);
                for (std::size_t r = first; r < last; ++r) {
                    const ObservableSeries s = evolve(build_generator(spec_for(r), environment, used),
                                                      rho0_site, t_grid, tol);
                    if (r == first) blocks[b] = SeriesAccumulator(t_grid, s.names());
                    blocks[b].add(s.values());
                    if (r == 0) {
                        std::lock_guard<std::mutex> lock(mutex);
                        names = s.names();
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(mutex);
            if (!failure) failure = std::current_exception();
            next = n_blocks;
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_blocks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    SeriesAccumulator total(t_grid, names);
    for (const auto& b : blocks) total.merge(b);
    result.ensemble = total.result();
    return result;
}

} // namespace superabsorb::site

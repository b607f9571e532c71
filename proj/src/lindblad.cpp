// lindblad.cpp: collective master equation on the Dicke ladder

#include "superabsorb/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>

#include "superabsorb/ode.hpp"

namespace superabsorb::lindblad {

namespace {

using dicke::HalfInt;
using dicke::Process;
using cd = std::complex<double>;

Eigen::MatrixXcd projector(Eigen::Index dim, Eigen::Index to, Eigen::Index from)
{
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
    op(to, from) = 1.0;
    return op;
}

double expectation(const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& rho)
{
    return op.transpose().cwiseProduct(rho).sum().real();
}

std::string level_name(HalfInt m) { return "p_M=" + m.str(); }

} // namespace

std::string to_string(ChannelKind kind)
{
    switch (kind) {
    case ChannelKind::emission: return "emission";
    case ChannelKind::absorption: return "absorption";
    case ChannelKind::trap: return "trap";
    case ChannelKind::trap_decay: return "trap_decay";
    case ChannelKind::other: return "other";
    }
    return "other";
}

std::string to_string(TrapMode mode)
{
    return mode == TrapMode::explicit_site ? "explicit_site" : "phenomenological";
}

TrapMode trap_mode_from_string(const std::string& name)
{
    if (name == "phenomenological") return TrapMode::phenomenological;
    if (name == "explicit_site") return TrapMode::explicit_site;
    throw ConfigError("unknown trap mode '" + name + "'");
}

void LindbladGenerator::validate() const
{
    const Eigen::Index d = dim();
    if (d == 0 || hamiltonian.cols() != d) throw DomainError("generator Hamiltonian must be square");
    if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, hamiltonian.cwiseAbs().maxCoeff())) {
        throw DomainError("generator Hamiltonian is not Hermitian");
    }
    for (const auto& c : channels) {
        if (c.op.rows() != d || c.op.cols() != d) throw DomainError("jump operator dimension mismatch");
        if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw DomainError("channel rates must be >= 0");
    }
}

LindbladGenerator build_collective_generator(const dicke::DickeLadder& ladder,
                                             const env::SpectralDensityModel& sd,
                                             const env::OccupationModel& occ, double gamma,
                                             const std::optional<TrapSpec>& trap,
                                             std::size_t dimension_cap)
{
    if (gamma < 0.0) throw DomainError("gamma must be non-negative");
    const int n = ladder.n_atoms();
    const bool explicit_trap = trap && trap->mode == TrapMode::explicit_site;
    const auto ladder_dim = static_cast<Eigen::Index>(ladder.size());
    const Eigen::Index dim = explicit_trap ? 2 * ladder_dim : ladder_dim;
    if (static_cast<std::size_t>(dim) > dimension_cap) {
        throw CapacityError("generator dimension " + std::to_string(dim) +
                            " exceeds the configured cap " + std::to_string(dimension_cap));
    }
    if (trap) {
        if (trap->extraction_rate < 0.0 || trap->coupling < 0.0) {
            throw DomainError("trap rates must be non-negative");
        }
        if (trap->mode == TrapMode::phenomenological && n % 2 != 0) {
            throw DomainError("the phenomenological trap needs an even N (levels M = 0, -1)");
        }
    }

    // Embeds a ladder operator into the full space.
    const Eigen::MatrixXcd trap_identity = Eigen::MatrixXcd::Identity(2, 2);
    auto embed = [&](const Eigen::MatrixXcd& op) -> Eigen::MatrixXcd {
        if (!explicit_trap) return op;
        return Eigen::kroneckerProduct(op, trap_identity).eval();
    };

    LindbladGenerator gen;
    gen.trap = trap;
    Eigen::MatrixXcd h_ladder = Eigen::MatrixXcd::Zero(ladder_dim, ladder_dim);
    for (Eigen::Index k = 0; k < ladder_dim; ++k) h_ladder(k, k) = ladder.levels()[k].energy;
    gen.hamiltonian = embed(h_ladder);

    const double tol = env::matching_tolerance(ladder.omega_a());
    for (Eigen::Index k = 0; k + 1 < ladder_dim; ++k) {
        const HalfInt upper = ladder.m_of(static_cast<std::size_t>(k + 1));
        const HalfInt lower = ladder.m_of(static_cast<std::size_t>(k));
        const double w = ladder.transition_frequencies()[k];
        const double kap = env::kappa(sd, w, tol);
        const double occ_n = env::occupation(occ, w, tol);
        const std::string tag = "M=" + upper.str() + "<->" + lower.str();

        Channel down;
        down.op = embed(projector(ladder_dim, k, k + 1));
        down.rate = kap * (occ_n + 1.0) * dicke::transition_rate(n, upper, Process::emit, gamma);
        down.kind = ChannelKind::emission;
        down.frequency = w;
        down.label = "emit " + tag;
        gen.channels.push_back(std::move(down));

        Channel up;
        up.op = embed(projector(ladder_dim, k + 1, k));
        up.rate = kap * occ_n * dicke::transition_rate(n, lower, Process::absorb, gamma);
        up.kind = ChannelKind::absorption;
        up.frequency = w;
        up.label = "absorb " + tag;
        gen.channels.push_back(std::move(up));
    }

    if (trap && trap->mode == TrapMode::phenomenological) {
        const auto k0 = static_cast<Eigen::Index>(ladder.index_of(HalfInt::from_int(0)));
        Channel c;
        c.op = projector(ladder_dim, k0 - 1, k0);
        c.rate = trap->extraction_rate;
        c.kind = ChannelKind::trap;
        c.frequency = ladder.transition_frequencies()[k0 - 1];
        c.label = "trap M=0->-1";
        gen.channels.push_back(std::move(c));
    }

    if (explicit_trap) {
        Eigen::MatrixXcd j_plus = Eigen::MatrixXcd::Zero(ladder_dim, ladder_dim);
        for (Eigen::Index k = 0; k + 1 < ladder_dim; ++k) {
            j_plus(k + 1, k) = dicke::collective_matrix_element(
                ladder.j(), ladder.m_of(static_cast<std::size_t>(k)), dicke::LadderStep::raise);
        }
        Eigen::MatrixXcd sigma_minus = Eigen::MatrixXcd::Zero(2, 2);
        sigma_minus(0, 1) = 1.0;
        const Eigen::MatrixXcd sigma_plus = sigma_minus.adjoint();
        Eigen::MatrixXcd n_trap = Eigen::MatrixXcd::Zero(2, 2);
        n_trap(1, 1) = 1.0;
        const Eigen::MatrixXcd ladder_identity = Eigen::MatrixXcd::Identity(ladder_dim, ladder_dim);

        gen.hamiltonian += trap->coupling * (Eigen::kroneckerProduct(j_plus, sigma_minus).eval() +
                                             Eigen::kroneckerProduct(j_plus.adjoint().eval(), sigma_plus).eval());
        gen.hamiltonian += trap->trap_frequency * Eigen::kroneckerProduct(ladder_identity, n_trap).eval();

        Channel c;
        c.op = Eigen::kroneckerProduct(ladder_identity, sigma_minus).eval();
        c.rate = trap->extraction_rate;
        c.kind = ChannelKind::trap_decay;
        c.frequency = trap->trap_frequency;
        c.label = "trap decay";
        gen.channels.push_back(std::move(c));
    }

    for (Eigen::Index k = 0; k < ladder_dim; ++k) {
        gen.populations.emplace_back(level_name(ladder.m_of(static_cast<std::size_t>(k))),
                                     embed(projector(ladder_dim, k, k)));
    }
    if (explicit_trap) {
        Eigen::MatrixXcd n_trap = Eigen::MatrixXcd::Zero(2, 2);
        n_trap(1, 1) = 1.0;
        gen.populations.emplace_back(
            "p_trap", Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(ladder_dim, ladder_dim), n_trap).eval());
    }
    gen.validate();
    return gen;
}

Eigen::VectorXcd ladder_ket(int n_atoms, HalfInt m, bool explicit_trap)
{
    const dicke::HalfInt j = dicke::total_spin(n_atoms);
    if (std::abs(m.twice()) > j.twice() || (j.twice() - m.twice()) % 2 != 0) {
        throw DomainError("M = " + m.str() + " is not a ladder level");
    }
    const Eigen::Index k = (m.twice() + j.twice()) / 2;
    const Eigen::Index dim = (n_atoms + 1) * (explicit_trap ? 2 : 1);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi(explicit_trap ? 2 * k : k) = 1.0;
    return psi;
}

DensityOperator ladder_state(int n_atoms, HalfInt m, bool explicit_trap)
{
    const Eigen::VectorXcd psi = ladder_ket(n_atoms, m, explicit_trap);
    return psi * psi.adjoint();
}

Liouvillian::Liouvillian(const LindbladGenerator& gen)
{
    gen.validate();
    const Eigen::Index d = gen.dim();
    Eigen::MatrixXcd k_half = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& c : gen.channels) {
        if (c.rate == 0.0) continue;
        const Eigen::MatrixXcd ldl = c.op.adjoint() * c.op;
        k_half += 0.5 * c.rate * ldl;
        jumps_.emplace_back(c.rate, c.op.sparseView());
        auto it = std::find_if(rate_ops_.begin(), rate_ops_.end(),
                               [&](const auto& p) { return p.first == c.kind; });
        if (it == rate_ops_.end()) {
            rate_ops_.emplace_back(c.kind, c.rate * ldl);
        } else {
            it->second += c.rate * ldl;
        }
    }
    h_eff_ = gen.hamiltonian - cd(0.0, 1.0) * k_half;
}

void Liouvillian::apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const
{
    const Eigen::MatrixXcd a = h_eff_ * rho;
    // -i (H_eff rho - rho H_eff^dag); the second term is the adjoint of the first
    // because rho is Hermitian, but keep it general for non-Hermitian probes.
    out.noalias() = cd(0.0, -1.0) * a;
    out.noalias() += cd(0.0, 1.0) * (rho * h_eff_.adjoint());
    for (const auto& [rate, op] : jumps_) {
        const Eigen::MatrixXcd lr = op * rho;
        out.noalias() += rate * (lr * op.adjoint());
    }
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const
{
    Eigen::MatrixXcd out(rho.rows(), rho.cols());
    apply(rho, out);
    return out;
}

double Liouvillian::jump_rate(ChannelKind kind, const Eigen::MatrixXcd& rho) const
{
    for (const auto& [k, op] : rate_ops_) {
        if (k == kind) return expectation(op, rho);
    }
    return 0.0;
}

ObservableSeries evolve(const LindbladGenerator& gen, const DensityOperator& rho0,
                        const std::vector<double>& t_grid, const EvolveOptions& options)
{
    const Eigen::Index d = gen.dim();
    if (rho0.rows() != d || rho0.cols() != d) throw DomainError("initial state dimension mismatch");
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("time grid must start at 0");
    validate_density(rho0);

    const Liouvillian liouvillian(gen);
    std::vector<std::string> names;
    for (const auto& p : gen.populations) names.push_back(p.first);
    for (const char* extra : {"emission", "absorption", "i_trap", "emitted", "absorbed", "extracted"}) {
        names.emplace_back(extra);
    }
    ObservableSeries series(t_grid, names);
    const auto n_pop = static_cast<Eigen::Index>(gen.populations.size());
    const ChannelKind trap_kind = gen.trap && gen.trap->mode == TrapMode::explicit_site
                                      ? ChannelKind::trap_decay
                                      : ChannelKind::trap;

    // State: vec(rho) followed by three counters (emitted, absorbed, extracted).
    const Eigen::Index n_rho = d * d;
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n_rho + 3);
    Eigen::Map<Eigen::MatrixXcd>(y.data(), d, d) = rho0;

    Eigen::MatrixXcd work(d, d);
    auto rhs = [&](double, const Eigen::VectorXcd& state, Eigen::VectorXcd& dydt) {
        const Eigen::Map<const Eigen::MatrixXcd> rho(state.data(), d, d);
        liouvillian.apply(rho, work);
        Eigen::Map<Eigen::MatrixXcd>(dydt.data(), d, d) = work;
        dydt(n_rho) = liouvillian.jump_rate(ChannelKind::emission, rho);
        dydt(n_rho + 1) = liouvillian.jump_rate(ChannelKind::absorption, rho);
        dydt(n_rho + 2) = liouvillian.jump_rate(trap_kind, rho);
    };

    SeriesDiagnostics& diag = series.diagnostics;
    diag.min_eigenvalue = std::numeric_limits<double>::infinity();
    auto observe = [&](std::size_t i, double, const Eigen::VectorXcd& state) {
        const Eigen::Map<const Eigen::MatrixXcd> rho_map(state.data(), d, d);
        const Eigen::MatrixXcd rho = rho_map;
        auto row = series.values().row(static_cast<Eigen::Index>(i));
        for (Eigen::Index p = 0; p < n_pop; ++p) row(p) = expectation(gen.populations[p].second, rho);
        row(n_pop) = liouvillian.jump_rate(ChannelKind::emission, rho);
        row(n_pop + 1) = liouvillian.jump_rate(ChannelKind::absorption, rho);
        row(n_pop + 2) = liouvillian.jump_rate(trap_kind, rho);
        row(n_pop + 3) = state(n_rho).real();
        row(n_pop + 4) = state(n_rho + 1).real();
        row(n_pop + 5) = state(n_rho + 2).real();

        diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(rho.trace() - 1.0));
        diag.max_hermiticity_error =
            std::max(diag.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        if (options.check_positivity) {
            const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues().minCoeff());
        }
    };

    ode::Options opt;
    opt.tol = options.tol;
    const ode::Stats stats = ode::integrate(rhs, y, t_grid, opt, observe);
    diag.steps_accepted = stats.accepted;
    diag.steps_rejected = stats.rejected;
    if (!options.check_positivity) diag.min_eigenvalue = 0.0;
    return series;
}

ObservableSeries evolve(const LindbladGenerator& gen, const DensityOperator& rho0,
                        const std::vector<double>& t_grid, double tol)
{
    EvolveOptions options;
    options.tol = tol;
    return evolve(gen, rho0, t_grid, options);
}

Eigen::VectorXd trap_current_numeric(const ObservableSeries& series, const TrapSpec& trap)
{
    const std::string name = trap.mode == TrapMode::explicit_site ? "p_trap" : "p_M=0";
    return trap.extraction_rate * series.column(name);
}

void validate_density(const DensityOperator& rho, double trace_tol, double positivity_tol)
{
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw DomainError("density operator must be square");
    if (std::abs(rho.trace() - 1.0) > trace_tol) throw DomainError("density operator trace differs from 1");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("density operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -positivity_tol) {
        throw DomainError("density operator has a negative eigenvalue");
    }
}

} // namespace superabsorb::lindblad

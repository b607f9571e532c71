// site.hpp: site-basis Hamiltonian with static disorder, eigenoperators and the
// partial-secular master equation

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "superabsorb/dicke.hpp"
#include "superabsorb/environment.hpp"
#include "superabsorb/lindblad.hpp"
#include "superabsorb/series.hpp"

namespace superabsorb::site {

// Basis state index: bit m set means atom m is excited. With an explicit trap
// the index is 2 * ring_state + trap_excited.
enum class Topology { ring_nn, chain_nn, all_pair };
std::string to_string(Topology topology);
Topology topology_from_string(const std::string& name);

struct SiteHamiltonianSpec {
    int n_atoms = 4;
    std::vector<double> site_frequencies; // omega_m, size n_atoms
    double hop_strength = 0.0;            // Omega
    Topology topology = Topology::ring_nn;
    std::optional<lindblad::TrapSpec> trap; // only explicit_site is meaningful here
    std::size_t dimension_cap = lindblad::default_dimension_cap;

    bool has_trap() const { return trap.has_value(); }
    Eigen::Index dim() const;
};

SiteHamiltonianSpec uniform_spec(int n_atoms, double omega_a, double hop, Topology topology);

// ring_nn and chain_nn carry Omega per neighbouring pair; all_pair carries
// 2 Omega per pair, i.e. Omega times the ordered sum over i != j of both hop terms.
Eigen::MatrixXd build_site_hamiltonian(const SiteHamiltonianSpec& spec);

// Collective operators of the ring (identity on the trap, if present).
Eigen::SparseMatrix<double> collective_lowering(const SiteHamiltonianSpec& spec);
Eigen::SparseMatrix<double> collective_dipole(const SiteHamiltonianSpec& spec); // J- + J+
Eigen::SparseMatrix<double> trap_lowering(const SiteHamiltonianSpec& spec);

// Symmetric Dicke state |N/2, M> in the site basis (trap empty).
Eigen::VectorXd dicke_state(const SiteHamiltonianSpec& spec, dicke::HalfInt m);

struct DisorderConfig {
    double mean = 10.0;   // omega_A
    double stddev = 0.0;  // disorder sigma
    std::size_t n_realizations = 1;
    std::uint64_t base_seed = 1;
};

// Independent normal draws; seeded with base_seed + realization.
std::vector<double> sample_disorder(const DisorderConfig& cfg, int n_atoms, std::size_t realization);

struct EigenoperatorSet {
    Eigen::VectorXd energies;     // ascending within each excitation block
    Eigen::MatrixXd eigenvectors; // columns are eigenstates in the site basis
    std::vector<double> frequencies; // bin centres, ascending
    // A(w) in the eigenbasis: lowers the energy by w (w > 0 emits).
    std::vector<Eigen::SparseMatrix<double>> operators;
    double degeneracy_tol = 0.0;

    std::size_t size() const { return frequencies.size(); }
    Eigen::MatrixXd site_operator(std::size_t k) const; // V A V^T
};

struct Diagonalisation {
    Eigen::VectorXd energies;
    Eigen::MatrixXd eigenvectors;
};

// Block-wise by excitation number when H conserves it.
Diagonalisation diagonalise(const Eigen::MatrixXd& hamiltonian);

EigenoperatorSet eigenoperators(const Diagonalisation& eig, const Eigen::SparseMatrix<double>& coupling,
                                double degeneracy_tol);
EigenoperatorSet eigenoperators(const Eigen::MatrixXd& hamiltonian,
                                const Eigen::SparseMatrix<double>& coupling, double degeneracy_tol);

struct SecularPolicy {
    double cutoff = 0.0; // keep pairs with |w - w'| <= cutoff
    double convergence_tol = 1e-3;
    std::size_t max_refinements = 32;
    std::size_t patience = 2; // consecutive small changes required
    double cutoff_start = 1e-3;
    double growth = 2.0;
    bool start_at_decay_scale = true; // raise cutoff_start to the largest decay rate
    std::size_t term_budget = 20'000'000;

    static SecularPolicy secular() { return {}; }
    static SecularPolicy full()
    {
        SecularPolicy p;
        p.cutoff = std::numeric_limits<double>::infinity();
        return p;
    }
};

struct SiteEnvironment {
    env::SpectralDensityModel sd;
    env::OccupationModel occ;
    double gamma = 1.0;
    double omega_a = 10.0; // sets the frequency matching tolerance
};

// Master equation in the eigenbasis of H. The Schroedinger-picture dissipator
// is time independent; evolve() integrates in the interaction picture so the
// step size is set by the retained frequency differences, not by omega_A.
class PartialSecularGenerator {
public:
    Eigen::Index dim() const { return energies_.size(); }
    double cutoff() const { return cutoff_; }
    std::size_t pair_count() const { return pair_count_; }
    std::size_t term_count() const { return terms_.size(); }
    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
    // Largest population decay rate, 2 max_k K_kk.
    double max_decay_rate() const { return 2.0 * k_matrix_.diagonal().maxCoeff(); }

    // Schroedinger-picture dissipator in the eigenbasis.
    void apply_dissipator(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
    double rate(lindblad::ChannelKind kind, const Eigen::MatrixXcd& rho) const;

    const std::vector<std::pair<std::string, Eigen::MatrixXcd>>& observables() const { return observables_; }

private:
    friend PartialSecularGenerator partial_secular_generator(const SiteHamiltonianSpec&,
                                                             const EigenoperatorSet&,
                                                             const EigenoperatorSet*,
                                                             const SiteEnvironment&,
                                                             const SecularPolicy&);
    struct Term {
        std::uint32_t out;
        std::uint32_t in;
        double coef;
    };

    Eigen::VectorXd energies_;
    Eigen::MatrixXd eigenvectors_;
    std::vector<Term> terms_;
    Eigen::MatrixXd k_matrix_;
    Eigen::MatrixXd emission_op_;
    Eigen::MatrixXd absorption_op_;
    Eigen::MatrixXd trap_op_;
    std::vector<std::pair<std::string, Eigen::MatrixXcd>> observables_; // eigenbasis
    double cutoff_ = 0.0;
    std::size_t pair_count_ = 0;
};

// `trap_ops` decomposes the trap lowering operator; its bins with w > 0 decay at
// the trap extraction rate.
PartialSecularGenerator partial_secular_generator(const SiteHamiltonianSpec& spec,
                                                  const EigenoperatorSet& optical,
                                                  const EigenoperatorSet* trap_ops,
                                                  const SiteEnvironment& environment,
                                                  const SecularPolicy& policy);

// Convenience: diagonalise spec, decompose dipole (and trap), assemble.
PartialSecularGenerator build_generator(const SiteHamiltonianSpec& spec, const SiteEnvironment& environment,
                                        const SecularPolicy& policy);

// rho0 in the site basis. Columns: "p_M=..." (symmetric states), "p_n=k"
// (ring excitation number), "p_trap" with a trap, then "emission",
// "absorption", "i_trap", "emitted", "absorbed", "extracted".
ObservableSeries evolve(const PartialSecularGenerator& gen, const Eigen::MatrixXcd& rho0_site,
                        const std::vector<double>& t_grid, double tol = 1e-8);

struct CutoffConvergence {
    double cutoff = 0.0;
    bool converged = false;
    std::vector<double> tried;
    std::vector<double> changes; // max relative change of the rate series per refinement
};

// Grows the cutoff geometrically from policy.cutoff_start until the emission,
// absorption and trap-current series change by less than convergence_tol
// (each relative to its own peak) on
// `patience` consecutive refinements that admit new frequency pairs.
CutoffConvergence converge_cutoff(const SiteHamiltonianSpec& spec, const SiteEnvironment& environment,
                                  const SecularPolicy& policy, const Eigen::MatrixXcd& rho0_site,
                                  const std::vector<double>& t_grid, double tol = 1e-8);

struct DisorderRun {
    EnsembleResult ensemble;
    double cutoff = 0.0;
    bool cutoff_converged = true;
};

// Averages evolve() over disorder realizations. With refine_cutoff the cutoff
// is converged on realization 0 and reused for the others.
DisorderRun disorder_ensemble_average(const SiteHamiltonianSpec& spec_template, const DisorderConfig& cfg,
                                      const SiteEnvironment& environment, const SecularPolicy& policy,
                                      bool refine_cutoff, const Eigen::MatrixXcd& rho0_site,
                                      const std::vector<double>& t_grid, double tol = 1e-8,
                                      unsigned threads = 1);

} // namespace superabsorb::site

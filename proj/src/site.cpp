// site.cpp: site-basis Hamiltonian, disorder sampling and eigenoperators

#include "superabsorb/site.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "superabsorb/errors.hpp"

namespace superabsorb::site {

namespace {

using Triplet = Eigen::Triplet<double>;

int ring_count(int n_atoms) { return 1 << n_atoms; }

Eigen::Index index_of(const SiteHamiltonianSpec& spec, int ring_state, int trap_bit)
{
    return spec.has_trap() ? 2 * ring_state + trap_bit : ring_state;
}

void check_spec(const SiteHamiltonianSpec& spec)
{
    if (spec.n_atoms < 1) throw DomainError("site Hamiltonian needs at least one atom");
    if (spec.n_atoms > 24) throw CapacityError("site basis is limited to 24 atoms");
    if (spec.site_frequencies.size() != static_cast<std::size_t>(spec.n_atoms)) {
        throw ConfigError("site_frequencies must have one entry per atom");
    }
    if (static_cast<std::size_t>(spec.dim()) > spec.dimension_cap) {
        throw CapacityError("site basis dimension " + std::to_string(spec.dim()) +
                            " exceeds the configured cap " + std::to_string(spec.dimension_cap));
    }
    if (spec.trap && spec.trap->mode != lindblad::TrapMode::explicit_site) {
        throw ConfigError("the site-basis solver supports only the explicit_site trap");
    }
}

std::vector<std::pair<int, int>> bonds(int n, Topology topology)
{
    std::vector<std::pair<int, int>> out;
    switch (topology) {
    case Topology::chain_nn:
        for (int i = 0; i + 1 < n; ++i) out.emplace_back(i, i + 1);
        break;
    case Topology::ring_nn:
        for (int i = 0; i + 1 < n; ++i) out.emplace_back(i, i + 1);
        if (n > 1) out.emplace_back(n - 1, 0); // N = 2: the pair is bonded twice around the ring
        break;
    case Topology::all_pair:
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) out.emplace_back(i, j);
        }
        break;
    }
    return out;
}

} // namespace

std::string to_string(Topology topology)
{
    switch (topology) {
    case Topology::ring_nn: return "ring_nn";
    case Topology::chain_nn: return "chain_nn";
    case Topology::all_pair: return "all_pair";
    }
    return "ring_nn";
}

Topology topology_from_string(const std::string& name)
{
    if (name == "ring_nn") return Topology::ring_nn;
    if (name == "chain_nn") return Topology::chain_nn;
    if (name == "all_pair") return Topology::all_pair;
    throw ConfigError("unknown topology '" + name + "'");
}

Eigen::Index SiteHamiltonianSpec::dim() const
{
    if (n_atoms < 1 || n_atoms > 24) return 0;
    return static_cast<Eigen::Index>(ring_count(n_atoms)) * (has_trap() ? 2 : 1);
}

SiteHamiltonianSpec uniform_spec(int n_atoms, double omega_a, double hop, Topology topology)
{
    SiteHamiltonianSpec spec;
    spec.n_atoms = n_atoms;
    spec.site_frequencies.assign(static_cast<std::size_t>(std::max(n_atoms, 0)), omega_a);
    spec.hop_strength = hop;
    spec.topology = topology;
    return spec;
}

Eigen::MatrixXd build_site_hamiltonian(const SiteHamiltonianSpec& spec)
{
    check_spec(spec);
    const int n = spec.n_atoms;
    const Eigen::Index dim = spec.dim();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double weight = spec.topology == Topology::all_pair ? 2.0 * spec.hop_strength : spec.hop_strength;
    const auto pairs = bonds(n, spec.topology);
    const int trap_states = spec.has_trap() ? 2 : 1;

    for (int s = 0; s < ring_count(n); ++s) {
        double onsite = 0.0;
        for (int m = 0; m < n; ++m) {
            if (s & (1 << m)) onsite += spec.site_frequencies[static_cast<std::size_t>(m)];
        }
        for (int t = 0; t < trap_states; ++t) {
            const Eigen::Index row = index_of(spec, s, t);
            h(row, row) += onsite + (t == 1 ? spec.trap->trap_frequency : 0.0);
            for (const auto& [i, j] : pairs) {
                const bool ei = s & (1 << i);
                const bool ej = s & (1 << j);
                if (ei == ej) continue;
                const int hopped = s ^ (1 << i) ^ (1 << j);
                h(index_of(spec, hopped, t), row) += weight;
            }
        }
        if (spec.has_trap()) {
            // g J+ sigma_-^T: trap exciton moves onto the ring.
            for (int m = 0; m < n; ++m) {
                if (s & (1 << m)) continue;
                const Eigen::Index from = index_of(spec, s, 1);
                const Eigen::Index to = index_of(spec, s | (1 << m), 0);
                h(to, from) += spec.trap->coupling;
                h(from, to) += spec.trap->coupling;
            }
        }
    }
    return h;
}

Eigen::SparseMatrix<double> collective_lowering(const SiteHamiltonianSpec& spec)
{
    check_spec(spec);
    const int n = spec.n_atoms;
    std::vector<Triplet> entries;
    const int trap_states = spec.has_trap() ? 2 : 1;
    for (int s = 0; s < ring_count(n); ++s) {
        for (int m = 0; m < n; ++m) {
            if (!(s & (1 << m))) continue;
            for (int t = 0; t < trap_states; ++t) {
                entries.emplace_back(index_of(spec, s ^ (1 << m), t), index_of(spec, s, t), 1.0);
            }
        }
    }
    Eigen::SparseMatrix<double> op(spec.dim(), spec.dim());
    op.setFromTriplets(entries.begin(), entries.end());
    return op;
}

Eigen::SparseMatrix<double> collective_dipole(const SiteHamiltonianSpec& spec)
{
    const Eigen::SparseMatrix<double> lower = collective_lowering(spec);
    return Eigen::SparseMatrix<double>(lower + Eigen::SparseMatrix<double>(lower.transpose()));
}

Eigen::SparseMatrix<double> trap_lowering(const SiteHamiltonianSpec& spec)
{
    check_spec(spec);
    if (!spec.has_trap()) throw ConfigError("spec has no trap site");
    std::vector<Triplet> entries;
    for (int s = 0; s < ring_count(spec.n_atoms); ++s) {
        entries.emplace_back(index_of(spec, s, 0), index_of(spec, s, 1), 1.0);
    }
    Eigen::SparseMatrix<double> op(spec.dim(), spec.dim());
    op.setFromTriplets(entries.begin(), entries.end());
    return op;
}

Eigen::VectorXd dicke_state(const SiteHamiltonianSpec& spec, dicke::HalfInt m)
{
    check_spec(spec);
    const int n = spec.n_atoms;
    const int twice_k = n + m.twice();
    if (std::abs(m.twice()) > n || twice_k % 2 != 0) {
        throw DomainError("M = " + m.str() + " is not a level of the N = " + std::to_string(n) + " ladder");
    }
    const int k = twice_k / 2;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(spec.dim());
    int count = 0;
    for (int s = 0; s < ring_count(n); ++s) {
        if (std::popcount(static_cast<unsigned>(s)) == k) {
            psi(index_of(spec, s, 0)) = 1.0;
            ++count;
        }
    }
    return psi / std::sqrt(static_cast<double>(count));
}

std::vector<double> sample_disorder(const DisorderConfig& cfg, int n_atoms, std::size_t realization)
{
    if (cfg.stddev < 0.0) throw DomainError("disorder stddev must be non-negative");
    if (n_atoms < 1) throw DomainError("need at least one atom");
    std::vector<double> out(static_cast<std::size_t>(n_atoms), cfg.mean);
    if (cfg.stddev == 0.0) return out;
    std::mt19937_64 rng(cfg.base_seed + realization);
    std::normal_distribution<double> normal(cfg.mean, cfg.stddev);
    for (double& w : out) w = normal(rng);
    return out;
}

Diagonalisation diagonalise(const Eigen::MatrixXd& hamiltonian)
{
    const Eigen::Index dim = hamiltonian.rows();
    if (dim == 0 || hamiltonian.cols() != dim) throw DomainError("Hamiltonian must be square");
    const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
    if ((hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DomainError("Hamiltonian is not Hermitian");
    }

    // Group basis states into blocks of equal excitation number when H never
    // connects different numbers; popcount of the index covers the trap-free
    // case and the 2*s+t layout alike because both count excitations as bits.
    const auto number = [&](Eigen::Index i) { return std::popcount(static_cast<std::uint64_t>(i)); };
    bool conserving = true;
    for (Eigen::Index c = 0; c < dim && conserving; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            if (hamiltonian(r, c) != 0.0 && number(r) != number(c)) {
                conserving = false;
                break;
            }
        }
    }

    Diagonalisation out;
    out.energies.resize(dim);
    out.eigenvectors = Eigen::MatrixXd::Zero(dim, dim);
    if (!conserving) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian);
        out.energies = es.eigenvalues();
        out.eigenvectors = es.eigenvectors();
        return out;
    }

    int max_number = 0;
    for (Eigen::Index i = 0; i < dim; ++i) max_number = std::max(max_number, number(i));
    Eigen::Index column = 0;
    for (int k = 0; k <= max_number; ++k) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (number(i) == k) members.push_back(i);
        }
        const auto b = static_cast<Eigen::Index>(members.size());
        if (b == 0) continue;
        Eigen::MatrixXd block(b, b);
        for (Eigen::Index r = 0; r < b; ++r) {
            for (Eigen::Index c = 0; c < b; ++c) block(r, c) = hamiltonian(members[r], members[c]);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        for (Eigen::Index c = 0; c < b; ++c) {
            out.energies(column) = es.eigenvalues()(c);
            for (Eigen::Index r = 0; r < b; ++r) out.eigenvectors(members[r], column) = es.eigenvectors()(r, c);
            ++column;
        }
    }
    return out;
}

EigenoperatorSet eigenoperators(const Diagonalisation& eig, const Eigen::SparseMatrix<double>& coupling,
                                double degeneracy_tol)
{
    const Eigen::Index dim = eig.energies.size();
    if (coupling.rows() != dim || coupling.cols() != dim) throw DomainError("coupling operator dimension mismatch");
    if (degeneracy_tol < 0.0) throw DomainError("degeneracy tolerance must be non-negative");

    const Eigen::MatrixXd& v = eig.eigenvectors;
    const Eigen::MatrixXd x = v.transpose() * (coupling * v);
    const double drop = 1e-13 * std::max(1.0, x.cwiseAbs().maxCoeff());

    struct Element {
        double omega;
        Eigen::Index row;
        Eigen::Index col;
        double value;
    };
    std::vector<Element> elements;
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
            if (std::abs(x(r, c)) > drop) elements.push_back({eig.energies(c) - eig.energies(r), r, c, x(r, c)});
        }
    }
    std::stable_sort(elements.begin(), elements.end(),
                     [](const Element& a, const Element& b) { return a.omega < b.omega; });

    EigenoperatorSet out;
    out.energies = eig.energies;
    out.eigenvectors = eig.eigenvectors;
    out.degeneracy_tol = degeneracy_tol;
    std::size_t first = 0;
    while (first < elements.size()) {
        std::size_t last = first + 1;
        while (last < elements.size() && elements[last].omega - elements[last - 1].omega <= degeneracy_tol) ++last;
        std::vector<Triplet> entries;
        double sum = 0.0;
        for (std::size_t i = first; i < last; ++i) {
            entries.emplace_back(elements[i].row, elements[i].col, elements[i].value);
            sum += elements[i].omega;
        }
        Eigen::SparseMatrix<double> op(dim, dim);
        op.setFromTriplets(entries.begin(), entries.end());
        out.frequencies.push_back(sum / static_cast<double>(last - first));
        out.operators.push_back(std::move(op));
        first = last;
    }
    return out;
}

EigenoperatorSet eigenoperators(const Eigen::MatrixXd& hamiltonian, const Eigen::SparseMatrix<double>& coupling,
                                double degeneracy_tol)
{
    return eigenoperators(diagonalise(hamiltonian), coupling, degeneracy_tol);
}

Eigen::MatrixXd EigenoperatorSet::site_operator(std::size_t k) const
{
    return eigenvectors * (operators.at(k) * eigenvectors.transpose());
}

} // namespace superabsorb::site

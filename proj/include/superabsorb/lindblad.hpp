// lindblad.hpp: collective master equation on the Dicke ladder, optional trap site

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "superabsorb/dicke.hpp"
#include "superabsorb/environment.hpp"
#include "superabsorb/errors.hpp"
#include "superabsorb/series.hpp"

namespace superabsorb::lindblad {

using DensityOperator = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

// D[L] rho = L rho L^dag - (L^dag L rho + rho L^dag L) / 2
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
dissipator(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& jump,
           const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& rho)
{
    if (jump.rows() != jump.cols() || rho.rows() != rho.cols() || jump.rows() != rho.rows()) {
        throw DomainError("dissipator: operator and state dimensions differ");
    }
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ldl = jump.adjoint() * jump;
    return jump * rho * jump.adjoint() - Scalar(0.5) * (ldl * rho + rho * ldl);
}

enum class ChannelKind { emission, absorption, trap, trap_decay, other };
std::string to_string(ChannelKind kind);

struct Channel {
    Eigen::MatrixXcd op;
    double rate = 0.0;
    ChannelKind kind = ChannelKind::other;
    double frequency = 0.0;
    std::string label;
};

enum class TrapMode { phenomenological, explicit_site };
std::string to_string(TrapMode mode);
TrapMode trap_mode_from_string(const std::string& name);

struct TrapSpec {
    double coupling = 0.0;        // g
    double trap_frequency = 0.0;  // omega_trap
    double extraction_rate = 0.0; // Gamma_trap
    TrapMode mode = TrapMode::phenomenological;
};

struct LindbladGenerator {
    Eigen::MatrixXcd hamiltonian;
    std::vector<Channel> channels;
    // Named populations recorded by evolve(), e.g. "p_M=0" or "p_trap".
    std::vector<std::pair<std::string, Eigen::MatrixXcd>> populations;
    std::optional<TrapSpec> trap;

    Eigen::Index dim() const { return hamiltonian.rows(); }
    void validate() const;
};

inline constexpr std::size_t default_dimension_cap = 4096;

LindbladGenerator build_collective_generator(const dicke::DickeLadder& ladder,
                                             const env::SpectralDensityModel& sd,
                                             const env::OccupationModel& occ, double gamma,
                                             const std::optional<TrapSpec>& trap = std::nullopt,
                                             std::size_t dimension_cap = default_dimension_cap);

// |J,M><J,M| in the generator's basis (trap, if any, in its ground state).
DensityOperator ladder_state(int n_atoms, dicke::HalfInt m, bool explicit_trap);
Eigen::VectorXcd ladder_ket(int n_atoms, dicke::HalfInt m, bool explicit_trap);

// Right-hand side of the master equation, precomputed for repeated use.
class Liouvillian {
public:
    explicit Liouvillian(const LindbladGenerator& gen);

    void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

    // Tr[sum_c r_c L_c^dag L_c rho] restricted to one channel kind.
    double jump_rate(ChannelKind kind, const Eigen::MatrixXcd& rho) const;

private:
    Eigen::MatrixXcd h_eff_;
    std::vector<std::pair<double, SparseOperator>> jumps_;
    std::vector<std::pair<ChannelKind, Eigen::MatrixXcd>> rate_ops_;
};

struct EvolveOptions {
    double tol = 1e-8;
    bool check_positivity = true;
};

// Columns: each generator population, "emission", "absorption", "i_trap"
// (instantaneous rates), and their integrals "emitted", "absorbed", "extracted".
ObservableSeries evolve(const LindbladGenerator& gen, const DensityOperator& rho0,
                        const std::vector<double>& t_grid, const EvolveOptions& options = {});
ObservableSeries evolve(const LindbladGenerator& gen, const DensityOperator& rho0,
                        const std::vector<double>& t_grid, double tol);

// Gamma_trap times P(M=0) or P(trap), depending on the trap mode.
Eigen::VectorXd trap_current_numeric(const ObservableSeries& series, const TrapSpec& trap);

// Checks trace, Hermiticity and positivity within the given tolerances.
void validate_density(const DensityOperator& rho, double trace_tol = 1e-9,
                      double positivity_tol = 1e-9);

} // namespace superabsorb::lindblad

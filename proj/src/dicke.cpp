// dicke.cpp: symmetric Dicke ladder algebra

#include "superabsorb/dicke.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "superabsorb/errors.hpp"

namespace superabsorb::dicke {

namespace {

void require_in_ladder(HalfInt j, HalfInt m)
{
    if (std::abs(m.twice()) > j.twice() || (j.twice() - m.twice()) % 2 != 0) {
        std::ostringstream msg;
        msg << "M = " << m.str() << " is not a level of the J = " << j.str() << " ladder";
        throw DomainError(msg.str());
    }
}

} // namespace

std::string HalfInt::str() const
{
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
}

std::string to_string(InteractionModel model)
{
    return model == InteractionModel::all_pair ? "all_pair" : "nearest_neighbour";
}

InteractionModel interaction_model_from_string(const std::string& name)
{
    if (name == "nearest_neighbour") return InteractionModel::nearest_neighbour;
    if (name == "all_pair") return InteractionModel::all_pair;
    throw ConfigError("unknown interaction model '" + name + "'");
}

double collective_matrix_element(HalfInt j, HalfInt m, LadderStep step)
{
    require_in_ladder(j, m);
    const double jj = j.value();
    const double mm = m.value();
    const double product = step == LadderStep::raise ? (jj + mm + 1.0) * (jj - mm)
                                                     : (jj - mm + 1.0) * (jj + mm);
    return std::sqrt(product);
}

double transition_rate(int n_atoms, HalfInt m, Process process, double gamma)
{
    if (n_atoms < 1) throw DomainError("transition_rate needs at least one atom");
    const double element = collective_matrix_element(
        total_spin(n_atoms), m, process == Process::emit ? LadderStep::lower : LadderStep::raise);
    return gamma * element * element;
}

double energy_shift(int n_atoms, HalfInt m, double omega_hop, InteractionModel model)
{
    if (n_atoms < 2) throw DomainError("energy_shift needs N >= 2");
    const HalfInt j = total_spin(n_atoms);
    require_in_ladder(j, m);
    const double jj = j.value();
    const double mm = m.value();
    if (model == InteractionModel::all_pair) return 2.0 * omega_hop * (jj * jj - mm * mm);
    return omega_hop * (jj * jj - mm * mm) / (jj - 0.5);
}

double transition_frequency(int n_atoms, HalfInt m, double omega_a, double omega_hop,
                            InteractionModel model)
{
    if (n_atoms < 2) throw DomainError("transition_frequency needs N >= 2");
    const HalfInt j = total_spin(n_atoms);
    require_in_ladder(j, m);
    if (m == -j) throw DomainError("M = -J has no lower level");
    const double mm = m.value();
    if (model == InteractionModel::all_pair) return omega_a - 4.0 * omega_hop * (mm - 0.5);
    return omega_a - 4.0 * omega_hop * (mm - 0.5) / (n_atoms - 1);
}

DickeLadder::DickeLadder(int n_atoms, double omega_a, double omega_hop, InteractionModel model)
    : n_atoms_(n_atoms), omega_a_(omega_a), omega_hop_(omega_hop), model_(model)
{
    if (n_atoms < 2) throw DomainError("a Dicke ladder needs N >= 2");
    const HalfInt jj = j();
    levels_.reserve(static_cast<std::size_t>(n_atoms) + 1);
    for (int k = 0; k <= n_atoms; ++k) {
        const HalfInt m = HalfInt::from_twice(-jj.twice() + 2 * k);
        DickeLevel level{jj, m, energy_shift(n_atoms, m, omega_hop, model), 0.0};
        level.energy = (0.5 * n_atoms + m.value()) * omega_a + level.energy_shift;
        levels_.push_back(level);
    }
    frequencies_.reserve(static_cast<std::size_t>(n_atoms));
    for (int k = 0; k < n_atoms; ++k) {
        frequencies_.push_back(levels_[k + 1].energy - levels_[k].energy);
    }
}

bool DickeLadder::contains(HalfInt m) const
{
    const int twice_j = j().twice();
    return std::abs(m.twice()) <= twice_j && (twice_j - m.twice()) % 2 == 0;
}

std::size_t DickeLadder::index_of(HalfInt m) const
{
    require_in_ladder(j(), m);
    return static_cast<std::size_t>((m.twice() + j().twice()) / 2);
}

HalfInt DickeLadder::m_of(std::size_t index) const
{
    if (index >= levels_.size()) throw DomainError("ladder index out of range");
    return levels_[index].m;
}

double DickeLadder::transition_frequency(HalfInt m) const
{
    const std::size_t upper = index_of(m);
    if (upper == 0) throw DomainError("M = -J has no lower level");
    return frequencies_[upper - 1];
}

double DickeLadder::omega_good() const
{
    if (n_atoms_ < 4 || n_atoms_ % 2 != 0) {
        throw DomainError("the effective two-level system needs an even N >= 4");
    }
    return transition_frequency(HalfInt::from_int(0));
}

double DickeLadder::omega_bad() const
{
    if (n_atoms_ < 4 || n_atoms_ % 2 != 0) {
        throw DomainError("the effective two-level system needs an even N >= 4");
    }
    return transition_frequency(HalfInt::from_int(-1));
}

ResolutionMargin resolution_margin(const GeometrySpec& geometry, int n_atoms)
{
    if (!(geometry.dipole_moment > 0.0) || !(geometry.nn_distance > 0.0) ||
        !(geometry.wavelength > 0.0)) {
        throw DomainError("geometry parameters must be strictly positive");
    }
    if (n_atoms < 1) throw DomainError("resolution_margin needs N >= 1");
    constexpr double pi = std::numbers::pi;
    const double d2 = geometry.dipole_moment * geometry.dipole_moment;
    const double r = geometry.nn_distance;
    const double lambda = geometry.wavelength;

    ResolutionMargin out;
    out.gamma = 8.0 * pi * pi * d2 / (3.0 * lambda * lambda * lambda);
    out.broadening = static_cast<double>(n_atoms) * n_atoms * out.gamma;
    out.shift = d2 / (4.0 * pi * r * r * r);
    out.resolvable = out.broadening < out.shift;
    out.small_sample = 2.0 * n_atoms * pi * r < lambda;
    out.tests_agree = out.resolvable == out.small_sample;
    return out;
}

} // namespace superabsorb::dicke

// dicke.hpp: symmetric Dicke ladder algebra (matrix elements, rates, shifts)

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace superabsorb::dicke {

// Half-integer quantum number stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
    static constexpr HalfInt from_int(int value) { return HalfInt(2 * value); }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt operator-() const { return HalfInt(-twice_); }
    constexpr HalfInt operator+(int n) const { return HalfInt(twice_ + 2 * n); }
    constexpr HalfInt operator-(int n) const { return HalfInt(twice_ - 2 * n); }
    constexpr auto operator<=>(const HalfInt&) const = default;

    std::string str() const;

private:
    constexpr explicit HalfInt(int twice) : twice_(twice) {}
    int twice_ = 0;
};

// J = N/2 for the fully symmetric N-atom ladder.
constexpr HalfInt total_spin(int n_atoms) { return HalfInt::from_twice(n_atoms); }

enum class LadderStep { raise, lower };
enum class Process { emit, absorb };
enum class InteractionModel { nearest_neighbour, all_pair };

std::string to_string(InteractionModel model);
InteractionModel interaction_model_from_string(const std::string& name);

// |<J, M +- 1| J_+- |J, M>| = sqrt((J +- M + 1)(J -+ M)).
double collective_matrix_element(HalfInt j, HalfInt m, LadderStep step);

// Rate for M -> M-1 (emit) or M -> M+1 (absorb) in units where gamma is the
// single-atom decay rate.
double transition_rate(int n_atoms, HalfInt m, Process process, double gamma);

// First-order hopping shift of |J, M>; zero at M = +-J.
double energy_shift(int n_atoms, HalfInt m, double omega_hop, InteractionModel model);

// Frequency of the M -> M-1 transition.
double transition_frequency(int n_atoms, HalfInt m, double omega_a, double omega_hop,
                            InteractionModel model = InteractionModel::nearest_neighbour);

struct DickeLevel {
    HalfInt j;
    HalfInt m;
    double energy_shift = 0.0;
    double energy = 0.0; // (N/2 + M) omega_A + shift
};

// The N+1 symmetric levels ordered from M = -J (index 0) to M = +J (index N).
class DickeLadder {
public:
    DickeLadder(int n_atoms, double omega_a, double omega_hop,
                InteractionModel model = InteractionModel::nearest_neighbour);

    int n_atoms() const { return n_atoms_; }
    double omega_a() const { return omega_a_; }
    double omega_hop() const { return omega_hop_; }
    InteractionModel model() const { return model_; }
    HalfInt j() const { return total_spin(n_atoms_); }
    std::size_t size() const { return levels_.size(); }

    const std::vector<DickeLevel>& levels() const { return levels_; }
    const DickeLevel& level(HalfInt m) const { return levels_[index_of(m)]; }

    // transition_frequencies()[k] is the frequency of level k+1 -> level k.
    const std::vector<double>& transition_frequencies() const { return frequencies_; }
    double transition_frequency(HalfInt m) const;

    std::size_t index_of(HalfInt m) const;
    HalfInt m_of(std::size_t index) const;
    bool contains(HalfInt m) const;

    // E2LS transitions: good = 0 -> -1, bad = -1 -> -2. Require even N >= 4.
    double omega_good() const;
    double omega_bad() const;

private:
    int n_atoms_;
    double omega_a_;
    double omega_hop_;
    InteractionModel model_;
    std::vector<DickeLevel> levels_;
    std::vector<double> frequencies_;
};

struct GeometrySpec {
    double dipole_moment = 1.0;
    double nn_distance = 1.0;
    double wavelength = 100.0;
};

struct ResolutionMargin {
    double gamma = 0.0;      // 8 pi^2 d^2 / (3 lambda^3)
    double broadening = 0.0; // N^2 gamma
    double shift = 0.0;      // d^2 / (4 pi r^3)
    bool resolvable = false; // broadening < shift
    bool small_sample = false; // 2 N pi r < lambda
    bool tests_agree = false;
};

// Units: hbar = 1 and epsilon_0 absorbed into d^2.
ResolutionMargin resolution_margin(const GeometrySpec& geometry, int n_atoms);

} // namespace superabsorb::dicke

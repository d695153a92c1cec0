#pragma once

/// Minimal deterministic two-qubit pure-state simulator.
///
/// Covers exactly what one protocol transmission needs: preparation of the
/// dephased Bell state by a three-gate circuit, projection onto rotated
/// product bases, and seeded outcome sampling. No n-qubit machinery.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "e91fss/analytic.hpp"
#include "e91fss/rng.hpp"

namespace e91fss {

using Amplitude = std::complex<double>;

/// Basis ordering |00>, |01>, |10>, |11>; first label is Alice's qubit
/// (qubit 0, high bit), second is Bob's (qubit 1, low bit).
using StateVector = std::array<Amplitude, 4>;

/// 2x2 unitary, row-major.
struct Gate {
    std::array<Amplitude, 4> m;
};

inline Gate pauli_x() {
    return {{{0.0, 1.0, 1.0, 0.0}}};
}

inline Gate hadamard() {
    return {{{kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2}}};
}

/// R_z(lambda) = diag(e^{-i lambda/2}, e^{+i lambda/2})
inline Gate rz(double lambda) {
    return {{{std::polar(1.0, -lambda / 2.0), 0.0, 0.0, std::polar(1.0, lambda / 2.0)}}};
}

/// R_y(lambda) = [[cos(lambda/2), -sin(lambda/2)], [sin(lambda/2), cos(lambda/2)]]
inline Gate ry(double lambda) {
    const double c = std::cos(lambda / 2.0);
    const double s = std::sin(lambda / 2.0);
    return {{{c, -s, s, c}}};
}

/// Apply a single-qubit gate to `qubit` (0 = Alice/high bit, 1 = Bob/low bit).
inline void apply_single_qubit(StateVector& state, const Gate& g, int qubit) {
    if (qubit != 0 && qubit != 1) throw std::out_of_range("apply_single_qubit: qubit must be 0 or 1");
    const int stride = (qubit == 0) ? 2 : 1;
    const int other = (qubit == 0) ? 1 : 2;
    for (int rest = 0; rest < 2; ++rest) {
        const int i0 = rest * other;
        const int i1 = i0 + stride;
        const Amplitude a0 = state[i0];
        const Amplitude a1 = state[i1];
        state[i0] = g.m[0] * a0 + g.m[1] * a1;
        state[i1] = g.m[2] * a0 + g.m[3] * a1;
    }
}

/// Controlled-X with Alice's qubit as control, Bob's as target.
inline void apply_cnot(StateVector& state) {
    std::swap(state[2], state[3]);
}

inline double norm_squared(const StateVector& state) {
    double n = 0.0;
    for (const auto& a : state) n += std::norm(a);
    return n;
}

/// Two-qubit state (|00> + e^{-i theta}|11>)/sqrt(2) tagged with the phase it
/// was prepared with.
struct DephasedBellState {
    StateVector amplitudes;
    double theta_fss;  ///< provenance tag, radians
};

/// Prepare the dephased Bell state from |00> with the three-gate sequence
/// H(Alice) -> CNOT(Alice, Bob) -> R_z(-theta)(Alice). The result carries the
/// relative phase e^{-i theta} on |11> (up to an unobservable global phase).
inline DephasedBellState build_dephased_bell(Phase theta) {
    StateVector state{{1.0, 0.0, 0.0, 0.0}};
    apply_single_qubit(state, hadamard(), 0);
    apply_cnot(state);
    apply_single_qubit(state, rz(-theta.radians()), 0);
    return {state, theta.radians()};
}

/// Analyzer direction phi of the measurement basis
///   |+_phi> =  cos(phi)|0> + sin(phi)|1>
///   |-_phi> = -sin(phi)|0> + cos(phi)|1>
/// Canonicalized to [0, pi): phi and phi + pi generate the same basis rays.
class AnalyzerSetting {
  public:
    AnalyzerSetting() : angle_(0.0) {}
    explicit AnalyzerSetting(double angle) : angle_(detail::wrap_pi(angle)) {}

    double angle() const { return angle_; }

  private:
    double angle_;
};

/// Outcome probabilities in the fixed order (++, +-, -+, --).
struct JointProbabilities {
    double pp;
    double pm;
    double mp;
    double mm;

    double sum() const { return pp + pm + mp + mm; }
};

/// Project `state` onto the four product vectors of the two analyzer bases.
/// Rejects states whose norm has drifted more than 1e-9 from unity: that is
/// an upstream construction bug, not a measurement question.
inline JointProbabilities joint_probabilities(const DephasedBellState& state,
                                              AnalyzerSetting a, AnalyzerSetting b) {
    const double n2 = norm_squared(state.amplitudes);
    if (std::abs(n2 - 1.0) > 1e-9)
        throw std::invalid_argument("joint_probabilities: state norm drifted to " +
                                    std::to_string(n2));

    const double ca = std::cos(a.angle()), sa = std::sin(a.angle());
    const double cb = std::cos(b.angle()), sb = std::sin(b.angle());
    const auto& psi = state.amplitudes;

    // <x_a y_b | psi> with basis coefficients real; rows are (+,-) per party.
    const Amplitude amp_pp = ca * cb * psi[0] + ca * sb * psi[1] + sa * cb * psi[2] + sa * sb * psi[3];
    const Amplitude amp_pm = -ca * sb * psi[0] + ca * cb * psi[1] - sa * sb * psi[2] + sa * cb * psi[3];
    const Amplitude amp_mp = -sa * cb * psi[0] - sa * sb * psi[1] + ca * cb * psi[2] + ca * sb * psi[3];
    const Amplitude amp_mm = sa * sb * psi[0] - sa * cb * psi[1] - ca * sb * psi[2] + ca * cb * psi[3];

    return {std::norm(amp_pp), std::norm(amp_pm), std::norm(amp_mp), std::norm(amp_mm)};
}

/// One transmission outcome. Bit convention: "+" outcome -> bit 0 -> value -1,
/// "-" outcome -> bit 1 -> value +1.
struct JointOutcome {
    int alice_bit;
    int bob_bit;

    int alice_value() const { return 2 * alice_bit - 1; }
    int bob_value() const { return 2 * bob_bit - 1; }
};

/// Map one uniform variate to an outcome via cumulative thresholds in the
/// fixed order (++, +-, -+, --).
inline JointOutcome draw_outcome(const JointProbabilities& p, double u) {
    double acc = p.pp;
    if (u < acc) return {0, 0};
    acc += p.pm;
    if (u < acc) return {0, 1};
    acc += p.mp;
    if (u < acc) return {1, 0};
    return {1, 1};
}

/// Measure both qubits along the given analyzer directions, drawing one
/// outcome from the joint distribution with a single uniform variate.
inline JointOutcome sample_outcome(const DephasedBellState& state, AnalyzerSetting a,
                                   AnalyzerSetting b, RandomStream& rng) {
    return draw_outcome(joint_probabilities(state, a, b), rng.uniform01());
}

}  // namespace e91fss

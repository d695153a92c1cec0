#pragma once

/// Closed-form expressions for the E91 protocol driven by a dephased
/// two-photon Bell state (|00> + e^{-i theta}|11>)/sqrt(2).
///
/// Every probability, correlation coefficient and CHSH quantity used by the
/// Monte-Carlo engine has its analytic counterpart here; the simulation is
/// validated against these functions.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace e91fss {

/// Reduced Planck constant in micro-eV times picoseconds (CODATA).
/// Pinned to 10 significant figures so phase computation is bit-reproducible.
inline constexpr double kHbarMicroEvPs = 658.2119569;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

namespace detail {

/// Wrap a real angle into [0, 2*pi).
inline double wrap_two_pi(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;  // fmod rounding at the boundary
    return r;
}

/// Wrap a real angle into [0, pi).
inline double wrap_pi(double x) {
    double r = std::fmod(x, kPi);
    if (r < 0.0) r += kPi;
    if (r >= kPi) r = 0.0;
    return r;
}

}  // namespace detail

/// Relative phase of the dephased Bell state, stored canonically in [0, 2*pi).
/// All formulas depend on it only through cos(theta), so wrapping is lossless.
class Phase {
  public:
    Phase() : theta_(0.0) {}
    explicit Phase(double radians) : theta_(detail::wrap_two_pi(radians)) {}

    double radians() const { return theta_; }
    double cosine() const { return std::cos(theta_); }

  private:
    double theta_;
};

/// Source parameters inducing the dephasing: fine structure splitting S and
/// exciton radiative lifetime tau. Zero is valid for either.
struct PhysicalParams {
    PhysicalParams(double fss_energy_uev, double exciton_lifetime_ps)
        : fss_energy(fss_energy_uev), exciton_lifetime(exciton_lifetime_ps) {
        if (!(fss_energy >= 0.0) || !(exciton_lifetime >= 0.0))
            throw std::invalid_argument("PhysicalParams: S and tau must be non-negative");
    }

    double fss_energy;        ///< S, micro-eV
    double exciton_lifetime;  ///< tau, picoseconds
};

/// theta = S * tau / hbar, wrapped into [0, 2*pi).
inline Phase theta_from_physical(const PhysicalParams& params) {
    return Phase(params.fss_energy * params.exciton_lifetime / kHbarMicroEvPs);
}

/// The four analyzer directions of the modified protocol, parameterized by
/// alpha (direction of phi1 from the vertical axis) and beta (angle between
/// the two coincident directions):
///
///   phi0 = 0,  phi1 = alpha,  phi2 = alpha + beta,  phi3 = 3*pi/8
///
/// Alice selects among {phi0, phi1, phi2}, Bob among {phi1, phi2, phi3}.
/// alpha and beta are canonicalized modulo pi (analyzer bases have period pi).
class ProtocolAngles {
  public:
    static constexpr double kPhi0 = 0.0;
    static constexpr double kPhi3 = 3.0 * std::numbers::pi / 8.0;

    ProtocolAngles(double alpha, double beta)
        : alpha_(detail::wrap_pi(alpha)), beta_(detail::wrap_pi(beta)) {}

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    /// Direction phi_i for i in {0,1,2,3}.
    double phi(int index) const {
        switch (index) {
            case 0: return kPhi0;
            case 1: return alpha_;
            case 2: return alpha_ + beta_;
            case 3: return kPhi3;
            default: throw std::out_of_range("ProtocolAngles::phi: index must be 0..3");
        }
    }

    /// beta = n*pi makes the two coincident directions identical; basis
    /// selection then carries no randomness and the protocol is insecure.
    bool degenerate() const { return beta_ == 0.0; }

  private:
    double alpha_;
    double beta_;
};

/// P(both +) + P(both -) with both analyzers at angle phi:
///
///   cos^4(phi) + sin^4(phi) + 2 sin^2(phi) cos^2(phi) cos(theta)
///     = 1 - 2 sin^2(phi) cos^2(phi) (1 - cos(theta))
///
/// The right-hand form is used so the value is exactly 1 at theta = 0.
inline double prob_joint_same(double phi, Phase theta) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double s2c2 = s * s * c * c;
    return std::max(0.0, 1.0 - 2.0 * s2c2 * (1.0 - theta.cosine()));
}

/// P(+,+) for analyzers at phi_a (Alice) and phi_b (Bob):
///   (1/2)[cos^2(a)cos^2(b) + sin^2(a)sin^2(b)
///         + 2 sin(a)cos(a)sin(b)cos(b) cos(theta)]
inline double prob_plus_plus(double phi_a, double phi_b, Phase theta) {
    const double sa = std::sin(phi_a), ca = std::cos(phi_a);
    const double sb = std::sin(phi_b), cb = std::cos(phi_b);
    const double v = 0.5 * (ca * ca * cb * cb + sa * sa * sb * sb +
                            2.0 * sa * ca * sb * cb * theta.cosine());
    return std::clamp(v, 0.0, 0.5);
}

/// P(+,-) for analyzers at phi_a (Alice) and phi_b (Bob):
///   (1/2)[cos^2(a)sin^2(b) + sin^2(a)cos^2(b)
///         - 2 sin(a)cos(a)sin(b)cos(b) cos(theta)]
inline double prob_plus_minus(double phi_a, double phi_b, Phase theta) {
    const double sa = std::sin(phi_a), ca = std::cos(phi_a);
    const double sb = std::sin(phi_b), cb = std::cos(phi_b);
    const double v = 0.5 * (ca * ca * sb * sb + sa * sa * cb * cb -
                            2.0 * sa * ca * sb * cb * theta.cosine());
    return std::clamp(v, 0.0, 0.5);
}

/// Correlation coefficient E(phi_a, phi_b) = P++ + P-- - P+- - P-+ :
///   cos(2 phi_a) cos(2 phi_b) + sin(2 phi_a) sin(2 phi_b) cos(theta)
inline double corr_coefficient(double phi_a, double phi_b, Phase theta) {
    const double v = std::cos(2.0 * phi_a) * std::cos(2.0 * phi_b) +
                     std::sin(2.0 * phi_a) * std::sin(2.0 * phi_b) * theta.cosine();
    return std::clamp(v, -1.0, 1.0);
}

/// Total correlation probability over a coincident-basis event; each of the
/// two coincident directions (phi1 = alpha, phi2 = alpha + beta) is chosen
/// with probability 1/2:
///   (1/2)[P_same(alpha) + P_same(alpha + beta)]
/// Equals 1 for every (alpha, beta) at theta = 0.
inline double p_corr(const ProtocolAngles& angles, Phase theta) {
    return 0.5 * (prob_joint_same(angles.phi(1), theta) + prob_joint_same(angles.phi(2), theta));
}

/// Correlation probability at the original Ekert orientations
/// (alpha = beta = pi/8):  (5 + 3 cos(theta)) / 8.
inline double p_corr_ekert(Phase theta) {
    return (5.0 + 3.0 * theta.cosine()) / 8.0;
}

/// CHSH quantity CR(alpha, beta, theta) = E01 + E23 - E03 + E21 with
/// phi0 = 0 and phi3 = 3*pi/8 substituted:
///
///   CR = cos(theta) sin(2(a+b)) [1/sqrt2 + sin(2a)]
///      + cos(2(a+b)) [cos(2a) - 1/sqrt2] + cos(2a) + 1/sqrt2
///
/// Bounded by +-2*sqrt(2) for all arguments.
inline double chsh_cr(const ProtocolAngles& angles, Phase theta) {
    const double two_a = 2.0 * angles.alpha();
    const double two_ab = 2.0 * (angles.alpha() + angles.beta());
    return theta.cosine() * std::sin(two_ab) * (kInvSqrt2 + std::sin(two_a)) +
           std::cos(two_ab) * (std::cos(two_a) - kInvSqrt2) + std::cos(two_a) + kInvSqrt2;
}

/// |<CR>| at the Ekert orientations: sqrt(2) |cos(theta) + 1|, with minima
/// (CR = 0) at theta = n*pi.
inline double chsh_cr_ekert(Phase theta) {
    return std::numbers::sqrt2 * std::abs(theta.cosine() + 1.0);
}

}  // namespace e91fss

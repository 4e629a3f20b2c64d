#ifndef FLUXFER_MODEL_HPP
#define FLUXFER_MODEL_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fluxfer/types.hpp"

namespace fluxfer {

// All rates are expressed in units of the optomechanical coupling g and all
// times in units of 1/g. to_si_* converts using a reference value of g.

struct SystemParams {
    double g1 = 1.0;       ///< optomechanical coupling, left membrane
    double g2 = 1.0;       ///< optomechanical coupling, right membrane
    double J1 = 50.0;      ///< tunneling rate through membrane 1
    double J2 = 50.0;      ///< tunneling rate through membrane 2
    double Delta0 = 100.0; ///< common detuning
    double gammaL = 0.0;   ///< decay rate, left subcavity
    double gammaM = 0.0;   ///< decay rate, middle subcavity
    double gammaR = 0.0;   ///< decay rate, right subcavity
    double gammaM1 = 0.0;  ///< dissipation rate, membrane 1
    double gammaM2 = 0.0;  ///< dissipation rate, membrane 2

    void validate() const {
        if (!(g1 > 0.0) || !(g2 > 0.0))
            throw std::invalid_argument("SystemParams: couplings g1, g2 must be > 0");
        if (!(Delta0 > 0.0))
            throw std::invalid_argument("SystemParams: detuning Delta0 must be > 0");
        if (J1 < 0.0 || J2 < 0.0 || gammaL < 0.0 || gammaM < 0.0 || gammaR < 0.0 ||
            gammaM1 < 0.0 || gammaM2 < 0.0)
            throw std::invalid_argument("SystemParams: rates must be >= 0");
    }

    bool has_decay() const {
        return gammaL > 0.0 || gammaM > 0.0 || gammaR > 0.0 || gammaM1 > 0.0 || gammaM2 > 0.0;
    }

    /// The membrane-in-the-middle regime requires J_k = omega_m/2 = Delta0/2.
    bool tunneling_matches_detuning(double tol = 1e-12) const {
        const double target = 0.5 * Delta0;
        return std::abs(J1 - target) <= tol * Delta0 && std::abs(J2 - target) <= tol * Delta0;
    }

    /// Common tunneling rate; the Zeno decomposition assumes J1 == J2.
    double common_tunneling() const {
        if (std::abs(J1 - J2) > 1e-12 * std::max({1.0, std::abs(J1), std::abs(J2)}))
            throw std::invalid_argument("SystemParams: operation requires J1 == J2");
        return J1;
    }
};

/// Reference coupling g/(2*pi) in Hz for SI conversion.
inline constexpr double kReferenceCouplingHz = 1.0e4;

/// Rate in units of g -> angular frequency in rad/s.
inline double to_si_angular_frequency(double rate, double couplingHz = kReferenceCouplingHz) {
    return rate * 2.0 * std::numbers::pi * couplingHz;
}

/// Time in units of 1/g -> seconds.
inline double to_si_time(double time, double couplingHz = kReferenceCouplingHz) {
    return time / (2.0 * std::numbers::pi * couplingHz);
}

// ---------------------------------------------------------------------------
// Interaction matrix and Zeno structure
// ---------------------------------------------------------------------------

// The amplitude equations read i d/dt psi = M(t) psi with psi ordered
// (a_L, a_M, a_R, b_1, b_2).  The couplings enter as gA_L = g1*alpha_L and
// gA_R = g2*alpha_R, both real in the design path.  Sign convention: the
// a_L<->b_1 block carries -gA_L, the a_R<->b_2 block +gA_R, tunneling -J.

inline Matrix5c build_interaction_matrix(const SystemParams& p, double gA_L, double gA_R) {
    Matrix5c m = Matrix5c::Zero();
    m(kCavityLeft, kCavityMiddle) = m(kCavityMiddle, kCavityLeft) = -p.J1;
    m(kCavityMiddle, kCavityRight) = m(kCavityRight, kCavityMiddle) = -p.J2;
    m(kCavityLeft, kMembrane1) = m(kMembrane1, kCavityLeft) = -gA_L;
    m(kCavityRight, kMembrane2) = m(kMembrane2, kCavityRight) = +gA_R;
    m(kCavityLeft, kCavityLeft) = -0.5 * kImagUnit * p.gammaL;
    m(kCavityMiddle, kCavityMiddle) = -0.5 * kImagUnit * p.gammaM;
    m(kCavityRight, kCavityRight) = -0.5 * kImagUnit * p.gammaR;
    m(kMembrane1, kMembrane1) = -0.5 * kImagUnit * p.gammaM1;
    m(kMembrane2, kMembrane2) = -0.5 * kImagUnit * p.gammaM2;
    return m;
}

/// Splitting M(gamma=0) = Omega*(Mp + K*Mq): Mp holds the normalized
/// optomechanical couplings, Mq the normalized tunneling, K = sqrt(2)*J/Omega.
struct ZenoDecomposition {
    Matrix5c Mp;
    double K = 0.0;
    Matrix5c Mq;
};

inline ZenoDecomposition zeno_decompose(const SystemParams& p, double gA_L, double gA_R) {
    const double J = p.common_tunneling();
    const double omega = std::hypot(gA_L, gA_R);
    if (omega <= 0.0)
        throw std::domain_error("zeno_decompose: Omega = 0, splitting degenerate (K undefined)");

    ZenoDecomposition d;
    d.Mp = Matrix5c::Zero();
    d.Mp(kCavityLeft, kMembrane1) = d.Mp(kMembrane1, kCavityLeft) = -gA_L / omega;
    d.Mp(kCavityRight, kMembrane2) = d.Mp(kMembrane2, kCavityRight) = +gA_R / omega;

    const double q = -1.0 / std::numbers::sqrt2;
    d.Mq = Matrix5c::Zero();
    d.Mq(kCavityLeft, kCavityMiddle) = d.Mq(kCavityMiddle, kCavityLeft) = q;
    d.Mq(kCavityMiddle, kCavityRight) = d.Mq(kCavityRight, kCavityMiddle) = q;

    d.K = std::numbers::sqrt2 * J / omega;
    return d;
}

// ---------------------------------------------------------------------------
// Zeno dark subspace
// ---------------------------------------------------------------------------

// Strong tunneling confines the dynamics to the kernel of Mq, spanned by
// psi1 = b_1, psi2 = b_2 and psi3 = (a_L - a_R)/sqrt(2).

struct ZenoBasis {
    static Vector5c psi1() {
        Vector5c v = Vector5c::Zero();
        v(kMembrane1) = 1.0;
        return v;
    }
    static Vector5c psi2() {
        Vector5c v = Vector5c::Zero();
        v(kMembrane2) = 1.0;
        return v;
    }
    static Vector5c psi3() {
        Vector5c v = Vector5c::Zero();
        v(kCavityLeft) = 1.0 / std::numbers::sqrt2;
        v(kCavityRight) = -1.0 / std::numbers::sqrt2;
        return v;
    }
};

/// Lift a dark-basis vector (psi1, psi2, psi3 components) to the full space.
inline Vector5c embed_dark(const Vector3c& v) {
    return v(0) * ZenoBasis::psi1() + v(1) * ZenoBasis::psi2() + v(2) * ZenoBasis::psi3();
}

/// Project a full-space vector onto the dark basis.
inline Vector3c project_dark(const Vector5c& v) {
    Vector3c out;
    out(0) = v(kMembrane1);
    out(1) = v(kMembrane2);
    out(2) = (v(kCavityLeft) - v(kCavityRight)) / std::numbers::sqrt2;
    return out;
}

/// Interaction matrix restricted to the dark subspace, basis (psi1, psi2, psi3).
inline Matrix3c build_effective_matrix(double gA_L, double gA_R) {
    Matrix3c m = Matrix3c::Zero();
    m(0, 2) = m(2, 0) = -gA_L / std::numbers::sqrt2;
    m(1, 2) = m(2, 1) = -gA_R / std::numbers::sqrt2;
    return m;
}

} // namespace fluxfer

#endif

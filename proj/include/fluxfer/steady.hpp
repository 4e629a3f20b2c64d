#ifndef FLUXFER_STEADY_HPP
#define FLUXFER_STEADY_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/LU>

#include "fluxfer/model.hpp"
#include "fluxfer/pulse.hpp"

namespace fluxfer {

// Steady-state mean-field amplitudes of the three subcavities under constant
// drives.  The fixed point of
//   d(alpha_j)/dt = -(gamma_j/2 + i Delta'_j) alpha_j + i (tunneling) - i Omega_j
// is solved exactly as a 3x3 complex linear system rather than by iterating
// the mutually referential closed forms.

struct SteadyAmplitudes {
    complexd alphaL;
    complexd alphaM;
    complexd alphaR;
};

/// Optional membrane-displacement corrections to the detunings.  The operating
/// regime takes Delta'_j = Delta0, i.e. zero shifts.
struct DetuningShifts {
    double dL = 0.0;
    double dR = 0.0;
    double dM = 0.0;
};

inline SteadyAmplitudes steady_state_amplitudes(double OmegaL, double OmegaR, double OmegaM,
                                                const SystemParams& p,
                                                const DetuningShifts& shifts = {}) {
    p.validate();
    const complexd dL(0.5 * p.gammaL, p.Delta0 + shifts.dL);
    const complexd dR(0.5 * p.gammaR, p.Delta0 + shifts.dR);
    const complexd dM(0.5 * p.gammaM, p.Delta0 + shifts.dM);

    Eigen::Matrix3cd a = Eigen::Matrix3cd::Zero();
    Eigen::Vector3cd b;
    // unknowns ordered (alphaL, alphaR, alphaM)
    a(0, 0) = dL;
    a(0, 2) = -kImagUnit * p.J1;
    a(1, 1) = dR;
    a(1, 2) = -kImagUnit * p.J2;
    a(2, 0) = -kImagUnit * p.J1;
    a(2, 1) = -kImagUnit * p.J2;
    a(2, 2) = dM;
    b << -kImagUnit * OmegaL, -kImagUnit * OmegaR, -kImagUnit * OmegaM;

    Eigen::FullPivLU<Eigen::Matrix3cd> lu(a);
    if (!lu.isInvertible())
        throw std::domain_error("steady_state_amplitudes: no unique steady state (singular system)");
    const Eigen::Vector3cd x = lu.solve(b);
    return SteadyAmplitudes{x(0), x(2), x(1)};
}

/// Middle drive that empties the middle cavity in the zero-decay limit,
/// Omega_M = -(J/Delta0)(Omega_L + Omega_R).
inline double middle_drive_for_dark_cavity(const SystemParams& p, double OmegaL, double OmegaR) {
    const double J = p.common_tunneling();
    return -(J / p.Delta0) * (OmegaL + OmegaR);
}

/// Optomechanical coupling constants from cavity geometry and membrane
/// properties: g_k = (Xi/L) * sqrt(1/(2 m_k w_k)), hbar = 1.
inline std::pair<double, double> coupling_constants(double Xi, double cavityLength, double mass1,
                                                    double mass2, double omegaM1, double omegaM2) {
    if (!(Xi > 0.0) || !(cavityLength > 0.0) || !(mass1 > 0.0) || !(mass2 > 0.0) ||
        !(omegaM1 > 0.0) || !(omegaM2 > 0.0))
        throw std::invalid_argument("coupling_constants: all inputs must be > 0");
    const double g1 = Xi / cavityLength * std::sqrt(1.0 / (2.0 * mass1 * omegaM1));
    const double g2 = Xi / cavityLength * std::sqrt(1.0 / (2.0 * mass2 * omegaM2));
    return {g1, g2};
}

// ---------------------------------------------------------------------------
// Rotating-wave validity
// ---------------------------------------------------------------------------

struct RwaReport {
    double ratio = 0.0;        ///< Delta0 / peak |gA|; +inf when drives vanish
    double peakCoupling = 0.0; ///< max over the schedule of max(|gA_L|, |gA_R|)
    double threshold = 0.0;
    bool pass = false;
};

/// The rotating-wave step drops terms oscillating at ~2*Delta0; it needs the
/// detuning to dominate the instantaneous couplings.
inline RwaReport validate_rwa(const SystemParams& p, const PulseSchedule& schedule,
                              double threshold = 10.0) {
    p.validate();
    RwaReport r;
    r.threshold = threshold;
    for (const DriveSample& d : schedule.samples)
        r.peakCoupling = std::max({r.peakCoupling, std::abs(d.gA_L), std::abs(d.gA_R)});
    r.ratio = r.peakCoupling > 0.0 ? p.Delta0 / r.peakCoupling
                                   : std::numeric_limits<double>::infinity();
    r.pass = r.ratio >= threshold;
    return r;
}

} // namespace fluxfer

#endif

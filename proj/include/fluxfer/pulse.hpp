#ifndef FLUXFER_PULSE_HPP
#define FLUXFER_PULSE_HPP

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fluxfer/io.hpp"
#include "fluxfer/model.hpp"

namespace fluxfer {

// Pulse design on the symmetric interval t in [-T/2, +T/2].  The mixing
// angle theta follows a logistic profile 0 -> pi/2 and phi is a symmetric
// Gaussian bump of height pi*phi0; both satisfy the transfer boundary
// conditions only asymptotically, so check_boundaries reports the finite-T
// residuals instead of asserting them.

struct PulseParams {
    double T = 1.0;     ///< total duration, units of 1/g
    double tau = 0.1;   ///< logistic time scale
    double tauC = 0.3;  ///< Gaussian width
    double phi0 = 0.1;  ///< peak angle coefficient, phi_max = pi*phi0

    /// Shape used throughout: tau = 0.1*T, tauC = 0.3*T.
    static PulseParams standard_shape(double T, double phi0) {
        return PulseParams{T, 0.1 * T, 0.3 * T, phi0};
    }

    void validate() const {
        if (!(T > 0.0) || !(tau > 0.0) || !(tauC > 0.0))
            throw std::invalid_argument("PulseParams: T, tau, tauC must be > 0");
        if (!(phi0 > 0.0) || !(phi0 < 0.5 * std::numbers::pi))
            throw std::invalid_argument("PulseParams: phi0 must satisfy 0 < phi0 < pi/2");
    }
};

struct Angles {
    double theta = 0.0;
    double thetaDot = 0.0;
    double phi = 0.0;
    double phiDot = 0.0;
};

/// theta, phi and their analytic time derivatives at time t.
inline Angles pulse_angles(double t, const PulseParams& pp) {
    Angles a;
    // overflow-safe logistic
    const double x = t / pp.tau;
    const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    a.theta = 0.5 * std::numbers::pi * s;
    a.thetaDot = 0.5 * std::numbers::pi / pp.tau * s * (1.0 - s);
    const double u = t / pp.tauC;
    a.phi = std::numbers::pi * pp.phi0 * std::exp(-u * u);
    a.phiDot = -2.0 * t / (pp.tauC * pp.tauC) * a.phi;
    return a;
}

inline double theta(double t, const PulseParams& pp) { return pulse_angles(t, pp).theta; }
inline double phi(double t, const PulseParams& pp) { return pulse_angles(t, pp).phi; }

/// phi below this floor makes cot(phi) numerically unusable; in the operating
/// regime (phi0 >= 0.01, tauC >= 0.1*T) it is never reached.
inline constexpr double kPhiFloor = 1e-8;

struct EffectiveCouplings {
    double gA_L = 0.0; ///< g1*alpha_L
    double gA_R = 0.0; ///< g2*alpha_R
};

namespace detail {

inline EffectiveCouplings couplings_from_angles(const Angles& a) {
    if (a.phi < kPhiFloor)
        throw std::domain_error("effective_couplings: phi below cot guard (near-singular)");
    const double cotPhi = std::cos(a.phi) / std::sin(a.phi);
    const double drive = a.thetaDot * cotPhi;
    EffectiveCouplings c;
    c.gA_L = -std::numbers::sqrt2 * (drive * std::sin(a.theta) + a.phiDot * std::cos(a.theta));
    c.gA_R = -std::numbers::sqrt2 * (drive * std::cos(a.theta) - a.phiDot * std::sin(a.theta));
    return c;
}

} // namespace detail

/// Inverse-engineered couplings that keep the dynamics on the invariant's
/// dark eigenvector.
inline EffectiveCouplings effective_couplings(double t, const PulseParams& pp) {
    return detail::couplings_from_angles(pulse_angles(t, pp));
}

/// Pump envelope Omega(t) = sqrt(gA_L^2 + gA_R^2).
inline double rabi_envelope(double t, const PulseParams& pp) {
    const EffectiveCouplings c = effective_couplings(t, pp);
    return std::hypot(c.gA_L, c.gA_R);
}

struct DriveSample {
    double t = 0.0;
    double OmegaL = 0.0;
    double OmegaR = 0.0;
    double OmegaM = 0.0;
    double gA_L = 0.0;
    double gA_R = 0.0;
};

/// Classical drive amplitudes realizing the designed couplings, using the
/// zero-decay steady-state relation alpha_j = Omega_j / (-Delta0).  The
/// middle drive cancels the middle-cavity steady amplitude.
inline DriveSample design_drives(double t, const PulseParams& pp, const SystemParams& p) {
    const double J = p.common_tunneling();
    if (!(p.Delta0 > 0.0))
        throw std::invalid_argument("design_drives: Delta0 must be > 0");
    const EffectiveCouplings c = effective_couplings(t, pp);
    DriveSample d;
    d.t = t;
    d.gA_L = c.gA_L;
    d.gA_R = c.gA_R;
    d.OmegaL = -p.Delta0 * c.gA_L / p.g1;
    d.OmegaR = -p.Delta0 * c.gA_R / p.g2;
    d.OmegaM = -(J / p.Delta0) * (d.OmegaL + d.OmegaR);
    return d;
}

inline constexpr int kDefaultSchedulePoints = 2001;

/// Sampled drive program on a uniform grid over [-T/2, T/2].  The samples are
/// for export and diagnostics; integrators re-evaluate the drives
/// analytically at every substep.
struct PulseSchedule {
    PulseParams params;
    std::vector<DriveSample> samples;

    double start_time() const { return -0.5 * params.T; }
    double end_time() const { return +0.5 * params.T; }
};

inline PulseSchedule make_schedule(const PulseParams& pp, const SystemParams& p,
                                   int points = kDefaultSchedulePoints) {
    pp.validate();
    p.validate();
    if (points < 2)
        throw std::invalid_argument("make_schedule: need at least 2 grid points");
    PulseSchedule s;
    s.params = pp;
    s.samples.reserve(static_cast<size_t>(points));
    const double t0 = -0.5 * pp.T;
    const double h = pp.T / (points - 1);
    for (int i = 0; i < points; ++i) {
        // hit the endpoints exactly
        const double t = i + 1 == points ? 0.5 * pp.T : t0 + i * h;
        s.samples.push_back(design_drives(t, pp, p));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Residuals of the transfer boundary conditions at t = -T/2 and t = +T/2.
struct BoundaryReport {
    double thetaStart = 0.0;    ///< |theta(-T/2) - 0|
    double thetaEnd = 0.0;      ///< |theta(+T/2) - pi/2|
    double thetaDotStart = 0.0; ///< |theta'(-T/2)|
    double thetaDotEnd = 0.0;   ///< |theta'(+T/2)|
    double phiStart = 0.0;      ///< |phi(-T/2)|
    double phiEnd = 0.0;        ///< |phi(+T/2)|
    double phiDotStart = 0.0;   ///< |phi'(-T/2)|
    double phiDotEnd = 0.0;     ///< |phi'(+T/2)|
    double tol = 0.0;
    bool pass = false;

    double max_residual() const {
        double m = thetaStart;
        for (double r : {thetaEnd, thetaDotStart, thetaDotEnd, phiStart, phiEnd, phiDotStart, phiDotEnd})
            m = std::max(m, r);
        return m;
    }
};

inline BoundaryReport check_boundaries(const PulseParams& pp, double tol) {
    pp.validate();
    const Angles a0 = pulse_angles(-0.5 * pp.T, pp);
    const Angles a1 = pulse_angles(+0.5 * pp.T, pp);
    BoundaryReport r;
    r.thetaStart = std::abs(a0.theta);
    r.thetaEnd = std::abs(a1.theta - 0.5 * std::numbers::pi);
    r.thetaDotStart = std::abs(a0.thetaDot);
    r.thetaDotEnd = std::abs(a1.thetaDot);
    r.phiStart = std::abs(a0.phi);
    r.phiEnd = std::abs(a1.phi);
    r.phiDotStart = std::abs(a0.phiDot);
    r.phiDotEnd = std::abs(a1.phiDot);
    r.tol = tol;
    r.pass = r.max_residual() <= tol;
    return r;
}

/// Minimum of K(t) = sqrt(2)*J/Omega(t) over the schedule grid; grid points
/// with Omega = 0 are skipped (K diverges there).
inline double min_zeno_ratio(const PulseSchedule& schedule, const SystemParams& p) {
    const double J = p.common_tunneling();
    double kMin = std::numeric_limits<double>::infinity();
    for (const DriveSample& d : schedule.samples) {
        const double omega = std::hypot(d.gA_L, d.gA_R);
        if (omega > 0.0)
            kMin = std::min(kMin, std::numbers::sqrt2 * J / omega);
    }
    if (!std::isfinite(kMin))
        throw std::domain_error("min_zeno_ratio: Omega vanishes on the whole grid");
    return kMin;
}

/// Drive program as CSV, one row per grid point.
inline void write_drives_csv(const std::filesystem::path& path, const PulseSchedule& schedule) {
    auto out = io::open_output(path);
    out << "t,omega_L,omega_R,omega_M,gA_L,gA_R\n";
    for (const DriveSample& d : schedule.samples) {
        out << io::format_number(d.t) << ',' << io::format_number(d.OmegaL) << ','
            << io::format_number(d.OmegaR) << ',' << io::format_number(d.OmegaM) << ','
            << io::format_number(d.gA_L) << ',' << io::format_number(d.gA_R) << '\n';
    }
    if (!out)
        throw std::runtime_error("failed while writing " + path.string());
}

} // namespace fluxfer

#endif

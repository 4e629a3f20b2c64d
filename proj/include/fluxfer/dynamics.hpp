#ifndef FLUXFER_DYNAMICS_HPP
#define FLUXFER_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fluxfer/io.hpp"
#include "fluxfer/model.hpp"
#include "fluxfer/pulse.hpp"

namespace fluxfer {

// Fixed-step classical RK4.  The system is non-stiff in the operating regime
// and fixed steps keep sweeps bit-reproducible; the default step count is
// validated by step-halving (convergenceCheck).

struct IntegratorConfig {
    int stepCount = 4000;
    bool convergenceCheck = false;

    void validate() const {
        if (stepCount < 100)
            throw std::invalid_argument("IntegratorConfig: stepCount must be >= 100");
    }
};

/// Deviation above which a convergence-checked run is flagged under-resolved.
inline constexpr double kConvergenceTol = 1e-6;

namespace detail {

template <typename State, typename Rhs>
inline State rk4_step(const State& y, double t, double h, Rhs&& f) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + 0.5 * h * k1));
    const State k3 = f(t + 0.5 * h, State(y + 0.5 * h * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename State, typename Rhs>
inline State rk4_final(State y, double t0, double t1, int steps, Rhs&& f) {
    const double h = (t1 - t0) / steps;
    for (int i = 0; i < steps; ++i)
        y = rk4_step(y, t0 + i * h, h, f);
    return y;
}

} // namespace detail

template <int N>
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::Matrix<complexd, N, 1>> states;
    std::vector<std::array<double, N>> occupations;
    /// max |norm - 1| along the run; NaN when decay makes it meaningless
    double maxNormDrift = std::numeric_limits<double>::quiet_NaN();
    double convergenceDeviation = 0.0;
    bool underResolved = false;

    const Eigen::Matrix<complexd, N, 1>& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
};

using FluctuationTrajectory = Trajectory<5>;
using EffectiveTrajectory = Trajectory<3>;

inline std::array<double, 5> occupations(const Vector5c& state) {
    std::array<double, 5> n{};
    for (int i = 0; i < 5; ++i)
        n[static_cast<size_t>(i)] = std::norm(state(i));
    return n;
}

/// Occupancy of the intermediate dark-basis mode psi3 = (a_L - a_R)/sqrt(2).
inline double psi3_occupation(const Vector5c& state) {
    return 0.5 * std::norm(state(kCavityLeft) - state(kCavityRight));
}

/// Occupancies of (psi1, psi2, psi3) = (b_1, b_2, intermediate).
inline std::array<double, 3> dark_occupations(const Vector5c& state) {
    return {std::norm(state(kMembrane1)), std::norm(state(kMembrane2)), psi3_occupation(state)};
}

namespace detail {

template <int N, typename Rhs>
Trajectory<N> integrate_linear(const Eigen::Matrix<complexd, N, 1>& initial, double t0, double t1,
                               const IntegratorConfig& cfg, bool trackNorm, Rhs&& rhs) {
    cfg.validate();
    Trajectory<N> traj;
    const int steps = cfg.stepCount;
    traj.times.reserve(static_cast<size_t>(steps) + 1);
    traj.states.reserve(static_cast<size_t>(steps) + 1);
    traj.occupations.reserve(static_cast<size_t>(steps) + 1);

    Eigen::Matrix<complexd, N, 1> y = initial;
    const double h = (t1 - t0) / steps;
    double drift = 0.0;
    auto record = [&](double t, const Eigen::Matrix<complexd, N, 1>& s) {
        traj.times.push_back(t);
        traj.states.push_back(s);
        std::array<double, N> n{};
        for (int i = 0; i < N; ++i)
            n[static_cast<size_t>(i)] = std::norm(s(i));
        traj.occupations.push_back(n);
        if (trackNorm)
            drift = std::max(drift, std::abs(s.norm() - 1.0));
    };
    record(t0, y);
    for (int i = 0; i < steps; ++i) {
        y = rk4_step(y, t0 + i * h, h, rhs);
        record(i + 1 == steps ? t1 : t0 + (i + 1) * h, y);
    }
    if (trackNorm)
        traj.maxNormDrift = drift;

    if (cfg.convergenceCheck) {
        const auto refined = rk4_final(initial, t0, t1, 2 * steps, rhs);
        traj.convergenceDeviation = (refined - traj.states.back()).cwiseAbs().maxCoeff();
        traj.underResolved = traj.convergenceDeviation > kConvergenceTol;
    }
    return traj;
}

} // namespace detail

/// Propagate i d/dt psi = M(t) psi for the full five-mode system.  Drives are
/// re-evaluated analytically at every RK4 substep; the schedule supplies the
/// pulse parameters.  Stochastic input terms are not propagated.
inline FluctuationTrajectory integrate_pure(const FluctuationState& initial,
                                            const PulseSchedule& schedule, const SystemParams& p,
                                            bool includeDecay, const IntegratorConfig& cfg = {}) {
    p.validate();
    schedule.params.validate();
    if (!includeDecay && std::abs(initial.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("integrate_pure: initial state must be normalized");

    SystemParams pEff = p;
    if (!includeDecay)
        pEff.gammaL = pEff.gammaM = pEff.gammaR = pEff.gammaM1 = pEff.gammaM2 = 0.0;

    const PulseParams pp = schedule.params;
    auto rhs = [&pEff, pp](double t, const Vector5c& y) -> Vector5c {
        const EffectiveCouplings c = effective_couplings(t, pp);
        return -kImagUnit * (build_interaction_matrix(pEff, c.gA_L, c.gA_R) * y);
    };
    const bool trackNorm = !includeDecay || !p.has_decay();
    return detail::integrate_linear<5>(initial, schedule.start_time(), schedule.end_time(), cfg,
                                       trackNorm, rhs);
}

/// Propagate i d/dt v = M_eff(t) v in the dark basis (psi1, psi2, psi3).
inline EffectiveTrajectory integrate_effective(const Vector3c& initial,
                                               const PulseSchedule& schedule,
                                               const IntegratorConfig& cfg = {}) {
    schedule.params.validate();
    if (std::abs(initial.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("integrate_effective: initial state must be normalized");
    const PulseParams pp = schedule.params;
    auto rhs = [pp](double t, const Vector3c& y) -> Vector3c {
        const EffectiveCouplings c = effective_couplings(t, pp);
        return -kImagUnit * (build_effective_matrix(c.gA_L, c.gA_R) * y);
    };
    return detail::integrate_linear<3>(initial, schedule.start_time(), schedule.end_time(), cfg,
                                       true, rhs);
}

/// Transfer fidelity: final occupation of the second membrane mode.
inline double fidelity_pure(const FluctuationTrajectory& traj) {
    if (traj.states.empty())
        throw std::invalid_argument("fidelity_pure: empty trajectory");
    return std::norm(traj.final_state()(kMembrane2));
}

/// Occupation time series as CSV (per-mode plus intermediate-state column).
inline void write_trajectory_csv(const std::filesystem::path& path,
                                 const FluctuationTrajectory& traj) {
    auto out = io::open_output(path);
    out << "t,n_aL,n_aM,n_aR,n_b1,n_b2,n_psi3\n";
    for (size_t k = 0; k < traj.times.size(); ++k) {
        out << io::format_number(traj.times[k]);
        for (double n : traj.occupations[k])
            out << ',' << io::format_number(n);
        out << ',' << io::format_number(psi3_occupation(traj.states[k])) << '\n';
    }
    if (!out)
        throw std::runtime_error("failed while writing " + path.string());
}

} // namespace fluxfer

#endif

#ifndef FLUXFER_NOISE_HPP
#define FLUXFER_NOISE_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fluxfer/dynamics.hpp"
#include "fluxfer/model.hpp"
#include "fluxfer/pulse.hpp"

namespace fluxfer {

// White amplitude noise on the two side drives, averaged into a master
// equation with Hermitian double-commutator dissipators:
//   drho/dt = -i[M, rho] - c*mu^2 [M_aL,[M_aL,rho]] - c*mu^2 [M_aR,[M_aR,rho]]
// The prefactor c defaults to 1; the Novikov average gives c = 1/2, kept as
// an option (halfPrefactor) since both conventions appear in use.

/// Hermitian jump matrices for amplitude noise in Omega_L and Omega_R.
inline std::pair<Matrix5c, Matrix5c> noise_jump_from_drives(const DriveSample& d,
                                                            const SystemParams& p) {
    Matrix5c mL = Matrix5c::Zero();
    Matrix5c mR = Matrix5c::Zero();
    // g1*Omega_L/(-Delta0) == gA_L and likewise on the right
    mL(kCavityLeft, kMembrane1) = mL(kMembrane1, kCavityLeft) = p.g1 * d.OmegaL / (-p.Delta0);
    mR(kCavityRight, kMembrane2) = mR(kMembrane2, kCavityRight) = p.g2 * d.OmegaR / (-p.Delta0);
    return {mL, mR};
}

inline std::pair<Matrix5c, Matrix5c> noise_jump_matrices(double t, const PulseSchedule& schedule,
                                                         const SystemParams& p) {
    return noise_jump_from_drives(design_drives(t, schedule.params, p), p);
}

struct NoiseOptions {
    bool halfPrefactor = false; ///< use mu^2/2 per double commutator
    bool includeDecay = false;  ///< keep the decay diagonals of M
};

struct DensityResult {
    DensityMatrix5 rho;
    double traceDrift = 0.0;       ///< max |tr(rho) - 1|; tracked for decay-free runs
    double hermiticityDrift = 0.0; ///< max-abs entry of rho - rho^dagger along the run
    bool underResolved = false;
};

inline DensityMatrix5 pure_density(const Vector5c& state) { return state * state.adjoint(); }

inline DensityResult propagate_density(const DensityMatrix5& initial, const PulseSchedule& schedule,
                                       const SystemParams& p, double mu,
                                       const IntegratorConfig& cfg = {},
                                       const NoiseOptions& opts = {}) {
    p.validate();
    schedule.params.validate();
    cfg.validate();
    if (mu < 0.0)
        throw std::invalid_argument("propagate_density: mu must be >= 0");
    if ((initial - initial.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("propagate_density: initial state must be Hermitian");
    if (std::abs(initial.trace().real() - 1.0) > 1e-8)
        throw std::invalid_argument("propagate_density: initial state must have unit trace");

    SystemParams pEff = p;
    if (!opts.includeDecay)
        pEff.gammaL = pEff.gammaM = pEff.gammaR = pEff.gammaM1 = pEff.gammaM2 = 0.0;
    const bool lossless = !pEff.has_decay();
    const double pref = (opts.halfPrefactor ? 0.5 : 1.0) * mu * mu;
    const PulseParams pp = schedule.params;

    auto rhs = [&](double t, const Matrix5c& rho) -> Matrix5c {
        const EffectiveCouplings c = effective_couplings(t, pp);
        const Matrix5c m = build_interaction_matrix(pEff, c.gA_L, c.gA_R);
        Matrix5c d = -kImagUnit * (m * rho - rho * m.adjoint());
        if (pref > 0.0) {
            Matrix5c mA = Matrix5c::Zero();
            mA(kCavityLeft, kMembrane1) = mA(kMembrane1, kCavityLeft) = c.gA_L;
            const Matrix5c cL = mA * rho - rho * mA;
            d -= pref * (mA * cL - cL * mA);
            mA.setZero();
            mA(kCavityRight, kMembrane2) = mA(kMembrane2, kCavityRight) = c.gA_R;
            const Matrix5c cR = mA * rho - rho * mA;
            d -= pref * (mA * cR - cR * mA);
        }
        return d;
    };

    DensityResult res;
    Matrix5c rho = initial;
    const double t0 = schedule.start_time();
    const double h = pp.T / cfg.stepCount;
    for (int i = 0; i < cfg.stepCount; ++i) {
        rho = detail::rk4_step(rho, t0 + i * h, h, rhs);
        res.hermiticityDrift =
            std::max(res.hermiticityDrift, (rho - Matrix5c(rho.adjoint())).cwiseAbs().maxCoeff());
        if (lossless)
            res.traceDrift = std::max(res.traceDrift, std::abs(rho.trace() - complexd(1.0)));
    }
    res.rho = rho;
    res.underResolved = res.hermiticityDrift > 1e-8 || (lossless && res.traceDrift > 1e-6);
    return res;
}

/// Overlap with the target projector |psi2><psi2|, i.e. <psi2|rho|psi2>.
inline double fidelity_density(const DensityMatrix5& rho) {
    return std::real(rho(kMembrane2, kMembrane2));
}

} // namespace fluxfer

#endif

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fluxfer/pulse.hpp"

using namespace fluxfer;
using Catch::Approx;

namespace {
const PulseParams kFig2 = PulseParams::standard_shape(1.0, 0.1);
}

TEST_CASE("theta: logistic midpoint and asymptotes", "[pulse]") {
    CHECK(theta(0.0, kFig2) == Approx(std::numbers::pi / 4).epsilon(1e-14));
    CHECK(theta(+80.0, kFig2) == Approx(std::numbers::pi / 2).margin(1e-12));
    CHECK(theta(-80.0, kFig2) == Approx(0.0).margin(1e-12));
}

TEST_CASE("theta at t = 5*tau", "[pulse]") {
    // (pi/2) / (1 + e^-5) = 1.5602832211...
    const double expected = 0.5 * std::numbers::pi / (1.0 + std::exp(-5.0));
    CHECK(theta(5.0 * kFig2.tau, kFig2) == Approx(expected).epsilon(1e-14));
    CHECK(expected == Approx(1.5602832211).margin(1e-9));
}

TEST_CASE("phi: Gaussian peak and width", "[pulse]") {
    CHECK(phi(0.0, kFig2) == Approx(std::numbers::pi * 0.1).epsilon(1e-14));
    CHECK(phi(kFig2.tauC, kFig2) ==
          Approx(std::numbers::pi * 0.1 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(phi(-kFig2.tauC, kFig2) == phi(kFig2.tauC, kFig2));
}

TEST_CASE("phi boundary value for phi0 = 0.4 is about 0.03*pi", "[pulse]") {
    const PulseParams pp = PulseParams::standard_shape(1.0, 0.4);
    const double boundary = phi(0.5 * pp.T, pp);
    CHECK(boundary == Approx(std::numbers::pi * 0.4 * std::exp(-25.0 / 9.0)).epsilon(1e-14));
    // 0.0249*pi, quoted as roughly 0.03*pi
    CHECK(boundary / std::numbers::pi == Approx(0.03).margin(0.006));
}

TEST_CASE("analytic derivatives match central differences", "[pulse]") {
    const double h = 1e-6;
    for (double t : {-0.45, -0.2, 0.0, 0.13, 0.31, 0.5}) {
        const Angles a = pulse_angles(t, kFig2);
        const double dTheta = (theta(t + h, kFig2) - theta(t - h, kFig2)) / (2 * h);
        const double dPhi = (phi(t + h, kFig2) - phi(t - h, kFig2)) / (2 * h);
        CHECK(a.thetaDot == Approx(dTheta).margin(1e-7));
        CHECK(a.phiDot == Approx(dPhi).margin(1e-7));
    }
}

TEST_CASE("frozen probe at t = 0.2 of the default shape", "[pulse]") {
    const Angles a = pulse_angles(0.2, kFig2);
    CHECK(a.theta == Approx(1.383552814739).margin(1e-10));
    CHECK(a.thetaDot == Approx(1.649235382889).margin(1e-10));
    CHECK(a.phi == Approx(0.201432759792).margin(1e-10));
    CHECK(a.phiDot == Approx(-0.895256710186).margin(1e-10));
    const EffectiveCouplings c = effective_couplings(0.2, kFig2);
    CHECK(c.gA_L == Approx(-10.986550558571).margin(1e-9));
    CHECK(c.gA_R == Approx(-3.370151398849).margin(1e-9));
}

TEST_CASE("frozen angles give zero couplings", "[pulse]") {
    const EffectiveCouplings c = detail::couplings_from_angles(Angles{0.7, 0.0, 0.3, 0.0});
    CHECK(c.gA_L == 0.0);
    CHECK(c.gA_R == 0.0);
}

TEST_CASE("coupling norm identity gA_L^2 + gA_R^2 = Omega^2", "[pulse]") {
    for (int i = 0; i <= 200; ++i) {
        const double t = -0.5 + i / 200.0;
        const Angles a = pulse_angles(t, kFig2);
        const EffectiveCouplings c = effective_couplings(t, kFig2);
        const double cot = std::cos(a.phi) / std::sin(a.phi);
        const double omega = std::sqrt(2.0 * (a.thetaDot * cot * a.thetaDot * cot + a.phiDot * a.phiDot));
        REQUIRE(std::hypot(c.gA_L, c.gA_R) == Approx(omega).epsilon(1e-12));
        REQUIRE(rabi_envelope(t, kFig2) == Approx(omega).epsilon(1e-12));
    }
}

TEST_CASE("polar identity: gA_L = -Omega sin(rho), gA_R = -Omega cos(rho)", "[pulse]") {
    for (int i = 0; i <= 100; ++i) {
        const double t = -0.5 + i / 100.0;
        const Angles a = pulse_angles(t, kFig2);
        const EffectiveCouplings c = effective_couplings(t, kFig2);
        const double cot = std::cos(a.phi) / std::sin(a.phi);
        const double drive = a.thetaDot * cot;
        if (std::abs(drive) < 1e-12)
            continue;
        const double rho = a.theta + std::atan(a.phiDot / drive);
        const double omega = rabi_envelope(t, kFig2);
        REQUIRE(c.gA_L == Approx(-omega * std::sin(rho)).margin(1e-10));
        REQUIRE(c.gA_R == Approx(-omega * std::cos(rho)).margin(1e-10));
    }
}

TEST_CASE("couplings coincide at t = 0", "[pulse]") {
    // phiDot(0) = 0 and theta(0) = pi/4 make both couplings equal
    const EffectiveCouplings c = effective_couplings(0.0, kFig2);
    CHECK(c.gA_L == Approx(c.gA_R).epsilon(1e-14));
    CHECK(pulse_angles(0.0, kFig2).phiDot == 0.0);
}

TEST_CASE("thetaDot is strictly positive", "[pulse]") {
    for (double t : {-0.5, -0.25, 0.0, 0.25, 0.5})
        CHECK(pulse_angles(t, kFig2).thetaDot > 0.0);
}

TEST_CASE("cot guard triggers when phi underflows", "[pulse]") {
    // narrow Gaussian pushes phi below the floor inside the window
    const PulseParams pp{1.0, 0.1, 0.05, 0.01};
    CHECK_THROWS_AS(effective_couplings(0.5, pp), std::domain_error);
}

TEST_CASE("drives stay finite in the supported shape regime", "[pulse]") {
    // For tauC = 0.1*T the Gaussian tail of phi dips below the cot guard at
    // the window edges already for phi0 = 0.01, so the scan starts at 0.15*T.
    for (double phi0 : {0.01, 0.05, 0.15, 0.4}) {
        for (double tauCRatio : {0.15, 0.2, 0.3}) {
            const PulseParams pp{1.0, 0.1, tauCRatio, phi0};
            for (int i = 0; i <= 100; ++i) {
                const double t = -0.5 + i / 100.0;
                const EffectiveCouplings c = effective_couplings(t, pp);
                REQUIRE(std::isfinite(c.gA_L));
                REQUIRE(std::isfinite(c.gA_R));
            }
        }
    }
}

TEST_CASE("designed drives: middle drive cancels the side drives", "[pulse]") {
    SystemParams p;
    for (int i = 0; i <= 50; ++i) {
        const double t = -0.5 + i / 50.0;
        const DriveSample d = design_drives(t, kFig2, p);
        REQUIRE(d.OmegaM + (p.J1 / p.Delta0) * (d.OmegaL + d.OmegaR) ==
                Approx(0.0).margin(1e-10));
    }
}

TEST_CASE("designed drives are consistent with the effective couplings", "[pulse]") {
    SystemParams p;
    p.g1 = 1.3;
    p.g2 = 0.8;
    for (int i = 0; i <= 50; ++i) {
        const double t = -0.5 + i / 50.0;
        const DriveSample d = design_drives(t, kFig2, p);
        const EffectiveCouplings c = effective_couplings(t, kFig2);
        REQUIRE(p.g1 * d.OmegaL / (-p.Delta0) == Approx(c.gA_L).margin(1e-12));
        REQUIRE(p.g2 * d.OmegaR / (-p.Delta0) == Approx(c.gA_R).margin(1e-12));
    }
}

TEST_CASE("drive symmetry at t = 0 for equal couplings", "[pulse]") {
    SystemParams p;
    const DriveSample d = design_drives(0.0, kFig2, p);
    CHECK(d.OmegaL == Approx(d.OmegaR).epsilon(1e-14));
    CHECK(d.OmegaL == Approx(1208.6035).margin(1e-3));
}

TEST_CASE("schedule grid is uniform and covers both endpoints", "[pulse]") {
    SystemParams p;
    const PulseSchedule s = make_schedule(kFig2, p, 101);
    REQUIRE(s.samples.size() == 101);
    CHECK(s.samples.front().t == -0.5);
    CHECK(s.samples.back().t == +0.5);
    const double h = 1.0 / 100;
    for (size_t k = 1; k < s.samples.size(); ++k) {
        REQUIRE(s.samples[k].t > s.samples[k - 1].t);
        REQUIRE(s.samples[k].t - s.samples[k - 1].t == Approx(h).margin(1e-12));
    }
    CHECK_THROWS_AS(make_schedule(kFig2, p, 1), std::invalid_argument);
}

TEST_CASE("boundary report for the default shape", "[pulse]") {
    const BoundaryReport r = check_boundaries(kFig2, 0.25);
    CHECK(r.thetaStart == Approx(0.0105131056).margin(1e-9));
    CHECK(r.thetaEnd == Approx(0.0105131056).margin(1e-9));
    CHECK(r.phiEnd == Approx(std::numbers::pi * 0.1 * std::exp(-25.0 / 9.0)).epsilon(1e-12));
    // the rate residuals dominate: |phiDot(T/2)| = 2*(T/2)/tauC^2 * phi(T/2)
    CHECK(r.phiDotEnd == Approx(0.21703).margin(1e-4));
    CHECK(r.max_residual() == r.phiDotEnd);
    CHECK(r.pass);
    CHECK_FALSE(check_boundaries(kFig2, 0.05).pass);
}

TEST_CASE("boundary report fails for phi0 = 0.4 at tol 0.01", "[pulse]") {
    const BoundaryReport r = check_boundaries(PulseParams::standard_shape(1.0, 0.4), 0.01);
    CHECK(r.phiEnd == Approx(0.03 * std::numbers::pi).margin(0.02));
    CHECK_FALSE(r.pass);
}

TEST_CASE("boundary residuals vanish for long pulses", "[pulse]") {
    const PulseParams pp{10.0, 0.1, 0.3, 0.4}; // fixed tau, tauC; T -> large
    const BoundaryReport r = check_boundaries(pp, 1e-12);
    CHECK(r.max_residual() < 1e-12);
    CHECK(r.pass);
}

TEST_CASE("min zeno ratio: scaling and value for the default run", "[pulse]") {
    SystemParams p;
    const PulseSchedule s = make_schedule(kFig2, p);
    const double k1 = min_zeno_ratio(s, p);
    CHECK(k1 == Approx(4.13698).margin(1e-4));

    SystemParams p2 = p;
    p2.J1 = p2.J2 = 100.0;
    CHECK(min_zeno_ratio(s, p2) == Approx(2.0 * k1).epsilon(1e-12));

    // monotone transform of the pump maximum
    double omegaMax = 0.0;
    for (const DriveSample& d : s.samples)
        omegaMax = std::max(omegaMax, std::hypot(d.gA_L, d.gA_R));
    CHECK(k1 == Approx(std::numbers::sqrt2 * p.J1 / omegaMax).epsilon(1e-12));
}

TEST_CASE("min zeno ratio rejects an all-zero schedule", "[pulse]") {
    SystemParams p;
    PulseSchedule s;
    s.params = kFig2;
    s.samples.resize(5); // zero drives everywhere
    CHECK_THROWS_AS(min_zeno_ratio(s, p), std::domain_error);
}

TEST_CASE("pulse params validation", "[pulse]") {
    CHECK_THROWS_AS((PulseParams{1.0, 0.1, 0.3, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((PulseParams{1.0, 0.1, 0.3, 1.6}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((PulseParams{-1.0, 0.1, 0.3, 0.1}).validate(), std::invalid_argument);
    CHECK_NOTHROW(kFig2.validate());
}

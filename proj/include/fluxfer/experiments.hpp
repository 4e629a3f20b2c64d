#ifndef FLUXFER_EXPERIMENTS_HPP
#define FLUXFER_EXPERIMENTS_HPP

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluxfer/dynamics.hpp"
#include "fluxfer/invariant.hpp"
#include "fluxfer/io.hpp"
#include "fluxfer/model.hpp"
#include "fluxfer/noise.hpp"
#include "fluxfer/pulse.hpp"
#include "fluxfer/steady.hpp"

namespace fluxfer {

using json = nlohmann::json;

// Experiment drivers: a single transfer run and 2-D (T, phi0) parameter
// sweeps with CSV output.  Sweep cells are independent; they may be computed
// by any number of workers but are always emitted in grid order, so the
// output bytes do not depend on the worker count.

enum class RunMode { Transfer, SweepFidelity, SweepKmin, SweepNoise, SweepDecay };

inline std::string to_string(RunMode m) {
    switch (m) {
    case RunMode::Transfer: return "transfer";
    case RunMode::SweepFidelity: return "sweep_fidelity";
    case RunMode::SweepKmin: return "sweep_kmin";
    case RunMode::SweepNoise: return "sweep_noise";
    case RunMode::SweepDecay: return "sweep_decay";
    }
    throw std::logic_error("unknown RunMode");
}

inline RunMode run_mode_from_string(const std::string& s) {
    if (s == "transfer") return RunMode::Transfer;
    if (s == "sweep_fidelity") return RunMode::SweepFidelity;
    if (s == "sweep_kmin") return RunMode::SweepKmin;
    if (s == "sweep_noise") return RunMode::SweepNoise;
    if (s == "sweep_decay") return RunMode::SweepDecay;
    throw std::invalid_argument("unknown mode '" + s + "'");
}

struct SweepGrid {
    std::vector<double> tValues;
    std::vector<double> phi0Values;

    static SweepGrid linear(double tMin, double tMax, int tCount, double pMin, double pMax,
                            int pCount) {
        if (tCount < 1 || pCount < 1)
            throw std::invalid_argument("SweepGrid: counts must be >= 1");
        if (!(tMin > 0.0) || tMax < tMin || !(pMin > 0.0) || pMax < pMin)
            throw std::invalid_argument("SweepGrid: invalid ranges");
        SweepGrid g;
        g.tValues.resize(static_cast<size_t>(tCount));
        g.phi0Values.resize(static_cast<size_t>(pCount));
        for (int i = 0; i < tCount; ++i)
            g.tValues[static_cast<size_t>(i)] =
                tCount == 1 ? tMin : tMin + (tMax - tMin) * i / (tCount - 1);
        for (int j = 0; j < pCount; ++j)
            g.phi0Values[static_cast<size_t>(j)] =
                pCount == 1 ? pMin : pMin + (pMax - pMin) * j / (pCount - 1);
        return g;
    }

    size_t cells() const { return tValues.size() * phi0Values.size(); }
};

/// Default sweep window; the high-fidelity operating region of the scheme.
inline SweepGrid default_sweep_grid() { return SweepGrid::linear(0.3, 1.0, 41, 0.10, 0.25, 41); }

struct ExperimentConfig {
    RunMode mode = RunMode::Transfer;
    SystemParams system;

    // single-run pulse; tau and tauC scale with T
    double T = 1.0;
    double phi0 = 0.1;
    double tauOverT = 0.1;
    double tauCOverT = 0.3;

    SweepGrid grid = default_sweep_grid();
    double mu = 0.05;
    bool noiseHalfPrefactor = false;

    IntegratorConfig integrator;
    int schedulePoints = kDefaultSchedulePoints;
    int workers = 0; ///< 0 = hardware concurrency
    std::filesystem::path outDir = "out";

    // Loose by construction: the boundary residuals mix angles (rad) with
    // angle rates (rad*g) and only vanish asymptotically in T.
    double boundaryTol = 0.25;
    double rwaThreshold = 10.0;

    PulseParams pulse_params() const { return PulseParams{T, tauOverT * T, tauCOverT * T, phi0}; }
    PulseParams pulse_params_for(double Tcell, double phi0cell) const {
        return PulseParams{Tcell, tauOverT * Tcell, tauCOverT * Tcell, phi0cell};
    }
    int resolved_workers() const {
        if (workers > 0)
            return workers;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }
};

// ---------------------------------------------------------------------------
// Config <-> JSON
// ---------------------------------------------------------------------------

inline void validate_units(const json& j) {
    if (!j.contains("units"))
        return;
    const json& u = j.at("units");
    if (u.value("rates", "g") != "g" || u.value("time", "1/g") != "1/g")
        throw std::invalid_argument("config: only rates in units of g and time in 1/g are supported");
}

inline ExperimentConfig config_from_json(const json& j) {
    validate_units(j);
    ExperimentConfig c;
    if (j.contains("mode"))
        c.mode = run_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("system")) {
        const json& s = j.at("system");
        c.system.g1 = s.value("g1", c.system.g1);
        c.system.g2 = s.value("g2", c.system.g2);
        c.system.J1 = s.value("J1", c.system.J1);
        c.system.J2 = s.value("J2", c.system.J2);
        c.system.Delta0 = s.value("Delta0", c.system.Delta0);
        c.system.gammaL = s.value("gammaL", c.system.gammaL);
        c.system.gammaM = s.value("gammaM", c.system.gammaM);
        c.system.gammaR = s.value("gammaR", c.system.gammaR);
        c.system.gammaM1 = s.value("gammaM1", c.system.gammaM1);
        c.system.gammaM2 = s.value("gammaM2", c.system.gammaM2);
    }
    if (j.contains("pulse")) {
        const json& p = j.at("pulse");
        c.T = p.value("T", c.T);
        c.phi0 = p.value("phi0", c.phi0);
        c.tauOverT = p.value("tau_over_T", c.tauOverT);
        c.tauCOverT = p.value("tauC_over_T", c.tauCOverT);
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        c.grid = SweepGrid::linear(s.value("T_min", 0.3), s.value("T_max", 1.0),
                                   s.value("T_count", 41), s.value("phi0_min", 0.10),
                                   s.value("phi0_max", 0.25), s.value("phi0_count", 41));
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        c.mu = n.value("mu", c.mu);
        c.noiseHalfPrefactor = n.value("half_prefactor", c.noiseHalfPrefactor);
    }
    if (j.contains("integrator")) {
        const json& i = j.at("integrator");
        c.integrator.stepCount = i.value("step_count", c.integrator.stepCount);
        c.integrator.convergenceCheck = i.value("convergence_check", c.integrator.convergenceCheck);
    }
    c.schedulePoints = j.value("schedule_points", c.schedulePoints);
    c.workers = j.value("workers", c.workers);
    if (j.contains("out"))
        c.outDir = j.at("out").get<std::string>();
    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        c.boundaryTol = d.value("boundary_tol", c.boundaryTol);
        c.rwaThreshold = d.value("rwa_threshold", c.rwaThreshold);
    }
    return c;
}

inline json config_to_json(const ExperimentConfig& c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["units"] = {{"rates", "g"}, {"time", "1/g"}};
    j["system"] = {{"g1", c.system.g1},           {"g2", c.system.g2},
                   {"J1", c.system.J1},           {"J2", c.system.J2},
                   {"Delta0", c.system.Delta0},   {"gammaL", c.system.gammaL},
                   {"gammaM", c.system.gammaM},   {"gammaR", c.system.gammaR},
                   {"gammaM1", c.system.gammaM1}, {"gammaM2", c.system.gammaM2}};
    j["pulse"] = {{"T", c.T}, {"phi0", c.phi0}, {"tau_over_T", c.tauOverT},
                  {"tauC_over_T", c.tauCOverT}};
    j["sweep"] = {{"T_min", c.grid.tValues.front()},
                  {"T_max", c.grid.tValues.back()},
                  {"T_count", static_cast<int>(c.grid.tValues.size())},
                  {"phi0_min", c.grid.phi0Values.front()},
                  {"phi0_max", c.grid.phi0Values.back()},
                  {"phi0_count", static_cast<int>(c.grid.phi0Values.size())}};
    j["noise"] = {{"mu", c.mu}, {"half_prefactor", c.noiseHalfPrefactor}};
    j["integrator"] = {{"step_count", c.integrator.stepCount},
                       {"convergence_check", c.integrator.convergenceCheck}};
    j["schedule_points"] = c.schedulePoints;
    j["workers"] = c.workers;
    j["out"] = c.outDir.string();
    j["diagnostics"] = {{"boundary_tol", c.boundaryTol}, {"rwa_threshold", c.rwaThreshold}};
    return j;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("cannot parse config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Cell evaluators (shared by single runs and sweeps)
// ---------------------------------------------------------------------------

/// Initial condition for all transfer experiments: membrane 1 excited.
inline FluctuationState initial_membrane1_state() {
    return ZenoBasis::psi1();
}

inline double transfer_fidelity_cell(const ExperimentConfig& cfg, double T, double phi0,
                                     bool includeDecay) {
    const PulseParams pp = cfg.pulse_params_for(T, phi0);
    const PulseSchedule schedule = make_schedule(pp, cfg.system, cfg.schedulePoints);
    const FluctuationTrajectory traj =
        integrate_pure(initial_membrane1_state(), schedule, cfg.system, includeDecay, cfg.integrator);
    return fidelity_pure(traj);
}

inline double kmin_cell(const ExperimentConfig& cfg, double T, double phi0) {
    const PulseParams pp = cfg.pulse_params_for(T, phi0);
    return min_zeno_ratio(make_schedule(pp, cfg.system, cfg.schedulePoints), cfg.system);
}

inline double noisy_fidelity_cell(const ExperimentConfig& cfg, double T, double phi0) {
    const PulseParams pp = cfg.pulse_params_for(T, phi0);
    const PulseSchedule schedule = make_schedule(pp, cfg.system, cfg.schedulePoints);
    const NoiseOptions opts{cfg.noiseHalfPrefactor, false};
    const DensityResult res = propagate_density(pure_density(initial_membrane1_state()), schedule,
                                                cfg.system, cfg.mu, cfg.integrator, opts);
    return fidelity_density(res.rho);
}

// ---------------------------------------------------------------------------
// Parallel sweep machinery
// ---------------------------------------------------------------------------

namespace detail {

template <typename F>
void parallel_for(int n, int workers, F&& body) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
            body(i);
    };
    std::vector<std::thread> pool;
    const int count = std::min(workers, n);
    pool.reserve(static_cast<size_t>(count));
    for (int w = 0; w < count; ++w)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
}

inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

} // namespace detail

struct SweepResult {
    SweepGrid grid;
    std::vector<double> values; ///< row-major, index = iT * nPhi0 + jPhi0
    size_t failedCells = 0;

    double value(size_t i, size_t j) const { return values[i * grid.phi0Values.size() + j]; }
};

/// Evaluate one value per grid cell in parallel.  A failing cell is recorded
/// as NaN and logged; it never aborts the sweep.
template <typename CellFn>
SweepResult run_sweep_cells(const ExperimentConfig& cfg, CellFn&& cell) {
    SweepResult result;
    result.grid = cfg.grid;
    const size_t nP = cfg.grid.phi0Values.size();
    const int n = static_cast<int>(cfg.grid.cells());
    result.values.assign(static_cast<size_t>(n), std::numeric_limits<double>::quiet_NaN());
    std::atomic<size_t> failures{0};

    detail::parallel_for(n, cfg.resolved_workers(), [&](int idx) {
        const size_t i = static_cast<size_t>(idx) / nP;
        const size_t j = static_cast<size_t>(idx) % nP;
        const double T = cfg.grid.tValues[i];
        const double p0 = cfg.grid.phi0Values[j];
        try {
            result.values[static_cast<size_t>(idx)] = cell(T, p0);
        } catch (const std::exception& e) {
            failures.fetch_add(1);
            std::scoped_lock lock(detail::log_mutex());
            std::cerr << "sweep cell (T=" << T << ", phi0=" << p0 << ") failed: " << e.what()
                      << "\n";
        }
    });
    result.failedCells = failures.load();
    return result;
}

inline void write_sweep_csv(const std::filesystem::path& path, const SweepResult& r) {
    auto out = io::open_output(path);
    out << "T,phi0,value\n";
    const size_t nP = r.grid.phi0Values.size();
    for (size_t i = 0; i < r.grid.tValues.size(); ++i)
        for (size_t j = 0; j < nP; ++j)
            out << io::format_number(r.grid.tValues[i]) << ','
                << io::format_number(r.grid.phi0Values[j]) << ','
                << io::format_number(r.values[i * nP + j]) << '\n';
    if (!out)
        throw std::runtime_error("failed while writing " + path.string());
}

inline void write_run_meta(const std::filesystem::path& path, const ExperimentConfig& cfg,
                           const std::vector<std::string>& outputs) {
    json meta;
    meta["tool"] = "fluxfer";
    meta["version"] = kVersion;
    meta["mode"] = to_string(cfg.mode);
    meta["config"] = config_to_json(cfg);
    meta["outputs"] = outputs;
    auto out = io::open_output(path);
    out << meta.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("failed while writing " + path.string());
}

// ---------------------------------------------------------------------------
// Top-level runs
// ---------------------------------------------------------------------------

struct TransferOutputs {
    std::filesystem::path drivesCsv;
    std::filesystem::path trajectoryCsv;
    std::filesystem::path metaJson;
    double fidelity = 0.0;
    double finalMembrane1 = 0.0;
};

inline TransferOutputs run_transfer(const ExperimentConfig& cfg) {
    const PulseParams pp = cfg.pulse_params();
    const PulseSchedule schedule = make_schedule(pp, cfg.system, cfg.schedulePoints);
    const FluctuationTrajectory traj = integrate_pure(initial_membrane1_state(), schedule,
                                                      cfg.system, cfg.system.has_decay(),
                                                      cfg.integrator);
    TransferOutputs out;
    out.drivesCsv = cfg.outDir / "drives.csv";
    out.trajectoryCsv = cfg.outDir / "trajectory.csv";
    out.metaJson = cfg.outDir / "run_meta.json";
    write_drives_csv(out.drivesCsv, schedule);
    write_trajectory_csv(out.trajectoryCsv, traj);
    write_run_meta(out.metaJson, cfg, {"drives.csv", "trajectory.csv"});
    out.fidelity = fidelity_pure(traj);
    out.finalMembrane1 = std::norm(traj.final_state()(kMembrane1));
    return out;
}

struct SweepOutputs {
    std::filesystem::path sweepCsv;
    std::filesystem::path metaJson;
    SweepResult result;
};

inline SweepOutputs run_sweep(const ExperimentConfig& cfg) {
    SweepResult r;
    switch (cfg.mode) {
    case RunMode::SweepFidelity:
        r = run_sweep_cells(cfg, [&](double T, double p0) {
            return transfer_fidelity_cell(cfg, T, p0, false);
        });
        break;
    case RunMode::SweepKmin:
        r = run_sweep_cells(cfg, [&](double T, double p0) { return kmin_cell(cfg, T, p0); });
        break;
    case RunMode::SweepNoise:
        r = run_sweep_cells(cfg, [&](double T, double p0) { return noisy_fidelity_cell(cfg, T, p0); });
        break;
    case RunMode::SweepDecay:
        r = run_sweep_cells(cfg, [&](double T, double p0) {
            return transfer_fidelity_cell(cfg, T, p0, true);
        });
        break;
    case RunMode::Transfer:
        throw std::invalid_argument("run_sweep: config mode is 'transfer'");
    }
    SweepOutputs out;
    out.sweepCsv = cfg.outDir / "sweep.csv";
    out.metaJson = cfg.outDir / "run_meta.json";
    write_sweep_csv(out.sweepCsv, r);
    write_run_meta(out.metaJson, cfg, {"sweep.csv"});
    out.result = std::move(r);
    return out;
}

} // namespace fluxfer

#endif

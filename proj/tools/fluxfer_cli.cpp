// Command-line driver: single transfer runs, (T, phi0) sweeps and design
// diagnostics, with CSV/JSON output.

#include <algorithm>
#include <exception>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "fluxfer/fluxfer.hpp"

namespace {

using namespace fluxfer;

struct CliOverrides {
    std::string configPath;
    std::string outDir;
    int steps = 0;
    int workers = -1;
};

void add_common_options(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.configPath, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.outDir, "output directory");
    cmd->add_option("--steps", o.steps, "integrator step count override")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", o.workers, "sweep worker count (0 = hardware)")
        ->check(CLI::NonNegativeNumber);
}

ExperimentConfig resolve_config(const CliOverrides& o, RunMode mode) {
    ExperimentConfig cfg;
    if (!o.configPath.empty())
        cfg = load_config(o.configPath);
    cfg.mode = mode;
    if (!o.outDir.empty())
        cfg.outDir = o.outDir;
    if (o.steps > 0)
        cfg.integrator.stepCount = o.steps;
    if (o.workers >= 0)
        cfg.workers = o.workers;
    return cfg;
}

int do_transfer(const ExperimentConfig& cfg) {
    if (!(cfg.phi0 > 0.0))
        throw std::invalid_argument("transfer: phi0 must be > 0");
    const TransferOutputs out = run_transfer(cfg);
    std::cout << "transfer: T=" << cfg.T << " phi0=" << cfg.phi0
              << "  n_b2(final)=" << io::format_number(out.fidelity)
              << "  n_b1(final)=" << io::format_number(out.finalMembrane1) << "\n"
              << "wrote " << out.drivesCsv.string() << ", " << out.trajectoryCsv.string() << ", "
              << out.metaJson.string() << "\n";
    return 0;
}

int do_sweep(const ExperimentConfig& cfg) {
    const SweepOutputs out = run_sweep(cfg);
    std::cout << to_string(cfg.mode) << ": " << cfg.grid.tValues.size() << "x"
              << cfg.grid.phi0Values.size() << " grid";
    if (out.result.failedCells > 0)
        std::cout << " (" << out.result.failedCells << " cells failed, recorded as nan)";
    std::cout << "\nwrote " << out.sweepCsv.string() << ", " << out.metaJson.string() << "\n";
    return 0;
}

int do_validate(const ExperimentConfig& cfg) {
    const PulseParams pp = cfg.pulse_params();
    const PulseSchedule schedule = make_schedule(pp, cfg.system, cfg.schedulePoints);
    bool allPass = true;
    auto report = [&allPass](const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "PASS  " : "FAIL  ") << name << ": " << detail << "\n";
        allPass = allPass && pass;
    };

    const BoundaryReport br = check_boundaries(pp, cfg.boundaryTol);
    report("boundaries", br.pass,
           "max residual " + io::format_number(br.max_residual()) + " vs tol " +
               io::format_number(br.tol));

    const RwaReport rwa = validate_rwa(cfg.system, schedule, cfg.rwaThreshold);
    report("rwa", rwa.pass,
           "Delta0/peak coupling = " + io::format_number(rwa.ratio) + " vs threshold " +
               io::format_number(rwa.threshold));

    double vnMax = 0.0;
    for (const DriveSample& d : schedule.samples)
        vnMax = std::max(vnMax, von_neumann_residual(d.t, pp));
    report("invariant_flow", vnMax <= 1e-8,
           "max von Neumann residual " + io::format_number(vnMax));

    double eigMax = 0.0;
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> angle(-3.2, 3.2);
    for (int k = 0; k < 100; ++k) {
        Eigen::SelfAdjointEigenSolver<Matrix3c> es(build_invariant(angle(rng), angle(rng)).mat);
        eigMax = std::max({eigMax, std::abs(es.eigenvalues()(0) + 1.0),
                           std::abs(es.eigenvalues()(1)), std::abs(es.eigenvalues()(2) - 1.0)});
    }
    report("invariant_spectrum", eigMax <= 1e-12,
           "max deviation from {-1,0,+1}: " + io::format_number(eigMax));

    const double lrPhase = lewis_riesenfeld_phase(pp, cfg.schedulePoints);
    report("dark_path_phase", std::abs(lrPhase) <= 1e-8, io::format_number(lrPhase));

    return allPass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariant-engineered membrane fluctuation transfer toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fluxfer::kVersion));

    CliOverrides o;
    CLI::App* transfer = app.add_subcommand("transfer", "single transfer run (drives + trajectory)");
    CLI::App* sweepF = app.add_subcommand("sweep-fidelity", "(T, phi0) fidelity sweep, no decay");
    CLI::App* sweepK = app.add_subcommand("sweep-kmin", "(T, phi0) sweep of min sqrt(2)J/Omega");
    CLI::App* sweepN = app.add_subcommand("sweep-noise", "(T, phi0) fidelity sweep with amplitude noise");
    CLI::App* sweepD = app.add_subcommand("sweep-decay", "(T, phi0) fidelity sweep with decay");
    CLI::App* validate = app.add_subcommand("validate", "boundary/RWA/invariant diagnostics");
    for (CLI::App* cmd : {transfer, sweepF, sweepK, sweepN, sweepD, validate})
        add_common_options(cmd, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (transfer->parsed())
            return do_transfer(resolve_config(o, RunMode::Transfer));
        if (sweepF->parsed())
            return do_sweep(resolve_config(o, RunMode::SweepFidelity));
        if (sweepK->parsed())
            return do_sweep(resolve_config(o, RunMode::SweepKmin));
        if (sweepN->parsed())
            return do_sweep(resolve_config(o, RunMode::SweepNoise));
        if (sweepD->parsed())
            return do_sweep(resolve_config(o, RunMode::SweepDecay));
        if (validate->parsed())
            return do_validate(resolve_config(o, RunMode::Transfer));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

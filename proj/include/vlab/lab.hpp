#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vlab/config.hpp"
#include "vlab/initial_data.hpp"
#include "vlab/io.hpp"
#include "vlab/particles.hpp"
#include "vlab/regimes.hpp"
#include "vlab/transport.hpp"

namespace vlab {

std::string code_version();

struct ExperimentConfig {
    std::string name = "meanfield";
    RegimeParams regime;
    InitialSpec f0;
    double amplitude = 1.0;   // density perturbation a
    bool eps_scaled = true;   // rho0 = 1 + eps a cos(2 pi x) instead of 1 + a cos(2 pi x)
    int mx = 64;
    int mv = 256;
    double vmax = 2.0;
    double dt = 0.0;          // particle step; 0 selects eps / 20
    double pde_dt = 0.0;      // PDE step; 0 selects eps / 40
    double snapshot_dt = 0.1;
    std::optional<std::uint64_t> seed;
    int seeds = 5;
    std::string out_dir;
    std::vector<double> N_values;
    std::vector<double> eps_values;
    GridCloudOptions distance = [] {
        GridCloudOptions o;
        o.max_cloud_atoms = 0;  // always bin clouds onto the quantization blocks
        return o;
    }();
    Deposit deposit = Deposit::CloudInCell;
    int table_m = 256;
    int trials = 1000;
    double spectrum_periods = 20.0;  // horizon of the E(t, x0) series, in plasma periods
    bool force = false;
    int threads = 1;
};

// Reads the flat config (keys of experiment_schema). DomainError when the seed is missing.
ExperimentConfig experiment_config(const Config& cfg);
json to_json(const ExperimentConfig& cfg);
json to_json(const RegimeParams& p);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunReport {
    std::string experiment;
    json config;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<Table> tables;
    json diagnostics = json::object();
    std::vector<Check> checks;
    std::vector<std::string> violations;
    bool forced = false;
    double wall_seconds = 0.0;
    long long steps = 0;

    bool passed() const;
    const Table& table(const std::string& name) const;
    json to_json() const;
    // <dir>/<experiment>.json plus one CSV per table.
    void write(const std::string& dir) const;
};

// Violated admissibility inequalities for an experiment kind ("meanfield",
// "quasineutral", "combined") at the given parameters.
std::vector<std::string> admissibility_violations(const std::string& kind, const RegimeParams& p);

// Regime report: inputs, derived schedules, bounds, verdicts and constants.
json regime_report(const RegimeParams& p, const DensityHistory* history = nullptr, double t = 0.0);

RunReport run_meanfield_convergence(const ExperimentConfig& cfg);
RunReport run_quasineutral_sweep(const ExperimentConfig& cfg);
RunReport run_combined_limit(const ExperimentConfig& cfg);
RunReport run_experiment(const ExperimentConfig& cfg);

struct ConcentrationOptions {
    int N = 100;
    int resamples = 200;
    int reference_grid = 64;   // the uniform law on [-1, 1]^2 is represented by grid^2 cell centers
    std::vector<double> x_grid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
    double kappa = 1.0;
    double C = 2.0;            // fixed prefactor; c is calibrated
    double safety = 0.5;       // calibrated c is multiplied by this
    std::uint64_t calibration_seed = 1;
    std::uint64_t seed = 2;
};

struct ConcentrationResult {
    std::vector<double> x;
    std::vector<double> calibration_frequency;
    std::vector<double> frequency;
    std::vector<double> bound;
    double C = 0.0;
    double c = 0.0;
    double quantization_error = 0.0;
    bool passed = false;
};

RunReport run_lemma_suite(std::uint64_t seed, int trials, ConcentrationOptions concentration = {});

// Exceedance frequencies of W_1(nu, nu^N) >= kappa x for nu uniform on [-1, 1]^2 (m = 2, p = 1).
ConcentrationResult concentration_check(const ConcentrationOptions& options);

}  // namespace vlab

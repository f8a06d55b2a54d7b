#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nftk/scattering.hpp"
#include "nftk/spectra.hpp"

namespace nftk {

struct ExperimentConfig {
    std::vector<double> sigmas{0.5, 1.0, 1.5, 2.0};
    std::vector<double> T_values{3.5, 4.0, 5.0, 6.0, 7.0, 8.0};
    int n_trials = 1000;
    std::uint64_t rng_seed = 1;
    std::size_t samples_per_pulse = 10000;
    double t_max = 12.0;
    double omega_max = 20.0;
    std::size_t omega_count = 4096;
    std::filesystem::path output_dir = "report";
    ScatterConfig scattering{.scheme = Scheme::ForwardBackwardSplit};
    // Relative edge tolerance for the continuous-spectrum energy.
    double edge_tol = 1e-3;
    // 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;

    void validate() const;
};

// Top-level keys mirror the struct fields; [omega_grid] holds max/count and [scattering] the scatter keys.
ExperimentConfig experiment_config_from_toml(const std::string& text);
nlohmann::json to_json(const ExperimentConfig& c);

// Uniform [0, 2 pi) phases for one trial from a portable generator keyed by (seed, trial).
std::vector<double> trial_phases(std::uint64_t seed, int trial, std::size_t count);

struct TruncationResult {
    double T = 0.0;
    std::vector<Complex> eig_num;
    std::vector<Complex> eig_anal;
    // b values in analytic-eigenvalue order, paired with eig_num by nearest neighbour.
    std::vector<Complex> b_num;
    std::vector<Complex> b_anal;
    std::vector<Complex> eig_num_paired;
    bool lost = false;
    bool pairing_failed = false;
    std::string failure;
    double eg_num = 0.0;
    double eg_anal = 0.0;
    double l2_a = 0.0;
    double l2_b = 0.0;
    double energy_mismatch = 0.0;

    bool usable_for_eigen_stats() const { return failure.empty() && !lost && !pairing_failed; }
};

struct TrialRecord {
    int trial_id = 0;
    std::vector<double> phases;
    std::vector<TruncationResult> per_T;
};

struct TruncationSummary {
    double T = 0.0;
    bool in_contract = true;
    int n_trials = 0;
    int n_ok = 0;
    int n_lost = 0;
    int n_pairing_failed = 0;
    int n_failed = 0;
    std::vector<double> lambda_num_mean;
    std::vector<double> lambda_anal;
    double eg_num_mean = 0.0;
    double eg_anal_mean = 0.0;
    std::vector<double> nmse_lambda;
    std::vector<double> nmse_b;
    double nmse_arg_b1 = 0.0;
    double l2_a_mean = 0.0;
    double l2_b_mean = 0.0;
    double energy_mismatch_mean = 0.0;
};

struct EnsembleReport {
    ExperimentConfig config;
    std::vector<TruncationSummary> per_T;
    std::vector<TrialRecord> trials;
};

// One pulse, one window.
TruncationResult run_truncation(const TimeSignal& pulse, const DiscreteSpectrum& ds, double T,
                                const ExperimentConfig& cfg);

// Throws NumericalError if more than half of the trials fail at some T.
EnsembleReport run_experiment(const ExperimentConfig& cfg);

// Writes summary.json and fig2.csv ... fig5.csv into dir.
void write_report(const EnsembleReport& rep, const std::filesystem::path& dir);
nlohmann::json summary_json(const EnsembleReport& rep);

double nmse_eigenvalue(Complex analytic, std::span<const Complex> numerical, Complex lambda_ref);
double nmse_b(Complex analytic, std::span<const Complex> numerical);
// Per-trial analytic values, paired elementwise with the numerical ones.
double nmse_b(std::span<const Complex> analytic, std::span<const Complex> numerical);
double l2_spectrum_error(std::span<const Complex> x, std::span<const Complex> y, const UniformGrid& grid);
double energy_balance_check(const TimeSignal& sig, const ContinuousSpectrum& cs, std::span<const Complex> eigs,
                            double edge_tol = 1e-3);

// Nearest-neighbour pairing: result[k] indexes numerical for analytic[k]; empty when not a bijection.
std::vector<std::size_t> pair_eigenvalues(std::span<const Complex> analytic, std::span<const Complex> numerical);

}  // namespace nftk

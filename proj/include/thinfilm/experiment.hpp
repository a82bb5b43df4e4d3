#pragma once

// Experiment configuration, initial-condition construction, run
// execution with persisted artifacts, temporal/spatial convergence
// studies, and parameter perturbation sweeps.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thinfilm/stepper.hpp"

namespace thinfilm {

inline constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InitKind {
    Example1,        // 0.1 (sin 3x sin 2y + sin 5x sin 5y)
    Example2,        // 0.01 (sin 30x sin 20y + sin 50x sin 50y)
    Example3,        // sin 2x cos 3y
    Example4,        // 0.01 (sin 3x sin 2y + cos 50x cos 100y)
    Example5Random,  // iid uniform [-0.5, 0.5), seeded
    FourierModes,
    File,
};

struct FourierMode {
    int xi1 = 0;
    int xi2 = 0;
    double amp = 0.0;
    enum class Kind { SinSin, SinCos, CosSin, CosCos } kind = Kind::SinSin;
};

struct InitialCondition {
    InitKind kind = InitKind::Example1;
    std::vector<FourierMode> modes;  // FourierModes only
    std::string file;                // File only
};

struct SweepSpec {
    std::string parameter;  // "gamma" or "epsilon_sq"
    std::vector<double> values;
};

struct ConvergeSpec {
    std::vector<double> dt_ladder = {4e-3, 2e-3, 1e-3};  // descending
    int reference_refinement = 16;  // reference dt = min(ladder)/refinement
};

struct ExperimentConfig {
    ModelConfig model;
    InitialCondition init;
    std::uint64_t seed = 0;
    double t_end = 300.0;
    std::int64_t record_every = 1;
    std::vector<double> snapshot_times;
    std::string output_dir = "out";
    std::optional<SweepSpec> sweep;
    ConvergeSpec converge;

    // Fully resolved section.key -> value view, for the run manifest.
    std::map<std::string, std::string> resolved;
};

// Parses the flat key = value text (sections [model], [init], [output],
// [sweep], [converge]; comments start with #). Unknown keys are hard
// errors; constraint violations name the offending key and constraint.
// Overrides are section-qualified "section.key=value" strings applied on
// top of the file content before validation.
ExperimentConfig parse_config(const std::string& text,
                              std::span<const std::string> overrides = {});

// The formulas of the five built-in examples are sampled in the scaled
// coordinates 2 pi x / L; example5 draws from mt19937_64(seed) mapped to
// [-0.5, 0.5) by (r >> 11) * 2^-53 - 0.5, filled row-major, which is
// reproducible across platforms. Every produced field is mean-free.
RealField make_initial(const InitialCondition& init, const GridSpec& grid,
                       std::uint64_t seed);

// Runs the experiment and writes under config.output_dir:
//   series.csv, initial.field, final.field, snapshot_t*.field,
//   manifest.json, monitor_report.txt, plot_series.gp.
// Monitor failures are reported loudly but do not abort. Returns 0 on
// success (artifacts written), nonzero on hard errors.
int run_experiment(const ExperimentConfig& config);

struct ConvergenceRow {
    double dt = 0.0;
    double error = 0.0;   // l2 error at t_end vs the self-reference
    double order = 0.0;   // observed order vs the previous row (NaN on first)
};

// Temporal self-convergence: runs the ladder and the reference at
// min(ladder)/refinement, reports l2 errors at t_end and observed orders.
std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& config,
                                              std::span<const double> dt_ladder,
                                              int reference_refinement);

struct SpatialRow {
    int n = 0;
    double error = 0.0;
};

// Spatial self-convergence at fixed dt against an n_ref x n_ref
// reference, compared mode-by-mode (Parseval over the shared modes).
std::vector<SpatialRow> spatial_study(const ExperimentConfig& config,
                                      std::span<const int> n_ladder, int n_ref);

struct SweepRow {
    double value = 0.0;
    double final_omega = 0.0;
    double final_energy = 0.0;
    bool ok = false;
    std::string error;
};

// One run_experiment per value, fanned out over worker threads with
// per-value output directories; failures are isolated per run. Writes
// <output_dir>/sweep_summary.csv.
std::vector<SweepRow> perturbation_sweep(const ExperimentConfig& config,
                                         const SweepSpec& sweep);

// Re-runs the diagnostics monitors on a stored series.csv (model
// parameters recovered from the manifest.json next to it). Prints
// PASS/FAIL lines; returns 0 iff all asserted monitors pass.
int check_series(const std::filesystem::path& series_csv);

}  // namespace thinfilm

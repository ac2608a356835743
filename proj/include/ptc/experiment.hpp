// Batch front-end logic behind the CLI: execute one experiment config
// (build -> contract -> propagate -> write artifacts), compare two runs,
// and the preset table covering the desk-scale experiment grid.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ptc/config.hpp"
#include "ptc/propagation.hpp"

namespace ptc {

struct RunSummary {
    std::string scheme;
    double epsilon{0};
    double range_factor{1};
    int n_sweeps{1};
    Index steps{0};
    Index max_bond{0};
    Index mid_bond_retained{0};  // singular values >= eps at bond n/2
    double contraction_seconds{0};
    int combinations{0};
    bool unstable{false};
    Index first_unstable_step{-1};
    double compression_error_vs_reference{-1};  // -1: no reference configured
};

/// Executes the full pipeline and writes trajectory/spectrum CSVs, timing
/// and summary JSON (plus the PT-MPO cache when configured) into outdir.
RunSummary run_experiment(const ExperimentConfig& cfg,
                          const std::filesystem::path& outdir, int threads = 1);

/// Report of compare_runs, also serialized as JSON.
struct CompareReport {
    double compression_error{0};
    bool has_distance{false};
    double tensor_distance{0};
    bool cancellation_warning{false};
    double max_bond_ratio{0};
    double time_ratio{0};
};

CompareReport compare_runs(const std::filesystem::path& run_a,
                           const std::filesystem::path& run_b);

// CSV/JSON helpers shared with the CLI.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t);
Trajectory read_trajectory_csv(const std::filesystem::path& path);
void write_spectrum_csv(const std::filesystem::path& path, const RealVector& sv);

struct Preset {
    std::string name;
    std::string description;  // which figure cell of the study it mirrors
    std::vector<ExperimentConfig> runs;
    std::vector<std::string> labels;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

/// Runs every config of a preset into outdir/<label>/ and writes a
/// combined table (presets_summary.csv) with per-run timing, bond and
/// error-vs-series-reference columns.
void run_preset(const Preset& preset, const std::filesystem::path& outdir,
                int threads = 1);

}  // namespace ptc

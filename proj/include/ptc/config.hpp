// Experiment configuration: a versioned JSON schema with strict key
// checking, mapping one file to one reproducible run.

#pragma once

#include <optional>
#include <string>

#include "ptc/contraction.hpp"
#include "ptc/modes.hpp"

namespace ptc {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    std::string kind;  // "spin_boson" | "fermionic"
    // spin_boson
    int n_modes{64};
    double omega_max{7.0};
    Index mode_dim{4};
    double temperature{4.0};
    SpectralDensityQD spectral_density;
    // fermionic
    double omega_min{-32.0};
    bool initially_occupied{true};
};

struct GridConfig {
    double dt{0.1};
    double t_end{20.0};
    Index steps() const;  // round(t_end/dt), consistency-checked
};

struct PropagationConfig {
    double sx_coefficient{0.0};  // H_S = (c/2) sigma_x, 1/ps
    double sz_coefficient{0.0};
    std::string initial_state{"ground"};  // ground|excited|xplus|mixed
    bool half_step{true};
};

struct OutputConfig {
    std::string trajectory_csv{"trajectory.csv"};
    std::string spectrum_csv{"spectrum.csv"};
    std::string timing_json{"timing.json"};
    std::string summary_json{"summary.json"};
    std::string ptmpo_cache;  // empty: no cache written
    std::string reference_trajectory;  // optional: compression error target
};

struct ExperimentConfig {
    int schema_version{1};
    ModelConfig model;
    GridConfig grid;
    CompressionPolicy policy;
    ContractionPlan plan;
    PropagationConfig propagation;
    OutputConfig outputs;

    void validate() const;
    std::vector<EnvironmentMode> build_modes() const;
    Matrix system_hamiltonian() const;
    Matrix initial_state() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace ptc

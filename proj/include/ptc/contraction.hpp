// Contraction schedulers over a list of single-mode PT-MPOs: the original
// sequential scheme, sequential with preselection, and the tree-like
// scheme with layer-dependent thresholds, plus mode-ordering strategies.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ptc/process_tensor.hpp"

namespace ptc {

struct CompressionPolicy {
    double epsilon_max{1e-7};
    double range_factor{1.0};  // r = eps_max / eps_min
    int n_sweeps{1};
    bool preselect{false};

    double epsilon_min() const { return epsilon_max / range_factor; }
    void validate() const;
};

enum class Scheme { sequential, sequential_preselect, tree };
enum class Ordering {
    increasing_frequency,
    decreasing_frequency,
    increasing_coupling,
    random,
    as_given
};
enum class Trotter { first_order, symmetric_alternating };

struct ContractionPlan {
    Scheme scheme{Scheme::tree};
    Ordering ordering{Ordering::as_given};
    Trotter trotter{Trotter::symmetric_alternating};
    std::optional<std::uint64_t> seed;  // required for Ordering::random

    void validate() const;
};

struct CombinationRecord {
    int layer{0};
    int left{0};
    int right{0};
    Index pre_max_bond{0};
    Index post_max_bond{0};
    double seconds{0.0};
};

struct ContractionResult {
    ProcessTensor pt;
    std::vector<CombinationRecord> records;
    double seconds{0.0};
};

/// Stable sort (or seeded shuffle) of the modes by the chosen key.
std::vector<EnvironmentMode> order_modes(std::vector<EnvironmentMode> modes,
                                         Ordering ordering,
                                         std::optional<std::uint64_t> seed);

/// Threshold of tree layer j of L: ln eps sampled equidistantly over
/// [ln eps_min, ln eps_max], eps_1 = eps_min, eps_L = eps_max.
double layer_threshold(int layer, int total_layers,
                       const CompressionPolicy& policy);

ContractionResult contract_sequential(const std::vector<EnvironmentMode>& modes,
                                      Index n, const CompressionPolicy& policy,
                                      const ContractionPlan& plan);

ContractionResult contract_tree(const std::vector<EnvironmentMode>& modes,
                                Index n, const CompressionPolicy& policy,
                                const ContractionPlan& plan, int threads = 1);

/// Dispatch on plan.scheme.
ContractionResult contract(const std::vector<EnvironmentMode>& modes, Index n,
                           const CompressionPolicy& policy,
                           const ContractionPlan& plan, int threads = 1);

}  // namespace ptc

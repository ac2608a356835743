// Brute-force propagation of the full joint density matrix for small
// environments; the independent reference the PT-MPO pipeline is checked
// against.

#pragma once

#include <optional>
#include <vector>

#include "ptc/modes.hpp"
#include "ptc/propagation.hpp"

namespace ptc {

enum class Splitting { exact, trotter_matching };

/// Per-step factor ordering mirrored from the contraction schemes:
///   plain        - system map, then modes 1..N in order, every step
///   sandwich     - mode half-steps wrapped symmetrically around the
///                  previously included modes within each step
///   alternating  - modes 1..N at odd steps, N..1 at even steps
enum class TrotterPattern { plain, sandwich, alternating };

/// Joint Liouville dimension guard for the dense oracle.
inline constexpr Index kOracleGuard = 4096;

/// Propagate the full joint density matrix. splitting = exact uses
/// e^{-i H_tot dt} built from the modes' Hamiltonians (parity dressings
/// and Trotter ordering do not enter); trotter_matching applies exactly
/// the per-mode dressed propagator factors, orderings and system-map
/// placement of the PT-MPO pipeline, isolating compression error from
/// Trotter error.
Trajectory dense_oracle(const std::vector<EnvironmentMode>& modes,
                        const std::optional<Matrix>& h_sys, const Matrix& rho0,
                        Index n, double dt, Splitting splitting,
                        TrotterPattern pattern = TrotterPattern::plain,
                        bool half_system = true,
                        const std::vector<Observable>& obs = {
                            occupation_observable()});

}  // namespace ptc

// Propagation of a reduced density matrix through a finished PT-MPO with a
// (possibly time-dependent) system propagator, observables and error
// metrics.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptc/process_tensor.hpp"

namespace ptc {

/// Per-step free-system maps over the D^2 Liouville space. With
/// `half_step` set, e^{L_S dt/2} is applied before and after every
/// PT-MPO tensor (symmetric placement); otherwise the full-step map is
/// applied before the tensor.
struct SystemPropagator {
    Index sys_dim{2};
    double dt{0.1};
    bool half_step{true};
    std::vector<Matrix> full;  // n maps, e^{L_S dt}
    std::vector<Matrix> half;  // n maps, e^{L_S dt/2}; used when half_step

    /// Constant Hamiltonian h (units of 1/time, i.e. H/hbar) over n steps.
    static SystemPropagator constant(const Matrix& h, double dt, Index n,
                                     bool half_step = true);
    /// Per-step Hamiltonians h_l, l = 1..n.
    static SystemPropagator schedule(const std::vector<Matrix>& h, double dt,
                                     bool half_step = true);
};

struct Observable {
    std::string name;
    Matrix op;  // D x D
};

/// Occupation of the excited/occupied level |1>.
Observable occupation_observable(Index sys_dim = 2);

struct Trajectory {
    std::vector<double> times;                 // n+1 entries including t_0
    std::vector<Matrix> states;                // reduced density matrices
    std::map<std::string, std::vector<Complex>> observables;
    std::vector<double> trace_deviation;

    // Occupation-bound violations (value outside [-1e-6, 1 + 1e-6]) are
    // detected and flagged, never hidden.
    bool unstable{false};
    Index first_unstable_step{-1};
};

inline constexpr double kOccupationSlack = 1e-6;

/// Propagate rho0 through the PT-MPO, recording the reduced state and the
/// requested observables after every step. Throws on dimension mismatch;
/// a NaN appearing during propagation raises invalid_input naming the
/// step.
Trajectory propagate(const ProcessTensor& pt, const SystemPropagator& sys,
                     const Matrix& rho0, const std::vector<Observable>& obs);

/// max_l |n^traj(t_l) - n^ref(t_l)| over the shared grid for the named
/// observable (real parts).
double compression_error(const Trajectory& traj, const Trajectory& reference,
                         const std::string& name = "occupation");

}  // namespace ptc

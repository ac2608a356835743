// Physical model generators: each environment mode is described by its
// single-step propagator over the joint (system x mode) Liouville space,
// its initial state, and optional half-step / parity data.

#pragma once

#include <optional>
#include <vector>

#include "ptc/linalg.hpp"

namespace ptc {

// hbar/k_B in K*ps, from CODATA hbar = 1.054571817e-34 J s and
// k_B = 1.380649e-23 J/K.
inline constexpr double kHbarOverKb = 7.6382;

struct EnvironmentMode {
    std::optional<double> omega;     // mode frequency/energy (1/ps or dimensionless)
    std::optional<double> coupling;  // g_k, same units as omega
    Index sys_dim{2};
    Index mode_dim{2};
    Matrix propagator;       // (D*M)^2 x (D*M)^2 joint Liouville, full step
    std::optional<Matrix> half_propagator;  // same space, half step
    Matrix initial_state;    // M x M density matrix
    std::optional<Matrix> parity;       // (D*M) x (D*M) local parity (fermionic)
    std::optional<Matrix> hamiltonian;  // (D*M) x (D*M) joint H/hbar, undressed

    Index joint_hilbert_dim() const { return sys_dim * mode_dim; }
    Index joint_liouville_dim() const {
        return joint_hilbert_dim() * joint_hilbert_dim();
    }
    void validate() const;
};

/// Super-Ohmic spectral density of a GaAs quantum dot coupled to
/// longitudinal acoustic phonons, J(w) = w^3 (c_e e^{-w^2/w_e^2} -
/// c_h e^{-w^2/w_h^2})^2. Defaults are for a 4 nm dot.
struct SpectralDensityQD {
    double c_e{0.1271};    // 1/ps
    double c_h{-0.0635};   // 1/ps
    double omega_e{2.555};  // 1/ps
    double omega_h{2.938};  // 1/ps
};

double spectral_density(const SpectralDensityQD& sd, double omega);

/// Bosonic bath discretized on the half-offset grid
/// w_k = (k - 1/2) w_max / N, with g_k = sqrt(J(w_k) w_max / N).
/// Each mode Hamiltonian carries the g^2/w counter-term that cancels the
/// polaron shift; the initial state is thermal at `temperature` (K).
std::vector<EnvironmentMode> discretize_bosonic(
    const SpectralDensityQD& sd, double omega_max, int n_modes, Index mode_dim,
    double temperature, double dt, const Matrix& sys_coupling_op);

/// Fermionic resonant-level bath on the uniform half-offset grid over
/// [omega_min, omega_max] with g_k = sqrt((omega_max - omega_min)/(2 pi N)),
/// i.e. a Markov-limit hopping rate of 1. Modes are two-level; propagators
/// carry the local parity dressing on both propagation directions, so the
/// contraction must use the alternating (symmetric) Trotter order.
std::vector<EnvironmentMode> fermionic_modes(double omega_min, double omega_max,
                                             int n_modes, double dt,
                                             bool initially_occupied);

// Small-operator helpers shared by the model builders and tests.
Matrix boson_annihilation(Index dim);
Matrix boson_number(Index dim);
Matrix thermal_state(double omega, double temperature, Index dim);
Matrix pauli_x();
Matrix pauli_z();
Matrix projector(Index dim, Index i);

}  // namespace ptc

#include "ptc/modes.hpp"

#include <cmath>

namespace ptc {

void EnvironmentMode::validate() const {
    const Index nl = joint_liouville_dim();
    if (propagator.rows() != nl || propagator.cols() != nl)
        throw invalid_input("EnvironmentMode: propagator dimension mismatch");
    if (half_propagator &&
        (half_propagator->rows() != nl || half_propagator->cols() != nl))
        throw invalid_input("EnvironmentMode: half propagator dimension mismatch");
    if (initial_state.rows() != mode_dim || initial_state.cols() != mode_dim)
        throw invalid_input("EnvironmentMode: initial state dimension mismatch");
    if (!all_finite(propagator) || !all_finite(initial_state))
        throw invalid_input("EnvironmentMode: non-finite entries");
    if (std::abs(initial_state.trace().real() - 1.0) > 1e-12 ||
        std::abs(initial_state.trace().imag()) > 1e-12)
        throw invalid_input("EnvironmentMode: initial state trace != 1");
    if ((initial_state - initial_state.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw invalid_input("EnvironmentMode: initial state not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(initial_state);
    if (es.eigenvalues().minCoeff() < -1e-12)
        throw invalid_input("EnvironmentMode: initial state not positive");
}

double spectral_density(const SpectralDensityQD& sd, double omega) {
    if (omega < 0) throw invalid_input("spectral_density: omega < 0");
    const double a = sd.c_e * std::exp(-omega * omega / (sd.omega_e * sd.omega_e));
    const double b = sd.c_h * std::exp(-omega * omega / (sd.omega_h * sd.omega_h));
    const double diff = a - b;
    return omega * omega * omega * diff * diff;
}

Matrix boson_annihilation(Index dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

Matrix boson_number(Index dim) {
    Matrix n = Matrix::Zero(dim, dim);
    for (Index k = 0; k < dim; ++k) n(k, k) = double(k);
    return n;
}

Matrix thermal_state(double omega, double temperature, Index dim) {
    Matrix rho = Matrix::Zero(dim, dim);
    if (temperature <= 0.0) {
        rho(0, 0) = 1.0;
        return rho;
    }
    const double x = kHbarOverKb * omega / temperature;  // hbar w / kB T
    double z = 0.0;
    for (Index m = 0; m < dim; ++m) z += std::exp(-x * double(m));
    for (Index m = 0; m < dim; ++m) rho(m, m) = std::exp(-x * double(m)) / z;
    return rho;
}

Matrix pauli_x() {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

Matrix pauli_z() {
    Matrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

Matrix projector(Index dim, Index i) {
    Matrix p = Matrix::Zero(dim, dim);
    p(i, i) = 1.0;
    return p;
}

std::vector<EnvironmentMode> discretize_bosonic(
    const SpectralDensityQD& sd, double omega_max, int n_modes, Index mode_dim,
    double temperature, double dt, const Matrix& sys_coupling_op) {
    if (mode_dim < 2) throw invalid_input("discretize_bosonic: mode_dim < 2");
    if (omega_max <= 0) throw invalid_input("discretize_bosonic: omega_max <= 0");
    if (n_modes < 1) throw invalid_input("discretize_bosonic: n_modes < 1");
    if (temperature < 0) throw invalid_input("discretize_bosonic: temperature < 0");

    const Index d = sys_coupling_op.rows();
    const Matrix id_sys = Matrix::Identity(d, d);
    const Matrix id_mode = Matrix::Identity(mode_dim, mode_dim);
    const Matrix a = boson_annihilation(mode_dim);
    const Matrix x = a + a.adjoint();
    const Matrix num = boson_number(mode_dim);

    std::vector<EnvironmentMode> modes;
    modes.reserve(n_modes);
    for (int k = 1; k <= n_modes; ++k) {
        const double wk = (k - 0.5) * omega_max / n_modes;
        const double gk = std::sqrt(spectral_density(sd, wk) * omega_max / n_modes);

        Matrix h = wk * kron(id_sys, num) + gk * kron(sys_coupling_op, x) +
                   (gk * gk / wk) * kron(sys_coupling_op, id_mode);

        EnvironmentMode m;
        m.omega = wk;
        m.coupling = gk;
        m.sys_dim = d;
        m.mode_dim = mode_dim;
        m.hamiltonian = h;
        const Matrix liou = commutator_liouvillian(h);
        m.propagator = matrix_exponential(liou, dt);
        m.half_propagator = matrix_exponential(liou, dt / 2.0);
        m.initial_state = thermal_state(wk, temperature, mode_dim);
        m.validate();
        modes.push_back(std::move(m));
    }
    return modes;
}

std::vector<EnvironmentMode> fermionic_modes(double omega_min, double omega_max,
                                             int n_modes, double dt,
                                             bool initially_occupied) {
    if (n_modes < 1) throw invalid_input("fermionic_modes: n_modes < 1");
    if (omega_max <= omega_min)
        throw invalid_input("fermionic_modes: empty energy range");

    const double band = omega_max - omega_min;
    const double g = std::sqrt(band / (2.0 * M_PI * n_modes));

    // Two-level system site (index 0) and two-level mode; basis (n0, nk).
    const Matrix id2 = Matrix::Identity(2, 2);
    Matrix sp(2, 2), sm(2, 2);
    sp.setZero();
    sm.setZero();
    sp(1, 0) = 1.0;  // |1><0|
    sm(0, 1) = 1.0;  // |0><1|
    const Matrix n_op = sp * sm;

    // Local parity: -1 when system and mode are both occupied.
    Matrix parity = Matrix::Identity(4, 4);
    parity(3, 3) = -1.0;

    std::vector<EnvironmentMode> modes;
    modes.reserve(n_modes);
    for (int k = 1; k <= n_modes; ++k) {
        const double wk = omega_min + (k - 0.5) * band / n_modes;

        Matrix h = wk * kron(id2, n_op) +
                   g * (kron(sm, sp) + kron(sp, sm));  // hop system <-> mode

        EnvironmentMode m;
        m.omega = wk;
        m.coupling = g;
        m.sys_dim = 2;
        m.mode_dim = 2;
        m.hamiltonian = h;
        m.parity = parity;
        // Forward factor P e^{-iH dt}; the backward factor is its adjoint,
        // e^{+iH dt} P, so the dressed Liouville propagator stays a
        // conjugation map.
        const Matrix u = matrix_exponential(Complex(0, -1) * h, dt);
        m.propagator = superop_conjugation(parity * u);
        m.initial_state = Matrix::Zero(2, 2);
        m.initial_state(initially_occupied ? 1 : 0, initially_occupied ? 1 : 0) = 1.0;
        m.validate();
        modes.push_back(std::move(m));
    }
    return modes;
}

}  // namespace ptc

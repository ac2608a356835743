#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ptc/contraction.hpp"
#include "ptc/modes.hpp"
#include "ptc/oracle.hpp"
#include "ptc/propagation.hpp"
#include "support/fermionic_fock.hpp"

using namespace ptc;

TEST_CASE("spectral density closed form") {
    const SpectralDensityQD sd;
    CHECK(spectral_density(sd, 0.0) == 0.0);
    // value pinned from an independent high-precision evaluation
    CHECK(spectral_density(sd, 2.0) ==
          doctest::Approx(0.094736382390514182).epsilon(1e-12));
    for (int i = 0; i <= 1000; ++i) {
        const double w = 7.0 * i / 1000.0;
        CHECK(spectral_density(sd, w) >= 0.0);
    }
    CHECK_THROWS_AS(spectral_density(sd, -0.1), invalid_input);
}

TEST_CASE("bosonic grid frequencies and couplings") {
    const SpectralDensityQD sd;
    const auto modes = discretize_bosonic(sd, 7.0, 64, 4, 4.0, 0.1, projector(2, 1));
    REQUIRE(modes.size() == 64);
    CHECK(*modes[0].omega == doctest::Approx(0.0546875).epsilon(1e-15));
    for (const auto& m : modes) {
        CHECK(m.mode_dim == 4);
        const double j = spectral_density(sd, *m.omega);
        CHECK(*m.coupling == doctest::Approx(std::sqrt(j * 7.0 / 64.0)));
    }
}

TEST_CASE("thermal initial state") {
    const SpectralDensityQD sd;
    SUBCASE("zero temperature is the ground-state projector") {
        const auto modes = discretize_bosonic(sd, 7.0, 4, 3, 0.0, 0.1, projector(2, 1));
        for (const auto& m : modes) {
            CHECK(m.initial_state(0, 0).real() == doctest::Approx(1.0));
            CHECK(std::abs(m.initial_state(1, 1)) < 1e-15);
        }
    }
    SUBCASE("populations follow the Boltzmann ratio at T = 4 K") {
        const auto modes = discretize_bosonic(sd, 7.0, 8, 4, 4.0, 0.1, projector(2, 1));
        for (const auto& m : modes) {
            const double expected = std::exp(-kHbarOverKb * (*m.omega) / 4.0);
            for (int level = 0; level + 1 < 4; ++level) {
                const double ratio = m.initial_state(level + 1, level + 1).real() /
                                     m.initial_state(level, level).real();
                CHECK(ratio == doctest::Approx(expected).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("bosonic propagators are trace preserving and completely positive") {
    const SpectralDensityQD sd;
    const auto modes = discretize_bosonic(sd, 7.0, 3, 4, 4.0, 0.1, projector(2, 1));
    for (const auto& m : modes) {
        const Index joint = m.joint_hilbert_dim();
        const RowVector tr = trace_covector(joint);
        CHECK((tr * m.propagator - tr).cwiseAbs().maxCoeff() < 1e-10);
        // Choi matrix of the joint map must be positive semidefinite
        const Index nl = joint * joint;
        Matrix choi = Matrix::Zero(nl, nl);
        for (Index i = 0; i < joint; ++i)
            for (Index j = 0; j < joint; ++j)
                for (Index k = 0; k < joint; ++k)
                    for (Index l = 0; l < joint; ++l)
                        choi(i * joint + k, j * joint + l) =
                            m.propagator(i * joint + j, k * joint + l);
        Eigen::SelfAdjointEigenSolver<Matrix> es(choi);
        CHECK(es.eigenvalues().minCoeff() > -1e-8 * es.eigenvalues().maxCoeff());
    }
}

TEST_CASE("fermionic grid and parity") {
    const auto modes = fermionic_modes(-32.0, 32.0, 128, 0.1, true);
    REQUIRE(modes.size() == 128);
    CHECK(*modes[0].coupling ==
          doctest::Approx(std::sqrt(64.0 / (2.0 * M_PI * 128.0))).epsilon(1e-15));
    CHECK(*modes[0].omega == doctest::Approx(-32.0 + 0.5 * 64.0 / 128.0));
    CHECK(*modes[127].omega == doctest::Approx(32.0 - 0.5 * 64.0 / 128.0));
    // local parity on the (system x mode) occupation basis {00,01,10,11}
    const Matrix p = *modes[0].parity;
    CHECK(p(0, 0) == Complex(1, 0));
    CHECK(p(1, 1) == Complex(1, 0));
    CHECK(p(2, 2) == Complex(1, 0));
    CHECK(p(3, 3) == Complex(-1, 0));
    for (const auto& m : modes) {
        CHECK(m.initial_state(1, 1).real() == doctest::Approx(1.0));
        const RowVector tr = trace_covector(m.joint_hilbert_dim());
        CHECK((tr * m.propagator - tr).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("dense oracle with zero couplings reproduces free system evolution") {
    SpectralDensityQD sd;
    sd.c_e = 0.0;
    sd.c_h = 0.0;  // J = 0: all couplings vanish
    const auto modes = discretize_bosonic(sd, 7.0, 2, 2, 4.0, 0.05, projector(2, 1));
    const Matrix h_sys = 0.5 * pauli_x();  // Rabi frequency 1
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const Index n = 40;
    const double dt = 0.05;
    const Trajectory traj = dense_oracle(modes, h_sys, rho0, n, dt,
                                         Splitting::exact);
    for (Index l = 0; l <= n; ++l) {
        const double t = l * dt;
        const double expected = std::sin(0.5 * t) * std::sin(0.5 * t);
        CHECK(traj.observables.at("occupation")[l].real() ==
              doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("Trotter error order: exact vs matching splitting") {
    const SpectralDensityQD sd;
    const Matrix h_sys = 0.5 * pauli_x();
    // superposition initial state, so the coupling acts at t = 0 and the
    // leading splitting error term does not vanish by accident
    Matrix rho0(2, 2);
    rho0 << 0.5, 0.5, 0.5, 0.5;
    const double t_end = 2.0;

    auto max_diff = [&](double dt, TrotterPattern pattern, bool half_system) {
        const Index n = static_cast<Index>(std::round(t_end / dt));
        const auto modes = discretize_bosonic(sd, 7.0, 2, 3, 4.0, dt, projector(2, 1));
        const Trajectory exact =
            dense_oracle(modes, h_sys, rho0, n, dt, Splitting::exact);
        const Trajectory split = dense_oracle(modes, h_sys, rho0, n, dt,
                                              Splitting::trotter_matching,
                                              pattern, half_system);
        return compression_error(split, exact);
    };

    SUBCASE("first order halves with dt") {
        const double e1 = max_diff(0.1, TrotterPattern::plain, false);
        const double e2 = max_diff(0.05, TrotterPattern::plain, false);
        CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.35));
    }
    SUBCASE("symmetric placement quarters with dt") {
        const double e1 = max_diff(0.1, TrotterPattern::plain, true);
        const double e2 = max_diff(0.05, TrotterPattern::plain, true);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.35));
    }
}

TEST_CASE("counter-term cancels the polaron shift") {
    // single mode, initially |+>: the coherence phase drift measures the
    // excited-state energy shift; with the counter-term it must be far
    // smaller than without
    const double w = 1.0, g = 0.2, dt = 0.05;
    const Index n = 400;  // t = 20
    const Index md = 6;
    const Matrix a = boson_annihilation(md);
    const Matrix x = a + a.adjoint();
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix idm = Matrix::Identity(md, md);
    const Matrix pe = projector(2, 1);

    auto phase_drift = [&](bool counter_term) {
        EnvironmentMode m;
        m.sys_dim = 2;
        m.mode_dim = md;
        m.omega = w;
        m.coupling = g;
        Matrix h = w * kron(id2, boson_number(md)) + g * kron(pe, x);
        if (counter_term) h += (g * g / w) * kron(pe, idm);
        m.hamiltonian = h;
        m.propagator = matrix_exponential(commutator_liouvillian(h), dt);
        m.initial_state = thermal_state(w, 0.0, md);

        Matrix rho0(2, 2);
        rho0 << 0.5, 0.5, 0.5, 0.5;
        const Trajectory traj = dense_oracle({m}, std::nullopt, rho0, n, dt,
                                             Splitting::exact);
        // accumulated phase of <e|rho|g> over the run, unwrapped
        double acc = 0.0;
        Complex prev = traj.states[0](1, 0);
        for (size_t i = 1; i < traj.states.size(); ++i) {
            const Complex cur = traj.states[i](1, 0);
            acc += std::arg(cur / prev);
            prev = cur;
        }
        return acc / (n * dt);  // mean frequency of the coherence
    };

    const double with_ct = std::abs(phase_drift(true));
    const double without_ct = std::abs(phase_drift(false));
    // the bare shift is g^2/w = 0.04 rad/ps
    CHECK(without_ct > 0.5 * g * g / w);
    CHECK(with_ct < 0.15 * without_ct);
}

TEST_CASE("naive spin model differs from the true fermionic dynamics") {
    // For the bare resonant-level model the Jordan-Wigner strings can be
    // gauged out of the reduced dynamics (particle-number conservation),
    // so naive and fermionic evolutions coincide there. A system drive
    // breaks number conservation and exposes the anticommutation.
    const double g = 0.4, dt = 0.1;
    const Index n = 30;
    const std::vector<double> omegas{0.3, -0.4};
    const Matrix h_drive = 0.5 * pauli_x();

    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 1.0;  // empty site

    // true fermionic dynamics with the same alternating Trotter split
    const auto fock = testing::fermionic_fock_model(omegas, g);
    const auto occ_true =
        testing::fock_occupation_trajectory(fock, rho0, true, n, dt);
    const auto occ_true_driven =
        testing::fock_exact_occupation(fock, h_drive, rho0, true, n, dt);

    // naive spin model: same Hamiltonians without parity strings
    std::vector<EnvironmentMode> naive;
    for (double w : omegas) {
        const Matrix id2 = Matrix::Identity(2, 2);
        Matrix sp(2, 2), sm(2, 2);
        sp.setZero();
        sp(1, 0) = 1.0;
        sm.setZero();
        sm(0, 1) = 1.0;
        EnvironmentMode m;
        m.sys_dim = 2;
        m.mode_dim = 2;
        m.omega = w;
        m.coupling = g;
        Matrix h = w * kron(id2, sp * sm) + g * (kron(sm, sp) + kron(sp, sm));
        m.hamiltonian = h;
        m.propagator = superop_conjugation(matrix_exponential(Complex(0, -1) * h, dt));
        m.initial_state = Matrix::Zero(2, 2);
        m.initial_state(1, 1) = 1.0;
        naive.push_back(std::move(m));
    }
    const Trajectory naive_traj =
        dense_oracle(naive, std::nullopt, rho0, n, dt, Splitting::trotter_matching,
                     TrotterPattern::alternating);
    const Trajectory naive_driven =
        dense_oracle(naive, h_drive, rho0, n, dt, Splitting::exact);

    // parity-dressed modes reproduce the true fermionic dynamics exactly
    std::vector<EnvironmentMode> dressed = naive;
    Matrix parity = Matrix::Identity(4, 4);
    parity(3, 3) = -1.0;
    for (auto& m : dressed) {
        m.parity = parity;
        m.propagator = superop_conjugation(
            parity * matrix_exponential(Complex(0, -1) * (*m.hamiltonian), dt));
    }
    const Trajectory dressed_traj =
        dense_oracle(dressed, std::nullopt, rho0, n, dt,
                     Splitting::trotter_matching, TrotterPattern::alternating);

    double undriven_gap = 0.0, driven_gap = 0.0, dressed_vs_true = 0.0;
    for (Index l = 0; l <= n; ++l) {
        undriven_gap =
            std::max(undriven_gap,
                     std::abs(naive_traj.observables.at("occupation")[l].real() -
                              occ_true[l]));
        driven_gap =
            std::max(driven_gap,
                     std::abs(naive_driven.observables.at("occupation")[l].real() -
                              occ_true_driven[l]));
        dressed_vs_true =
            std::max(dressed_vs_true,
                     std::abs(dressed_traj.observables.at("occupation")[l].real() -
                              occ_true[l]));
    }
    CHECK(dressed_vs_true < 1e-10);  // parity dressing is exact here
    CHECK(undriven_gap < 1e-10);     // number conservation hides the strings
    CHECK(driven_gap > 1e-2);        // a drive exposes the anticommutation
}

TEST_CASE("oracle guard rejects oversized environments") {
    const SpectralDensityQD sd;
    const auto modes = discretize_bosonic(sd, 7.0, 4, 4, 4.0, 0.1, projector(2, 1));
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    CHECK_THROWS_AS(
        dense_oracle(modes, std::nullopt, rho0, 2, 0.1, Splitting::exact),
        invalid_input);
}

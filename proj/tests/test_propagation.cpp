#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ptc/contraction.hpp"
#include "ptc/oracle.hpp"
#include "ptc/propagation.hpp"

using namespace ptc;

namespace {

Matrix ground_state() {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    return rho;
}

}  // namespace

TEST_CASE("identity PT-MPO with a trivial system is stationary") {
    const ProcessTensor id = ProcessTensor::identity(2, 20);
    const SystemPropagator sys =
        SystemPropagator::constant(Matrix::Zero(2, 2), 0.1, 20, true);
    Matrix rho0(2, 2);
    rho0 << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
    const Trajectory traj = propagate(id, sys, rho0, {occupation_observable()});
    for (const Matrix& s : traj.states) CHECK((s - rho0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Rabi oscillation through an identity PT-MPO") {
    const double dt = 0.01;
    const Index n = 500;
    const ProcessTensor id = ProcessTensor::identity(2, n);
    const SystemPropagator sys =
        SystemPropagator::constant(0.5 * pauli_x(), dt, n, true);
    const Trajectory traj =
        propagate(id, sys, ground_state(), {occupation_observable()});
    for (Index l = 0; l <= n; ++l) {
        const double t = traj.times[l];
        const double expected = std::sin(0.5 * t) * std::sin(0.5 * t);
        CHECK(std::abs(traj.observables.at("occupation")[l].real() - expected) <
              1e-4);
    }
}

TEST_CASE("two-mode PT-MPO matches the oracle sample by sample") {
    const SpectralDensityQD sd;
    const auto modes = discretize_bosonic(sd, 7.0, 2, 2, 4.0, 0.1, projector(2, 1));
    const Index n = 20;
    CompressionPolicy pol;
    pol.epsilon_max = 1e-14;
    ContractionPlan pl;
    pl.scheme = Scheme::sequential;
    const auto res = contract_sequential(modes, n, pol, pl);
    const SystemPropagator sys =
        SystemPropagator::constant(0.5 * pauli_x(), 0.1, n, true);
    const Trajectory traj =
        propagate(res.pt, sys, ground_state(), {occupation_observable()});
    const Trajectory ref =
        dense_oracle(modes, 0.5 * pauli_x(), ground_state(), n, 0.1,
                     Splitting::trotter_matching, TrotterPattern::sandwich, true);
    CHECK(compression_error(traj, ref) < 1e-9);

    SUBCASE("trace is preserved along the trajectory") {
        for (double dev : traj.trace_deviation) CHECK(dev < 1e-6);
    }
    SUBCASE("states stay Hermitian") {
        for (const Matrix& s : traj.states)
            CHECK((s - s.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("propagation is linear in the initial state") {
    const SpectralDensityQD sd;
    const auto modes = discretize_bosonic(sd, 7.0, 2, 2, 4.0, 0.1, projector(2, 1));
    const Index n = 8;
    CompressionPolicy pol;
    pol.epsilon_max = 1e-12;
    ContractionPlan pl;
    pl.scheme = Scheme::tree;
    const auto res = contract(modes, n, pol, pl);
    const SystemPropagator sys =
        SystemPropagator::constant(0.5 * pauli_x(), 0.1, n, true);

    Matrix r1(2, 2), r2(2, 2);
    r1 << 0.8, Complex(0.05, 0.1), Complex(0.05, -0.1), 0.2;
    r2 << 0.3, Complex(-0.2, 0.05), Complex(-0.2, -0.05), 0.7;
    const double alpha = 0.4, beta = 0.6;

    const Trajectory ta = propagate(res.pt, sys, r1, {occupation_observable()});
    const Trajectory tb = propagate(res.pt, sys, r2, {occupation_observable()});
    const Trajectory tc =
        propagate(res.pt, sys, alpha * r1 + beta * r2, {occupation_observable()});
    for (Index l = 0; l <= n; ++l) {
        const Matrix expect = alpha * ta.states[l] + beta * tb.states[l];
        CHECK((tc.states[l] - expect).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("symmetric system split converges one order faster") {
    // Rabi drive plus a single strongly coupled mode: compare the max
    // occupation error against the exact joint evolution as dt halves.
    const SpectralDensityQD sd;
    auto err = [&](double dt, bool half) {
        const Index n = static_cast<Index>(std::round(4.0 / dt));
        const auto modes =
            discretize_bosonic(sd, 7.0, 1, 4, 4.0, dt, projector(2, 1));
        CompressionPolicy pol;
        pol.epsilon_max = 1e-13;
        ContractionPlan pl;
        pl.scheme = Scheme::sequential;
        pl.trotter = half ? Trotter::symmetric_alternating : Trotter::first_order;
        const auto res = contract_sequential(modes, n, pol, pl);
        const SystemPropagator sys =
            SystemPropagator::constant(0.5 * pauli_x(), dt, n, half);
        Matrix rho0(2, 2);
        rho0 << 0.5, 0.5, 0.5, 0.5;
        const Trajectory traj =
            propagate(res.pt, sys, rho0, {occupation_observable()});
        const Trajectory exact = dense_oracle(modes, 0.5 * pauli_x(), rho0, n, dt,
                                              Splitting::exact);
        return compression_error(traj, exact);
    };
    const double asym = err(0.1, false) / err(0.05, false);
    const double sym = err(0.1, true) / err(0.05, true);
    CHECK(asym == doctest::Approx(2.0).epsilon(0.4));
    CHECK(sym == doctest::Approx(4.0).epsilon(0.4));
}

TEST_CASE("compression error metric") {
    Trajectory a, b;
    for (int l = 0; l <= 5; ++l) {
        a.times.push_back(0.1 * l);
        b.times.push_back(0.1 * l);
        a.observables["occupation"].push_back(Complex(0.5, 0));
        b.observables["occupation"].push_back(Complex(0.5, 0));
    }
    CHECK(compression_error(a, a) == 0.0);
    for (auto& v : b.observables["occupation"]) v += 1e-3;
    CHECK(compression_error(a, b) == doctest::Approx(1e-3));
    b.times.push_back(0.6);
    CHECK_THROWS_AS(compression_error(a, b), invalid_input);
}

TEST_CASE("occupation bound violations are flagged") {
    // a synthetic non-physical channel scales the state upward every step
    ProcessTensor pt = ProcessTensor::identity(2, 5);
    for (auto& site : pt.sites)
        for (auto& blk : site.blocks) blk *= 1.3;
    const SystemPropagator sys =
        SystemPropagator::constant(Matrix::Zero(2, 2), 0.1, 5, true);
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(1, 1) = 1.0;
    const Trajectory traj = propagate(pt, sys, rho0, {occupation_observable()});
    CHECK(traj.unstable);
    CHECK(traj.first_unstable_step >= 1);
}

TEST_CASE("dimension mismatches are rejected") {
    const ProcessTensor id = ProcessTensor::identity(2, 5);
    const SystemPropagator sys =
        SystemPropagator::constant(Matrix::Zero(2, 2), 0.1, 3, true);
    CHECK_THROWS_AS(
        propagate(id, sys, ground_state(), {occupation_observable()}),
        invalid_input);
    const SystemPropagator sys3 =
        SystemPropagator::constant(Matrix::Zero(3, 3), 0.1, 5, true);
    CHECK_THROWS_AS(
        propagate(id, sys3, Matrix::Identity(3, 3) / 3.0, {occupation_observable()}),
        invalid_input);
}

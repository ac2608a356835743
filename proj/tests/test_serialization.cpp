#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "ptc/contraction.hpp"
#include "ptc/propagation.hpp"
#include "ptc/serialization.hpp"

using namespace ptc;

TEST_CASE("PT-MPO cache round trip preserves tensors, closures and physics") {
    const SpectralDensityQD sd;
    const auto modes = discretize_bosonic(sd, 7.0, 3, 2, 4.0, 0.1, projector(2, 1));
    CompressionPolicy pol;
    pol.epsilon_max = 1e-9;
    ContractionPlan pl;
    pl.scheme = Scheme::tree;
    const auto res = contract(modes, 10, pol, pl);

    const std::string path = "/tmp/ptc_roundtrip.bin";
    save_ptmpo(path, res.pt);
    const ProcessTensor loaded = load_ptmpo(path);

    CHECK(loaded.steps() == res.pt.steps());
    CHECK(loaded.sys_dim == res.pt.sys_dim);
    for (Index l = 0; l <= 10; ++l) CHECK(loaded.bond(l) == res.pt.bond(l));
    CHECK(std::abs(tensor_distance(loaded, res.pt)) < 1e-14);

    const SystemPropagator sys =
        SystemPropagator::constant(0.5 * pauli_x(), 0.1, 10, true);
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const Trajectory a = propagate(res.pt, sys, rho0, {occupation_observable()});
    const Trajectory b = propagate(loaded, sys, rho0, {occupation_observable()});
    for (Index l = 0; l <= 10; ++l)
        CHECK(a.observables.at("occupation")[l] ==
              b.observables.at("occupation")[l]);
    std::remove(path.c_str());
}

TEST_CASE("corrupt or missing files are rejected") {
    CHECK_THROWS(load_ptmpo("/tmp/ptc_does_not_exist.bin"));
    const std::string path = "/tmp/ptc_badmagic.bin";
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOTAPTMPO";
    }
    CHECK_THROWS(load_ptmpo(path));
    std::remove(path.c_str());
}

#include "ptc/propagation.hpp"

#include <cmath>

namespace ptc {

SystemPropagator SystemPropagator::constant(const Matrix& h, double dt, Index n,
                                            bool half_step) {
    SystemPropagator sp;
    sp.sys_dim = h.rows();
    sp.dt = dt;
    sp.half_step = half_step;
    const Matrix liou = commutator_liouvillian(h);
    sp.full.assign(n, matrix_exponential(liou, dt));
    sp.half.assign(n, matrix_exponential(liou, dt / 2.0));
    return sp;
}

SystemPropagator SystemPropagator::schedule(const std::vector<Matrix>& h,
                                            double dt, bool half_step) {
    SystemPropagator sp;
    if (h.empty()) throw invalid_input("SystemPropagator: empty schedule");
    sp.sys_dim = h.front().rows();
    sp.dt = dt;
    sp.half_step = half_step;
    sp.full.reserve(h.size());
    sp.half.reserve(h.size());
    for (const Matrix& hl : h) {
        const Matrix liou = commutator_liouvillian(hl);
        sp.full.push_back(matrix_exponential(liou, dt));
        sp.half.push_back(matrix_exponential(liou, dt / 2.0));
    }
    return sp;
}

Observable occupation_observable(Index sys_dim) {
    return {"occupation", projector(sys_dim, 1)};
}

namespace {

void record_state(Trajectory& traj, const Matrix& rho,
                  const std::vector<Observable>& obs, Index step) {
    traj.states.push_back(rho);
    traj.trace_deviation.push_back(std::abs(rho.trace() - Complex(1, 0)));
    for (const Observable& o : obs) {
        const Complex value = (o.op * rho).trace();
        traj.observables[o.name].push_back(value);
        if (o.name == "occupation" && !traj.unstable) {
            const double x = value.real();
            if (x < -kOccupationSlack || x > 1.0 + kOccupationSlack) {
                traj.unstable = true;
                traj.first_unstable_step = step;
            }
        }
    }
}

}  // namespace

Trajectory propagate(const ProcessTensor& pt, const SystemPropagator& sys,
                     const Matrix& rho0, const std::vector<Observable>& obs) {
    const Index d = pt.sys_dim;
    const Index liou = d * d;
    const Index n = pt.steps();
    if (sys.sys_dim != d) throw invalid_input("propagate: system dimension mismatch");
    if (static_cast<Index>(sys.full.size()) < n)
        throw invalid_input("propagate: system propagator has too few steps");
    if (rho0.rows() != d || rho0.cols() != d)
        throw invalid_input("propagate: rho0 dimension mismatch");

    Trajectory traj;
    traj.times.reserve(n + 1);
    traj.times.push_back(0.0);
    record_state(traj, rho0, obs, 0);

    // Carried vector over (alpha, bond), stored as a liou x chi matrix.
    Matrix w = Matrix::Zero(liou, 1);
    w.col(0) = vectorize(rho0);

    for (Index l = 1; l <= n; ++l) {
        const Matrix& m = sys.half_step ? sys.half[l - 1] : sys.full[l - 1];
        w = m * w;

        const SiteTensor& t = pt.sites[l - 1];
        Matrix next = Matrix::Zero(liou, t.bond_out);
        for (Index a = 0; a < liou; ++a)
            for (Index b = 0; b < liou; ++b)
                next.row(a) += (t.block(a, b) * w.row(b).transpose()).transpose();
        w = std::move(next);
        if (sys.half_step) w = sys.half[l - 1] * w;

        if (!w.array().isFinite().all())
            throw invalid_input("propagate: non-finite amplitude at step " +
                                std::to_string(l));

        const Vector rho_vec = w * pt.closures[l].transpose();
        traj.times.push_back(double(l) * sys.dt);
        record_state(traj, unvectorize(rho_vec, d), obs, l);
    }
    return traj;
}

double compression_error(const Trajectory& traj, const Trajectory& reference,
                         const std::string& name) {
    if (traj.times.size() != reference.times.size())
        throw invalid_input("compression_error: time grid mismatch");
    for (size_t i = 0; i < traj.times.size(); ++i)
        if (std::abs(traj.times[i] - reference.times[i]) > 1e-12)
            throw invalid_input("compression_error: time grid mismatch");
    const auto& a = traj.observables.at(name);
    const auto& b = reference.observables.at(name);
    double err = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        err = std::max(err, std::abs(a[i].real() - b[i].real()));
    return err;
}

}  // namespace ptc

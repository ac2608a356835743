#include "ptc/oracle.hpp"

#include <cmath>

namespace ptc {

namespace {

struct JointSpace {
    Index sys_dim;
    std::vector<Index> mode_dims;
    Index hilbert;                 // D * prod M_k
    std::vector<Index> strides;    // stride of mode k in the joint index
    Index sys_stride;

    explicit JointSpace(const std::vector<EnvironmentMode>& modes) {
        sys_dim = modes.front().sys_dim;
        hilbert = 1;
        for (const auto& m : modes) {
            mode_dims.push_back(m.mode_dim);
            hilbert *= m.mode_dim;
        }
        sys_stride = hilbert;
        hilbert *= sys_dim;
        strides.resize(mode_dims.size());
        Index s = 1;
        for (Index k = static_cast<Index>(mode_dims.size()) - 1; k >= 0; --k) {
            strides[k] = s;
            s *= mode_dims[k];
        }
    }

    // Joint indices with mode k and the system removed.
    std::vector<Index> rest_offsets(Index k) const {
        std::vector<Index> offs{0};
        for (Index j = 0; j < static_cast<Index>(mode_dims.size()); ++j) {
            if (j == k) continue;
            std::vector<Index> grown;
            grown.reserve(offs.size() * mode_dims[j]);
            for (Index base : offs)
                for (Index m = 0; m < mode_dims[j]; ++m)
                    grown.push_back(base + m * strides[j]);
            offs = std::move(grown);
        }
        return offs;
    }

    std::vector<Index> all_mode_offsets() const {
        std::vector<Index> offs{0};
        for (Index j = 0; j < static_cast<Index>(mode_dims.size()); ++j) {
            std::vector<Index> grown;
            grown.reserve(offs.size() * mode_dims[j]);
            for (Index base : offs)
                for (Index m = 0; m < mode_dims[j]; ++m)
                    grown.push_back(base + m * strides[j]);
            offs = std::move(grown);
        }
        return offs;
    }
};

// Apply a superoperator over the (system x mode k) Liouville space to the
// joint density matrix.
void apply_mode_superop(const Matrix& e, Matrix& rho, const JointSpace& js,
                        Index k) {
    const Index d = js.sys_dim, md = js.mode_dims[k];
    const Index sub = d * md;
    const auto rests = js.rest_offsets(k);
    Vector x(sub * sub);
    for (Index rb : rests) {
        for (Index rb2 : rests) {
            for (Index s = 0; s < d; ++s)
                for (Index m = 0; m < md; ++m)
                    for (Index s2 = 0; s2 < d; ++s2)
                        for (Index m2 = 0; m2 < md; ++m2)
                            x((s * md + m) * sub + (s2 * md + m2)) =
                                rho(s * js.sys_stride + m * js.strides[k] + rb,
                                    s2 * js.sys_stride + m2 * js.strides[k] + rb2);
            Vector y = e * x;
            for (Index s = 0; s < d; ++s)
                for (Index m = 0; m < md; ++m)
                    for (Index s2 = 0; s2 < d; ++s2)
                        for (Index m2 = 0; m2 < md; ++m2)
                            rho(s * js.sys_stride + m * js.strides[k] + rb,
                                s2 * js.sys_stride + m2 * js.strides[k] + rb2) =
                                y((s * md + m) * sub + (s2 * md + m2));
        }
    }
}

void apply_sys_superop(const Matrix& m, Matrix& rho, const JointSpace& js) {
    const Index d = js.sys_dim;
    const auto offs = js.all_mode_offsets();
    Vector x(d * d);
    for (Index rb : offs) {
        for (Index rb2 : offs) {
            for (Index s = 0; s < d; ++s)
                for (Index s2 = 0; s2 < d; ++s2)
                    x(s * d + s2) = rho(s * js.sys_stride + rb, s2 * js.sys_stride + rb2);
            Vector y = m * x;
            for (Index s = 0; s < d; ++s)
                for (Index s2 = 0; s2 < d; ++s2)
                    rho(s * js.sys_stride + rb, s2 * js.sys_stride + rb2) = y(s * d + s2);
        }
    }
}

Matrix reduced_state(const Matrix& rho, const JointSpace& js) {
    const Index d = js.sys_dim;
    Matrix out = Matrix::Zero(d, d);
    const auto offs = js.all_mode_offsets();
    for (Index s = 0; s < d; ++s)
        for (Index s2 = 0; s2 < d; ++s2)
            for (Index rb : offs)
                out(s, s2) += rho(s * js.sys_stride + rb, s2 * js.sys_stride + rb);
    return out;
}

// Embed the (system x mode k) Hamiltonian into the full joint space.
Matrix embed_mode_hamiltonian(const Matrix& h, const JointSpace& js, Index k) {
    const Index d = js.sys_dim, md = js.mode_dims[k];
    Matrix out = Matrix::Zero(js.hilbert, js.hilbert);
    const auto rests = js.rest_offsets(k);
    for (Index s = 0; s < d; ++s)
        for (Index m = 0; m < md; ++m)
            for (Index s2 = 0; s2 < d; ++s2)
                for (Index m2 = 0; m2 < md; ++m2) {
                    const Complex v = h(s * md + m, s2 * md + m2);
                    if (v == Complex(0, 0)) continue;
                    for (Index rb : rests)
                        out(s * js.sys_stride + m * js.strides[k] + rb,
                            s2 * js.sys_stride + m2 * js.strides[k] + rb) += v;
                }
    return out;
}

void record(Trajectory& traj, const Matrix& rho_red,
            const std::vector<Observable>& obs, double t) {
    traj.times.push_back(t);
    traj.states.push_back(rho_red);
    traj.trace_deviation.push_back(std::abs(rho_red.trace() - Complex(1, 0)));
    for (const Observable& o : obs)
        traj.observables[o.name].push_back((o.op * rho_red).trace());
}

}  // namespace

Trajectory dense_oracle(const std::vector<EnvironmentMode>& modes,
                        const std::optional<Matrix>& h_sys, const Matrix& rho0,
                        Index n, double dt, Splitting splitting,
                        TrotterPattern pattern, bool half_system,
                        const std::vector<Observable>& obs) {
    if (modes.empty()) throw invalid_input("dense_oracle: no modes");
    JointSpace js(modes);
    if (js.hilbert * js.hilbert > kOracleGuard)
        throw invalid_input("dense_oracle: joint Liouville dimension exceeds guard");

    // Initial product state.
    Matrix rho = rho0;
    for (const auto& m : modes) rho = kron(rho, m.initial_state).eval();

    Trajectory traj;
    record(traj, reduced_state(rho, js), obs, 0.0);

    const Index nm = static_cast<Index>(modes.size());
    const Matrix hs = h_sys.value_or(Matrix::Zero(js.sys_dim, js.sys_dim));

    if (splitting == Splitting::exact) {
        Matrix htot = Matrix::Zero(js.hilbert, js.hilbert);
        for (Index k = 0; k < nm; ++k) {
            if (!modes[k].hamiltonian)
                throw invalid_input("dense_oracle: exact splitting needs mode Hamiltonians");
            htot += embed_mode_hamiltonian(*modes[k].hamiltonian, js, k);
        }
        const auto offs = js.all_mode_offsets();
        for (Index s = 0; s < js.sys_dim; ++s)
            for (Index s2 = 0; s2 < js.sys_dim; ++s2)
                if (hs(s, s2) != Complex(0, 0))
                    for (Index rb : offs)
                        htot(s * js.sys_stride + rb, s2 * js.sys_stride + rb) += hs(s, s2);
        const Matrix u = matrix_exponential(Complex(0, -1) * htot, dt);
        for (Index l = 1; l <= n; ++l) {
            rho = u * rho * u.adjoint();
            record(traj, reduced_state(rho, js), obs, l * dt);
        }
        return traj;
    }

    const Matrix sys_full = matrix_exponential(commutator_liouvillian(hs), dt);
    const Matrix sys_half = matrix_exponential(commutator_liouvillian(hs), dt / 2);

    for (Index l = 1; l <= n; ++l) {
        apply_sys_superop(half_system ? sys_half : sys_full, rho, js);
        switch (pattern) {
            case TrotterPattern::plain:
                for (Index k = 0; k < nm; ++k)
                    apply_mode_superop(modes[k].propagator, rho, js, k);
                break;
            case TrotterPattern::alternating:
                if (l % 2 == 1)
                    for (Index k = 0; k < nm; ++k)
                        apply_mode_superop(modes[k].propagator, rho, js, k);
                else
                    for (Index k = nm - 1; k >= 0; --k)
                        apply_mode_superop(modes[k].propagator, rho, js, k);
                break;
            case TrotterPattern::sandwich:
                for (Index k = nm - 1; k >= 1; --k) {
                    if (!modes[k].half_propagator)
                        throw invalid_input("dense_oracle: sandwich needs half propagators");
                    apply_mode_superop(*modes[k].half_propagator, rho, js, k);
                }
                apply_mode_superop(modes[0].propagator, rho, js, 0);
                for (Index k = 1; k < nm; ++k)
                    apply_mode_superop(*modes[k].half_propagator, rho, js, k);
                break;
        }
        if (half_system) apply_sys_superop(sys_half, rho, js);
        record(traj, reduced_state(rho, js), obs, l * dt);
    }
    return traj;
}

}  // namespace ptc

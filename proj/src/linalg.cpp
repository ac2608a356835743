#include "ptc/linalg.hpp"

#include <cmath>
#include <mutex>

#include <Eigen/SVD>
#include <lapacke.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

extern "C" void openblas_set_num_threads(int);

namespace ptc {

bool all_finite(const Matrix& m) {
    return m.array().isFinite().all();
}

namespace {

// Divide-and-conquer SVD through LAPACK; noticeably faster than Eigen's
// BDCSVD on the bond-sweep matrices. BLAS is pinned to one thread so
// results do not depend on scheduler thread counts.
void lapack_svd(const Matrix& a, Matrix& u, RealVector& sv, Matrix& vdag) {
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
    const lapack_int m = static_cast<lapack_int>(a.rows());
    const lapack_int n = static_cast<lapack_int>(a.cols());
    const lapack_int mn = std::min(m, n);
    Matrix work = a;
    u.resize(m, mn);
    vdag.resize(mn, n);
    sv.resize(mn);
    const lapack_int info = LAPACKE_zgesdd(
        LAPACK_COL_MAJOR, 'S', m, n,
        reinterpret_cast<lapack_complex_double*>(work.data()), m, sv.data(),
        reinterpret_cast<lapack_complex_double*>(u.data()), m,
        reinterpret_cast<lapack_complex_double*>(vdag.data()), mn);
    if (info != 0) throw invalid_input("truncated_svd: LAPACK zgesdd failed");
}

}  // namespace

SvdResult truncated_svd(const Matrix& a, double epsilon,
                        std::optional<double> sigma_ref) {
    if (!all_finite(a)) throw invalid_input("truncated_svd: non-finite entries");
    if (epsilon < 0) throw invalid_input("truncated_svd: epsilon < 0");
    if (a.rows() == 0 || a.cols() == 0)
        throw invalid_input("truncated_svd: empty matrix");

    const Index small = std::min(a.rows(), a.cols());
    Matrix u, vdag;
    RealVector sv;
    // Jacobi for small blocks, LAPACK divide-and-conquer for the rest.
    if (small <= 16) {
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        sv = svd.singularValues();
        vdag = svd.matrixV().adjoint();
    } else {
        lapack_svd(a, u, sv, vdag);
    }

    const double s0 = sv.size() > 0 ? sv(0) : 0.0;
    if (s0 == 0.0) {
        // All-zero matrix: keep a single channel so relative thresholds stay
        // well defined downstream.
        SvdResult r;
        r.kept = 1;
        r.u = Matrix::Zero(a.rows(), 1);
        r.u(0, 0) = 1.0;
        r.singular_values = RealVector::Zero(1);
        r.vdag = Matrix::Zero(1, a.cols());
        r.vdag(0, 0) = 1.0;
        return r;
    }

    const double ref = sigma_ref.value_or(s0);
    const double cut = epsilon * ref;
    Index kept = 0;
    for (Index k = 0; k < sv.size(); ++k) {
        if (sv(k) >= cut) kept = k + 1;  // sigma_k >= eps*sigma_ref is kept
    }
    if (kept == 0) kept = 1;

    SvdResult r;
    r.kept = kept;
    r.u = u.leftCols(kept);
    r.singular_values = sv.head(kept);
    r.vdag = vdag.topRows(kept);
    return r;
}

Matrix matrix_exponential(const Matrix& l, double dt) {
    if (l.rows() != l.cols()) throw invalid_input("matrix_exponential: not square");
    if (!all_finite(l) || !std::isfinite(dt))
        throw invalid_input("matrix_exponential: non-finite input");
    Matrix scaled = l * dt;
    Matrix e = scaled.exp();
    if (!all_finite(e))
        throw invalid_input("matrix_exponential: overflow or NaN in result");
    return e;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out = Eigen::kroneckerProduct(a, b);
    return out;
}

Vector vectorize(const Matrix& rho) {
    Vector v(rho.size());
    for (Index i = 0; i < rho.rows(); ++i)
        for (Index j = 0; j < rho.cols(); ++j) v(i * rho.cols() + j) = rho(i, j);
    return v;
}

Matrix unvectorize(const Vector& v, Index dim) {
    if (v.size() != dim * dim) throw invalid_input("unvectorize: size mismatch");
    Matrix rho(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) rho(i, j) = v(i * dim + j);
    return rho;
}

Matrix superop_sandwich(const Matrix& left, const Matrix& right) {
    return kron(left, right.transpose());
}

Matrix superop_conjugation(const Matrix& u) {
    return superop_sandwich(u, u.adjoint());
}

Matrix commutator_liouvillian(const Matrix& h) {
    if (h.rows() != h.cols()) throw invalid_input("commutator_liouvillian: not square");
    const Index d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    return Complex(0, -1) * (kron(h, id) - kron(id, h.transpose()));
}

RowVector trace_covector(Index dim) {
    RowVector t = RowVector::Zero(dim * dim);
    for (Index i = 0; i < dim; ++i) t(i * dim + i) = 1.0;
    return t;
}

}  // namespace ptc

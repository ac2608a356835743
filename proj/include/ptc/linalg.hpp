// Dense complex linear algebra used by the process-tensor machinery:
// truncated SVD with a relative threshold, matrix exponentials, Kronecker
// products and Liouville-space (superoperator) index helpers.

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ptc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an operation receives non-finite or dimensionally
/// inconsistent input.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

bool all_finite(const Matrix& m);

/// Result of a rank-revealing truncated SVD, A ~= u * diag(s) * vdag.
struct SvdResult {
    Matrix u;                    // rows x kept, orthonormal columns
    RealVector singular_values;  // kept, descending
    Matrix vdag;                 // kept x cols, orthonormal rows
    Index kept{0};
};

/// SVD of `a` keeping exactly the singular values s_k >= epsilon * s_ref
/// (inclusive). `sigma_ref` defaults to the largest singular value of `a`.
/// At least one singular value is always kept; an all-zero matrix yields
/// kept = 1 with sigma = 0 and canonical unit vectors.
SvdResult truncated_svd(const Matrix& a, double epsilon,
                        std::optional<double> sigma_ref = std::nullopt);

/// e^{l * dt} via scaling-and-squaring (Pade). Throws invalid_input on
/// non-finite input and on non-finite result (overflow is an error, never
/// a silent NaN).
Matrix matrix_exponential(const Matrix& l, double dt);

/// Kronecker product, first factor as the slow index.
Matrix kron(const Matrix& a, const Matrix& b);

// ---- Liouville-space conventions -------------------------------------
//
// Density matrices are vectorized row-major: vec(rho)[i*N + j] = rho_ij.
// With that convention the map X -> A X B has the matrix kron(A, B^T),
// and a Liouville index alpha = (i, j) decodes as i = alpha / N,
// j = alpha % N.

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, Index dim);

/// Superoperator of X -> left * X * right.
Matrix superop_sandwich(const Matrix& left, const Matrix& right);

/// Superoperator of conjugation X -> u X u^dagger.
Matrix superop_conjugation(const Matrix& u);

/// Commutator Liouvillian -i [h, .] for a (scaled) Hamiltonian h.
Matrix commutator_liouvillian(const Matrix& h);

/// Row vector t with t * vec(X) = Tr X.
RowVector trace_covector(Index dim);

}  // namespace ptc

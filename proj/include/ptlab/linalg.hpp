#pragma once

#include <Eigen/Dense>

namespace ptlab::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
 * ascending. Sweeps until the off-diagonal Frobenius norm drops below
 * tol * ||A||_F. Intended for the small (<= ~16x16) matrices used here.
 *
 * Throws ValidationError if A is not square or its asymmetry exceeds
 * 1e-9 * (1 + ||A||_F).
 */
Vector symmetric_eigenvalues(const Matrix& A, double tol = 1e-12);

/// Smallest / largest eigenvalue of a symmetric matrix (Jacobi).
double lambda_min(const Matrix& A);
double lambda_max(const Matrix& A);

/// Spectral norm ||A||_2 = sqrt(lambda_max(A A^T)).
double spectral_norm(const Matrix& A);

/// True when A (rows <= cols) has full row rank: lambda_min(A A^T) > tol * ||A||_2^2.
bool full_row_rank(const Matrix& A, double tol = 1e-10);

/// Real parts of the eigenvalues of a general square matrix, ascending.
Vector eigenvalue_real_parts(const Matrix& A);

/// (A + A^T) / 2
Matrix symmetric_part(const Matrix& A);

} // namespace ptlab::linalg

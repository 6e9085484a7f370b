#include "ptlab/linalg.hpp"

#include "ptlab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ptlab::linalg {

Vector symmetric_eigenvalues(const Matrix& A, double tol) {
    if (A.rows() != A.cols()) throw ValidationError("symmetric_eigenvalues: matrix is not square");
    const Eigen::Index n = A.rows();
    if (n == 0) return Vector{};
    const double fro = A.norm();
    if ((A - A.transpose()).norm() > 1e-9 * (1.0 + fro))
        throw ValidationError("symmetric_eigenvalues: matrix is not symmetric");

    Matrix a = symmetric_part(A);
    const double target = tol * std::max(fro, 1e-300);
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        if (std::sqrt(off) <= target) break;

        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // rotation angle annihilating a(p,q)
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vector ev = a.diagonal();
    std::sort(ev.begin(), ev.end());
    return ev;
}

double lambda_min(const Matrix& A) { return symmetric_eigenvalues(A)(0); }

double lambda_max(const Matrix& A) {
    const Vector ev = symmetric_eigenvalues(A);
    return ev(ev.size() - 1);
}

double spectral_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    const Matrix g = A.rows() <= A.cols() ? Matrix(A * A.transpose()) : Matrix(A.transpose() * A);
    return std::sqrt(std::max(0.0, lambda_max(symmetric_part(g))));
}

bool full_row_rank(const Matrix& A, double tol) {
    if (A.rows() == 0 || A.rows() > A.cols()) return false;
    const Matrix g = symmetric_part(A * A.transpose());
    const Vector ev = symmetric_eigenvalues(g);
    return ev(0) > tol * ev(ev.size() - 1) && ev(ev.size() - 1) > 0.0;
}

Vector eigenvalue_real_parts(const Matrix& A) {
    if (A.rows() != A.cols()) throw ValidationError("eigenvalue_real_parts: matrix is not square");
    if (A.rows() == 0) return Vector{};
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) throw NumericError("eigenvalue_real_parts: QR iteration failed");
    Vector re = es.eigenvalues().real();
    std::sort(re.begin(), re.end());
    return re;
}

Matrix symmetric_part(const Matrix& A) { return 0.5 * (A + A.transpose()); }

} // namespace ptlab::linalg

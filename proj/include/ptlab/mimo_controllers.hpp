#pragma once

#include "ptlab/linalg.hpp"
#include "ptlab/rng.hpp"
#include "ptlab/scaling.hpp"
#include "ptlab/signals.hpp"
#include "ptlab/sim_engine.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ptlab {

using Mat = Eigen::MatrixXd;

/**
 * X' = B(X,t) U + F(X,t), X in R^n, U in R^m.
 *
 * Square case (m == n): B is the hidden gain. Non-square case: B = A M
 * with A known (n x m, full row rank) and M hidden (m x m). Psi is the
 * known envelope with ||F|| <= d(t) ||Psi(X)||.
 */
struct MimoPlant {
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    std::function<Mat(const Vec&, double)> B; ///< square case
    Mat A;                                    ///< non-square case
    std::function<Mat(const Vec&, double)> M; ///< non-square case
    std::function<Vec(const Vec&, double)> F;
    std::function<Vec(const Vec&)> Psi;

    bool square() const noexcept { return A.size() == 0; }
    /// Full gain matrix B(X,t) (= A M(X,t) in the non-square case).
    Mat gain(const Vec& X, double t) const;
};

/// U = -k Z - theta Z ||Phi||^2, Z = mu(t) X, Phi = Psi(X) + ||Z||/T (broadcast).
Vec square_pt(const Vec& X, double t, double k, double theta, const MimoPlant& plant, const TimeHorizon& h);

/// U = -(A^T / ||A||_2)(k Z + theta Z ||Phi||^2).
Vec nonsquare_pt(const Vec& X, double t, double k, double theta, const MimoPlant& plant, const TimeHorizon& h);

struct GainAssumptionReport {
    double min_value = 0.0; ///< min over samples of the symmetrized-gain bound
    bool pass = false;
};

/**
 * Square: min lambda_min(B + B^T) / 2. Non-square:
 * min lambda_min(A (M + M^T) A^T) / ||A||. Pass iff > 0.
 */
struct SamplePoint {
    Vec X;
    double t = 0.0;
};
GainAssumptionReport check_gain_assumption(const MimoPlant& plant, const std::vector<SamplePoint>& samples);

/// |Z^T (B - B^T) Z|, which vanishes for every Z.
double skew_quadratic_form(const Mat& B, const Vec& Z);

/**
 * Seeded random test plants. Gains are drawn as S + K + delta I with S
 * symmetric (entries U(-1,1)), K skew (entries U(-1,1)) and delta =
 * max(0, -lambda_min(S)) + margin, then modulated by (1 + 0.25 sin 3t).
 * F_i = d(t) c_i (1 + X_i^2) with |c_i| <= 1/sqrt(n), Psi_i = 1 + X_i^2.
 * Non-square A has entries U(-1,1) and is redrawn until cond(A) <= 2.
 */
MimoPlant random_square_plant(Eigen::Index n, Xorshift64& rng, const Signal& d, double margin = 0.5);
MimoPlant random_nonsquare_plant(Eigen::Index n, Eigen::Index m, Xorshift64& rng, const Signal& d,
                                 double margin = 0.5);

struct MimoScenario {
    bool square = true;
    double k = 1.0;
    double theta = 1.0;
    Vec X0;
    double dt = 1e-5;
};

/// Closed-loop run over [0, T - eps] recording X and U.
Trajectory simulate_mimo(const MimoScenario& scenario, const MimoPlant& plant, const TimeHorizon& h);

} // namespace ptlab

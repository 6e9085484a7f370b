#include "ptlab/mimo_controllers.hpp"

#include "ptlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptlab {

Mat MimoPlant::gain(const Vec& X, double t) const {
    if (square()) return B(X, t);
    return A * M(X, t);
}

namespace {

void check_time(double t, const TimeHorizon& h, const char* who) {
    if (!(t >= 0.0) || t > h.stop_time() * (1.0 + 1e-12))
        throw DomainError(std::string(who) + ": t = " + format_double(t) + " outside [0, T - eps]");
}

/// k Z + theta Z ||Phi||^2 with Phi = Psi + ||Z||/T broadcast over components.
Vec feedback_core(const Vec& X, double t, double k, double theta, const MimoPlant& plant, const TimeHorizon& h) {
    const Vec Z = mu(t, h) * X;
    const Vec Phi = plant.Psi(X).array() + mu_dot_over_mu_sq(h) * Z.norm();
    return k * Z + theta * Z * Phi.squaredNorm();
}

Mat random_symmetric(Eigen::Index n, Xorshift64& rng) {
    Mat S(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) S(i, j) = S(j, i) = rng.uniform(-1.0, 1.0);
    return S;
}

Mat random_skew(Eigen::Index n, Xorshift64& rng) {
    Mat K = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            K(i, j) = rng.uniform(-1.0, 1.0);
            K(j, i) = -K(i, j);
        }
    return K;
}

Mat random_positive_gain(Eigen::Index n, Xorshift64& rng, double margin) {
    const Mat S = random_symmetric(n, rng);
    const Mat K = random_skew(n, rng);
    const double delta = std::max(0.0, -linalg::lambda_min(S)) + margin;
    return S + K + delta * Mat::Identity(n, n);
}

void attach_disturbance(MimoPlant& p, Eigen::Index n, Xorshift64& rng, const Signal& d) {
    Vec c(n);
    for (Eigen::Index i = 0; i < n; ++i) c(i) = rng.uniform(-1.0, 1.0) / std::sqrt(static_cast<double>(n));
    p.F = [c, d](const Vec& X, double t) -> Vec {
        return d(t) * c.cwiseProduct((1.0 + X.array().square()).matrix());
    };
    p.Psi = [](const Vec& X) -> Vec { return (1.0 + X.array().square()).matrix(); };
}

/// Condition number of A A^T at most 4 (cond(A) <= 2), so the projected gain keeps a usable margin.
bool well_conditioned(const Mat& A) {
    const Mat G = A * A.transpose();
    return linalg::lambda_min(G) >= 0.25 * linalg::lambda_max(G);
}

} // namespace

Vec square_pt(const Vec& X, double t, double k, double theta, const MimoPlant& plant, const TimeHorizon& h) {
    check_time(t, h, "square_pt");
    if (!plant.square() || plant.n != plant.m || X.size() != plant.n)
        throw ValidationError("square_pt: dimension mismatch (need m = n = dim X)");
    return -feedback_core(X, t, k, theta, plant, h);
}

Vec nonsquare_pt(const Vec& X, double t, double k, double theta, const MimoPlant& plant, const TimeHorizon& h) {
    check_time(t, h, "nonsquare_pt");
    if (plant.A.rows() != X.size() || plant.A.cols() < plant.A.rows())
        throw ValidationError("nonsquare_pt: A must be n x m with n = dim X <= m");
    if (!linalg::full_row_rank(plant.A)) throw ValidationError("nonsquare_pt: A is rank deficient");
    const double norm_a = linalg::spectral_norm(plant.A);
    return -(plant.A.transpose() / norm_a) * feedback_core(X, t, k, theta, plant, h);
}

GainAssumptionReport check_gain_assumption(const MimoPlant& plant, const std::vector<SamplePoint>& samples) {
    if (samples.empty()) throw ValidationError("check_gain_assumption: need at least one sample point");
    GainAssumptionReport r;
    r.min_value = std::numeric_limits<double>::infinity();
    double norm_a = 0.0;
    if (!plant.square()) {
        if (!linalg::full_row_rank(plant.A)) throw ValidationError("check_gain_assumption: A is rank deficient");
        norm_a = linalg::spectral_norm(plant.A);
    }
    for (const auto& s : samples) {
        Mat G;
        double scale;
        if (plant.square()) {
            const Mat B = plant.B(s.X, s.t);
            G = B + B.transpose();
            scale = 0.5;
        } else {
            const Mat Mm = plant.M(s.X, s.t);
            G = plant.A * (Mm + Mm.transpose()) * plant.A.transpose();
            scale = 1.0 / norm_a;
        }
        const double asym = (G - G.transpose()).norm();
        if (asym > 1e-9 * (1.0 + G.norm()))
            throw NumericError("check_gain_assumption: symmetrization residual " + format_double(asym));
        r.min_value = std::min(r.min_value, scale * linalg::lambda_min(linalg::symmetric_part(G)));
    }
    r.pass = r.min_value > 0.0;
    return r;
}

double skew_quadratic_form(const Mat& B, const Vec& Z) {
    if (B.rows() != B.cols() || B.cols() != Z.size())
        throw ValidationError("skew_quadratic_form: B must be square and match Z");
    return std::abs(Z.dot((B - B.transpose()) * Z));
}

MimoPlant random_square_plant(Eigen::Index n, Xorshift64& rng, const Signal& d, double margin) {
    MimoPlant p;
    p.n = p.m = n;
    const Mat B0 = random_positive_gain(n, rng, margin);
    p.B = [B0](const Vec&, double t) -> Mat { return (1.0 + 0.25 * std::sin(3.0 * t)) * B0; };
    attach_disturbance(p, n, rng, d);
    return p;
}

MimoPlant random_nonsquare_plant(Eigen::Index n, Eigen::Index m, Xorshift64& rng, const Signal& d, double margin) {
    MimoPlant p;
    p.n = n;
    p.m = m;
    do {
        p.A = Mat(n, m);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < m; ++j) p.A(i, j) = rng.uniform(-1.0, 1.0);
    } while (!well_conditioned(p.A));
    const Mat M0 = random_positive_gain(m, rng, margin);
    p.M = [M0](const Vec&, double t) -> Mat { return (1.0 + 0.25 * std::sin(3.0 * t)) * M0; };
    attach_disturbance(p, n, rng, d);
    return p;
}

Trajectory simulate_mimo(const MimoScenario& sc, const MimoPlant& plant, const TimeHorizon& h) {
    h.validate();
    std::vector<std::string> errs;
    if (!(sc.k > 0.0)) errs.emplace_back("controller.k > 0 violated");
    if (!(sc.theta >= 0.0)) errs.emplace_back("controller.theta >= 0 violated");
    if (sc.X0.size() != plant.n) errs.emplace_back("initial.x dimension must equal plant.n");
    if (sc.square != plant.square()) errs.emplace_back("controller kind does not match plant shape");
    if (!errs.empty()) throw ValidationError(std::move(errs));

    auto law = [&](double t, const Vec& X) -> Vec {
        return sc.square ? square_pt(X, t, sc.k, sc.theta, plant, h) : nonsquare_pt(X, t, sc.k, sc.theta, plant, h);
    };
    auto dynamics = [&](double t, const Vec& X) -> Vec { return plant.gain(X, t) * law(t, X) + plant.F(X, t); };

    IntegrateOptions opts;
    opts.guard = h;
    opts.control = law;
    return integrate(dynamics, sc.X0, Grid{h.stop_time(), sc.dt}, opts);
}

} // namespace ptlab

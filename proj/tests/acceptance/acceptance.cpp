// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
#include "ptlab/app.hpp"
#include "ptlab/bench_compare.hpp"
#include "ptlab/config.hpp"
#include "ptlab/errors.hpp"
#include "ptlab/mas.hpp"
#include "ptlab/mimo_controllers.hpp"
#include "ptlab/scalar_controllers.hpp"
#include "ptlab/settling.hpp"
#include "ptlab/sim_engine.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace ptlab;

namespace {

// criterion 1
constexpr double kFxtBound = 5.363;
constexpr double kPdtBound = 1.0;
constexpr double kFtSpreadMin = 0.10;
constexpr double kPtSpreadMax = 0.01;
constexpr double kBenchBudget = 30.0;
// criterion 2
constexpr double kEquivBudget = 5.0;
// criterion 3
constexpr int kDrawsPerKind = 20;
constexpr double kOracleDtFraction = 1e-5;
constexpr double kFt1Exactness = 0.01;
// criterion 4
constexpr double kPt12Terminal = 1e-3;
constexpr double kPt12Margin = 1e-4;
// criterion 5
constexpr double kRegulation = 1e-3;
constexpr double kSettleLevel = 1e-2;
constexpr double kSettleSpread = 0.05;
// criterion 6
constexpr double kEstimateDrift = 1e-3;
constexpr std::size_t kDriftSteps = 100;
// criterion 7
constexpr double kNussbaumTerminal = 1e-2;
constexpr double kXiRateFloor = -1e-12;
// criterion 8
constexpr double kMimoTerminal = 1e-3;
constexpr double kSkewTol = 1e-12;
// criterion 9
constexpr double kBoundSlack = 1e-6;
constexpr double kSumDrift = 1e-9;
// criterion 10
constexpr double kDecompTol = 1e-12;
constexpr double kContainGap = 1e-3;
// criterion 11
constexpr double kOrderRatio = 8.0;

// Criteria whose literal targets are known to be unreachable; they still print FAIL.
const std::set<int> kKnownFailures = {10};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    bool require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.tellp() > 0 ? "; " : "") << "violated: " << what;
        }
        return ok;
    }
};

std::string fmt(double v, const char* f = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
    const unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex m;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScenarioConfig load(const fs::path& dir, const char* name) { return load_config((dir / name).string()); }

// --- 1 ----------------------------------------------------------------------

void double_integrator(const fs::path& dir, Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = load(dir, "c01_double_integrator.cfg");
    const auto& c = std::get<CompareConfig>(cfg.body);
    const auto rows = run_comparison(c.scenarios(), cfg.threads);
    const double elapsed = seconds_since(t0);

    auto settle = [&](DoubleIntegratorKind k) {
        std::vector<double> out;
        for (const auto& r : rows)
            if (r.scenario.kind == k) out.push_back(r.report.settle_time.value_or(INFINITY));
        return out;
    };
    const auto pt = settle(DoubleIntegratorKind::prescribed), fxt = settle(DoubleIntegratorKind::fixed);
    const auto pdt = settle(DoubleIntegratorKind::predefined), ft = settle(DoubleIntegratorKind::finite);
    o.require(pt.size() == 2 && fxt.size() == 2 && pdt.size() == 2 && ft.size() == 2, "two initial states per kind");
    if (!o.pass) return;
    for (double s : pt) o.require(s <= c.params.T + c.dt, "PT settles by T within one step");
    for (double s : fxt) o.require(s <= kFxtBound, "FxT settles by 5.363 s");
    for (double s : pdt) o.require(s <= kPdtBound, "PdT settles by T1 + T2 = 1 s");
    const double ft_spread = std::abs(ft[0] - ft[1]) / std::min(ft[0], ft[1]);
    const double pt_spread = std::abs(pt[0] - pt[1]) / std::min(pt[0], pt[1]);
    o.require(ft_spread >= kFtSpreadMin, "FT settling differs by >= 10%");
    o.require(pt_spread <= kPtSpreadMax, "PT settling differs by <= 1%");
    o.require(elapsed < kBenchBudget, "runtime < 30 s");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << "PT " << fmt(pt[0]) << "/" << fmt(pt[1]) << " FxT " << fmt(fxt[0])
             << "/" << fmt(fxt[1]) << " PdT " << fmt(pdt[0]) << "/" << fmt(pdt[1]) << " FT " << fmt(ft[0]) << "/"
             << fmt(ft[1]) << " spread FT " << fmt(100 * ft_spread, "%.1f") << "% PT " << fmt(100 * pt_spread, "%.2f")
             << "% in " << fmt(elapsed, "%.1f") << " s";
}

// --- 2 ----------------------------------------------------------------------

void equivalence(const fs::path& dir, Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = load(dir, "c02_ft_pt_equivalence.cfg");
    const auto& c = std::get<CompareConfig>(cfg.body);
    double worst = 0.0, tol = 0.0;
    int pairs = 0;
    for (double alpha : c.alphas)
        for (double x0 : c.x0_scalar) {
            const auto r = ft_pt_equivalence(alpha, x0, c.k, c.dt);
            o.require(r.max_gap <= 1e-6 + 10 * c.dt, "gap <= 1e-6 + 10 dt at alpha " + fmt(alpha) + ", x0 " + fmt(x0));
            worst = std::max(worst, r.max_gap);
            tol = r.tolerance;
            ++pairs;
        }
    const double elapsed = seconds_since(t0);
    o.require(pairs == 9, "nine (alpha, x0) pairs");
    o.require(elapsed < kEquivBudget, "runtime < 5 s");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << pairs << " pairs, max gap " << fmt(worst) << " (tol "
             << fmt(tol) << ") in " << fmt(elapsed, "%.1f") << " s";
}

// --- 3 ----------------------------------------------------------------------

void bound_oracles(const fs::path& dir, Outcome& o) {
    const auto cfg = load(dir, "c03_bound_sweep.cfg");
    const auto& b = std::get<BoundConfig>(cfg.body);
    const std::vector<LyapunovKind> kinds = {
        LyapunovKind::FT1,    LyapunovKind::FastFT2, LyapunovKind::SemiGlobal3, LyapunovKind::PracticalFT4,
        LyapunovKind::PracticalFT5, LyapunovKind::Fixed6, LyapunovKind::Fixed7, LyapunovKind::Fixed8,
        LyapunovKind::Fixed9, LyapunovKind::Predefined10};
    o.require(b.kinds == kinds, "sweep config covers the ten autonomous kinds");
    o.require(b.draws >= kDrawsPerKind, ">= 20 draws per kind");

    Xorshift64 rng(cfg.seed);
    std::vector<LyapunovSpec> specs;
    for (auto k : kinds)
        for (int i = 0; i < kDrawsPerKind; ++i) specs.push_back(draw_spec(k, rng));

    struct Row {
        double bound = 0, dt = 0;
        std::optional<double> settle, zero;
    };
    std::vector<Row> rows(specs.size());
    parallel_for(specs.size(), [&](std::size_t i) {
        Row& r = rows[i];
        r.bound = settling_bound(specs[i]);
        InequalityOptions opt;
        r.dt = kOracleDtFraction * std::max(r.bound, 1e-2);
        opt.dt = r.dt;
        const auto run = simulate_inequality(specs[i], opt);
        r.settle = run.settle_time;
        r.zero = run.zero_time;
    });

    int pass = 0;
    double ft1_worst = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& r = rows[i];
        const bool ok = r.settle && *r.settle <= r.bound + 2 * r.dt;
        pass += ok;
        if (!ok)
            o.require(false, std::string(to_string(specs[i].kind)) + " draw " + std::to_string(i % kDrawsPerKind + 1) +
                                 " settles within bound + 2 dt");
        if (specs[i].kind == LyapunovKind::FT1) {
            const double rel = r.zero ? std::abs(*r.zero - r.bound) / r.bound : INFINITY;
            ft1_worst = std::max(ft1_worst, rel);
        }
    }
    o.require(ft1_worst <= kFt1Exactness, "FT1 zero time within 1% of the closed form");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << pass << "/" << specs.size()
             << " draws within bound + 2 dt, FT1 worst relative gap " << fmt(ft1_worst);
}

// --- 4 ----------------------------------------------------------------------

void pt12_limit(const fs::path& dir, Outcome& o) {
    const auto cfg = load(dir, "c04_pt_disturbed.cfg");
    const auto& b = std::get<BoundConfig>(cfg.body);
    o.require(b.kinds.size() == 1 && b.kinds[0] == LyapunovKind::PT12, "config is PT12");
    o.require(b.coefficients.at("k") == 2.0 && cfg.horizon.T == 1.0, "k = 2, T = 1");
    o.require(b.disturbance && b.disturbance->sup() == 0.1, "d = 0.1");
    o.require(std::abs(cfg.horizon.stop_margin - kPt12Margin) <= 1e-15, "evaluated at T - 1e-4");
    InequalityOptions opt;
    opt.horizon = cfg.horizon;
    opt.disturbance = b.disturbance;
    opt.dt = b.dt;
    const auto run = simulate_inequality({b.kinds[0], b.coefficients, b.V0}, opt);
    const double V = run.trajectory.states.back()(0);
    o.require(V <= kPt12Terminal, "V(T - 1e-4) <= 1e-3");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << "V(" << fmt(run.trajectory.times.back(), "%.6g")
             << ") = " << fmt(V);
}

// --- 5-7 --------------------------------------------------------------------

struct ScalarRuns {
    const ScalarSimConfig* cfg = nullptr;
    std::vector<std::size_t> d, x;
    std::vector<Trajectory> traj;
};

ScalarRuns run_scalar_config(const ScenarioConfig& sc) {
    ScalarRuns r;
    r.cfg = &std::get<ScalarSimConfig>(sc.body);
    for (std::size_t d = 0; d < r.cfg->disturbances.size(); ++d)
        for (std::size_t x = 0; x < r.cfg->x0.size(); ++x) {
            r.d.push_back(d);
            r.x.push_back(x);
        }
    r.traj.resize(r.d.size());
    parallel_for(r.d.size(), [&](std::size_t i) {
        ScalarScenario s = r.cfg->scenario;
        s.x0 = r.cfg->x0[r.x[i]];
        r.traj[i] = simulate_scalar(s, r.cfg->plant(r.cfg->disturbances[r.d[i]]), sc.horizon);
    });
    return r;
}

double regulation(const ScalarRuns& r, Outcome& o, double& max_u) {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.traj.size(); ++i) {
        const double x0 = r.cfg->x0[r.x[i]];
        const auto rep = settling(r.traj[i], kSettleLevel);
        const double ratio = rep.terminal_norm / (kRegulation * std::max(1.0, std::abs(x0)));
        worst = std::max(worst, ratio);
        o.require(ratio <= 1.0, "|x(T-eps)| <= 1e-3 max(1, |x0|) for x0 = " + fmt(x0) + ", disturbance " +
                                    std::to_string(r.d[i] + 1));
        o.require(std::isfinite(rep.max_control), "finite max |u|");
        max_u = std::max(max_u, rep.max_control);
    }
    return worst;
}

void robust_scalar(const fs::path& dir, Outcome& o) {
    const auto cfg = load(dir, "c05_robust_scalar.cfg");
    const auto& s = std::get<ScalarSimConfig>(cfg.body);
    o.require(s.scenario.kind == ScalarControllerKind::robust, "robust law");
    o.require(s.x0.size() == 4 && s.disturbances.size() == 3, "4 initial states x 3 disturbances");
    // hidden gain range over a fine time grid
    double bmin = INFINITY, bmax = -INFINITY;
    for (int k = 0; k <= 100000; ++k) {
        const double v = s.b(k * 1e-5);
        bmin = std::min(bmin, v);
        bmax = std::max(bmax, v);
    }
    o.require(bmin >= 0.5 - 1e-12 && bmax <= 2.0 + 1e-12, "b in [0.5, 2]");

    const auto runs = run_scalar_config(cfg);
    double max_u = 0.0;
    const double worst = regulation(runs, o, max_u);

    // settling spread across two decades of |x0| (0.1, 1, 10) for each disturbance
    double spread = 0.0;
    for (std::size_t d = 0; d < s.disturbances.size(); ++d) {
        double lo = INFINITY, hi = 0.0, xlo = INFINITY, xhi = 0.0;
        for (std::size_t i = 0; i < runs.traj.size(); ++i) {
            if (runs.d[i] != d || s.x0[runs.x[i]] <= 0) continue;
            const auto t = settling(runs.traj[i], kSettleLevel).settle_time;
            o.require(t.has_value(), "settles to 1e-2");
            if (!t) continue;
            lo = std::min(lo, *t);
            hi = std::max(hi, *t);
            xlo = std::min(xlo, s.x0[runs.x[i]]);
            xhi = std::max(xhi, s.x0[runs.x[i]]);
        }
        o.require(xhi / xlo >= 100.0 - 1e-9, "two decades of |x0|");
        spread = std::max(spread, (hi - lo) / hi);
    }
    o.require(spread <= kSettleSpread, "settling time varies <= 5%");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << "b in [" << fmt(bmin) << ", " << fmt(bmax)
             << "], worst terminal/tolerance " << fmt(worst) << ", max|u| " << fmt(max_u) << ", settle spread "
             << fmt(100 * spread, "%.2f") << "%";
}

void adaptive_scalar(const fs::path& dir, Outcome& o) {
    double worst_drift = 0.0, worst = 0.0, max_u = 0.0;
    int runs_total = 0;
    for (const char* name : {"c06a_adaptive_constant.cfg", "c06b_adaptive_varying.cfg"}) {
        const auto cfg = load(dir, name);
        const auto runs = run_scalar_config(cfg);
        const auto& s = *runs.cfg;
        o.require(s.x0.size() == 4 && s.disturbances.size() == 3, std::string(name) + ": 4 x 3 runs");
        worst = std::max(worst, regulation(runs, o, max_u));
        const double sb = s.b_sign == SignKnowledge::negative ? -1.0 : 1.0;
        const auto names = estimate_names(s.scenario.kind);
        for (const auto& tr : runs.traj) {
            ++runs_total;
            const std::size_t n = tr.size();
            for (std::size_t e = 0; e < names.size(); ++e) {
                const double drift =
                    std::abs(tr.estimates[n - 1](static_cast<Eigen::Index>(e)) -
                             tr.estimates[n - 1 - kDriftSteps](static_cast<Eigen::Index>(e)));
                worst_drift = std::max(worst_drift, drift);
                o.require(drift <= kEstimateDrift, std::string(name) + ": " + names[e] + " settles to a limit");
            }
            // rho_hat is the second estimate for both adaptive laws
            for (std::size_t k = 1; k < n; ++k)
                if (sb * (tr.estimates[k](1) - tr.estimates[k - 1](1)) < 0.0) {
                    o.require(false, std::string(name) + ": rho_hat monotone at t = " + fmt(tr.times[k]));
                    break;
                }
        }
    }
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << runs_total << " runs, worst terminal/tolerance " << fmt(worst)
             << ", max estimate drift over 100 steps " << fmt(worst_drift) << ", max|u| " << fmt(max_u);
}

void nussbaum(const fs::path& dir, Outcome& o) {
    const auto cfg = load(dir, "c07_nussbaum.cfg");
    const auto& s = std::get<ScalarSimConfig>(cfg.body);
    o.require(s.scenario.kind == ScalarControllerKind::nussbaum, "Nussbaum law");
    o.require(s.b(0.0) == -2.0 && s.b_sign == SignKnowledge::unknown, "hidden b = -2, sign undeclared");
    const auto runs = run_scalar_config(cfg);
    double min_rate = INFINITY, xi_max = 0.0, terminal = 0.0;
    for (std::size_t i = 0; i < runs.traj.size(); ++i) {
        const auto& tr = runs.traj[i];
        const auto plant = s.plant(s.disturbances[runs.d[i]]);
        terminal = std::max(terminal, std::abs(tr.states.back()(0)));
        for (std::size_t k = 0; k < tr.size(); ++k) {
            AdaptiveState st = s.scenario.initial;
            st.theta_hat = tr.estimates[k](0);
            st.delta_hat = tr.estimates[k](1);
            st.xi = tr.estimates[k](2);
            const auto out = nussbaum_pt(tr.states[k](0), tr.times[k], st, s.scenario.gains, s.scenario.nussbaum, plant,
                                         cfg.horizon);
            min_rate = std::min(min_rate, out.rates.xi);
            xi_max = std::max(xi_max, std::abs(st.xi));
        }
    }
    o.require(terminal <= kNussbaumTerminal, "|x(T-eps)| <= 1e-2");
    o.require(min_rate >= kXiRateFloor, "xi' >= -1e-12 at every step");
    o.require(std::isfinite(xi_max), "xi bounded");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << "|x(T-eps)| " << fmt(terminal) << ", max|xi| " << fmt(xi_max)
             << ", min xi' " << fmt(min_rate);
}

// --- 8 ----------------------------------------------------------------------

void mimo(const fs::path& dir, Outcome& o) {
    double worst = 0.0, max_u = 0.0, skew = 0.0;
    for (const char* name : {"c08a_mimo_square.cfg", "c08b_mimo_nonsquare.cfg"}) {
        const auto cfg = load(dir, name);
        const auto& s = std::get<MimoSimConfig>(cfg.body);
        o.require(s.count >= 10, std::string(name) + ": 10 plants");
        Xorshift64 rng(cfg.seed);
        std::vector<MimoPlant> plants;
        std::vector<Vec> x0;
        for (int p = 0; p < s.count; ++p) {
            plants.push_back(s.m == s.n ? random_square_plant(s.n, rng, s.disturbance, s.margin)
                                        : random_nonsquare_plant(s.n, s.m, rng, s.disturbance, s.margin));
            if (s.x0.empty()) {
                Vec x(s.n);
                for (Eigen::Index i = 0; i < s.n; ++i) x(i) = rng.uniform(-1.0, 1.0);
                x0.push_back(x);
            } else {
                x0.push_back(s.x0.size() == 1 ? s.x0.front() : s.x0[static_cast<std::size_t>(p)]);
            }
        }
        std::vector<Trajectory> traj(plants.size());
        parallel_for(plants.size(), [&](std::size_t i) {
            MimoScenario sc;
            sc.square = plants[i].square();
            sc.k = s.k;
            sc.theta = s.theta;
            sc.X0 = x0[i];
            sc.dt = s.dt;
            traj[i] = simulate_mimo(sc, plants[i], cfg.horizon);
        });
        for (std::size_t i = 0; i < plants.size(); ++i) {
            const auto& tr = traj[i];
            std::vector<SamplePoint> samples;
            for (std::size_t k = 0; k < tr.size(); k += tr.size() / 20) samples.push_back({tr.states[k], tr.times[k]});
            o.require(check_gain_assumption(plants[i], samples).pass,
                      std::string(name) + ": gain assumption for plant " + std::to_string(i + 1));
            const auto rep = settling(tr, kMimoTerminal);
            worst = std::max(worst, rep.terminal_norm);
            max_u = std::max(max_u, rep.max_control);
            o.require(rep.terminal_norm <= kMimoTerminal,
                      std::string(name) + ": ||X(T-eps)|| <= 1e-3 for plant " + std::to_string(i + 1));
            o.require(std::isfinite(rep.max_control), "bounded U");
            for (const auto& sp : samples) {
                // Non-square: the cancelling skew part is that of M, seen through W = A^T Z.
                const Vec Z = mu(sp.t, cfg.horizon) * sp.X;
                const Vec W = plants[i].square() ? Z : Vec(plants[i].A.transpose() * Z);
                const Mat B = plants[i].square() ? plants[i].B(sp.X, sp.t) : plants[i].M(sp.X, sp.t);
                const double lhs = skew_quadratic_form(B, W);
                const double rhs = kSkewTol * W.squaredNorm() * B.norm();
                skew = std::max(skew, rhs > 0 ? lhs / rhs : 0.0);
                if (!o.require(lhs <= rhs || lhs == 0.0,
                               std::string(name) + ": skew quadratic form vanishes for plant " + std::to_string(i + 1)))
                    break;
            }
        }
    }
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << "20 plants, worst ||X(T-eps)|| " << fmt(worst) << ", max||U|| "
             << fmt(max_u) << ", skew form / tolerance <= " << fmt(skew);
}

// --- 9 ----------------------------------------------------------------------

void consensus(const fs::path& dir, Outcome& o) {
    std::ostringstream d;
    for (const char* name : {"c09a_consensus_path4.cfg", "c09b_consensus_cycle4.cfg", "c09c_consensus_complete5.cfg"}) {
        const auto cfg = load(dir, name);
        const auto& c = std::get<ConsensusConfig>(cfg.body);
        auto sc = c.scenario;
        o.require(sc.protocol == ConsensusProtocol::prescribed && !sc.c, std::string(name) + ": c = 1/lambda2");
        sc.bound_slack = kBoundSlack;
        const auto tr = simulate_consensus(sc, c.graph.graph, cfg.horizon);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(c.graph.graph));
        const double l2 = es.eigenvalues()(1);
        const double chi0 = disagreement(sc.x0).norm();
        double ratio = 0.0, drift = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const double t = tr.times[k];
            const double bound = chi0 * std::exp(-sc.k * l2 * t) / mu(t, cfg.horizon);
            const double chi = disagreement(tr.states[k]).norm();
            ratio = std::max(ratio, chi / bound);
            drift = std::max(drift, std::abs(tr.states[k].sum() - sc.x0.sum()));
        }
        o.require(ratio <= 1.0 + kBoundSlack, std::string(name) + ": bound at every grid point");
        o.require(drift <= kSumDrift, std::string(name) + ": sum drift <= 1e-9");
        d << (d.tellp() > 0 ? ", " : "") << fs::path(name).stem().string() << " max chi/bound " << fmt(ratio, "%.6f")
          << " drift " << fmt(drift);
    }
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << d.str();
}

// --- 10 ---------------------------------------------------------------------

void containment(const fs::path& dir, Outcome& o) {
    const auto cfg = load(dir, "c10_containment_chain.cfg");
    const auto& c = std::get<ContainmentConfig>(cfg.body);
    const auto dec = containment_decompose(c.graph.graph, c.scenario.root);

    Eigen::MatrixXd L1(2, 2), P(2, 2), Q(2, 2);
    L1 << 1, 0, -1, 1;
    P << 2, 0, 0, 1;
    Q << 4, -2, -2, 2;
    const double c_min = 4.0 / (3.0 - std::sqrt(5.0));
    o.require(dec.L1.rows() == 2 && (dec.L1 - L1).cwiseAbs().maxCoeff() <= kDecompTol, "L1 = [[1,0],[-1,1]]");
    o.require(dec.P.rows() == 2 && (dec.P - P).cwiseAbs().maxCoeff() <= kDecompTol, "P = diag(2,1)");
    o.require(dec.Q.rows() == 2 && (dec.Q - Q).cwiseAbs().maxCoeff() <= kDecompTol, "Q = [[4,-2],[-2,2]]");
    o.require(std::abs(dec.c_min - c_min) <= kDecompTol * c_min, "c_min = 4/(3-sqrt5)");

    const auto tr = simulate_containment(c.scenario, c.graph.graph, cfg.horizon);
    const Vec& x = tr.states.back();
    double gap = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) gap = std::max(gap, std::abs(x(i) - x(dec.root)));
    o.require(gap <= kContainGap, "followers within 1e-3 of the root by T - eps");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << "computed Q = [[" << fmt(dec.Q(0, 0)) << "," << fmt(dec.Q(0, 1))
             << "],[" << fmt(dec.Q(1, 0)) << "," << fmt(dec.Q(1, 1)) << "]], c_min = " << fmt(dec.c_min, "%.6f")
             << " (target " << fmt(c_min, "%.6f") << "), follower gap " << fmt(gap);
}

// --- 11 ---------------------------------------------------------------------

void engine_order(const fs::path&, Outcome& o) {
    auto err = [](double dt) {
        const auto tr = integrate([](double, const Vec& x) { return Vec(-x); }, Vec::Ones(1), {1.0, dt});
        return std::abs(tr.states.back()(0) - std::exp(-1.0));
    };
    double prev = err(0.1);
    o.detail << "errors " << fmt(prev);
    for (double dt : {0.05, 0.025, 0.0125}) {
        const double e = err(dt);
        o.require(prev / e >= kOrderRatio, "error contracts >= 8x at dt = " + fmt(dt));
        o.detail << ", " << fmt(e) << " (x" << fmt(prev / e, "%.2f") << ")";
        prev = e;
    }
}

// --- 12 ---------------------------------------------------------------------

void determinism(const fs::path& dir, Outcome& o) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".cfg") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::size_t csvs = 0;
    for (const auto& f : files) {
        auto cfg = load_config(f.string());
        const auto a = execute(cfg);
        cfg.threads = cfg.threads == 1 ? 3 : 1; // thread count must not matter either
        const auto b = execute(cfg);
        bool same = a.files.size() == b.files.size();
        for (std::size_t i = 0; same && i < a.files.size(); ++i) {
            if (fs::path(a.files[i].first).extension() != ".csv") continue;
            same = a.files[i] == b.files[i];
            ++csvs;
        }
        o.require(same, f.filename().string() + " repeats byte for byte");
    }
    o.require(!files.empty(), "bundled configs found");
    o.detail << (o.detail.tellp() > 0 ? "; " : "") << files.size() << " configs, " << csvs << " CSV files identical";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string configs = "configs";
    std::vector<int> only;
    app.add_option("--configs", configs, "directory of bundled scenario files");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<int, std::function<void(const fs::path&, Outcome&)>>> criteria = {
        {1, double_integrator}, {2, equivalence}, {3, bound_oracles}, {4, pt12_limit},
        {5, robust_scalar},     {6, adaptive_scalar}, {7, nussbaum},       {8, mimo},
        {9, consensus},         {10, containment},    {11, engine_order},  {12, determinism},
    };

    int failed = 0, unexpected = 0;
    for (const auto& [id, check] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            check(fs::path(configs), o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << (o.detail.tellp() > 0 ? "; " : "") << "error: " << e.what();
        }
        const bool known = kKnownFailures.count(id) > 0;
        std::cout << "criterion " << (id < 10 ? " " : "") << id << ": " << (o.pass ? "PASS" : "FAIL") << "  ["
                  << fmt(seconds_since(t0), "%.1f") << " s] " << o.detail.str()
                  << (!o.pass && known ? "  (known: target inconsistent with its own construction)" : "") << '\n'
                  << std::flush;
        if (!o.pass) {
            ++failed;
            if (!known) ++unexpected;
        }
    }
    std::cout << "summary: " << failed << " FAIL, " << unexpected << " unexpected\n";
    return unexpected == 0 ? 0 : 1;
}

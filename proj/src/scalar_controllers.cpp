#include "ptlab/scalar_controllers.hpp"

#include "ptlab/errors.hpp"

#include <cmath>
#include <numbers>

namespace ptlab {

namespace {

void check_time(double t, const TimeHorizon& h, const char* who) {
    if (!(t >= 0.0) || t > h.stop_time() * (1.0 + 1e-12))
        throw DomainError(std::string(who) + ": t = " + format_double(t) + " outside [0, T - eps] = [0, " +
                          format_double(h.stop_time()) + "]");
}

double sign_of(SignKnowledge s) {
    switch (s) {
    case SignKnowledge::positive: return 1.0;
    case SignKnowledge::negative: return -1.0;
    case SignKnowledge::unknown: break;
    }
    throw ValidationError("control direction unknown: use the Nussbaum controller");
}

} // namespace

std::vector<std::string> check_envelope_factorization(const ScalarPlant& plant,
                                                      const std::vector<double>& samples) {
    std::vector<std::string> v;
    if (!plant.psi) v.emplace_back("plant.psi missing");
    if (!plant.psi_bar) v.emplace_back("plant.psi_bar missing");
    if (!v.empty()) return v;
    if (std::abs(plant.psi(0.0)) > 1e-12) v.emplace_back("psi(0) = 0 violated (factorization needs psi(0) = 0)");
    for (double x : samples) {
        const double p = plant.psi(x);
        if (std::abs(p - plant.psi_bar(x) * x) > 1e-9 * (1.0 + std::abs(p))) {
            v.push_back("psi(x) = psi_bar(x) x violated at x = " + format_double(x));
            break;
        }
    }
    return v;
}

double robust_pt(double x, double t, double k, double theta, const ScalarPlant& plant, const TimeHorizon& h) {
    check_time(t, h, "robust_pt");
    const double z = mu(t, h) * x;
    const double phi = plant.psi(x) + std::abs(mu_dot_over_mu_sq(h) * z);
    return -k * z - theta * z * phi * phi;
}

AdaptiveOutput adaptive_pt_ti(double x, double t, const AdaptiveState& s, const AdaptiveGains& g,
                              const ScalarPlant& plant, const TimeHorizon& h) {
    check_time(t, h, "adaptive_pt_ti");
    const double sb = sign_of(plant.b_sign);
    const double pb = plant.psi_bar(x);
    AdaptiveOutput out;
    out.u_bar = -(g.k * scale_rate(t, h) * x + 0.5 * s.theta_hat * s.theta_hat * x + 0.5 * pb * pb * x);
    out.u = s.rho_hat * out.u_bar;
    out.rates.theta_hat = g.gamma_theta * x * plant.psi(x);
    out.rates.rho_hat = -g.gamma_rho * sb * x * out.u_bar;
    out.rates.delta_hat = 0.0;
    out.rates.xi = 0.0;
    return out;
}

AdaptiveOutput adaptive_pt_tv(double x, double t, const AdaptiveState& s, const AdaptiveGains& g,
                              const ScalarPlant& plant, const TimeHorizon& h) {
    check_time(t, h, "adaptive_pt_tv");
    const double sb = sign_of(plant.b_sign);
    const double pb = plant.psi_bar(x);
    const double v = 0.5 * s.delta_hat * x * (1.0 + pb * pb);
    AdaptiveOutput out;
    out.u_bar = -(g.k * scale_rate(t, h) * x + 0.5 * s.theta_hat * s.theta_hat * x + 0.5 * pb * pb * x + v);
    out.u = s.rho_hat * out.u_bar;
    out.rates.theta_hat = g.gamma_theta * x * plant.psi(x);
    out.rates.rho_hat = -g.gamma_rho * sb * x * out.u_bar;
    out.rates.delta_hat = 0.5 * g.gamma_delta * x * x * (1.0 + pb * pb);
    out.rates.xi = 0.0;
    return out;
}

double nussbaum_default(double xi) { return std::exp(xi * xi) * std::cos(std::numbers::pi * xi / 2.0); }

AdaptiveOutput nussbaum_pt(double x, double t, const AdaptiveState& s, const AdaptiveGains& g,
                           const NussbaumFunction& N, const ScalarPlant& plant, const TimeHorizon& h) {
    check_time(t, h, "nussbaum_pt");
    const double pb = plant.psi_bar(x);
    const double n = N(s.xi);
    if (!std::isfinite(n)) throw NumericError("Nussbaum gain non-finite at xi = " + format_double(s.xi));
    AdaptiveOutput out;
    out.u_bar = g.k * scale_rate(t, h) * x +
                0.5 * (1.0 + s.theta_hat * s.theta_hat * pb * pb + s.delta_hat * (1.0 + pb * pb)) * x;
    out.u = n * out.u_bar;
    out.rates.theta_hat = g.gamma_theta * x * plant.psi(x);
    out.rates.rho_hat = 0.0;
    out.rates.delta_hat = g.gamma_delta * x * x * (1.0 + pb * pb);
    out.rates.xi = x * out.u_bar;
    return out;
}

std::string_view to_string(ScalarControllerKind k) {
    switch (k) {
    case ScalarControllerKind::robust: return "robust";
    case ScalarControllerKind::adaptive_ti: return "adaptive_ti";
    case ScalarControllerKind::adaptive_tv: return "adaptive_tv";
    case ScalarControllerKind::nussbaum: return "nussbaum";
    }
    return "?";
}

ScalarControllerKind parse_scalar_controller(std::string_view name) {
    for (auto k : {ScalarControllerKind::robust, ScalarControllerKind::adaptive_ti,
                   ScalarControllerKind::adaptive_tv, ScalarControllerKind::nussbaum})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown scalar controller '" + std::string(name) + "'");
}

std::vector<std::string> estimate_names(ScalarControllerKind kind) {
    switch (kind) {
    case ScalarControllerKind::robust: return {};
    case ScalarControllerKind::adaptive_ti: return {"theta_hat", "rho_hat"};
    case ScalarControllerKind::adaptive_tv: return {"theta_hat", "rho_hat", "delta_hat"};
    case ScalarControllerKind::nussbaum: return {"theta_hat", "delta_hat", "xi"};
    }
    return {};
}

std::vector<std::string> check_adaptive_preconditions(ScalarControllerKind kind, const AdaptiveGains& g,
                                                      const AdaptiveState& init, const ScalarPlant& plant) {
    std::vector<std::string> v;
    if (kind == ScalarControllerKind::robust) return v;
    if (!(g.k > 0.0)) v.emplace_back("controller.k > 0 violated");
    if (!(g.gamma_theta > 0.0)) v.emplace_back("controller.gamma_theta > 0 violated");
    if (!(init.theta_hat >= 0.0)) v.emplace_back("initial.theta_hat >= 0 violated");

    const std::vector<double> samples = {-2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0};
    for (auto& s : check_envelope_factorization(plant, samples)) v.push_back(std::move(s));

    if (kind == ScalarControllerKind::nussbaum) {
        if (!(g.gamma_delta > 0.0)) v.emplace_back("controller.gamma_delta > 0 violated");
        if (!(init.delta_hat >= 0.0)) v.emplace_back("initial.delta_hat >= 0 violated");
        if (!(init.xi > 0.0)) v.emplace_back("initial.xi > 0 violated");
        return v;
    }

    if (plant.b_sign == SignKnowledge::unknown) {
        v.emplace_back("plant.b_sign unknown: adaptive_ti/adaptive_tv need the sign of b (use nussbaum)");
        return v;
    }
    if (!(g.gamma_rho > 0.0)) v.emplace_back("controller.gamma_rho > 0 violated");
    const double sb = plant.b_sign == SignKnowledge::positive ? 1.0 : -1.0;
    if (!(sb * init.rho_hat > 0.0)) v.emplace_back("initial.rho_hat sign must match sgn(b)");
    if (kind == ScalarControllerKind::adaptive_tv) {
        if (!(g.gamma_delta > 0.0)) v.emplace_back("controller.gamma_delta > 0 violated");
        if (!(init.delta_hat >= 0.0)) v.emplace_back("initial.delta_hat >= 0 violated");
    }
    if (!plant.b_lower || !(*plant.b_lower > 0.0)) {
        v.emplace_back("plant.b_lower > 0 required for the gain condition");
    } else if (init.rho_hat != 0.0) {
        const double k_req = 1.0 / (std::abs(init.rho_hat) * *plant.b_lower);
        if (!(g.k > k_req))
            v.push_back("controller.k > 1/(|rho_hat(0)| b_lower) = " + format_double(k_req) + " violated");
    }
    return v;
}

Trajectory simulate_scalar(const ScalarScenario& sc, const ScalarPlant& plant, const TimeHorizon& h) {
    h.validate();
    std::vector<std::string> errs;
    if (!plant.b || !plant.f || !plant.psi) errs.emplace_back("plant needs b, f and psi");
    if (sc.kind == ScalarControllerKind::robust) {
        if (!(sc.k > 0.0)) errs.emplace_back("controller.k > 0 violated");
        if (!(sc.theta >= 0.0)) errs.emplace_back("controller.theta >= 0 violated");
    } else if (errs.empty()) {
        for (auto& s : check_adaptive_preconditions(sc.kind, sc.gains, sc.initial, plant)) errs.push_back(std::move(s));
    }
    if (!(sc.dt > 0.0)) errs.emplace_back("integration.dt > 0 violated");
    if (!std::isfinite(sc.x0)) errs.emplace_back("initial.x must be finite");
    if (!errs.empty()) throw ValidationError(std::move(errs));

    const auto names = estimate_names(sc.kind);
    Vec x0(1 + static_cast<Eigen::Index>(names.size()));
    x0(0) = sc.x0;

    // unpack the ODE state into the estimate struct for each kind
    auto unpack = [&](const Vec& s) {
        AdaptiveState a = sc.initial;
        switch (sc.kind) {
        case ScalarControllerKind::robust: break;
        case ScalarControllerKind::adaptive_ti: a.theta_hat = s(1); a.rho_hat = s(2); break;
        case ScalarControllerKind::adaptive_tv: a.theta_hat = s(1); a.rho_hat = s(2); a.delta_hat = s(3); break;
        case ScalarControllerKind::nussbaum: a.theta_hat = s(1); a.delta_hat = s(2); a.xi = s(3); break;
        }
        return a;
    };
    switch (sc.kind) {
    case ScalarControllerKind::robust: break;
    case ScalarControllerKind::adaptive_ti: x0 << sc.x0, sc.initial.theta_hat, sc.initial.rho_hat; break;
    case ScalarControllerKind::adaptive_tv:
        x0 << sc.x0, sc.initial.theta_hat, sc.initial.rho_hat, sc.initial.delta_hat;
        break;
    case ScalarControllerKind::nussbaum: x0 << sc.x0, sc.initial.theta_hat, sc.initial.delta_hat, sc.initial.xi; break;
    }

    auto law = [&](double t, const Vec& s) -> AdaptiveOutput {
        switch (sc.kind) {
        case ScalarControllerKind::robust: {
            AdaptiveOutput o;
            o.u = robust_pt(s(0), t, sc.k, sc.theta, plant, h);
            return o;
        }
        case ScalarControllerKind::adaptive_ti: return adaptive_pt_ti(s(0), t, unpack(s), sc.gains, plant, h);
        case ScalarControllerKind::adaptive_tv: return adaptive_pt_tv(s(0), t, unpack(s), sc.gains, plant, h);
        case ScalarControllerKind::nussbaum:
            return nussbaum_pt(s(0), t, unpack(s), sc.gains, sc.nussbaum, plant, h);
        }
        return {};
    };

    auto dynamics = [&](double t, const Vec& s) -> Vec {
        const AdaptiveOutput o = law(t, s);
        Vec ds(s.size());
        ds(0) = plant.b(s(0), t) * o.u + plant.f(s(0), t);
        switch (sc.kind) {
        case ScalarControllerKind::robust: break;
        case ScalarControllerKind::adaptive_ti: ds(1) = o.rates.theta_hat; ds(2) = o.rates.rho_hat; break;
        case ScalarControllerKind::adaptive_tv:
            ds(1) = o.rates.theta_hat; ds(2) = o.rates.rho_hat; ds(3) = o.rates.delta_hat;
            break;
        case ScalarControllerKind::nussbaum:
            ds(1) = o.rates.theta_hat; ds(2) = o.rates.delta_hat; ds(3) = o.rates.xi;
            break;
        }
        return ds;
    };

    IntegrateOptions opts;
    opts.guard = h;
    opts.plant_dim = 1;
    opts.estimate_names = names;
    opts.control = [&](double t, const Vec& s) { return Vec::Constant(1, law(t, s).u); };
    Trajectory traj = integrate(dynamics, x0, Grid{h.stop_time(), sc.dt}, opts);

    // runtime sign contracts on the recorded grid
    if (sc.kind != ScalarControllerKind::robust) {
        const double sb = plant.b_sign == SignKnowledge::negative ? -1.0 : 1.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            Vec s(x0.size());
            s << traj.states[i], traj.estimates[i];
            const AdaptiveOutput o = law(traj.times[i], s);
            if (sc.kind == ScalarControllerKind::nussbaum) {
                if (o.rates.xi < -1e-12) {
                    traj.add_event(traj.times[i], EventKind::hypothesis_warning,
                                   "xi' = " + format_double(o.rates.xi) + " < 0");
                    break;
                }
            } else if (sb * o.rates.rho_hat < -1e-12) {
                traj.add_event(traj.times[i], EventKind::hypothesis_warning,
                               "rho_hat monotonicity violated: rate " + format_double(o.rates.rho_hat));
                break;
            }
        }
    }
    return traj;
}

} // namespace ptlab

#include "ptlab/settling.hpp"

#include "ptlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ptlab {

namespace {

struct KindInfo {
    LyapunovKind kind;
    std::string_view id;
    std::string_view row;
    std::vector<std::string> coefficients;
};

const std::vector<KindInfo>& kind_table() {
    static const std::vector<KindInfo> table = {
        {LyapunovKind::FT1, "FT1", "finite-time: V' <= -k V^q", {"k", "q"}},
        {LyapunovKind::FastFT2, "FastFT2", "fast finite-time: V' <= -k1 V^p - k2 V^q", {"k1", "k2", "p", "q"}},
        {LyapunovKind::SemiGlobal3, "SemiGlobal3", "semi-global finite-time: V' <= -k1 V^q + k2 V", {"k1", "k2", "q"}},
        {LyapunovKind::PracticalFT4, "PracticalFT4", "practical finite-time: V' <= -k V^q + eta", {"k", "q", "eta", "theta"}},
        {LyapunovKind::PracticalFT5, "PracticalFT5", "practical finite-time: V' <= -k1 V^q - k2 V + eta", {"k1", "k2", "q", "eta", "theta"}},
        {LyapunovKind::Fixed6, "Fixed6", "fixed-time: V' <= -(alpha V^p + beta V^q)^k", {"alpha", "beta", "p", "q", "k"}},
        {LyapunovKind::Fixed7, "Fixed7", "fixed-time: V' <= -alpha V^(1-1/2gamma) - beta V^(1+1/2gamma)", {"alpha", "beta", "gamma"}},
        {LyapunovKind::Fixed8, "Fixed8", "fixed-time: V' <= -alpha V^(2-p/q) - beta V^(p/q)", {"alpha", "beta", "p", "q"}},
        {LyapunovKind::Fixed9, "Fixed9", "fixed-time: V' <= -k1 V^(m/n) - k2 V^(p/q)", {"k1", "k2", "m", "n", "p", "q"}},
        {LyapunovKind::Predefined10, "Predefined10", "predefined-time: V' <= -exp(V^p) V^(1-p) / (p Tp)", {"p", "Tp"}},
        {LyapunovKind::PT11, "PT11", "prescribed-time: V' <= -2 k mu V + mu d^2 / (4 theta)", {"k", "theta"}},
        {LyapunovKind::PT12, "PT12", "prescribed-time: V' <= -k mu V + |d|", {"k"}},
    };
    return table;
}

const KindInfo& info(LyapunovKind k) {
    for (const auto& row : kind_table())
        if (row.kind == k) return row;
    throw UnsupportedError("unknown Lyapunov kind");
}

bool is_odd_integer(double v) {
    return std::isfinite(v) && v == std::floor(v) && std::fmod(std::abs(v), 2.0) == 1.0;
}

/// V^a for a Lyapunov value; 0 once V has reached zero.
double lpow(double V, double a) { return V > 0.0 ? std::pow(V, a) : 0.0; }

} // namespace

std::string_view to_string(LyapunovKind k) { return info(k).id; }
std::string_view row_name(LyapunovKind k) { return info(k).row; }
const std::vector<std::string>& required_coefficients(LyapunovKind k) { return info(k).coefficients; }

LyapunovKind parse_lyapunov_kind(std::string_view name) {
    for (const auto& row : kind_table())
        if (row.id == name) return row.kind;
    throw ValidationError("unknown Lyapunov kind '" + std::string(name) + "'");
}

double LyapunovSpec::coef(const std::string& name) const {
    auto it = coefficients.find(name);
    if (it == coefficients.end())
        throw ValidationError("missing coefficient '" + name + "' for " + std::string(to_string(kind)));
    return it->second;
}

std::vector<std::string> check(const LyapunovSpec& spec) {
    std::vector<std::string> v;
    const auto& need = required_coefficients(spec.kind);
    for (const auto& name : need) {
        auto it = spec.coefficients.find(name);
        if (it == spec.coefficients.end())
            v.push_back("missing coefficient '" + name + "'");
        else if (!std::isfinite(it->second))
            v.push_back("coefficient '" + name + "' is not finite");
    }
    for (const auto& [name, value] : spec.coefficients)
        if (std::find(need.begin(), need.end(), name) == need.end())
            v.push_back("unexpected coefficient '" + name + "' for " + std::string(to_string(spec.kind)));
    if (!(spec.V0 >= 0.0) || !std::isfinite(spec.V0)) v.push_back("V0 >= 0 violated");
    if (!v.empty()) return v;

    auto c = [&](const char* n) { return spec.coefficients.at(n); };
    auto need_pos = [&](const char* n) {
        if (!(c(n) > 0.0)) v.push_back(std::string(n) + " > 0 violated");
    };
    auto need_unit = [&](const char* n) {
        if (!(c(n) > 0.0 && c(n) < 1.0)) v.push_back(std::string("0 < ") + n + " < 1 violated");
    };

    switch (spec.kind) {
    case LyapunovKind::FT1:
        need_pos("k");
        need_unit("q");
        break;
    case LyapunovKind::FastFT2:
        need_pos("k1");
        need_pos("k2");
        need_unit("q");
        if (!(c("p") >= 1.0)) v.emplace_back("p >= 1 violated");
        // the p > 1 formula splits the run at V = 1 and is only valid from above it
        if (c("p") > 1.0 && spec.V0 < 1.0) v.emplace_back("p > 1 branch requires V0 >= 1");
        break;
    case LyapunovKind::SemiGlobal3:
        need_pos("k1");
        need_pos("k2");
        need_unit("q");
        break;
    case LyapunovKind::PracticalFT4:
        need_pos("k");
        need_pos("eta");
        need_unit("q");
        need_unit("theta");
        break;
    case LyapunovKind::PracticalFT5:
        need_pos("k1");
        need_pos("k2");
        need_pos("eta");
        need_unit("q");
        need_unit("theta");
        break;
    case LyapunovKind::Fixed6:
        need_pos("alpha");
        need_pos("beta");
        need_pos("p");
        need_pos("q");
        need_pos("k");
        if (!(c("p") * c("k") < 1.0)) v.emplace_back("p k < 1 violated");
        if (!(c("q") * c("k") > 1.0)) v.emplace_back("q k > 1 violated");
        break;
    case LyapunovKind::Fixed7:
        need_pos("alpha");
        need_pos("beta");
        if (!(c("gamma") > 1.0)) v.emplace_back("gamma > 1 violated");
        break;
    case LyapunovKind::Fixed8:
        need_pos("alpha");
        need_pos("beta");
        if (!(c("q") > c("p") && c("p") > 0.0)) v.emplace_back("q > p > 0 violated");
        if (!is_odd_integer(c("p")) || !is_odd_integer(c("q"))) v.emplace_back("p, q odd integers violated");
        break;
    case LyapunovKind::Fixed9:
        need_pos("k1");
        need_pos("k2");
        if (!(c("q") > c("p") && c("p") > 0.0)) v.emplace_back("q > p > 0 violated");
        if (!(c("m") > c("n") && c("n") > 0.0)) v.emplace_back("m > n > 0 violated");
        for (const char* n : {"m", "n", "p", "q"})
            if (!is_odd_integer(c(n))) v.push_back(std::string(n) + " odd integer violated");
        break;
    case LyapunovKind::Predefined10:
        if (!(c("p") > 0.0 && c("p") <= 1.0)) v.emplace_back("0 < p <= 1 violated");
        need_pos("Tp");
        break;
    case LyapunovKind::PT11:
        need_pos("k");
        need_pos("theta");
        break;
    case LyapunovKind::PT12:
        need_pos("k");
        break;
    }
    return v;
}

void validate(const LyapunovSpec& spec) {
    auto v = check(spec);
    if (!v.empty()) throw ValidationError(std::move(v));
}

double residual_level(const LyapunovSpec& spec) {
    switch (spec.kind) {
    case LyapunovKind::PracticalFT4: {
        const double k = spec.coef("k"), q = spec.coef("q"), eta = spec.coef("eta"), th = spec.coef("theta");
        return std::pow(eta / (k * (1.0 - th)), 1.0 / q);
    }
    case LyapunovKind::PracticalFT5: {
        // V leaves each region where one decay term dominates eta; the run ends
        // inside both, i.e. below the smaller level.
        const double k1 = spec.coef("k1"), k2 = spec.coef("k2"), q = spec.coef("q");
        const double eta = spec.coef("eta"), th = spec.coef("theta");
        const double by_power = std::pow(eta / ((1.0 - th) * k1), 1.0 / q);
        const double by_linear = eta / ((1.0 - th) * k2);
        return std::min(by_power, by_linear);
    }
    default: return 0.0;
    }
}

double settle_threshold(const LyapunovSpec& spec) {
    if (spec.kind == LyapunovKind::PracticalFT4 || spec.kind == LyapunovKind::PracticalFT5)
        return 1.1 * residual_level(spec);
    return 1e-6 * std::max(1.0, spec.V0);
}

double settling_bound(const LyapunovSpec& spec) {
    validate(spec);
    const double V0 = spec.V0;
    using std::numbers::pi;
    switch (spec.kind) {
    case LyapunovKind::FT1: {
        const double k = spec.coef("k"), q = spec.coef("q");
        return std::pow(V0, 1.0 - q) / (k * (1.0 - q));
    }
    case LyapunovKind::FastFT2: {
        const double k1 = spec.coef("k1"), k2 = spec.coef("k2"), p = spec.coef("p"), q = spec.coef("q");
        if (p == 1.0) return std::log1p(k1 / k2 * std::pow(V0, 1.0 - q)) / (k1 * (1.0 - q));
        return 1.0 / (k2 * (1.0 - q)) + (std::pow(V0, 1.0 - p) - 1.0) / (k1 * (1.0 - p));
    }
    case LyapunovKind::SemiGlobal3: {
        // V^(1-q) obeys W' = (1-q)(k2 W - k1): it reaches 0 only when k2 W0 < k1
        const double k1 = spec.coef("k1"), k2 = spec.coef("k2"), q = spec.coef("q");
        const double arg = 1.0 - k2 / k1 * std::pow(V0, 1.0 - q);
        if (!(arg > 0.0))
            throw BoundUndefined("bound undefined for these parameters: 1 - (k2/k1) V0^(1-q) = " +
                                 format_double(arg) + " <= 0");
        return -std::log(arg) / (k2 * (1.0 - q));
    }
    case LyapunovKind::PracticalFT4: {
        const double k = spec.coef("k"), q = spec.coef("q"), eta = spec.coef("eta"), th = spec.coef("theta");
        const double t = (std::pow(V0, 1.0 - q) - std::pow(eta / (k * (1.0 - th)), (1.0 - q) / q)) /
                         (k * th * (1.0 - q));
        return std::max(0.0, t);
    }
    case LyapunovKind::PracticalFT5: {
        const double k1 = spec.coef("k1"), k2 = spec.coef("k2"), q = spec.coef("q"), th = spec.coef("theta");
        const double w = std::pow(V0, 1.0 - q);
        const double a = std::log((k2 * th * w + k1) / k1) / (k2 * th * (1.0 - q));
        const double b = std::log((k2 * w + th * k1) / (th * k1)) / (k2 * (1.0 - q));
        return std::max(a, b);
    }
    case LyapunovKind::Fixed6: {
        const double al = spec.coef("alpha"), be = spec.coef("beta"), p = spec.coef("p");
        const double q = spec.coef("q"), k = spec.coef("k");
        return 1.0 / (std::pow(al, k) * (1.0 - p * k)) + 1.0 / (std::pow(be, k) * (q * k - 1.0));
    }
    case LyapunovKind::Fixed7:
        return pi * spec.coef("gamma") / std::sqrt(spec.coef("alpha") * spec.coef("beta"));
    case LyapunovKind::Fixed8: {
        const double p = spec.coef("p"), q = spec.coef("q");
        return q * pi / (2.0 * std::sqrt(spec.coef("alpha") * spec.coef("beta")) * (q - p));
    }
    case LyapunovKind::Fixed9: {
        const double m = spec.coef("m"), n = spec.coef("n"), p = spec.coef("p"), q = spec.coef("q");
        return n / (spec.coef("k1") * (m - n)) + q / (spec.coef("k2") * (q - p));
    }
    case LyapunovKind::Predefined10: return spec.coef("Tp");
    case LyapunovKind::PT11:
    case LyapunovKind::PT12:
        throw UnsupportedError(std::string(to_string(spec.kind)) +
                               ": settling time is the prescribed horizon T itself");
    }
    throw UnsupportedError("unknown Lyapunov kind");
}

double inequality_rhs(const LyapunovSpec& spec, double t, double V, double d, const TimeHorizon* horizon) {
    const auto& cf = spec.coefficients;
    auto c = [&](const char* n) { return cf.at(n); };
    switch (spec.kind) {
    case LyapunovKind::FT1: return -c("k") * lpow(V, c("q"));
    case LyapunovKind::FastFT2: return -c("k1") * lpow(V, c("p")) - c("k2") * lpow(V, c("q"));
    case LyapunovKind::SemiGlobal3: return -c("k1") * lpow(V, c("q")) + c("k2") * std::max(V, 0.0);
    case LyapunovKind::PracticalFT4: return -c("k") * lpow(V, c("q")) + c("eta");
    case LyapunovKind::PracticalFT5:
        return -c("k1") * lpow(V, c("q")) - c("k2") * std::max(V, 0.0) + c("eta");
    case LyapunovKind::Fixed6:
        return -std::pow(c("alpha") * lpow(V, c("p")) + c("beta") * lpow(V, c("q")), c("k"));
    case LyapunovKind::Fixed7: {
        const double g = c("gamma");
        return -c("alpha") * lpow(V, 1.0 - 0.5 / g) - c("beta") * lpow(V, 1.0 + 0.5 / g);
    }
    case LyapunovKind::Fixed8: {
        const double r = c("p") / c("q");
        return -c("alpha") * lpow(V, 2.0 - r) - c("beta") * lpow(V, r);
    }
    case LyapunovKind::Fixed9:
        return -c("k1") * lpow(V, c("m") / c("n")) - c("k2") * lpow(V, c("p") / c("q"));
    case LyapunovKind::Predefined10: {
        if (!(V > 0.0)) return 0.0;
        const double p = c("p");
        return -std::exp(std::pow(V, p)) * std::pow(V, 1.0 - p) / (p * c("Tp"));
    }
    case LyapunovKind::PT11: {
        const double m = mu(t, *horizon);
        return -2.0 * c("k") * m * V + m * d * d / (4.0 * c("theta"));
    }
    case LyapunovKind::PT12: return -c("k") * mu(t, *horizon) * V + std::abs(d);
    }
    return 0.0;
}

InequalityRun simulate_inequality(const LyapunovSpec& spec, const InequalityOptions& options) {
    validate(spec);
    const bool pt = spec.kind == LyapunovKind::PT11 || spec.kind == LyapunovKind::PT12;
    std::vector<std::string> errs;
    if (!(options.dt > 0.0)) errs.emplace_back("dt > 0 violated");
    if (pt && !options.horizon) errs.emplace_back(std::string(to_string(spec.kind)) + " requires a TimeHorizon");
    if (options.horizon) options.horizon->validate();
    if (!errs.empty()) throw ValidationError(std::move(errs));

    double t_end;
    if (options.t_end) {
        t_end = *options.t_end;
    } else if (options.horizon) {
        t_end = options.horizon->stop_time();
    } else {
        // a zero bound (V0 already inside the residual set) still gets a short run
        t_end = std::max(1.25 * settling_bound(spec), 100.0 * options.dt);
    }
    if (options.horizon && t_end > options.horizon->stop_time() * (1.0 + 1e-12))
        throw ValidationError("t_end exceeds T - epsilon of the attached horizon");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be finite and > 0");

    const TimeHorizon* horizon = options.horizon ? &*options.horizon : nullptr;
    const double stop = horizon ? horizon->stop_time() : t_end;
    auto dist = [&](double t) { return options.disturbance ? (*options.disturbance)(t) : 0.0; };
    auto f = [&](double t, double V) {
        const double ts = std::min(t, stop);
        return inequality_rhs(spec, ts, std::max(V, 0.0), dist(ts), horizon);
    };

    InequalityRun run;
    run.threshold = options.threshold.value_or(settle_threshold(spec));

    const auto n = static_cast<std::size_t>(std::floor(t_end / options.dt + 1e-9));
    std::vector<double> times;
    times.reserve(n + 2);
    for (std::size_t k = 0; k <= n; ++k) times.push_back(std::min(static_cast<double>(k) * options.dt, t_end));
    if (t_end - times.back() > 1e-9 * options.dt) times.push_back(t_end);

    std::vector<double> values;
    values.reserve(times.size());
    double V = spec.V0;
    values.push_back(V);
    if (V == 0.0) run.zero_time = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double t = times[k - 1];
        const double h = times[k] - t;
        const double k1 = f(t, V);
        const double k2 = f(t + 0.5 * h, V + 0.5 * h * k1);
        const double k3 = f(t + 0.5 * h, V + 0.5 * h * k2);
        const double k4 = f(t + h, V + h * k3);
        double next = V + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::isnan(next))
            throw NumericError("simulate_inequality: NaN at t = " + format_double(times[k]));
        if (next < 0.0) {
            ++run.clamp_count;
            run.trajectory.add_event(times[k], EventKind::clamp, "V = " + format_double(next) + " clamped to 0");
            next = 0.0;
        }
        V = next;
        values.push_back(V);
        if (V == 0.0 && !run.zero_time) run.zero_time = times[k];
    }

    if (auto idx = settle_index(values, run.threshold)) {
        run.settle_time = times[*idx];
        run.trajectory.add_event(times[*idx], EventKind::settled,
                                 "V <= " + format_double(run.threshold) + " through the end");
    }

    run.trajectory.times = std::move(times);
    run.trajectory.states.reserve(values.size());
    for (double v : values) run.trajectory.states.push_back(Vec::Constant(1, v));
    return run;
}

LyapunovSpec draw_spec(LyapunovKind kind, Xorshift64& rng) {
    LyapunovSpec s;
    s.kind = kind;
    auto gain = [&] { return rng.log_uniform(0.5, 5.0); };
    auto unit = [&] { return rng.uniform(0.1, 0.9); };
    auto odd = [&](std::int64_t lo_index, std::int64_t hi_index) {
        return static_cast<double>(2 * rng.integer(lo_index, hi_index) + 1);
    };
    s.V0 = rng.log_uniform(0.1, 10.0);
    auto& c = s.coefficients;
    switch (kind) {
    case LyapunovKind::FT1:
        c = {{"k", gain()}, {"q", unit()}};
        break;
    case LyapunovKind::FastFT2: {
        const bool linear = rng.uniform() < 0.5;
        c = {{"k1", gain()}, {"k2", gain()}, {"q", unit()}, {"p", linear ? 1.0 : rng.uniform(1.1, 3.0)}};
        if (!linear) s.V0 = rng.log_uniform(1.0, 100.0);
        break;
    }
    case LyapunovKind::SemiGlobal3: {
        const double k1 = gain(), k2 = rng.log_uniform(0.1, 1.0), q = unit();
        c = {{"k1", k1}, {"k2", k2}, {"q", q}};
        s.V0 = std::pow(rng.uniform(0.05, 0.8) * k1 / k2, 1.0 / (1.0 - q));
        break;
    }
    case LyapunovKind::PracticalFT4:
        c = {{"k", gain()}, {"q", unit()}, {"eta", rng.uniform(0.01, 0.5)}, {"theta", unit()}};
        break;
    case LyapunovKind::PracticalFT5:
        c = {{"k1", gain()}, {"k2", gain()}, {"q", unit()}, {"eta", rng.uniform(0.01, 0.5)}, {"theta", unit()}};
        break;
    case LyapunovKind::Fixed6: {
        const double k = rng.uniform(0.5, 2.0);
        c = {{"alpha", gain()}, {"beta", gain()}, {"k", k}, {"p", unit() / k}, {"q", rng.uniform(1.1, 3.0) / k}};
        break;
    }
    case LyapunovKind::Fixed7:
        c = {{"alpha", gain()}, {"beta", gain()}, {"gamma", rng.uniform(1.1, 5.0)}};
        break;
    case LyapunovKind::Fixed8: {
        const double p = odd(0, 3);
        c = {{"alpha", gain()}, {"beta", gain()}, {"p", p}, {"q", p + 2.0 * static_cast<double>(rng.integer(1, 3))}};
        break;
    }
    case LyapunovKind::Fixed9: {
        const double n = odd(0, 3), p = odd(0, 3);
        c = {{"k1", gain()},
             {"k2", gain()},
             {"n", n},
             {"m", n + 2.0 * static_cast<double>(rng.integer(1, 3))},
             {"p", p},
             {"q", p + 2.0 * static_cast<double>(rng.integer(1, 3))}};
        break;
    }
    case LyapunovKind::Predefined10:
        c = {{"p", rng.uniform(0.1, 1.0)}, {"Tp", rng.uniform(0.5, 5.0)}};
        break;
    case LyapunovKind::PT11:
    case LyapunovKind::PT12:
        throw UnsupportedError("draw_spec: " + std::string(to_string(kind)) + " has no closed-form bound to sample");
    }
    return s;
}

} // namespace ptlab

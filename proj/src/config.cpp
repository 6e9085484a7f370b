#include "ptlab/config.hpp"

#include "ptlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace ptlab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i < s.size() && s[i] == '(') ++depth;
        if (i < s.size() && s[i] == ')') --depth;
        if (i == s.size() || (s[i] == sep && depth == 0)) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::optional<double> to_number(std::string_view text) {
    const std::string s = trim(text);
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

} // namespace

RawConfig parse_config(std::istream& in, const std::string& source) {
    RawConfig cfg;
    cfg.source = source;
    std::vector<std::string> errs;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            errs.push_back(source + ":" + std::to_string(lineno) + ": parse error: expected 'key = value'");
            continue;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const bool key_ok = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_';
        });
        if (!key_ok) {
            errs.push_back(source + ":" + std::to_string(lineno) + ": parse error: bad key '" + key + "'");
            continue;
        }
        if (value.empty()) {
            errs.push_back(source + ":" + std::to_string(lineno) + ": parse error: empty value for '" + key + "'");
            continue;
        }
        if (auto it = cfg.entries.find(key); it != cfg.entries.end()) {
            errs.push_back(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "' (first on line " +
                           std::to_string(it->second.line) + ")");
            continue;
        }
        cfg.entries[key] = ConfigEntry{value, lineno};
    }
    if (!errs.empty()) throw ValidationError(std::move(errs));
    return cfg;
}

RawConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    RawConfig cfg = parse_config(in, path);
    cfg.base_dir = std::filesystem::path(path).parent_path().string();
    return cfg;
}

Command parse_command(std::string_view name) {
    if (name == "simulate") return Command::simulate;
    if (name == "compare") return Command::compare;
    if (name == "bound") return Command::bound;
    if (name == "consensus") return Command::consensus;
    if (name == "containment") return Command::containment;
    throw ValidationError("unknown command '" + std::string(name) +
                          "' (simulate, compare, bound, consensus, containment)");
}

std::string_view to_string(Command c) {
    switch (c) {
    case Command::simulate: return "simulate";
    case Command::compare: return "compare";
    case Command::bound: return "bound";
    case Command::consensus: return "consensus";
    case Command::containment: return "containment";
    }
    return "?";
}

Signal parse_signal(std::string_view text) {
    const std::string s = trim(text);
    if (auto v = to_number(s)) return Signal::constant(*v);
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw ValidationError("bad signal '" + s + "' (constant(v), sinusoid(o, a, w), square(o, a, w))");
    const std::string name = trim(s.substr(0, open));
    std::vector<double> args;
    for (const auto& part : split(std::string_view(s).substr(open + 1, s.size() - open - 2), ',')) {
        auto v = to_number(part);
        if (!v || !std::isfinite(*v)) throw ValidationError("bad signal argument '" + part + "' in '" + s + "'");
        args.push_back(*v);
    }
    const Signal::Kind kind = parse_signal_kind(name);
    if (kind == Signal::Kind::constant) {
        if (args.size() != 1) throw ValidationError("constant(v) takes one argument");
        return Signal::constant(args[0]);
    }
    if (args.size() != 3) throw ValidationError(name + "(offset, amplitude, frequency) takes three arguments");
    return kind == Signal::Kind::sinusoid ? Signal::sinusoid(args[0], args[1], args[2])
                                          : Signal::square(args[0], args[1], args[2]);
}

std::string format_signal(const Signal& s) {
    if (s.kind == Signal::Kind::constant) return "constant(" + format_double(s.offset + s.amplitude) + ")";
    return std::string(to_string(s.kind)) + "(" + format_double(s.offset) + ", " + format_double(s.amplitude) + ", " +
           format_double(s.frequency) + ")";
}

EnvelopeKind parse_envelope(std::string_view name) {
    if (name == "x^2") return EnvelopeKind::quadratic;
    if (name == "x") return EnvelopeKind::linear;
    if (name == "x+x^3") return EnvelopeKind::cubic;
    if (name == "1+x^2") return EnvelopeKind::offset_quadratic;
    throw ValidationError("unknown envelope '" + std::string(name) + "' (x^2, x, x+x^3, 1+x^2)");
}

std::string_view to_string(EnvelopeKind e) {
    switch (e) {
    case EnvelopeKind::quadratic: return "x^2";
    case EnvelopeKind::linear: return "x";
    case EnvelopeKind::cubic: return "x+x^3";
    case EnvelopeKind::offset_quadratic: return "1+x^2";
    }
    return "?";
}

ScalarPlant ScalarSimConfig::plant(const Signal& d) const {
    ScalarPlant p;
    const Signal bs = b;
    p.b = [bs](double, double t) { return bs(t); };
    p.b_sign = b_sign;
    p.b_lower = b_lower;
    switch (envelope) {
    case EnvelopeKind::quadratic:
        p.psi = [](double x) { return x * x; };
        p.psi_bar = [](double x) { return x; };
        break;
    case EnvelopeKind::linear:
        p.psi = [](double x) { return x; };
        p.psi_bar = [](double) { return 1.0; };
        break;
    case EnvelopeKind::cubic:
        p.psi = [](double x) { return x + x * x * x; };
        p.psi_bar = [](double x) { return 1.0 + x * x; };
        break;
    case EnvelopeKind::offset_quadratic:
        p.psi = [](double x) { return 1.0 + x * x; };
        break;
    }
    const auto psi = p.psi;
    p.f = [psi, d](double x, double t) { return d(t) * psi(x); };
    return p;
}

std::vector<ComparisonScenario> CompareConfig::scenarios() const {
    std::vector<ComparisonScenario> out;
    for (auto kind : kinds)
        for (const auto& x : x0) {
            ComparisonScenario s;
            s.kind = kind;
            s.x0 = x;
            s.params = params;
            s.dt = dt;
            s.horizon = horizon;
            s.stop_margin = stop_margin;
            out.push_back(s);
        }
    return out;
}

namespace {

/// Typed, error-collecting access to a RawConfig; remembers which keys were read.
class Reader {
public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.entries.count(key) != 0; }

    std::optional<std::string> text(const std::string& key) {
        used_.insert(key);
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return std::nullopt;
        return it->second.value;
    }

    std::string text(const std::string& key, const std::string& def) { return text(key).value_or(def); }

    std::optional<double> number(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        auto v = to_number(*t);
        if (!v || std::isnan(*v)) {
            fail(key, "expected a number, got '" + *t + "'");
            return std::nullopt;
        }
        return v;
    }

    double number(const std::string& key, double def) { return number(key).value_or(def); }

    std::optional<long long> integer(const std::string& key) {
        auto v = number(key);
        if (!v) return std::nullopt;
        if (*v != std::floor(*v) || std::abs(*v) > 9e15) {
            fail(key, "expected an integer");
            return std::nullopt;
        }
        return static_cast<long long>(*v);
    }

    bool boolean(const std::string& key, bool def) {
        auto t = text(key);
        if (!t) return def;
        if (*t == "true" || *t == "1" || *t == "yes") return true;
        if (*t == "false" || *t == "0" || *t == "no") return false;
        fail(key, "expected true or false");
        return def;
    }

    /// ';'-separated entries (',' also accepted for scalar lists).
    std::vector<double> numbers(const std::string& key) {
        std::vector<double> out;
        auto t = text(key);
        if (!t) return out;
        const char sep = t->find(';') != std::string::npos ? ';' : ',';
        for (const auto& part : split(*t, sep)) {
            auto v = to_number(part);
            if (!v || !std::isfinite(*v)) {
                fail(key, "bad number '" + part + "'");
                return {};
            }
            out.push_back(*v);
        }
        return out;
    }

    std::vector<Vec> vectors(const std::string& key) {
        std::vector<Vec> out;
        auto t = text(key);
        if (!t) return out;
        for (const auto& entry : split(*t, ';')) {
            const auto parts = split(entry, ',');
            Vec v(static_cast<Eigen::Index>(parts.size()));
            for (std::size_t i = 0; i < parts.size(); ++i) {
                auto x = to_number(parts[i]);
                if (!x || !std::isfinite(*x)) {
                    fail(key, "bad number '" + parts[i] + "'");
                    return {};
                }
                v(static_cast<Eigen::Index>(i)) = *x;
            }
            out.push_back(v);
        }
        return out;
    }

    std::vector<Signal> signals(const std::string& key) {
        std::vector<Signal> out;
        auto t = text(key);
        if (!t) return out;
        for (const auto& entry : split(*t, ';')) {
            try {
                out.push_back(parse_signal(entry));
            } catch (const ValidationError& e) {
                fail(key, e.what());
            }
        }
        return out;
    }

    template <class F>
    auto parsed(const std::string& key, F&& parse) -> std::optional<decltype(parse(std::string_view{}))> {
        auto t = text(key);
        if (!t) return std::nullopt;
        try {
            return parse(std::string_view(*t));
        } catch (const ValidationError& e) {
            fail(key, e.what());
            return std::nullopt;
        }
    }

    void require(bool ok, const std::string& key, const std::string& constraint) {
        if (!ok) fail(key, "constraint " + constraint + " violated");
    }

    void fail(const std::string& key, const std::string& msg) {
        auto it = raw_.entries.find(key);
        const std::string where = it != raw_.entries.end() ? " (line " + std::to_string(it->second.line) + ")" : "";
        errs_.push_back(key + where + ": " + msg);
    }

    void error(const std::string& msg) { errs_.push_back(msg); }

    void finish(std::string_view command) {
        for (const auto& [key, entry] : raw_.entries)
            if (!used_.count(key))
                errs_.push_back(key + " (line " + std::to_string(entry.line) + "): unknown key for command '" +
                                std::string(command) + "'");
        if (!errs_.empty()) throw ValidationError(std::move(errs_));
    }

    const RawConfig& raw() const { return raw_; }

private:
    const RawConfig& raw_;
    std::set<std::string> used_;
    std::vector<std::string> errs_;
};

void read_horizon(Reader& r, ScenarioConfig& cfg) {
    const double T = r.number("horizon.T", 1.0);
    r.require(T > 0.0 && std::isfinite(T), "horizon.T", "T > 0");
    const auto eps = r.number("horizon.epsilon");
    const auto cap = r.number("horizon.mu_cap");
    if (eps) r.require(*eps > 0.0 && *eps < T, "horizon.epsilon", "0 < epsilon < T");
    if (cap) r.require(*cap >= 1.0, "horizon.mu_cap", "mu_cap >= 1");
    cfg.horizon.T = T > 0.0 && std::isfinite(T) ? T : 1.0;
    cfg.horizon.stop_margin = eps && *eps > 0.0 && *eps < T ? *eps : 1e-4 * cfg.horizon.T;
    cfg.horizon.mu_cap = cap && *cap >= 1.0 ? *cap : 1e6;
}

double read_dt(Reader& r) {
    const double dt = r.number("integration.dt", 1e-4);
    r.require(dt > 0.0 && std::isfinite(dt), "integration.dt", "dt > 0");
    return dt > 0.0 ? dt : 1e-4;
}

void read_scalar(Reader& r, ScenarioConfig& cfg) {
    ScalarSimConfig s;
    auto& sc = s.scenario;
    sc.dt = read_dt(r);
    if (auto kind = r.parsed("controller.kind", parse_scalar_controller)) sc.kind = *kind;
    else if (!r.has("controller.kind")) r.fail("controller.kind", "required (robust, adaptive_ti, adaptive_tv, nussbaum)");

    const bool robust = sc.kind == ScalarControllerKind::robust;
    sc.k = r.number("controller.k", robust ? 1.0 : 2.0);
    r.require(sc.k > 0.0, "controller.k", "k > 0");
    sc.gains.k = sc.k;
    if (robust) {
        sc.theta = r.number("controller.theta", 1.0);
        r.require(sc.theta >= 0.0, "controller.theta", "theta >= 0");
    } else {
        sc.gains.gamma_theta = r.number("controller.gamma_theta", 1.0);
        r.require(sc.gains.gamma_theta > 0.0, "controller.gamma_theta", "gamma_theta > 0");
        if (sc.kind != ScalarControllerKind::nussbaum) {
            sc.gains.gamma_rho = r.number("controller.gamma_rho", 1.0);
            r.require(sc.gains.gamma_rho > 0.0, "controller.gamma_rho", "gamma_rho > 0");
            sc.initial.rho_hat = r.number("initial.rho_hat", 1.0);
        }
        if (sc.kind == ScalarControllerKind::adaptive_tv || sc.kind == ScalarControllerKind::nussbaum) {
            sc.gains.gamma_delta = r.number("controller.gamma_delta", 1.0);
            r.require(sc.gains.gamma_delta > 0.0, "controller.gamma_delta", "gamma_delta > 0");
            sc.initial.delta_hat = r.number("initial.delta_hat", 0.0);
        }
        sc.initial.theta_hat = r.number("initial.theta_hat", 0.0);
        if (sc.kind == ScalarControllerKind::nussbaum) sc.initial.xi = r.number("initial.xi", 0.5);
    }

    if (auto b = r.signals("plant.b"); !b.empty()) {
        if (b.size() != 1) r.fail("plant.b", "expected a single signal");
        s.b = b.front();
    }
    auto sign = r.parsed("plant.b_sign", [](std::string_view v) {
        if (v == "positive") return SignKnowledge::positive;
        if (v == "negative") return SignKnowledge::negative;
        if (v == "unknown") return SignKnowledge::unknown;
        throw ValidationError("expected positive, negative or unknown");
    });
    s.b_sign = sign.value_or(sc.kind == ScalarControllerKind::nussbaum ? SignKnowledge::unknown
                                                                       : SignKnowledge::positive);
    s.b_lower = r.number("plant.b_lower");
    if (s.b_lower) r.require(*s.b_lower > 0.0, "plant.b_lower", "b_lower > 0");
    if (auto env = r.parsed("plant.psi", parse_envelope)) s.envelope = *env;
    else if (!robust) s.envelope = EnvelopeKind::quadratic;

    // the controller never reads b, but a plant whose sign contradicts the declaration is a config mistake
    const bool constant_b = s.b.kind == Signal::Kind::constant;
    const double b_min = constant_b ? s.b(0.0) : s.b.offset - std::abs(s.b.amplitude);
    const double b_max = constant_b ? s.b(0.0) : s.b.offset + std::abs(s.b.amplitude);
    if (s.b_sign == SignKnowledge::positive) r.require(b_min > 0.0, "plant.b", "b(t) > 0 for b_sign = positive");
    if (s.b_sign == SignKnowledge::negative) r.require(b_max < 0.0, "plant.b", "b(t) < 0 for b_sign = negative");
    if (s.b_sign != SignKnowledge::unknown && !s.b_lower && b_min * b_max > 0.0)
        s.b_lower = std::min(std::abs(b_min), std::abs(b_max));

    if (auto d = r.signals("disturbance"); !d.empty()) s.disturbances = d;
    if (auto x = r.numbers("initial.x"); !x.empty()) s.x0 = x;
    s.settle_threshold = r.number("analysis.threshold", 1e-2);
    r.require(s.settle_threshold > 0.0, "analysis.threshold", "threshold > 0");

    if (!robust) {
        if (s.envelope == EnvelopeKind::offset_quadratic)
            r.fail("plant.psi", "adaptive laws need psi(0) = 0 with a factor psi = psi_bar x (x^2, x, x+x^3)");
        else
            for (const auto& msg : check_adaptive_preconditions(sc.kind, sc.gains, sc.initial, s.plant(s.disturbances.front())))
                r.error("controller/initial: " + msg);
    }
    cfg.body = s;
}

void read_mimo(Reader& r, ScenarioConfig& cfg) {
    MimoSimConfig s;
    s.dt = read_dt(r);
    const auto kind = r.text("controller.kind", "mimo");
    if (kind != "mimo") r.fail("controller.kind", "expected 'mimo' for plant.kind = mimo");
    const auto n = r.integer("plant.n");
    const auto m = r.integer("plant.m");
    s.n = n.value_or(2);
    s.m = m.value_or(s.n);
    r.require(s.n >= 1 && s.n <= 16, "plant.n", "1 <= n <= 16");
    r.require(s.m >= s.n && s.m <= 16, "plant.m", "n <= m <= 16");
    s.count = static_cast<int>(r.integer("plant.count").value_or(1));
    r.require(s.count >= 1, "plant.count", "count >= 1");
    s.margin = r.number("plant.margin", 0.5);
    r.require(s.margin > 0.0, "plant.margin", "margin > 0");
    s.k = r.number("controller.k", 1.0);
    r.require(s.k > 0.0, "controller.k", "k > 0");
    s.theta = r.number("controller.theta", 1.0);
    r.require(s.theta >= 0.0, "controller.theta", "theta >= 0");
    if (auto d = r.signals("disturbance"); !d.empty()) {
        if (d.size() != 1) r.fail("disturbance", "expected a single signal");
        s.disturbance = d.front();
    }
    s.x0 = r.vectors("initial.x");
    for (const auto& x : s.x0)
        if (x.size() != s.n) {
            r.fail("initial.x", "each vector needs n = " + std::to_string(s.n) + " components");
            break;
        }
    if (s.x0.size() > 1 && static_cast<int>(s.x0.size()) != s.count)
        r.fail("initial.x", "give one vector or plant.count vectors");
    cfg.body = s;
}

void read_compare(Reader& r, ScenarioConfig& cfg) {
    CompareConfig c;
    c.dt = read_dt(r);
    const std::string mode = r.text("compare.mode", "double_integrator");
    if (mode == "equivalence") {
        c.mode = CompareMode::equivalence;
        c.alphas = r.numbers("compare.alpha");
        if (c.alphas.empty()) c.alphas = {1.0 / 3.0, 0.5, 2.0 / 3.0};
        for (double a : c.alphas) r.require(a > 0.0 && a < 1.0, "compare.alpha", "0 < alpha < 1");
        c.x0_scalar = r.numbers("initial.x");
        if (c.x0_scalar.empty()) c.x0_scalar = {-1.0, 0.5, 2.0};
        c.k = r.number("controller.k", 1.0);
        r.require(c.k > 0.0, "controller.k", "k > 0");
    } else if (mode == "double_integrator") {
        auto kinds = r.text("controller.kinds", "finite; fixed; predefined; prescribed");
        for (const auto& k : split(kinds, ';')) {
            try {
                c.kinds.push_back(parse_double_integrator_kind(k));
            } catch (const ValidationError& e) {
                r.fail("controller.kinds", e.what());
            }
        }
        for (const auto& v : r.vectors("initial.x")) {
            if (v.size() != 2) {
                r.fail("initial.x", "double-integrator states have two components");
                break;
            }
            c.x0.emplace_back(v(0), v(1));
        }
        if (c.x0.empty()) c.x0 = {Eigen::Vector2d(0.2, -0.2), Eigen::Vector2d(0.4, 0.0)};
        c.params.T = cfg.horizon.T;
        c.params.T1 = r.number("controller.T1", 0.2);
        c.params.T2 = r.number("controller.T2", 0.8);
        r.require(c.params.T1 > 0.0, "controller.T1", "T1 > 0");
        r.require(c.params.T2 > 0.0, "controller.T2", "T2 > 0");
        c.horizon = r.number("integration.t_end");
        if (c.horizon) r.require(*c.horizon > 0.0, "integration.t_end", "t_end > 0");
        c.stop_margin = cfg.horizon.stop_margin;
        c.plot_script = r.boolean("output.plot_script", true);
    } else {
        r.fail("compare.mode", "expected double_integrator or equivalence");
    }
    cfg.body = c;
}

void read_bound(Reader& r, ScenarioConfig& cfg) {
    BoundConfig b;
    b.dt = read_dt(r);
    const auto kinds = r.text("lyapunov.kind");
    if (!kinds) r.fail("lyapunov.kind", "required");
    else
        for (const auto& k : split(*kinds, ';')) {
            try {
                b.kinds.push_back(parse_lyapunov_kind(k));
            } catch (const ValidationError& e) {
                r.fail("lyapunov.kind", e.what());
            }
        }
    b.draws = static_cast<int>(r.integer("lyapunov.draws").value_or(0));
    r.require(b.draws >= 0 && b.draws <= 10000, "lyapunov.draws", "0 <= draws <= 10000");
    b.V0 = r.number("lyapunov.V0", 1.0);
    for (const char* name : {"k", "q", "k1", "k2", "p", "eta", "theta", "alpha", "beta", "gamma", "m", "n", "Tp"})
        if (auto v = r.number(std::string("lyapunov.") + name)) b.coefficients[name] = *v;
    if (auto d = r.signals("disturbance"); !d.empty()) {
        if (d.size() != 1) r.fail("disturbance", "expected a single signal");
        b.disturbance = d.front();
    }

    if (b.draws > 0) {
        if (!b.coefficients.empty()) r.error("lyapunov coefficients are drawn at random when lyapunov.draws > 0");
        for (auto k : b.kinds)
            if (k == LyapunovKind::PT11 || k == LyapunovKind::PT12)
                r.fail("lyapunov.kind", std::string(to_string(k)) + " cannot be swept (no closed-form bound)");
    } else {
        if (b.kinds.size() > 1) r.fail("lyapunov.kind", "a single kind unless lyapunov.draws > 0");
        if (b.kinds.size() == 1) {
            LyapunovSpec spec{b.kinds.front(), b.coefficients, b.V0};
            for (const auto& msg : check(spec)) r.error("lyapunov: " + msg);
        }
    }
    cfg.body = b;
}

void read_graph(Reader& r, GraphConfig& g, bool directed_default) {
    g.preset = r.parsed("graph.preset", parse_graph_preset);
    g.path = r.text("graph.path");
    g.directed = r.boolean("graph.directed", directed_default);
    g.n = static_cast<Eigen::Index>(r.integer("graph.n").value_or(0));
    if (r.has("graph.preset") && r.has("graph.path")) {
        r.error("graph.preset and graph.path are both set: ambiguous graph source");
        return;
    }
    if (!r.has("graph.preset") && !r.has("graph.path")) {
        r.error("graph: one of graph.preset or graph.path is required");
        return;
    }
    try {
        if (g.preset) {
            r.require(g.n >= 2, "graph.n", "n >= 2");
            if (g.n >= 2) g.graph = make_graph(*g.preset, g.n, g.directed);
        } else if (g.path) {
            std::filesystem::path p(*g.path);
            if (p.is_relative() && !r.raw().base_dir.empty()) p = std::filesystem::path(r.raw().base_dir) / p;
            g.graph = load_edge_list(p.string(), g.directed, g.n);
        }
    } catch (const ValidationError& e) {
        for (const auto& v : e.violations()) r.error("graph: " + v);
    } catch (const IoError& e) {
        r.fail("graph.path", e.what());
    }
}

void read_consensus(Reader& r, ScenarioConfig& cfg) {
    ConsensusConfig c;
    read_graph(r, c.graph, false);
    auto& s = c.scenario;
    s.dt = read_dt(r);
    if (auto p = r.parsed("controller.protocol", parse_consensus_protocol)) s.protocol = *p;
    s.k = r.number("controller.k", 1.0);
    r.require(s.k > 0.0, "controller.k", "k > 0");
    if (s.protocol == ConsensusProtocol::prescribed) {
        s.c = r.number("controller.c");
        if (s.c) r.require(*s.c > 0.0, "controller.c", "c > 0");
        if (c.graph.directed) r.fail("graph.directed", "prescribed consensus needs an undirected graph");
    } else {
        s.alpha = r.number("controller.alpha", 1.0);
        r.require(s.alpha >= 0.0 && s.alpha <= 1.0, "controller.alpha", "0 <= alpha <= 1");
        s.t_end = r.number("integration.t_end", 1.0);
        r.require(s.t_end > 0.0, "integration.t_end", "t_end > 0");
    }
    const auto x = r.vectors("initial.x");
    if (x.size() != 1) r.fail("initial.x", "required: one vector with a value per agent");
    else s.x0 = x.front();
    if (c.graph.graph.size() > 0 && s.x0.size() > 0 && s.x0.size() != c.graph.graph.size())
        r.fail("initial.x", "needs " + std::to_string(c.graph.graph.size()) + " components (one per agent)");
    if (s.protocol == ConsensusProtocol::prescribed && c.graph.graph.size() > 1 && !c.graph.directed) {
        const double l2 = lambda2(c.graph.graph);
        if (!(l2 > 1e-12)) r.error("graph: prescribed consensus needs a connected graph (lambda2 = 0)");
    }
    cfg.body = c;
}

void read_containment(Reader& r, ScenarioConfig& cfg) {
    ContainmentConfig c;
    read_graph(r, c.graph, true);
    auto& s = c.scenario;
    s.dt = read_dt(r);
    const auto root = r.integer("containment.root").value_or(1);
    s.root = static_cast<Eigen::Index>(root - 1);
    s.k = r.number("controller.k", 1.0);
    r.require(s.k > 0.0, "controller.k", "k > 0");
    s.c = r.number("controller.c");
    if (s.c) r.require(*s.c > 0.0, "controller.c", "c > 0");
    const auto x = r.vectors("initial.x");
    if (x.size() != 1) r.fail("initial.x", "required: one vector with a value per agent");
    else s.x0 = x.front();
    const auto n = c.graph.graph.size();
    if (n > 0) {
        r.require(root >= 1 && root <= n, "containment.root", "1 <= root <= n");
        if (s.x0.size() > 0 && s.x0.size() != n)
            r.fail("initial.x", "needs " + std::to_string(n) + " components (one per agent)");
        if (root >= 1 && root <= n) {
            try {
                (void)containment_decompose(c.graph.graph, s.root);
            } catch (const ValidationError& e) {
                for (const auto& v : e.violations()) r.error("graph: " + v);
            }
        }
    }
    cfg.body = c;
}

} // namespace

ScenarioConfig build_config(const RawConfig& raw, std::optional<Command> command) {
    Reader r(raw);
    ScenarioConfig cfg;
    cfg.raw = raw;
    const auto declared = r.parsed("run.command", parse_command);
    if (command && declared && *command != *declared)
        r.fail("run.command", "config is for '" + std::string(to_string(*declared)) + "', invoked as '" +
                                  std::string(to_string(*command)) + "'");
    if (!command && !declared) {
        r.error("run.command: required when no subcommand is given");
        r.finish("?");
    }
    cfg.command = command ? *command : *declared;

    if (auto seed = r.text("run.seed")) {
        try {
            std::size_t pos = 0;
            cfg.seed = std::stoull(*seed, &pos, 0);
            if (pos != seed->size()) throw std::invalid_argument(*seed);
        } catch (const std::exception&) {
            r.fail("run.seed", "expected an unsigned 64-bit integer");
        }
    }
    const auto threads = r.integer("run.threads").value_or(1);
    r.require(threads >= 1 && threads <= 256, "run.threads", "1 <= threads <= 256");
    cfg.threads = static_cast<unsigned>(std::clamp<long long>(threads, 1, 256));
    cfg.out_dir = r.text("output.dir", "out");
    const auto stride = r.integer("output.stride").value_or(1);
    r.require(stride >= 1, "output.stride", "stride >= 1");
    cfg.stride = static_cast<std::size_t>(std::max<long long>(stride, 1));

    read_horizon(r, cfg);
    switch (cfg.command) {
    case Command::simulate: {
        const auto kind = r.text("plant.kind", "scalar");
        if (kind == "scalar") read_scalar(r, cfg);
        else if (kind == "mimo") read_mimo(r, cfg);
        else r.fail("plant.kind", "expected scalar or mimo");
        break;
    }
    case Command::compare: read_compare(r, cfg); break;
    case Command::bound: read_bound(r, cfg); break;
    case Command::consensus: read_consensus(r, cfg); break;
    case Command::containment: read_containment(r, cfg); break;
    }
    r.finish(to_string(cfg.command));
    return cfg;
}

ScenarioConfig load_config(const std::string& path, std::optional<Command> command) {
    return build_config(read_config_file(path), command);
}

} // namespace ptlab

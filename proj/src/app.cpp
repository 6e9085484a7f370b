#include "ptlab/app.hpp"

#include "ptlab/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace ptlab {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first failure by index.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string csv(const Trajectory& traj, std::size_t stride) {
    std::ostringstream os;
    write_csv(traj, os, stride);
    return os.str();
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

std::string count_warnings(const Trajectory& traj) {
    return std::to_string(std::count_if(traj.events.begin(), traj.events.end(),
                                        [](const Event& e) { return e.kind == EventKind::hypothesis_warning; }));
}

RunOutput run_scalar(const ScenarioConfig& cfg, const ScalarSimConfig& s) {
    struct Job {
        std::size_t d, x;
        Trajectory traj;
    };
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < s.disturbances.size(); ++d)
        for (std::size_t x = 0; x < s.x0.size(); ++x) jobs.push_back({d, x, {}});
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        ScalarScenario sc = s.scenario;
        sc.x0 = s.x0[jobs[i].x];
        jobs[i].traj = simulate_scalar(sc, s.plant(s.disturbances[jobs[i].d]), cfg.horizon);
    });

    RunOutput out;
    std::ostringstream sum, rep;
    const auto names = estimate_names(s.scenario.kind);
    sum << "run,disturbance,x0,settle_time,terminal_abs,max_u";
    for (const auto& n : names) sum << ',' << n << "_final";
    sum << ",warnings\n";
    for (const auto& j : jobs) {
        const std::string name = "run_d" + std::to_string(j.d + 1) + "_x" + std::to_string(j.x + 1) + ".csv";
        out.files.emplace_back(name, csv(j.traj, cfg.stride));
        const auto r = settling(j.traj, s.settle_threshold);
        sum << name << ",\"" << format_signal(s.disturbances[j.d]) << "\"," << format_double(s.x0[j.x]) << ','
            << opt(r.settle_time) << ',' << format_double(r.terminal_norm) << ',' << format_double(r.max_control);
        for (Eigen::Index e = 0; e < static_cast<Eigen::Index>(names.size()); ++e)
            sum << ',' << format_double(j.traj.estimates.back()(e));
        sum << ',' << count_warnings(j.traj) << '\n';
        rep << name << ": |x(T-eps)| = " << format_double(r.terminal_norm) << ", max|u| = "
            << format_double(r.max_control) << ", settle(" << format_double(s.settle_threshold)
            << ") = " << opt(r.settle_time) << '\n';
    }
    out.files.emplace_back("summary.csv", sum.str());
    out.report = rep.str();
    return out;
}

RunOutput run_mimo(const ScenarioConfig& cfg, const MimoSimConfig& s) {
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
    std::vector<Trajectory> trajs(plants.size());
    std::vector<GainAssumptionReport> gains(plants.size());
    parallel_for(plants.size(), cfg.threads, [&](std::size_t i) {
        std::vector<SamplePoint> samples;
        for (int k = 0; k < 8; ++k)
            samples.push_back({x0[i] * (1.0 - k / 8.0), cfg.horizon.stop_time() * k / 7.0});
        gains[i] = check_gain_assumption(plants[i], samples);
        MimoScenario sc;
        sc.square = plants[i].square();
        sc.k = s.k;
        sc.theta = s.theta;
        sc.X0 = x0[i];
        sc.dt = s.dt;
        trajs[i] = simulate_mimo(sc, plants[i], cfg.horizon);
    });

    RunOutput out;
    std::ostringstream sum, rep;
    sum << "plant,n,m,gain_margin,terminal_norm,max_u\n";
    for (std::size_t i = 0; i < plants.size(); ++i) {
        const std::string name = "plant_" + std::to_string(i + 1) + ".csv";
        out.files.emplace_back(name, csv(trajs[i], cfg.stride));
        const auto r = settling(trajs[i], 1e-3);
        sum << name << ',' << s.n << ',' << s.m << ',' << format_double(gains[i].min_value) << ','
            << format_double(r.terminal_norm) << ',' << format_double(r.max_control) << '\n';
        rep << name << ": gain margin " << format_double(gains[i].min_value) << ", ||X(T-eps)|| = "
            << format_double(r.terminal_norm) << '\n';
    }
    out.files.emplace_back("summary.csv", sum.str());
    out.report = rep.str();
    return out;
}

RunOutput run_compare(const ScenarioConfig& cfg, const CompareConfig& c) {
    RunOutput out;
    std::ostringstream sum, rep;
    if (c.mode == CompareMode::equivalence) {
        std::vector<std::pair<double, double>> pairs;
        for (double a : c.alphas)
            for (double x : c.x0_scalar) pairs.emplace_back(a, x);
        std::vector<EquivalenceResult> res(pairs.size());
        parallel_for(pairs.size(), cfg.threads,
                     [&](std::size_t i) { res[i] = ft_pt_equivalence(pairs[i].first, pairs[i].second, c.k, c.dt); });
        sum << "alpha,x0,settling_time,pt_gain,max_gap,tolerance,pass\n";
        for (const auto& r : res) {
            sum << format_double(r.alpha) << ',' << format_double(r.x0) << ',' << format_double(r.settling) << ','
                << format_double(ft_equals_pt_gain(r.alpha)) << ',' << format_double(r.max_gap) << ','
                << format_double(r.tolerance) << ',' << (r.max_gap <= r.tolerance ? 1 : 0) << '\n';
            rep << "alpha " << format_double(r.alpha) << ", x0 " << format_double(r.x0) << ": gap "
                << format_double(r.max_gap) << '\n';
        }
        out.files.emplace_back("equivalence.csv", sum.str());
        out.report = rep.str();
        return out;
    }
    const auto rows = run_comparison(c.scenarios(), cfg.threads);
    for (const auto& r : rows) {
        out.files.emplace_back(r.csv_name, csv(r.trajectory, cfg.stride));
        rep << r.csv_name << ": settle " << opt(r.report.settle_time) << ", bound " << opt(r.bound) << ", max|u| "
            << format_double(r.report.max_control) << '\n';
    }
    write_summary_csv(rows, sum);
    out.files.emplace_back("summary.csv", sum.str());
    if (c.plot_script) {
        std::ostringstream py;
        write_plot_script(rows, py);
        out.files.emplace_back("plot.py", py.str());
    }
    out.report = rep.str();
    return out;
}

std::string coefficient_text(const LyapunovSpec& s) {
    std::string t;
    for (const auto& [k, v] : s.coefficients) t += (t.empty() ? "" : " ") + k + "=" + format_double(v);
    return t;
}

struct BoundRow {
    LyapunovSpec spec;
    std::optional<double> bound;
    std::string bound_note;
    InequalityRun run;
};

BoundRow evaluate_bound(const LyapunovSpec& spec, const BoundConfig& b, const TimeHorizon& h) {
    BoundRow row;
    row.spec = spec;
    InequalityOptions opts;
    opts.dt = b.dt;
    opts.disturbance = b.disturbance;
    if (spec.kind == LyapunovKind::PT11 || spec.kind == LyapunovKind::PT12) {
        opts.horizon = h;
        row.bound = h.T;
        row.bound_note = "prescribed";
    } else {
        try {
            row.bound = settling_bound(spec);
        } catch (const BoundUndefined& e) {
            row.bound_note = e.what();
            opts.t_end = 10.0;
        }
    }
    row.run = simulate_inequality(spec, opts);
    return row;
}

RunOutput run_bound(const ScenarioConfig& cfg, const BoundConfig& b) {
    std::vector<LyapunovSpec> specs;
    if (b.draws > 0) {
        Xorshift64 rng(cfg.seed);
        for (auto k : b.kinds)
            for (int i = 0; i < b.draws; ++i) specs.push_back(draw_spec(k, rng));
    } else {
        specs.push_back(LyapunovSpec{b.kinds.front(), b.coefficients, b.V0});
    }
    std::vector<BoundRow> rows(specs.size());
    parallel_for(specs.size(), cfg.threads, [&](std::size_t i) { rows[i] = evaluate_bound(specs[i], b, cfg.horizon); });

    RunOutput out;
    std::ostringstream sum, rep;
    sum << "kind,draw,V0,coefficients,bound,settle_time,zero_time,terminal_V,threshold,within_bound\n";
    std::map<LyapunovKind, int> draw_index;
    for (const auto& r : rows) {
        const int d = ++draw_index[r.spec.kind];
        const bool within = r.bound && r.run.settle_time && *r.run.settle_time <= *r.bound + 2.0 * b.dt;
        const double terminal = r.run.trajectory.states.back()(0);
        sum << to_string(r.spec.kind) << ',' << d << ',' << format_double(r.spec.V0) << ",\"" << coefficient_text(r.spec)
            << "\"," << opt(r.bound) << ',' << opt(r.run.settle_time) << ',' << opt(r.run.zero_time) << ','
            << format_double(terminal) << ',' << format_double(r.run.threshold) << ',' << (within ? 1 : 0) << '\n';
        if (b.draws == 0) {
            rep << row_name(r.spec.kind) << '\n'
                << "  bound          " << (r.bound ? format_double(*r.bound) : r.bound_note) << '\n'
                << "  simulated      " << opt(r.run.settle_time) << " (threshold " << format_double(r.run.threshold)
                << ")\n"
                << "  V(end)         " << format_double(terminal) << '\n';
            out.files.emplace_back("trajectory.csv", csv(r.run.trajectory, cfg.stride));
        }
    }
    if (b.draws > 0) {
        for (auto k : b.kinds) {
            int pass = 0, total = 0;
            for (const auto& r : rows)
                if (r.spec.kind == k) {
                    ++total;
                    pass += r.bound && r.run.settle_time && *r.run.settle_time <= *r.bound + 2.0 * b.dt;
                }
            rep << to_string(k) << ": " << pass << "/" << total << " draws settle within the bound\n";
        }
    }
    out.files.insert(out.files.begin(), {"bounds.csv", sum.str()});
    out.report = rep.str();
    return out;
}

bool all_ok(const Trajectory& t) {
    for (const auto& [name, col] : t.extra_columns)
        if (name == "bound_ok") return std::all_of(col.begin(), col.end(), [](double v) { return v == 1.0; });
    return true;
}

const std::vector<double>& column(const Trajectory& t, const std::string& name) {
    for (const auto& [n, col] : t.extra_columns)
        if (n == name) return col;
    throw Error("missing column " + name);
}

RunOutput run_consensus(const ScenarioConfig& cfg, const ConsensusConfig& c) {
    const auto traj = simulate_consensus(c.scenario, c.graph.graph, cfg.horizon);
    RunOutput out;
    out.files.emplace_back("trajectory.csv", csv(traj, cfg.stride));
    const auto& chi = column(traj, "chi_norm");
    const auto& sum_col = column(traj, "sum");
    double drift = 0.0;
    for (double s : sum_col) drift = std::max(drift, std::abs(s - sum_col.front()));
    std::ostringstream sum, rep;
    const bool undirected = !c.graph.graph.directed;
    const double l2v = undirected ? lambda2(c.graph.graph) : 0.0;
    const std::string l2 = undirected ? format_double(l2v) : "none";
    const std::string gain = c.scenario.protocol == ConsensusProtocol::prescribed
                                 ? format_double(c.scenario.c.value_or(1.0 / l2v))
                                 : "none";
    sum << "protocol,agents,lambda2,c,chi_initial,chi_terminal,bound_ok_all,sum_drift,warnings\n";
    sum << to_string(c.scenario.protocol) << ',' << c.graph.graph.size() << ',' << l2 << ',' << gain << ','
        << format_double(chi.front()) << ',' << format_double(chi.back()) << ',' << (all_ok(traj) ? 1 : 0) << ','
        << format_double(drift) << ',' << count_warnings(traj) << '\n';
    rep << "lambda2 " << l2 << ", c " << gain << ", ||chi|| " << format_double(chi.front()) << " -> "
        << format_double(chi.back()) << ", bound " << (all_ok(traj) ? "holds" : "VIOLATED") << ", sum drift "
        << format_double(drift) << '\n';
    out.files.emplace_back("summary.csv", sum.str());
    out.report = rep.str();
    return out;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json r = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

RunOutput run_containment(const ScenarioConfig& cfg, const ContainmentConfig& c) {
    const auto dec = containment_decompose(c.graph.graph, c.scenario.root);
    const auto traj = simulate_containment(c.scenario, c.graph.graph, cfg.horizon);
    RunOutput out;
    out.files.emplace_back("trajectory.csv", csv(traj, cfg.stride));
    ordered_json j;
    j["root"] = dec.root + 1;
    std::vector<Eigen::Index> order;
    for (auto i : dec.order) order.push_back(i + 1);
    j["order"] = order;
    j["L1"] = matrix_json(dec.L1);
    j["L2"] = matrix_json(dec.L2);
    j["P"] = matrix_json(dec.P);
    j["Q"] = matrix_json(dec.Q);
    j["Q_positive_definite"] = dec.q_positive_definite;
    j["c_min"] = dec.c_min;
    out.files.emplace_back("decomposition.json", j.dump(2) + "\n");

    const auto& x = traj.states.back();
    double gap = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) gap = std::max(gap, std::abs(x(i) - x(dec.root)));
    std::ostringstream sum, rep;
    sum << "agents,root,c_min,c,max_follower_gap,bound_ok_all,warnings\n";
    sum << c.graph.graph.size() << ',' << dec.root + 1 << ',' << format_double(dec.c_min) << ','
        << format_double(c.scenario.c.value_or(dec.c_min)) << ',' << format_double(gap) << ','
        << (all_ok(traj) ? 1 : 0) << ',' << count_warnings(traj) << '\n';
    rep << "c_min " << format_double(dec.c_min) << ", max |x_i - x_root| at T-eps " << format_double(gap) << '\n';
    out.files.emplace_back("summary.csv", sum.str());
    out.report = rep.str();
    return out;
}

} // namespace

RunOutput execute(const ScenarioConfig& cfg) {
    return std::visit(
        [&](const auto& body) -> RunOutput {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, ScalarSimConfig>) return run_scalar(cfg, body);
            else if constexpr (std::is_same_v<T, MimoSimConfig>) return run_mimo(cfg, body);
            else if constexpr (std::is_same_v<T, CompareConfig>) return run_compare(cfg, body);
            else if constexpr (std::is_same_v<T, BoundConfig>) return run_bound(cfg, body);
            else if constexpr (std::is_same_v<T, ConsensusConfig>) return run_consensus(cfg, body);
            else return run_containment(cfg, body);
        },
        cfg.body);
}

std::vector<std::string> write_outputs(const RunOutput& out, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    std::vector<std::string> written;
    for (const auto& [name, content] : out.files) {
        const auto path = (fs::path(dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) throw IoError("cannot write '" + path + "'");
        written.push_back(path);
    }
    return written;
}

std::string manifest_json(const ScenarioConfig& cfg, const RunOutput& out, double wall_seconds) {
    ordered_json j;
    j["command"] = std::string(to_string(cfg.command));
    j["config_file"] = cfg.raw.source;
    ordered_json echo = ordered_json::object();
    for (const auto& [k, e] : cfg.raw.entries) echo[k] = e.value;
    j["config"] = echo;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["version"] = kVersion;
    j["wall_time_s"] = wall_seconds;
    ordered_json files = ordered_json::array();
    for (const auto& f : out.files) files.push_back(f.first);
    j["files"] = files;
    return j.dump(2) + "\n";
}

std::string error_record(std::string_view kind, int code, const std::vector<std::string>& messages) {
    ordered_json j;
    j["status"] = "error";
    j["kind"] = std::string(kind);
    j["exit_code"] = code;
    j["messages"] = messages;
    return j.dump();
}

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

int fail(std::ostream& err, std::string_view kind, int code, const std::vector<std::string>& messages) {
    err << error_record(kind, code, messages) << '\n';
    return code;
}

/// Maps an in-flight exception to (kind, exit code) and prints the record.
int report_exception(std::ostream& err) {
    try {
        throw;
    } catch (const ValidationError& e) {
        return fail(err, "validation", kExitValidation, e.violations());
    } catch (const UnsupportedError& e) {
        return fail(err, "validation", kExitValidation, {e.what()});
    } catch (const IoError& e) {
        return fail(err, "io", kExitIo, {e.what()});
    } catch (const std::exception& e) {
        return fail(err, "numeric", kExitNumeric, {e.what()});
    }
}

int run_one(const std::string& path, std::optional<Command> command, const Overrides& o, std::ostream& out,
            std::ostream& err) {
    try {
        const auto started = std::chrono::steady_clock::now();
        ScenarioConfig cfg = load_config(path, command);
        if (o.out) cfg.out_dir = *o.out;
        if (o.seed) cfg.seed = *o.seed;
        if (o.threads) cfg.threads = *o.threads;
        RunOutput result = execute(cfg);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.files.emplace_back("manifest.json", manifest_json(cfg, result, wall));
        write_outputs(result, cfg.out_dir);
        out << result.report;
        out << "wrote " << result.files.size() << " files to " << cfg.out_dir << '\n';
        return kExitOk;
    } catch (...) {
        return report_exception(err);
    }
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"prescribed-time control laboratory"};
    app.require_subcommand(1);
    Overrides o;
    std::string out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", o.config, "scenario file (run-all: directory of *.cfg)");
        if (config_required) c->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed (overrides run.seed)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));
    };
    std::vector<std::pair<CLI::App*, Command>> subs;
    for (auto cmd : {Command::simulate, Command::compare, Command::bound, Command::consensus, Command::containment}) {
        auto* sub = app.add_subcommand(std::string(to_string(cmd)), "run a " + std::string(to_string(cmd)) + " scenario");
        add_common(sub, true);
        subs.emplace_back(sub, cmd);
    }
    auto* all = app.add_subcommand("run-all", "run every bundled scenario in a directory");
    add_common(all, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, "usage", kExitValidation, {e.what()});
    }
    auto given = [&](const char* name) {
        for (auto* sub : app.get_subcommands())
            if (sub->count(name)) return true;
        return false;
    };
    if (given("--seed")) o.seed = seed;
    if (given("--threads")) o.threads = threads;

    if (all->parsed()) {
        const std::string dir = o.config.empty() ? "configs" : o.config;
        std::vector<fs::path> files;
        std::error_code ec;
        for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec))
            if (it->path().extension() == ".cfg") files.push_back(it->path());
        if (ec) return fail(err, "io", kExitIo, {"cannot read config directory '" + dir + "'"});
        std::sort(files.begin(), files.end());
        const std::string base = given("--out") ? out_dir : "out";
        int worst = kExitOk;
        for (const auto& f : files) {
            Overrides each = o;
            each.out = (fs::path(base) / f.stem()).string();
            out << "== " << f.filename().string() << '\n';
            worst = std::max(worst, run_one(f.string(), std::nullopt, each, out, err));
        }
        return worst;
    }
    for (const auto& [sub, cmd] : subs)
        if (sub->parsed()) {
            if (given("--out")) o.out = out_dir;
            return run_one(o.config, cmd, o, out, err);
        }
    return kExitValidation;
}

} // namespace ptlab

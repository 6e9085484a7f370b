#include "ptlab/mas.hpp"

#include "ptlab/errors.hpp"
#include "ptlab/linalg.hpp"
#include "ptlab/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ptlab {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::string> WeightedGraph::check() const {
    std::vector<std::string> errs;
    if (weights.rows() != weights.cols()) {
        errs.emplace_back("graph weights must be square");
        return errs;
    }
    for (Index i = 0; i < size(); ++i)
        for (Index j = 0; j < size(); ++j) {
            const double w = weights(i, j);
            if (!std::isfinite(w) || w < 0.0)
                errs.push_back("graph weight a_" + std::to_string(i + 1) + std::to_string(j + 1) +
                               " must be finite and >= 0");
            if (i == j && w != 0.0) errs.push_back("graph self-loop at agent " + std::to_string(i + 1));
            if (!directed && j > i && w != weights(j, i))
                errs.push_back("undirected graph weights must be symmetric (agents " + std::to_string(i + 1) +
                               ", " + std::to_string(j + 1) + ")");
        }
    return errs;
}

GraphPreset parse_graph_preset(std::string_view name) {
    if (name == "cycle") return GraphPreset::cycle;
    if (name == "path") return GraphPreset::path;
    if (name == "complete") return GraphPreset::complete;
    if (name == "star") return GraphPreset::star;
    throw ValidationError("unknown graph preset '" + std::string(name) + "' (cycle, path, complete, star)");
}

std::string_view to_string(GraphPreset p) {
    switch (p) {
    case GraphPreset::cycle: return "cycle";
    case GraphPreset::path: return "path";
    case GraphPreset::complete: return "complete";
    case GraphPreset::star: return "star";
    }
    return "?";
}

namespace {

// edge from -> to: "to" listens to "from"
void add_edge(WeightedGraph& g, Index from, Index to, double w) {
    g.weights(to, from) = w;
    if (!g.directed) g.weights(from, to) = w;
}

} // namespace

WeightedGraph make_graph(GraphPreset preset, Index n, bool directed) {
    if (n < 2) throw ValidationError("graph presets need n >= 2 agents");
    if (preset == GraphPreset::cycle && n < 3) throw ValidationError("cycle preset needs n >= 3 agents");
    WeightedGraph g;
    g.directed = directed;
    g.weights = MatrixXd::Zero(n, n);
    switch (preset) {
    case GraphPreset::cycle:
        for (Index i = 0; i < n; ++i) add_edge(g, i, (i + 1) % n, 1.0);
        break;
    case GraphPreset::path:
        for (Index i = 0; i + 1 < n; ++i) add_edge(g, i, i + 1, 1.0);
        break;
    case GraphPreset::complete:
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (i != j) g.weights(i, j) = 1.0;
        break;
    case GraphPreset::star:
        for (Index i = 1; i < n; ++i) add_edge(g, 0, i, 1.0);
        break;
    }
    return g;
}

WeightedGraph parse_edge_list(std::istream& in, bool directed, Index n) {
    struct Edge {
        long from, to;
        double w;
    };
    std::vector<Edge> edges;
    std::vector<std::string> errs;
    std::string line;
    long max_id = 0;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        Edge e{0, 0, 1.0};
        if (!(ls >> e.from >> e.to)) {
            errs.push_back("edge list line " + std::to_string(lineno) + ": expected 'i j [w]'");
            continue;
        }
        std::string rest;
        if (ls >> rest) {
            try {
                std::size_t pos = 0;
                e.w = std::stod(rest, &pos);
                if (pos != rest.size()) throw std::invalid_argument(rest);
            } catch (const std::exception&) {
                errs.push_back("edge list line " + std::to_string(lineno) + ": bad weight '" + rest + "'");
                continue;
            }
            if (ls >> rest) {
                errs.push_back("edge list line " + std::to_string(lineno) + ": trailing tokens");
                continue;
            }
        }
        if (e.from < 1 || e.to < 1) {
            errs.push_back("edge list line " + std::to_string(lineno) + ": ids are 1-based");
            continue;
        }
        if (e.from == e.to) {
            errs.push_back("edge list line " + std::to_string(lineno) + ": self-loop");
            continue;
        }
        if (!(e.w > 0.0) || !std::isfinite(e.w)) {
            errs.push_back("edge list line " + std::to_string(lineno) + ": weight must be > 0");
            continue;
        }
        max_id = std::max({max_id, e.from, e.to});
        edges.push_back(e);
    }
    if (n == 0) n = max_id;
    if (max_id > n) errs.push_back("edge list references agent " + std::to_string(max_id) + " but n = " +
                                   std::to_string(n));
    if (n < 1) errs.emplace_back("edge list defines no agents");
    if (!errs.empty()) throw ValidationError(std::move(errs));

    WeightedGraph g;
    g.directed = directed;
    g.weights = MatrixXd::Zero(n, n);
    for (const auto& e : edges) add_edge(g, e.from - 1, e.to - 1, e.w);
    return g;
}

WeightedGraph load_edge_list(const std::string& path, bool directed, Index n) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge list '" + path + "'");
    return parse_edge_list(in, directed, n);
}

MatrixXd laplacian(const WeightedGraph& g) {
    MatrixXd L = (-g.weights).array() + 0.0; // + 0.0 turns -0.0 into 0.0
    for (Index i = 0; i < g.size(); ++i) L(i, i) = g.weights.row(i).sum() - g.weights(i, i);
    return L;
}

double lambda2(const WeightedGraph& g) {
    if (g.directed) throw UnsupportedError("lambda2 is defined here for undirected graphs only");
    if (g.size() < 2) throw ValidationError("lambda2 needs at least 2 agents");
    return linalg::symmetric_eigenvalues(laplacian(g))(1);
}

VectorXd protocol_general(const VectorXd& x, const WeightedGraph& g, double k, const MatrixXd& alpha) {
    if (x.size() != g.size() || alpha.rows() != g.size() || alpha.cols() != g.size())
        throw ValidationError("protocol_general: dimension mismatch");
    if ((alpha.array() < 0.0).any() || (alpha.array() > 1.0).any())
        throw ValidationError("protocol_general: exponents must lie in [0, 1]");
    VectorXd u = VectorXd::Zero(x.size());
    for (Index i = 0; i < x.size(); ++i)
        for (Index j = 0; j < x.size(); ++j)
            if (g.weights(i, j) != 0.0) u(i) += g.weights(i, j) * signed_pow(x(i) - x(j), alpha(i, j));
    return -k * u;
}

VectorXd protocol_general(const VectorXd& x, const WeightedGraph& g, double k, double alpha) {
    return protocol_general(x, g, k, MatrixXd::Constant(g.size(), g.size(), alpha));
}

VectorXd local_errors(const VectorXd& x, const WeightedGraph& g) {
    if (x.size() != g.size()) throw ValidationError("state dimension must equal the agent count");
    return laplacian(g) * x;
}

namespace {

void check_time(double t, const TimeHorizon& h, const char* who) {
    if (!(t >= 0.0) || t > h.stop_time() * (1.0 + 1e-12))
        throw DomainError(std::string(who) + ": t = " + format_double(t) + " outside [0, T - eps]");
}

double network_gain(double t, double k, double c, const TimeHorizon& h) { return k + c * scale_rate(t, h); }

} // namespace

VectorXd pt_consensus(const VectorXd& x, double t, const WeightedGraph& g, double k, double c, const TimeHorizon& h) {
    check_time(t, h, "pt_consensus");
    return -network_gain(t, k, c, h) * local_errors(x, g);
}

double consensus_gain_threshold(const WeightedGraph& g) {
    const double l2 = lambda2(g);
    if (!(l2 > 1e-12)) throw ValidationError("consensus requires a connected graph (lambda2 = 0)");
    return 1.0 / l2;
}

ContainmentDecomposition containment_decompose(const WeightedGraph& g, Index root) {
    const Index n = g.size();
    if (!g.directed) throw ValidationError("containment requires a directed graph");
    if (n < 2) throw ValidationError("containment requires at least one follower");
    if (root < 0 || root >= n) throw ValidationError("containment root id out of range");
    if ((g.weights.row(root).array() != 0.0).any())
        throw ValidationError("containment root must not listen to other agents");

    // reachability along i -> j (j listens to i)
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> stack{root};
    seen[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
        const Index i = stack.back();
        stack.pop_back();
        for (Index j = 0; j < n; ++j)
            if (g.weights(j, i) > 0.0 && !seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                stack.push_back(j);
            }
    }
    std::vector<std::string> errs;
    for (Index j = 0; j < n; ++j)
        if (!seen[static_cast<std::size_t>(j)])
            errs.push_back("agent " + std::to_string(j + 1) + " is not reachable from root " +
                           std::to_string(root + 1) + " (no directed spanning tree)");
    if (!errs.empty()) throw ValidationError(std::move(errs));

    ContainmentDecomposition d;
    d.root = root;
    d.order.push_back(root);
    for (Index i = 0; i < n; ++i)
        if (i != root) d.order.push_back(i);

    const MatrixXd L = laplacian(g);
    MatrixXd Lr(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) Lr(i, j) = L(d.order[static_cast<std::size_t>(i)], d.order[static_cast<std::size_t>(j)]);
    d.L1 = Lr.bottomRightCorner(n - 1, n - 1);
    d.L2 = Lr.bottomLeftCorner(n - 1, 1);

    const VectorXd re = linalg::eigenvalue_real_parts(d.L1);
    if (!(re.minCoeff() > 1e-10))
        throw ValidationError("follower sub-Laplacian has an eigenvalue with non-positive real part");

    const VectorXd p = d.L1.transpose().partialPivLu().solve(VectorXd::Ones(n - 1));
    d.P = p.asDiagonal();
    d.Q = d.P * d.L1 + d.L1.transpose() * d.P;
    const double l1q = linalg::lambda_min(d.Q);
    d.q_positive_definite = (p.array() > 0.0).all() && l1q > 0.0;
    d.c_min = d.q_positive_definite ? 2.0 * p.maxCoeff() / l1q : std::numeric_limits<double>::infinity();
    return d;
}

VectorXd pt_containment_step(const VectorXd& x, double t, const WeightedGraph& g, double k, double c,
                             const TimeHorizon& h, const ContainmentDecomposition& dec) {
    check_time(t, h, "pt_containment_step");
    VectorXd u = -network_gain(t, k, c, h) * local_errors(x, g);
    u(dec.root) = 0.0;
    return u;
}

VectorXd disagreement(const VectorXd& x) { return x.array() - x.mean(); }

ConsensusProtocol parse_consensus_protocol(std::string_view name) {
    if (name == "general") return ConsensusProtocol::general;
    if (name == "prescribed") return ConsensusProtocol::prescribed;
    throw ValidationError("unknown consensus protocol '" + std::string(name) + "' (general, prescribed)");
}

std::string_view to_string(ConsensusProtocol p) {
    return p == ConsensusProtocol::general ? "general" : "prescribed";
}

Trajectory simulate_consensus(const ConsensusScenario& sc, const WeightedGraph& g, const TimeHorizon& h) {
    std::vector<std::string> errs = g.check();
    if (sc.x0.size() != g.size()) errs.emplace_back("initial.x dimension must equal the agent count");
    if (!(sc.k > 0.0)) errs.emplace_back("controller.k > 0 violated");
    if (sc.protocol == ConsensusProtocol::general && !(sc.alpha >= 0.0 && sc.alpha <= 1.0))
        errs.emplace_back("controller.alpha must lie in [0, 1]");
    if (sc.protocol == ConsensusProtocol::prescribed && g.directed)
        errs.emplace_back("prescribed consensus requires an undirected graph");
    if (!errs.empty()) throw ValidationError(std::move(errs));

    Trajectory traj;
    if (sc.protocol == ConsensusProtocol::general) {
        auto law = [&](double, const Vec& x) -> Vec { return protocol_general(x, g, sc.k, sc.alpha); };
        IntegrateOptions opts;
        opts.control = law;
        traj = integrate(law, sc.x0, Grid{sc.t_end, sc.dt}, opts);
    } else {
        h.validate();
        const double l2 = lambda2(g);
        if (!(l2 > 1e-12)) throw ValidationError("prescribed consensus requires a connected graph");
        const double c = sc.c.value_or(1.0 / l2);
        auto law = [&](double t, const Vec& x) -> Vec { return pt_consensus(x, t, g, sc.k, c, h); };
        IntegrateOptions opts;
        opts.guard = h;
        opts.control = law;
        traj = integrate(law, sc.x0, Grid{h.stop_time(), sc.dt}, opts);
        if (c < 1.0 / l2 * (1.0 - 1e-12))
            traj.add_event(0.0, EventKind::hypothesis_warning,
                           "c = " + format_double(c) + " below 1/lambda2 = " + format_double(1.0 / l2));

        const double chi0 = disagreement(sc.x0).norm();
        std::vector<double> bound, ok;
        bound.reserve(traj.size());
        ok.reserve(traj.size());
        bool warned = false;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double t = traj.times[i];
            const double b = chi0 * std::exp(-sc.k * l2 * t) / mu(t, h);
            const bool pass = disagreement(traj.states[i]).norm() <= b * (1.0 + sc.bound_slack);
            bound.push_back(b);
            ok.push_back(pass ? 1.0 : 0.0);
            if (!pass && !warned) {
                traj.add_event(t, EventKind::hypothesis_warning, "disagreement exceeds the consensus bound");
                warned = true;
            }
        }
        std::vector<double> chi;
        for (const auto& x : traj.states) chi.push_back(disagreement(x).norm());
        traj.extra_columns.emplace_back("chi_norm", std::move(chi));
        traj.extra_columns.emplace_back("bound", std::move(bound));
        traj.extra_columns.emplace_back("bound_ok", std::move(ok));
        std::vector<double> sum;
        for (const auto& x : traj.states) sum.push_back(x.sum());
        traj.extra_columns.emplace_back("sum", std::move(sum));
        return traj;
    }
    std::vector<double> chi, sum;
    for (const auto& x : traj.states) {
        chi.push_back(disagreement(x).norm());
        sum.push_back(x.sum());
    }
    traj.extra_columns.emplace_back("chi_norm", std::move(chi));
    traj.extra_columns.emplace_back("sum", std::move(sum));
    return traj;
}

Trajectory simulate_containment(const ContainmentScenario& sc, const WeightedGraph& g, const TimeHorizon& h) {
    h.validate();
    std::vector<std::string> errs = g.check();
    if (sc.x0.size() != g.size()) errs.emplace_back("initial.x dimension must equal the agent count");
    if (!(sc.k > 0.0)) errs.emplace_back("controller.k > 0 violated");
    if (!errs.empty()) throw ValidationError(std::move(errs));

    const ContainmentDecomposition dec = containment_decompose(g, sc.root);
    const double c = sc.c.value_or(dec.c_min);
    auto law = [&](double t, const Vec& x) -> Vec { return pt_containment_step(x, t, g, sc.k, c, h, dec); };
    IntegrateOptions opts;
    opts.guard = h;
    opts.control = law;
    Trajectory traj = integrate(law, sc.x0, Grid{h.stop_time(), sc.dt}, opts);
    if (!dec.q_positive_definite)
        traj.add_event(0.0, EventKind::hypothesis_warning, "Q is not positive definite");
    else if (c < dec.c_min * (1.0 - 1e-12))
        traj.add_event(0.0, EventKind::hypothesis_warning,
                       "c = " + format_double(c) + " below c_min = " + format_double(dec.c_min));

    auto followers = [&](const Vec& x) {
        VectorXd z(g.size() - 1);
        for (Index i = 1; i < g.size(); ++i) z(i - 1) = x(dec.order[static_cast<std::size_t>(i)]) - x(dec.root);
        return z;
    };
    const VectorXd e0 = dec.L1 * followers(sc.x0);
    const double pmax = dec.P.diagonal().maxCoeff();
    const double pmin = dec.P.diagonal().minCoeff();
    const double c0 = dec.q_positive_definite
                          ? std::sqrt(pmax / pmin) * linalg::spectral_norm(dec.L1.inverse()) * e0.norm()
                          : std::numeric_limits<double>::infinity();
    const double rate = dec.q_positive_definite ? sc.k * linalg::lambda_min(dec.Q) / (2.0 * pmax) : 0.0;

    std::vector<double> zn, bound, ok;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const double z = followers(traj.states[i]).norm();
        const double b = c0 * std::exp(-rate * t) / mu(t, h);
        zn.push_back(z);
        bound.push_back(b);
        ok.push_back(z <= b * (1.0 + sc.bound_slack) ? 1.0 : 0.0);
    }
    traj.extra_columns.emplace_back("z_norm", std::move(zn));
    traj.extra_columns.emplace_back("bound", std::move(bound));
    traj.extra_columns.emplace_back("bound_ok", std::move(ok));
    return traj;
}

} // namespace ptlab

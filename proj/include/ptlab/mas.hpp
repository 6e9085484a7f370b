#pragma once

#include "ptlab/scaling.hpp"
#include "ptlab/sim_engine.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptlab {

/**
 * Weighted interaction graph over n single-integrator agents.
 *
 * weights(i, j) = a_ij is the weight with which agent i listens to agent
 * j. Edge "i -> j" (edge lists, presets) means j listens to i, so it
 * sets a_ji; undirected graphs set both.
 */
struct WeightedGraph {
    Eigen::MatrixXd weights;
    bool directed = false;

    Eigen::Index size() const noexcept { return weights.rows(); }
    /// Violations of a_ij >= 0, a_ii = 0, finiteness and (undirected) symmetry.
    std::vector<std::string> check() const;
};

enum class GraphPreset { cycle, path, complete, star };
GraphPreset parse_graph_preset(std::string_view name);
std::string_view to_string(GraphPreset p);

/// Unit-weight preset. Directed variants orient edges 1->2->...; the star hub is agent 1.
WeightedGraph make_graph(GraphPreset preset, Eigen::Index n, bool directed = false);

/**
 * Edge list: one "i j w" per line (1-based ids, w optional and defaults
 * to 1); blank lines and lines starting with '#' are ignored. n = 0
 * infers the agent count from the largest id. Parse errors carry the
 * line number.
 */
WeightedGraph parse_edge_list(std::istream& in, bool directed, Eigen::Index n = 0);
WeightedGraph load_edge_list(const std::string& path, bool directed, Eigen::Index n = 0);

Eigen::MatrixXd laplacian(const WeightedGraph& g);

/// Second-smallest Laplacian eigenvalue. UnsupportedError for directed graphs.
double lambda2(const WeightedGraph& g);

/// u_i = -k sum_j a_ij sgn(x_i - x_j) |x_i - x_j|^alpha_ij, with 0^0 taken as 0.
/// alpha = 1 gives x' = -k L x.
Eigen::VectorXd protocol_general(const Eigen::VectorXd& x, const WeightedGraph& g, double k,
                                 const Eigen::MatrixXd& alpha);
Eigen::VectorXd protocol_general(const Eigen::VectorXd& x, const WeightedGraph& g, double k, double alpha);

/// Local errors e = L x.
Eigen::VectorXd local_errors(const Eigen::VectorXd& x, const WeightedGraph& g);

/// u = -(k + c a'(t)) L x with a'(t) = 1/(T - t), capped.
Eigen::VectorXd pt_consensus(const Eigen::VectorXd& x, double t, const WeightedGraph& g, double k, double c,
                             const TimeHorizon& h);

/// Consensus gain threshold 1/lambda2; c below it leaves the convergence guarantee unmet.
double consensus_gain_threshold(const WeightedGraph& g);

struct ContainmentDecomposition {
    Eigen::Index root = 0;           ///< 0-based root id
    std::vector<Eigen::Index> order; ///< agent ids with the root first
    Eigen::MatrixXd L1;
    Eigen::VectorXd L2;
    Eigen::MatrixXd P;
    Eigen::MatrixXd Q;
    double c_min = 0.0;
    bool q_positive_definite = false;
};

/**
 * Root-first partition L = [[0, 0], [L2, L1]] with P = diag((L1^T)^{-1} 1),
 * Q = P L1 + L1^T P and c_min = 2 lambda_max(P) / lambda_1(Q).
 * ValidationError when the graph is undirected, the root listens to
 * anyone, or some agent is unreachable from the root. A Q that is not
 * positive definite is reported through q_positive_definite.
 */
ContainmentDecomposition containment_decompose(const WeightedGraph& g, Eigen::Index root);

/// Root applies u = 0; followers apply -(k + c a'(t)) e_i.
Eigen::VectorXd pt_containment_step(const Eigen::VectorXd& x, double t, const WeightedGraph& g, double k, double c,
                                    const TimeHorizon& h, const ContainmentDecomposition& dec);

/// chi = x - mean(x).
Eigen::VectorXd disagreement(const Eigen::VectorXd& x);

enum class ConsensusProtocol { general, prescribed };
ConsensusProtocol parse_consensus_protocol(std::string_view name);
std::string_view to_string(ConsensusProtocol p);

struct ConsensusScenario {
    ConsensusProtocol protocol = ConsensusProtocol::prescribed;
    double k = 1.0;
    std::optional<double> c; ///< prescribed protocol; defaults to 1/lambda2
    double alpha = 1.0;      ///< general protocol exponent
    double t_end = 1.0;      ///< general protocol horizon
    Eigen::VectorXd x0;
    double dt = 1e-5;
    double bound_slack = 1e-6;
};

/**
 * Network run. The prescribed protocol integrates to T - eps and adds
 * the columns chi_norm, bound = ||chi(0)|| e^{-k lambda2 t} / mu(t),
 * bound_ok and sum; the general protocol adds chi_norm and sum. A gain
 * below threshold is recorded as a hypothesis_warning event.
 */
Trajectory simulate_consensus(const ConsensusScenario& scenario, const WeightedGraph& g, const TimeHorizon& h);

struct ContainmentScenario {
    Eigen::Index root = 0;
    double k = 1.0;
    std::optional<double> c; ///< defaults to c_min
    Eigen::VectorXd x0;
    double dt = 1e-5;
    double bound_slack = 1e-6;
};

/**
 * Root-led run to T - eps. Columns: z_norm = ||x_followers - x_root||,
 * bound = sqrt(lmax(P)/lmin(P)) ||L1^{-1}|| ||e(0)|| e^{-k l1(Q) t / (2 lmax(P))} / mu(t),
 * bound_ok.
 */
Trajectory simulate_containment(const ContainmentScenario& scenario, const WeightedGraph& g, const TimeHorizon& h);

} // namespace ptlab

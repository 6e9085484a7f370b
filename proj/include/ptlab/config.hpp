#pragma once

#include "ptlab/bench_compare.hpp"
#include "ptlab/mas.hpp"
#include "ptlab/mimo_controllers.hpp"
#include "ptlab/scalar_controllers.hpp"
#include "ptlab/scaling.hpp"
#include "ptlab/settling.hpp"
#include "ptlab/signals.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ptlab {

/**
 * Scenario files are flat "key = value" lines with dotted section
 * prefixes ("horizon.T = 1"). '#' starts a comment. Lists separate
 * entries with ';' and vector components with ','. Signals are written
 * constant(v), sinusoid(offset, amplitude, freq) or square(offset,
 * amplitude, freq); a bare number is a constant.
 */
struct ConfigEntry {
    std::string value;
    int line = 0;
};

struct RawConfig {
    std::string source;   ///< file name used in messages
    std::string base_dir; ///< relative paths (graph.path) resolve against this
    std::map<std::string, ConfigEntry> entries;
};

/// ValidationError naming the line for malformed lines and duplicate keys.
RawConfig parse_config(std::istream& in, const std::string& source = "<config>");
RawConfig read_config_file(const std::string& path);

enum class Command { simulate, compare, bound, consensus, containment };
Command parse_command(std::string_view name);
std::string_view to_string(Command c);

Signal parse_signal(std::string_view text);
std::string format_signal(const Signal& s);

/// Known envelopes psi(x) with their factor psi_bar(x) = psi(x) / x where one exists.
enum class EnvelopeKind { quadratic, linear, cubic, offset_quadratic };
EnvelopeKind parse_envelope(std::string_view name);
std::string_view to_string(EnvelopeKind e);

struct ScalarSimConfig {
    ScalarScenario scenario;
    Signal b = Signal::constant(1.0);
    SignKnowledge b_sign = SignKnowledge::positive;
    std::optional<double> b_lower;
    EnvelopeKind envelope = EnvelopeKind::offset_quadratic;
    std::vector<Signal> disturbances{Signal::constant(0.0)};
    std::vector<double> x0{1.0};
    double settle_threshold = 1e-2;

    /// Plant for one disturbance: f(x, t) = d(t) psi(x).
    ScalarPlant plant(const Signal& disturbance) const;
};

struct MimoSimConfig {
    Eigen::Index n = 2;
    Eigen::Index m = 2;
    int count = 1;
    double margin = 0.5;
    double k = 1.0;
    double theta = 1.0;
    Signal disturbance = Signal::constant(0.0);
    std::vector<Vec> x0; ///< one per plant, or a single shared one; empty draws U(-1, 1)
    double dt = 1e-4;
};

enum class CompareMode { double_integrator, equivalence };

struct CompareConfig {
    CompareMode mode = CompareMode::double_integrator;
    std::vector<DoubleIntegratorKind> kinds;
    std::vector<Eigen::Vector2d> x0;
    DoubleIntegratorParams params;
    std::optional<double> horizon;
    std::optional<double> stop_margin;
    double dt = 1e-4;
    bool plot_script = true;
    std::vector<double> alphas;
    std::vector<double> x0_scalar;
    double k = 1.0;

    std::vector<ComparisonScenario> scenarios() const;
};

struct BoundConfig {
    std::vector<LyapunovKind> kinds;
    std::map<std::string, double> coefficients;
    double V0 = 1.0;
    int draws = 0; ///< > 0: random parameter sweep per kind
    std::optional<Signal> disturbance;
    double dt = 1e-4;
};

struct GraphConfig {
    std::optional<GraphPreset> preset;
    Eigen::Index n = 0;
    std::optional<std::string> path;
    bool directed = false;
    WeightedGraph graph; ///< built during validation
};

struct ConsensusConfig {
    GraphConfig graph;
    ConsensusScenario scenario;
};

struct ContainmentConfig {
    GraphConfig graph;
    ContainmentScenario scenario;
};

struct ScenarioConfig {
    Command command = Command::simulate;
    RawConfig raw;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir = "out";
    std::size_t stride = 1;
    TimeHorizon horizon;
    std::variant<ScalarSimConfig, MimoSimConfig, CompareConfig, BoundConfig, ConsensusConfig, ContainmentConfig> body;
};

/**
 * Builds and validates a scenario. Every violation is collected (key
 * path plus constraint) and thrown together as one ValidationError.
 * Keys the command does not use are rejected. `command` overrides (and
 * must agree with) run.command when both are present.
 */
ScenarioConfig build_config(const RawConfig& raw, std::optional<Command> command = std::nullopt);
ScenarioConfig load_config(const std::string& path, std::optional<Command> command = std::nullopt);

} // namespace ptlab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <relbeam/experiments.hpp>

namespace relbeam {

/// Parsed command configurations. Parsing is strict: unknown keys, malformed
/// values, and objects that fail their own validity checks all raise
/// ConfigError with a dotted field path (and the parser's line/column for
/// syntax errors), so a bad config never reaches a run.
///
/// Each command that consumes randomness requires a seed, either in the file
/// or as an override from the command line; the override wins when both are
/// present.

struct ExactConfig {
  Instance instance;
};

struct SimulateConfig {
  Instance instance;
  ExperimentKind kind = ExperimentKind::E1;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t emission_cap = RunOptions{}.emission_cap;
};

struct ViolateConfig {
  std::size_t dim = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  ViolationSearchOptions options;
};

struct ConvergenceConfig {
  Instance instance;
  ExperimentKind kind = ExperimentKind::E1;
  std::vector<std::uint64_t> n_list;
  std::uint64_t seed = 0;
};

/// An instance is {"model", "state", "x", "r"}. Classical states are
/// {"weights": [...]} or {"generator": {"dim", "seed"}}, events {"set": [...]}
/// or {"generator": {"dim", "seed"}}; quantum states and tests are
/// {"matrix": [[[re, im], ...], ...]} or {"generator": {"dim", "rank",
/// "seed"}}. Exactly one source per object.
Instance parse_instance(const nlohmann::json& node, const std::string& path);

ExactConfig parse_exact_config(const std::string& text);
SimulateConfig parse_simulate_config(const std::string& text,
                                     std::optional<std::uint64_t> seed_override);
ScanConfig parse_scan_config(const std::string& text,
                             std::optional<std::uint64_t> seed_override);
ViolateConfig parse_violate_config(const std::string& text,
                                   std::optional<std::uint64_t> seed_override);
ConvergenceConfig parse_convergence_config(
    const std::string& text, std::optional<std::uint64_t> seed_override);

}  // namespace relbeam

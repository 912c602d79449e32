#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "relbeam/prob.hpp"
#include "relbeam/quantum.hpp"

namespace relbeam {

/// Source of the beam: every particle is prepared independently in this
/// state, classical or quantum.
struct Emitter {
  std::variant<ClassicalState, DensityMatrix> state;

  bool is_classical() const {
    return std::holds_alternative<ClassicalState>(state);
  }
  std::size_t dim() const;
};

/// What a testing appliance does with the two outcome branches.
enum class ApplianceMode {
  Record,  // tally both branches and pass both onward
  Select,  // pass only particles that click "yes"
  Block,   // pass only particles that click "no"
};

/// One property test in the beam line. The property must match the emitter's
/// kind: an Event for classical beams, a Projector for quantum ones (where a
/// click collapses the particle's personal state).
struct Appliance {
  std::string label;  // "R" or "X" in the standard experiment wirings
  std::variant<Event, Projector> property;
  ApplianceMode mode = ApplianceMode::Record;

  std::size_t dim() const;
};

/// An emitter followed by an ordered list of appliances. A run keeps
/// emitting until exactly n particles reach the end of the line.
struct Pipeline {
  Emitter emitter;
  std::vector<Appliance> stages;

  void validate() const;
};

/// Outcome tallies at one stage, over every particle that reached it
/// (including particles a later stage discards).
struct StageTally {
  std::uint64_t entered = 0;
  std::uint64_t clicked = 0;    // "yes" outcomes; entered - clicked said "no"
  std::uint64_t forwarded = 0;  // passed on to the next stage / the counter
};

struct StageLayout {
  std::string label;
  ApplianceMode mode = ApplianceMode::Record;
};

/// Counts accumulated by a run. `paths` maps the full outcome string of each
/// recorded particle ('1' = click, one character per stage) to its tally;
/// `stages` holds the per-stage totals including discarded particles.
struct FrequencyTable {
  std::uint64_t recorded = 0;
  std::uint64_t emitted = 0;
  std::vector<StageTally> stages;
  std::map<std::string, std::uint64_t> paths;
  std::vector<StageLayout> layout;

  /// Total recorded particles whose outcome string starts with `prefix`.
  std::uint64_t count_prefix(std::string_view prefix) const;
};

struct RunOptions {
  /// Emissions allowed before giving up on reaching n survivors.
  std::uint64_t emission_cap = 100'000'000;
};

/// Runs the pipeline until n particles are recorded. Bit-exact for a fixed
/// (pipeline, n, seed): particle k draws from the stream derived from
/// (seed, k), so any internal scheduling would produce identical tables.
FrequencyTable run(const Pipeline& pipeline, std::uint64_t n,
                   std::uint64_t seed, const RunOptions& options = {});

struct EstimateEntry {
  double value = 0;
  double std_error = 0;  // sqrt(value (1-value) / denom)
  std::uint64_t numer = 0;
  std::uint64_t denom = 0;
};

/// Frequency estimates read off a table. A field is absent (not zero) when
/// its denominator count is zero or the pipeline shape does not measure it.
struct Estimates {
  std::optional<EstimateEntry> r;   // relevant fraction of the plain beam
  std::optional<EstimateEntry> p;   // X frequency among relevant particles
  std::optional<EstimateEntry> q;   // X frequency among non-relevant ones
  std::optional<EstimateEntry> x;   // relevant fraction after selecting on X
  std::optional<EstimateEntry> px;  // direct X frequency, no relevance test

  /// Field by name ("r", "p", "q", "x", "px"); throws AbsentEstimateError.
  const EstimateEntry& require(std::string_view name) const;
};

Estimates estimate(const FrequencyTable& table);

/// The five standard wirings:
///   E1  relevance test only, record mode
///   E2  select on R, then record X          (measures p)
///   E3  block on R, then record X           (measures q)
///   E4  record X directly, no relevance test
///   E5  select on X, then record R          (measures x)
enum class ExperimentKind { E1, E2, E3, E4, E5 };

std::string_view experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_name(std::string_view name);

Pipeline standard_experiment(ExperimentKind kind, Emitter emitter,
                             std::variant<Event, Projector> x_property,
                             std::variant<Event, Projector> r_property);

}  // namespace relbeam

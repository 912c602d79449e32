#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <relbeam/beam.hpp>

namespace relbeam {

enum class ModelKind { Classical, Quantum };

std::string_view model_name(ModelKind kind);
std::optional<ModelKind> model_from_name(std::string_view name);

/// A state with its expansion and relevance events, ready for analysis.
struct ClassicalTriple {
  ClassicalState state;
  Event x;
  Event r;
};

using Instance = std::variant<ClassicalTriple, QuantumTriple>;

std::size_t instance_dim(const Instance& instance);
bool instance_is_classical(const Instance& instance);

/// Weights drawn flat on the probability simplex (normalized unit
/// exponentials).
ClassicalState draw_classical_state(std::size_t dim, RandomSource& rng);

/// Membership decided by an independent fair coin per outcome; may come out
/// empty or full.
Event draw_event(std::size_t dim, RandomSource& rng);

/// Random triple assembled from the two draws above: state first, then the
/// expansion event, then the relevance event.
ClassicalTriple draw_classical_triple(std::size_t dim, RandomSource& rng);

/// Random triple with mixed ranks: state rank uniform on 1..dim, test ranks
/// uniform on 1..dim-1 (so neither test is trivially zero or identity).
QuantumTriple draw_quantum_triple(std::size_t dim, RandomSource& rng);

/// Reason the triple cannot enter a boost analysis (relevance probability
/// within `band` of 0 or 1, or expansion probability within `band` of 0);
/// nullopt when all preconditions hold.
std::optional<std::string> precondition_failure(const ClassicalTriple& t,
                                                double band);
std::optional<std::string> precondition_failure(const QuantumTriple& t,
                                                double band);

// ---------------------------------------------------------------------------
// Equivalence scan: sign(x - r) versus sign(p - q) over random instances.
// ---------------------------------------------------------------------------

struct ScanConfig {
  ModelKind model = ModelKind::Classical;
  std::vector<std::size_t> dims;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  /// Differences with magnitude at or below the band count as zero sign.
  /// Zero selects the model default (1e-12 classical, 1e-10 quantum).
  double band = 0;

  double effective_band() const;
  void validate() const;
};

struct DimScan {
  std::size_t dim = 0;
  std::uint64_t agree = 0;
  std::uint64_t tie = 0;
  std::uint64_t disagree = 0;
  std::uint64_t skipped = 0;
  std::map<std::string, std::uint64_t> skip_reasons;
  /// Largest |x - r| observed among the ties.
  double worst_tie_gap = 0;

  std::uint64_t total() const { return agree + tie + disagree + skipped; }
};

struct ScanReport {
  ModelKind model = ModelKind::Classical;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double band = 0;
  std::vector<DimScan> dims;

  std::uint64_t total_disagree() const;
};

/// One random instance per (dim, trial) cell, each on its own derived random
/// stream; instances failing the preconditions are skipped with a reason,
/// never classified. Equal trial counts per dim.
ScanReport scan_equivalence(const ScanConfig& config);

// ---------------------------------------------------------------------------
// Search for sequential-decomposition failures (nonzero LTP residual).
// ---------------------------------------------------------------------------

struct ViolationSearchOptions {
  /// Fixed ranks for the drawn state and tests; 0 mixes ranks per draw
  /// (states 1..dim, tests 1..dim-1).
  std::size_t rho_rank = 1;
  std::size_t x_rank = 1;
  std::size_t r_rank = 1;
  /// Draw commuting (diagonal) instances instead; rank fields do not apply.
  /// The best residual then stays at rounding scale — a negative control.
  bool diagonal_only = false;
};

struct ViolationReport {
  std::size_t dim = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  /// Draws whose residual was actually evaluated (degenerate draws are
  /// consumed from the budget but cannot be scored).
  std::uint64_t evaluated = 0;
  /// Signed residual of the best instance; best means largest magnitude.
  double residual = 0;
  std::optional<QuantumTriple> instance;
  /// Set when no search ran (one-dimensional space: everything commutes).
  std::string note;
};

ViolationReport find_ltp_violation(std::size_t dim, std::uint64_t budget,
                                   std::uint64_t seed,
                                   const ViolationSearchOptions& options = {});

// ---------------------------------------------------------------------------
// Monte Carlo convergence of the standard experiments.
// ---------------------------------------------------------------------------

/// The estimate each standard wiring produces: E1 "r", E2 "p", E3 "q",
/// E4 "px", E5 "x".
std::string_view estimate_field(ExperimentKind kind);

/// Inverse of estimate_field; nullopt for names that are not estimates.
std::optional<ExperimentKind> experiment_for_field(std::string_view field);

/// Exact value of that estimate's target for the given instance.
double exact_estimate(ExperimentKind kind, const Instance& instance);

/// The standard wiring applied to the instance's own state and tests.
Pipeline instance_pipeline(ExperimentKind kind, const Instance& instance);

struct ConvergenceRow {
  std::uint64_t n = 0;
  double estimate = 0;
  double std_error = 0;
  double exact = 0;
  double abs_error = 0;
  /// |estimate - exact| <= 5 std_error (a zero standard error demands
  /// exact agreement).
  bool within_band = false;
};

struct ConvergenceTable {
  ExperimentKind kind = ExperimentKind::E1;
  std::string field;
  std::uint64_t seed = 0;
  std::vector<ConvergenceRow> rows;
};

/// One beam run per entry of n_list, each on its own derived seed. The exact
/// column does not depend on the seed.
ConvergenceTable convergence_study(ExperimentKind kind,
                                   const Instance& instance,
                                   const std::vector<std::uint64_t>& n_list,
                                   std::uint64_t seed);

// ---------------------------------------------------------------------------
// Full per-instance evaluation (the exact command's payload).
// ---------------------------------------------------------------------------

/// The seven headline values for one instance. A field is empty when its
/// defining ratio is degenerate; `reasons` then carries one entry per empty
/// field. For quantum instances p and q are the rescaled sequential joints
/// of the equivalence report (see QBoostReport) and may exceed 1.
struct ExactReport {
  std::optional<double> r;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> x;
  std::optional<bool> boost;
  std::optional<bool> natural;
  std::optional<double> ltp_residual;
  std::map<std::string, std::string> reasons;
};

ExactReport exact_report(const Instance& instance);

}  // namespace relbeam

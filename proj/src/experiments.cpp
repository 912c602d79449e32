#include <relbeam/experiments.hpp>

#include <algorithm>
#include <cmath>
#include <utility>

#include <relbeam/errors.hpp>
#include <relbeam/tolerances.hpp>

namespace relbeam {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

/// -1, 0, +1 with magnitudes at or below the band collapsing to 0.
int sign_with_band(double v, double band) {
  if (std::abs(v) <= band) return 0;
  return v > 0 ? 1 : -1;
}

constexpr const char* kDegenerateRelevance =
    "relevance probability is 0 or 1; conditioning on the relevance test is "
    "undefined";
constexpr const char* kZeroExpansion =
    "expansion probability is 0; conditioning on the expansion test is "
    "undefined";

}  // namespace

std::string_view model_name(ModelKind kind) {
  return kind == ModelKind::Classical ? "classical" : "quantum";
}

std::optional<ModelKind> model_from_name(std::string_view name) {
  if (name == "classical") return ModelKind::Classical;
  if (name == "quantum") return ModelKind::Quantum;
  return std::nullopt;
}

std::size_t instance_dim(const Instance& instance) {
  return std::visit(
      overloaded{
          [](const ClassicalTriple& t) { return t.state.dim(); },
          [](const QuantumTriple& t) {
            return static_cast<std::size_t>(t.rho.dim());
          },
      },
      instance);
}

bool instance_is_classical(const Instance& instance) {
  return std::holds_alternative<ClassicalTriple>(instance);
}

ClassicalState draw_classical_state(std::size_t dim, RandomSource& rng) {
  std::vector<double> weights(dim);
  double total = 0.0;
  do {
    total = 0.0;
    for (double& w : weights) {
      w = -std::log(1.0 - rng.uniform01());
      total += w;
    }
  } while (total <= 0.0);
  for (double& w : weights) w /= total;
  return ClassicalState(std::move(weights));
}

Event draw_event(std::size_t dim, RandomSource& rng) {
  std::vector<bool> indicator(dim);
  for (std::size_t i = 0; i < dim; ++i) indicator[i] = rng.bernoulli(0.5);
  return Event::from_indicator(std::move(indicator));
}

ClassicalTriple draw_classical_triple(std::size_t dim, RandomSource& rng) {
  ClassicalState state = draw_classical_state(dim, rng);
  Event x = draw_event(dim, rng);
  Event r = draw_event(dim, rng);
  return ClassicalTriple{std::move(state), std::move(x), std::move(r)};
}

QuantumTriple draw_quantum_triple(std::size_t dim, RandomSource& rng) {
  const auto n = static_cast<Eigen::Index>(dim);
  if (dim < 2) {
    // No nontrivial test exists; the caller's precondition check will skip it.
    return QuantumTriple{DensityMatrix::maximally_mixed(n),
                         Projector::identity(n), Projector::identity(n)};
  }
  const auto rho_rank = static_cast<Eigen::Index>(1 + rng.below(dim));
  const auto x_rank = static_cast<Eigen::Index>(1 + rng.below(dim - 1));
  const auto r_rank = static_cast<Eigen::Index>(1 + rng.below(dim - 1));
  DensityMatrix rho = random_density(n, rho_rank, rng);
  Projector x = random_projector(n, x_rank, rng);
  Projector r = random_projector(n, r_rank, rng);
  return QuantumTriple{std::move(rho), std::move(x), std::move(r)};
}

namespace {

std::optional<std::string> classify_preconditions(double pr, double px,
                                                  double band) {
  // Never admit values the core operations themselves treat as null mass.
  const double cutoff = std::max(band, kNullMass);
  if (pr <= cutoff || pr >= 1.0 - cutoff) return kDegenerateRelevance;
  if (px <= cutoff) return kZeroExpansion;
  return std::nullopt;
}

}  // namespace

std::optional<std::string> precondition_failure(const ClassicalTriple& t,
                                                double band) {
  return classify_preconditions(prob(t.state, t.r), prob(t.state, t.x), band);
}

std::optional<std::string> precondition_failure(const QuantumTriple& t,
                                                double band) {
  return classify_preconditions(born_prob(t.rho, t.r), born_prob(t.rho, t.x),
                                band);
}

double ScanConfig::effective_band() const {
  if (band > 0) return band;
  return model == ModelKind::Classical ? kProbTol : kQuantumTol;
}

void ScanConfig::validate() const {
  if (dims.empty()) throw ConfigError("scan needs at least one dimension");
  for (std::size_t d : dims) {
    if (d < 1) throw ConfigError("scan dimensions must be at least 1");
  }
  if (trials < 1) throw ConfigError("scan needs at least one trial per dim");
  if (band < 0) throw ConfigError("scan band must be nonnegative");
}

std::uint64_t ScanReport::total_disagree() const {
  std::uint64_t total = 0;
  for (const DimScan& cell : dims) total += cell.disagree;
  return total;
}

ScanReport scan_equivalence(const ScanConfig& config) {
  config.validate();
  const double band = config.effective_band();

  ScanReport report;
  report.model = config.model;
  report.trials = config.trials;
  report.seed = config.seed;
  report.band = band;

  std::uint64_t ordinal = 0;
  for (std::size_t dim : config.dims) {
    DimScan cell;
    cell.dim = dim;
    for (std::uint64_t t = 0; t < config.trials; ++t, ++ordinal) {
      RandomSource rng = RandomSource::derive(config.seed, ordinal);
      double dx = 0, dpq = 0;
      std::optional<std::string> skip;
      if (config.model == ModelKind::Classical) {
        ClassicalTriple triple = draw_classical_triple(dim, rng);
        skip = precondition_failure(triple, band);
        if (!skip) {
          BoostReport b = boost_indicators(triple.state, triple.x, triple.r);
          dx = b.x - b.r;
          dpq = b.p - b.q;
        }
      } else {
        QuantumTriple triple = draw_quantum_triple(dim, rng);
        skip = precondition_failure(triple, band);
        if (!skip) {
          QBoostReport b = quantum_equivalence(triple.rho, triple.x, triple.r);
          dx = b.x - b.r;
          dpq = b.p - b.q;
        }
      }
      if (skip) {
        ++cell.skipped;
        ++cell.skip_reasons[*skip];
        continue;
      }
      const int sx = sign_with_band(dx, band);
      const int spq = sign_with_band(dpq, band);
      if (sx == 0 || spq == 0) {
        ++cell.tie;
        cell.worst_tie_gap = std::max(cell.worst_tie_gap, std::abs(dx));
      } else if (sx == spq) {
        ++cell.agree;
      } else {
        ++cell.disagree;
      }
    }
    report.dims.push_back(std::move(cell));
  }
  return report;
}

namespace {

QuantumTriple draw_violation_candidate(std::size_t dim, RandomSource& rng,
                                       const ViolationSearchOptions& options) {
  if (options.diagonal_only) {
    ClassicalTriple c = draw_classical_triple(dim, rng);
    return embed_classical(c.state, c.x, c.r);
  }
  auto pick = [&rng](std::size_t fixed, std::size_t lo, std::size_t hi) {
    const std::size_t rank = fixed != 0 ? fixed : lo + rng.below(hi - lo + 1);
    return static_cast<Eigen::Index>(rank);
  };
  const auto n = static_cast<Eigen::Index>(dim);
  const Eigen::Index rho_rank = pick(options.rho_rank, 1, dim);
  const Eigen::Index x_rank = pick(options.x_rank, 1, dim - 1);
  const Eigen::Index r_rank = pick(options.r_rank, 1, dim - 1);
  DensityMatrix rho = random_density(n, rho_rank, rng);
  Projector x = random_projector(n, x_rank, rng);
  Projector r = random_projector(n, r_rank, rng);
  return QuantumTriple{std::move(rho), std::move(x), std::move(r)};
}

}  // namespace

ViolationReport find_ltp_violation(std::size_t dim, std::uint64_t budget,
                                   std::uint64_t seed,
                                   const ViolationSearchOptions& options) {
  if (dim < 1) throw ConfigError("violation search needs dim >= 1");
  if (budget < 1) throw ConfigError("violation search needs budget >= 1");
  if (options.rho_rank > dim) {
    throw InvalidRankError("state rank exceeds the dimension");
  }
  if (options.x_rank > dim || options.r_rank > dim) {
    throw InvalidRankError("test rank exceeds the dimension");
  }

  ViolationReport report;
  report.dim = dim;
  report.budget = budget;
  report.seed = seed;
  if (dim == 1) {
    report.note =
        "one-dimensional space: all operators commute, the residual is "
        "identically zero";
    return report;
  }

  for (std::uint64_t t = 0; t < budget; ++t) {
    RandomSource rng = RandomSource::derive(seed, t);
    QuantumTriple triple = draw_violation_candidate(dim, rng, options);
    const double pr = born_prob(triple.rho, triple.r);
    if (pr <= kNullMass || pr >= 1.0 - kNullMass) continue;
    const double residual = ltp_residual_q(triple.rho, triple.x, triple.r);
    ++report.evaluated;
    if (!report.instance || std::abs(residual) > std::abs(report.residual)) {
      report.residual = residual;
      report.instance = std::move(triple);
    }
  }
  return report;
}

std::string_view estimate_field(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::E1:
      return "r";
    case ExperimentKind::E2:
      return "p";
    case ExperimentKind::E3:
      return "q";
    case ExperimentKind::E4:
      return "px";
    case ExperimentKind::E5:
      return "x";
  }
  throw Error("unknown experiment kind");
}

std::optional<ExperimentKind> experiment_for_field(std::string_view field) {
  if (field == "r") return ExperimentKind::E1;
  if (field == "p") return ExperimentKind::E2;
  if (field == "q") return ExperimentKind::E3;
  if (field == "px") return ExperimentKind::E4;
  if (field == "x") return ExperimentKind::E5;
  return std::nullopt;
}

double exact_estimate(ExperimentKind kind, const Instance& instance) {
  return std::visit(
      overloaded{
          [&](const ClassicalTriple& t) {
            switch (kind) {
              case ExperimentKind::E1:
                return prob(t.state, t.r);
              case ExperimentKind::E2:
                return cond_prob(t.state, t.x, t.r);
              case ExperimentKind::E3:
                return cond_prob(t.state, t.x, t.r.complement());
              case ExperimentKind::E4:
                return prob(t.state, t.x);
              case ExperimentKind::E5:
                return cond_prob(t.state, t.r, t.x);
            }
            throw Error("unknown experiment kind");
          },
          [&](const QuantumTriple& t) {
            switch (kind) {
              case ExperimentKind::E1:
                return born_prob(t.rho, t.r);
              case ExperimentKind::E2:
                return cond_given_r(t.rho, t.x, t.r);
              case ExperimentKind::E3:
                return cond_given_r(t.rho, t.x, t.r.complement());
              case ExperimentKind::E4:
                return born_prob(t.rho, t.x);
              case ExperimentKind::E5:
                return expansion_prob(t.rho, t.x, t.r);
            }
            throw Error("unknown experiment kind");
          },
      },
      instance);
}

Pipeline instance_pipeline(ExperimentKind kind, const Instance& instance) {
  return std::visit(
      overloaded{
          [&](const ClassicalTriple& t) {
            return standard_experiment(kind, Emitter{t.state},
                                       std::variant<Event, Projector>(t.x),
                                       std::variant<Event, Projector>(t.r));
          },
          [&](const QuantumTriple& t) {
            return standard_experiment(kind, Emitter{t.rho},
                                       std::variant<Event, Projector>(t.x),
                                       std::variant<Event, Projector>(t.r));
          },
      },
      instance);
}

ConvergenceTable convergence_study(ExperimentKind kind,
                                   const Instance& instance,
                                   const std::vector<std::uint64_t>& n_list,
                                   std::uint64_t seed) {
  if (n_list.empty()) {
    throw ConfigError("convergence study needs at least one run length");
  }
  for (std::uint64_t n : n_list) {
    if (n < 1) throw ConfigError("run lengths must be at least 1");
  }

  ConvergenceTable table;
  table.kind = kind;
  table.field = std::string(estimate_field(kind));
  table.seed = seed;

  const double exact = exact_estimate(kind, instance);
  const Pipeline pipeline = instance_pipeline(kind, instance);
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::uint64_t row_seed = splitmix64(seed) + i;
    const FrequencyTable counts = run(pipeline, n_list[i], row_seed);
    const EstimateEntry& entry = estimate(counts).require(table.field);

    ConvergenceRow row;
    row.n = n_list[i];
    row.estimate = entry.value;
    row.std_error = entry.std_error;
    row.exact = exact;
    row.abs_error = std::abs(entry.value - exact);
    row.within_band = row.abs_error <= 5.0 * entry.std_error;
    table.rows.push_back(row);
  }
  return table;
}

ExactReport exact_report(const Instance& instance) {
  ExactReport out;
  std::visit(
      overloaded{
          [&](const ClassicalTriple& t) {
            const double pr = prob(t.state, t.r);
            const double px = prob(t.state, t.x);
            out.r = pr;
            const bool r_ok = pr > kNullMass && pr < 1.0 - kNullMass;
            const bool x_ok = px > kNullMass;
            if (r_ok) {
              out.p = cond_prob(t.state, t.x, t.r);
              out.q = cond_prob(t.state, t.x, t.r.complement());
              out.ltp_residual = ltp_residual(t.state, t.x, t.r);
            } else {
              out.reasons["p"] = kDegenerateRelevance;
              out.reasons["q"] = kDegenerateRelevance;
              out.reasons["ltp_residual"] = kDegenerateRelevance;
            }
            if (x_ok) {
              out.x = cond_prob(t.state, t.r, t.x);
            } else {
              out.reasons["x"] = kZeroExpansion;
              out.reasons["boost"] = kZeroExpansion;
            }
            if (r_ok && x_ok) {
              const BoostReport b = boost_indicators(t.state, t.x, t.r);
              out.boost = b.boost;
              out.natural = b.natural;
            } else if (x_ok) {
              out.boost = *out.x - pr > kStrictMargin;
              out.reasons["natural"] = kDegenerateRelevance;
            } else if (r_ok) {
              out.natural = *out.p - *out.q > kStrictMargin;
            }
          },
          [&](const QuantumTriple& t) {
            const double pr = born_prob(t.rho, t.r);
            const double px = born_prob(t.rho, t.x);
            out.r = pr;
            const bool r_ok = pr > kNullMass && pr < 1.0 - kNullMass;
            const bool x_ok = px > kNullMass;
            if (r_ok && x_ok) {
              const QBoostReport b = quantum_equivalence(t.rho, t.x, t.r);
              out.p = b.p;
              out.q = b.q;
              out.x = b.x;
              out.boost = b.boost;
              out.natural = b.natural;
              out.ltp_residual = b.ltp_residual;
              return;
            }
            if (r_ok) {
              // tr(X rho) = 0 forces X rho X = 0, so both rescaled joints
              // vanish exactly; only the ratios conditioned on X are lost.
              out.p = 0.0;
              out.q = 0.0;
              out.natural = false;
              out.ltp_residual = ltp_residual_q(t.rho, t.x, t.r);
              out.reasons["x"] = kZeroExpansion;
              out.reasons["boost"] = kZeroExpansion;
            } else {
              out.reasons["p"] = kDegenerateRelevance;
              out.reasons["q"] = kDegenerateRelevance;
              out.reasons["natural"] = kDegenerateRelevance;
              out.reasons["ltp_residual"] = kDegenerateRelevance;
              if (x_ok) {
                out.x = expansion_prob(t.rho, t.x, t.r);
                out.boost = *out.x - pr > kStrictMargin;
              } else {
                out.reasons["x"] = kZeroExpansion;
                out.reasons["boost"] = kZeroExpansion;
              }
            }
          },
      },
      instance);
  return out;
}

}  // namespace relbeam

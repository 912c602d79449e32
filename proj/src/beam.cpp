#include "relbeam/beam.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "relbeam/tolerances.hpp"

namespace relbeam {

std::size_t Emitter::dim() const {
  if (is_classical()) return std::get<ClassicalState>(state).dim();
  return static_cast<std::size_t>(std::get<DensityMatrix>(state).dim());
}

std::size_t Appliance::dim() const {
  if (std::holds_alternative<Event>(property)) {
    return std::get<Event>(property).dim();
  }
  return static_cast<std::size_t>(std::get<Projector>(property).dim());
}

void Pipeline::validate() const {
  if (stages.empty()) {
    throw Error("pipeline needs at least one appliance");
  }
  const bool classical = emitter.is_classical();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const Appliance& stage = stages[i];
    if (std::holds_alternative<Event>(stage.property) != classical) {
      throw DimensionMismatchError("stage " + std::to_string(i) +
                                   ": property kind does not match the emitter (" +
                                   (classical ? "classical" : "quantum") + " beam)");
    }
    if (stage.dim() != emitter.dim()) {
      throw DimensionMismatchError("stage " + std::to_string(i) + ": dimension " +
                                   std::to_string(stage.dim()) +
                                   " does not match emitter dimension " +
                                   std::to_string(emitter.dim()));
    }
  }
}

std::uint64_t FrequencyTable::count_prefix(std::string_view prefix) const {
  std::uint64_t total = 0;
  for (const auto& [path, count] : paths) {
    if (path.size() >= prefix.size() && path.compare(0, prefix.size(), prefix) == 0) {
      total += count;
    }
  }
  return total;
}

namespace {

double clamp01(double v) {
  if (v < 0.0) return 0.0;
  if (v > 1.0) return 1.0;
  return v;
}

double trace_product_re(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace

FrequencyTable run(const Pipeline& pipeline, std::uint64_t n, std::uint64_t seed,
                   const RunOptions& options) {
  if (n < 1) throw Error("run: n must be >= 1");
  pipeline.validate();

  const bool classical = pipeline.emitter.is_classical();
  const std::size_t stage_count = pipeline.stages.size();

  FrequencyTable table;
  table.stages.resize(stage_count);
  table.layout.reserve(stage_count);
  for (const Appliance& stage : pipeline.stages) {
    table.layout.push_back(StageLayout{stage.label, stage.mode});
  }

  // Projector matrices (and their complements, for the no-click branch)
  // pulled out of the variant once, not per particle.
  std::vector<const CMatrix*> projectors(stage_count, nullptr);
  std::vector<CMatrix> blockers(stage_count);
  if (!classical) {
    for (std::size_t s = 0; s < stage_count; ++s) {
      const CMatrix& p = std::get<Projector>(pipeline.stages[s].property).matrix();
      projectors[s] = &p;
      blockers[s] = CMatrix::Identity(p.rows(), p.cols()) - p;
    }
  }

  CMatrix personal, scratch;
  std::string path;
  path.reserve(stage_count);

  while (table.recorded < n) {
    if (table.emitted >= options.emission_cap) {
      throw ProgressImpossibleError(
          "recorded " + std::to_string(table.recorded) + " of " + std::to_string(n) +
          " particles after " + std::to_string(table.emitted) +
          " emissions; selection lets (almost) nothing through");
    }
    RandomSource rng = RandomSource::derive(seed, table.emitted);
    ++table.emitted;

    std::size_t outcome_index = 0;
    if (classical) {
      outcome_index = sample_outcome(std::get<ClassicalState>(pipeline.emitter.state), rng);
    } else {
      personal = std::get<DensityMatrix>(pipeline.emitter.state).matrix();
    }

    path.clear();
    bool alive = true;
    for (std::size_t s = 0; s < stage_count && alive; ++s) {
      const Appliance& stage = pipeline.stages[s];
      bool click;
      double click_mass = 0.0;
      if (classical) {
        click = std::get<Event>(stage.property).contains(outcome_index);
      } else {
        click_mass = clamp01(trace_product_re(*projectors[s], personal));
        click = rng.bernoulli(click_mass);
      }

      StageTally& tally = table.stages[s];
      ++tally.entered;
      if (click) ++tally.clicked;
      path.push_back(click ? '1' : '0');

      switch (stage.mode) {
        case ApplianceMode::Record:
          break;
        case ApplianceMode::Select:
          alive = click;
          break;
        case ApplianceMode::Block:
          alive = !click;
          break;
      }
      if (!alive) break;
      ++tally.forwarded;

      // Collapse onto the realized branch, but only when someone downstream
      // will look at the state again.
      if (!classical && s + 1 < stage_count) {
        const double branch_mass = click ? click_mass : 1.0 - click_mass;
        if (branch_mass <= kNullMass) {
          throw NullPostSelectionError("collapse onto a branch of probability " +
                                       std::to_string(branch_mass));
        }
        const CMatrix& branch = click ? *projectors[s] : blockers[s];
        scratch.noalias() = branch * personal;
        personal.noalias() = scratch * branch;
        personal /= branch_mass;
      }
    }

    if (alive) {
      ++table.recorded;
      ++table.paths[path];
    }
  }

  return table;
}

namespace {

std::optional<EstimateEntry> make_entry(std::uint64_t numer, std::uint64_t denom) {
  if (denom == 0) return std::nullopt;
  EstimateEntry entry;
  entry.numer = numer;
  entry.denom = denom;
  entry.value = static_cast<double>(numer) / static_cast<double>(denom);
  entry.std_error =
      std::sqrt(entry.value * (1.0 - entry.value) / static_cast<double>(denom));
  return entry;
}

bool layout_is(const FrequencyTable& t, std::initializer_list<std::pair<const char*, ApplianceMode>> want) {
  if (t.layout.size() != want.size()) return false;
  std::size_t i = 0;
  for (const auto& [label, mode] : want) {
    if (t.layout[i].label != label || t.layout[i].mode != mode) return false;
    ++i;
  }
  return true;
}

}  // namespace

Estimates estimate(const FrequencyTable& table) {
  using M = ApplianceMode;
  Estimates est;

  if (layout_is(table, {{"R", M::Record}})) {
    est.r = make_entry(table.count_prefix("1"), table.recorded);
  } else if (layout_is(table, {{"X", M::Record}})) {
    est.px = make_entry(table.count_prefix("1"), table.recorded);
  } else if (layout_is(table, {{"R", M::Select}, {"X", M::Record}})) {
    est.p = make_entry(table.count_prefix("11"), table.recorded);
  } else if (layout_is(table, {{"R", M::Block}, {"X", M::Record}})) {
    est.q = make_entry(table.count_prefix("01"), table.recorded);
  } else if (layout_is(table, {{"X", M::Select}, {"R", M::Record}})) {
    est.x = make_entry(table.count_prefix("11"), table.recorded);
  } else if (layout_is(table, {{"R", M::Record}, {"X", M::Record}})) {
    const std::uint64_t n_r = table.count_prefix("1");
    const std::uint64_t n_r_bar = table.count_prefix("0");
    est.r = make_entry(n_r, table.recorded);
    est.p = make_entry(table.count_prefix("11"), n_r);
    est.q = make_entry(table.count_prefix("01"), n_r_bar);
  } else if (layout_is(table, {{"X", M::Record}, {"R", M::Record}})) {
    const std::uint64_t n_x = table.count_prefix("1");
    est.px = make_entry(n_x, table.recorded);
    est.x = make_entry(table.count_prefix("11"), n_x);
  }
  return est;
}

const EstimateEntry& Estimates::require(std::string_view name) const {
  const std::optional<EstimateEntry>* slot = nullptr;
  if (name == "r") slot = &r;
  else if (name == "p") slot = &p;
  else if (name == "q") slot = &q;
  else if (name == "x") slot = &x;
  else if (name == "px") slot = &px;
  if (slot == nullptr) {
    throw AbsentEstimateError("unknown estimate '" + std::string(name) + "'");
  }
  if (!slot->has_value()) {
    throw AbsentEstimateError("estimate '" + std::string(name) +
                              "' is absent: zero denominator or not measured by this pipeline");
  }
  return **slot;
}

std::string_view experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::E1: return "E1";
    case ExperimentKind::E2: return "E2";
    case ExperimentKind::E3: return "E3";
    case ExperimentKind::E4: return "E4";
    case ExperimentKind::E5: return "E5";
  }
  return "?";
}

std::optional<ExperimentKind> experiment_from_name(std::string_view name) {
  if (name == "E1") return ExperimentKind::E1;
  if (name == "E2") return ExperimentKind::E2;
  if (name == "E3") return ExperimentKind::E3;
  if (name == "E4") return ExperimentKind::E4;
  if (name == "E5") return ExperimentKind::E5;
  return std::nullopt;
}

Pipeline standard_experiment(ExperimentKind kind, Emitter emitter,
                             std::variant<Event, Projector> x_property,
                             std::variant<Event, Projector> r_property) {
  using M = ApplianceMode;
  std::vector<Appliance> stages;
  switch (kind) {
    case ExperimentKind::E1:
      stages = {Appliance{"R", std::move(r_property), M::Record}};
      break;
    case ExperimentKind::E2:
      stages = {Appliance{"R", std::move(r_property), M::Select},
                Appliance{"X", std::move(x_property), M::Record}};
      break;
    case ExperimentKind::E3:
      stages = {Appliance{"R", std::move(r_property), M::Block},
                Appliance{"X", std::move(x_property), M::Record}};
      break;
    case ExperimentKind::E4:
      stages = {Appliance{"X", std::move(x_property), M::Record}};
      break;
    case ExperimentKind::E5:
      stages = {Appliance{"X", std::move(x_property), M::Select},
                Appliance{"R", std::move(r_property), M::Record}};
      break;
  }
  Pipeline pipeline{std::move(emitter), std::move(stages)};
  pipeline.validate();
  return pipeline;
}

}  // namespace relbeam

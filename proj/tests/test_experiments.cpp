#include <doctest.h>

#include <cmath>
#include <vector>

#include <relbeam/config.hpp>
#include <relbeam/errors.hpp>
#include <relbeam/experiments.hpp>
#include <relbeam/report.hpp>
#include <relbeam/tolerances.hpp>

using namespace relbeam;

namespace {

CVector ket(std::initializer_list<Complex> entries) {
  CVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const Complex& e : entries) v(i++) = e;
  return v;
}

Instance explicit_quantum_instance() {
  // rho = X = the |+| ray, R = the |0| ray: the maximal-residual instance.
  const CVector plus = ket({Complex(1), Complex(1)});
  return QuantumTriple{DensityMatrix::pure(plus), Projector::onto(plus),
                       Projector::onto(ket({Complex(1), Complex(0)}))};
}

bool same_scan(const ScanReport& a, const ScanReport& b) {
  if (a.dims.size() != b.dims.size()) return false;
  for (std::size_t i = 0; i < a.dims.size(); ++i) {
    const DimScan& x = a.dims[i];
    const DimScan& y = b.dims[i];
    if (x.dim != y.dim || x.agree != y.agree || x.tie != y.tie ||
        x.disagree != y.disagree || x.skipped != y.skipped ||
        x.worst_tie_gap != y.worst_tie_gap) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("model names round-trip") {
  CHECK(model_name(ModelKind::Classical) == "classical");
  CHECK(model_name(ModelKind::Quantum) == "quantum");
  CHECK(model_from_name("classical") == ModelKind::Classical);
  CHECK(model_from_name("quantum") == ModelKind::Quantum);
  CHECK_FALSE(model_from_name("spooky").has_value());
}

TEST_CASE("instance generators produce valid draws") {
  SUBCASE("classical state sits on the simplex") {
    RandomSource rng(1);
    const ClassicalState s = draw_classical_state(6, rng);
    double total = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(s.weight(i) > 0.0);
      total += s.weight(i);
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  SUBCASE("events and triples are reproducible") {
    RandomSource a(5), b(5);
    CHECK(draw_event(10, a).members() == draw_event(10, b).members());
    const ClassicalTriple ta = draw_classical_triple(4, a);
    const ClassicalTriple tb = draw_classical_triple(4, b);
    CHECK(ta.state.weights() == tb.state.weights());
    CHECK(ta.x.members() == tb.x.members());
    CHECK(ta.r.members() == tb.r.members());
  }
  SUBCASE("quantum triples keep test ranks away from the trivial ones") {
    RandomSource rng(12);
    for (int t = 0; t < 20; ++t) {
      const QuantumTriple q = draw_quantum_triple(4, rng);
      CHECK(std::abs(q.rho.matrix().trace().real() - 1.0) <= 1e-12);
      const double x_rank = q.x.matrix().trace().real();
      const double r_rank = q.r.matrix().trace().real();
      CHECK(x_rank >= 1.0 - 1e-8);
      CHECK(x_rank <= 3.0 + 1e-8);
      CHECK(r_rank >= 1.0 - 1e-8);
      CHECK(r_rank <= 3.0 + 1e-8);
    }
  }
  SUBCASE("precondition screening") {
    const ClassicalTriple degenerate{ClassicalState::uniform(2), Event(2, {0}),
                                     Event::full(2)};
    CHECK(precondition_failure(degenerate, 1e-12).has_value());
    const ClassicalTriple empty_x{ClassicalState::uniform(2), Event::none(2),
                                  Event(2, {0})};
    CHECK(precondition_failure(empty_x, 1e-12).has_value());
    const ClassicalTriple fine{ClassicalState::uniform(2), Event(2, {0}),
                               Event(2, {1})};
    CHECK_FALSE(precondition_failure(fine, 1e-12).has_value());
  }
}

TEST_CASE("scan configuration validates itself") {
  ScanConfig config;
  config.dims = {2};
  config.trials = 10;
  CHECK_NOTHROW(config.validate());

  ScanConfig no_dims = config;
  no_dims.dims.clear();
  CHECK_THROWS_AS(no_dims.validate(), ConfigError);

  ScanConfig zero_dim = config;
  zero_dim.dims = {2, 0};
  CHECK_THROWS_AS(zero_dim.validate(), ConfigError);

  ScanConfig no_trials = config;
  no_trials.trials = 0;
  CHECK_THROWS_AS(no_trials.validate(), ConfigError);

  ScanConfig bad_band = config;
  bad_band.band = -1e-9;
  CHECK_THROWS_AS(bad_band.validate(), ConfigError);

  CHECK(config.effective_band() == kProbTol);
  config.model = ModelKind::Quantum;
  CHECK(config.effective_band() == kQuantumTol);
  config.band = 1e-6;
  CHECK(config.effective_band() == 1e-6);
}

TEST_CASE("equivalence scan finds no sign disagreements") {
  SUBCASE("classical") {
    ScanConfig config;
    config.model = ModelKind::Classical;
    config.dims = {2, 4, 8};
    config.trials = 700;
    config.seed = 20260823;
    const ScanReport report = scan_equivalence(config);
    CHECK(report.band == kProbTol);
    REQUIRE(report.dims.size() == 3);
    for (const DimScan& cell : report.dims) {
      CHECK(cell.total() == 700);
      CHECK(cell.disagree == 0);
    }
    // Fair-coin events at dim 2 are degenerate half the time; the skip
    // tally must explain every skipped trial.
    CHECK(report.dims[0].skipped > 200);
    std::uint64_t reasons = 0;
    for (const auto& [_, count] : report.dims[0].skip_reasons) reasons += count;
    CHECK(reasons == report.dims[0].skipped);
    CHECK(report.total_disagree() == 0);
  }
  SUBCASE("quantum") {
    ScanConfig config;
    config.model = ModelKind::Quantum;
    config.dims = {2, 3, 4};
    config.trials = 400;
    config.seed = 814;
    const ScanReport report = scan_equivalence(config);
    CHECK(report.band == kQuantumTol);
    for (const DimScan& cell : report.dims) {
      CHECK(cell.total() == 400);
      CHECK(cell.disagree == 0);
      CHECK(cell.agree > 0);
      if (cell.tie == 0) CHECK(cell.worst_tie_gap == 0.0);
    }
  }
  SUBCASE("one-dimensional spaces offer no nondegenerate instance") {
    ScanConfig config;
    config.dims = {1};
    config.trials = 50;
    config.seed = 9;
    for (ModelKind model : {ModelKind::Classical, ModelKind::Quantum}) {
      config.model = model;
      const ScanReport report = scan_equivalence(config);
      REQUIRE(report.dims.size() == 1);
      CHECK(report.dims[0].skipped == 50);
    }
  }
  SUBCASE("scans are reproducible") {
    ScanConfig config;
    config.model = ModelKind::Quantum;
    config.dims = {2, 3};
    config.trials = 100;
    config.seed = 5150;
    CHECK(same_scan(scan_equivalence(config), scan_equivalence(config)));
  }
}

TEST_CASE("violation search") {
  SUBCASE("a one-dimensional search degenerates to a note") {
    const ViolationReport report = find_ltp_violation(1, 100, 3);
    CHECK(report.residual == 0.0);
    CHECK(report.evaluated == 0);
    CHECK_FALSE(report.instance.has_value());
    CHECK_FALSE(report.note.empty());
  }
  SUBCASE("rank-1 qubit instances reach a large residual quickly") {
    const ViolationReport report = find_ltp_violation(2, 2000, 424242);
    REQUIRE(report.instance.has_value());
    CHECK(report.evaluated > 0);
    CHECK(report.evaluated <= 2000);
    CHECK(std::abs(report.residual) >= 0.25);
    // the winning instance reproduces its own score
    const QuantumTriple& best = *report.instance;
    CHECK(std::abs(ltp_residual_q(best.rho, best.x, best.r) -
                   report.residual) <= 1e-12);
    // and survives a serialization round trip
    const nlohmann::json j = instance_to_json(Instance{best});
    const Instance back = parse_instance(j, "instance");
    REQUIRE(std::holds_alternative<QuantumTriple>(back));
    const QuantumTriple& q = std::get<QuantumTriple>(back);
    CHECK(std::abs(ltp_residual_q(q.rho, q.x, q.r) - report.residual) <=
          1e-12);
  }
  SUBCASE("searches are reproducible and seed-sensitive") {
    const ViolationReport a = find_ltp_violation(3, 500, 77);
    const ViolationReport b = find_ltp_violation(3, 500, 77);
    CHECK(a.residual == b.residual);
    CHECK(a.evaluated == b.evaluated);
    const ViolationReport c = find_ltp_violation(3, 500, 78);
    CHECK(a.residual != c.residual);
  }
  SUBCASE("commuting instances are a negative control") {
    ViolationSearchOptions options;
    options.diagonal_only = true;
    const ViolationReport report = find_ltp_violation(3, 500, 11, options);
    CHECK(report.evaluated > 0);
    CHECK(std::abs(report.residual) <= 1e-10);
  }
  SUBCASE("mixed ranks work") {
    ViolationSearchOptions options;
    options.rho_rank = 0;
    options.x_rank = 0;
    options.r_rank = 0;
    const ViolationReport report = find_ltp_violation(4, 300, 23, options);
    CHECK(report.instance.has_value());
    CHECK(std::abs(report.residual) > 0.0);
  }
  SUBCASE("bad parameters are refused") {
    CHECK_THROWS_AS(find_ltp_violation(0, 100, 1), ConfigError);
    CHECK_THROWS_AS(find_ltp_violation(2, 0, 1), ConfigError);
    ViolationSearchOptions options;
    options.x_rank = 5;
    CHECK_THROWS_AS(find_ltp_violation(3, 100, 1, options), InvalidRankError);
  }
}

TEST_CASE("experiment fields and exact targets") {
  SUBCASE("field names invert") {
    for (ExperimentKind k : {ExperimentKind::E1, ExperimentKind::E2,
                             ExperimentKind::E3, ExperimentKind::E4,
                             ExperimentKind::E5}) {
      CHECK(experiment_for_field(estimate_field(k)) == k);
    }
    CHECK_FALSE(experiment_for_field("boost").has_value());
  }
  SUBCASE("classical exact values") {
    const Instance inst = ClassicalTriple{ClassicalState::uniform(4),
                                          Event(4, {0}), Event(4, {0, 1})};
    CHECK(exact_estimate(ExperimentKind::E1, inst) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(exact_estimate(ExperimentKind::E2, inst) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(exact_estimate(ExperimentKind::E3, inst) == 0.0);
    CHECK(exact_estimate(ExperimentKind::E4, inst) ==
          doctest::Approx(0.25).epsilon(1e-15));
    CHECK(exact_estimate(ExperimentKind::E5, inst) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("quantum exact values") {
    const Instance inst = explicit_quantum_instance();
    CHECK(exact_estimate(ExperimentKind::E1, inst) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(exact_estimate(ExperimentKind::E2, inst) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(exact_estimate(ExperimentKind::E3, inst) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(exact_estimate(ExperimentKind::E4, inst) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exact_estimate(ExperimentKind::E5, inst) ==
          doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("pipelines carry the instance's own operators") {
    const Instance inst = ClassicalTriple{ClassicalState::uniform(4),
                                          Event(4, {0}), Event(4, {0, 1})};
    const Pipeline p = instance_pipeline(ExperimentKind::E2, inst);
    REQUIRE(p.stages.size() == 2);
    CHECK(p.stages[0].label == "R");
    CHECK(p.stages[0].mode == ApplianceMode::Select);
    CHECK(p.emitter.is_classical());
    CHECK_NOTHROW(p.validate());

    const Pipeline q = instance_pipeline(ExperimentKind::E5,
                                         explicit_quantum_instance());
    CHECK(q.stages[0].label == "X");
    CHECK_FALSE(q.emitter.is_classical());
    CHECK_NOTHROW(q.validate());
  }
}

TEST_CASE("convergence study") {
  SUBCASE("classical relevance frequency") {
    const Instance inst = ClassicalTriple{ClassicalState::uniform(2),
                                          Event(2, {1}), Event(2, {0})};
    const std::vector<std::uint64_t> ns = {400, 3600, 10000};
    const ConvergenceTable table =
        convergence_study(ExperimentKind::E1, inst, ns, 5);
    CHECK(table.kind == ExperimentKind::E1);
    CHECK(table.field == "r");
    CHECK(table.seed == 5);
    REQUIRE(table.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const ConvergenceRow& row = table.rows[i];
      CHECK(row.n == ns[i]);
      CHECK(row.exact == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(row.abs_error ==
            doctest::Approx(std::abs(row.estimate - row.exact)).epsilon(1e-15));
      CHECK(row.within_band);
      CHECK(row.std_error ==
            doctest::Approx(std::sqrt(row.estimate * (1.0 - row.estimate) /
                                      static_cast<double>(row.n)))
                .epsilon(1e-12));
    }
  }
  SUBCASE("quantum boosted relevance") {
    // rho = |0>, select on the |+| ray, then test the |1| ray: exactly 1/2.
    const Instance inst = QuantumTriple{
        DensityMatrix::pure(ket({Complex(1), Complex(0)})),
        Projector::onto(ket({Complex(1), Complex(1)})),
        Projector::onto(ket({Complex(0), Complex(1)}))};
    const ConvergenceTable table =
        convergence_study(ExperimentKind::E5, inst, {2000, 20000}, 8);
    CHECK(table.field == "x");
    for (const ConvergenceRow& row : table.rows) {
      CHECK(row.exact == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(row.within_band);
    }
  }
  SUBCASE("studies are reproducible") {
    const Instance inst = ClassicalTriple{ClassicalState::uniform(2),
                                          Event(2, {1}), Event(2, {0})};
    const ConvergenceTable a =
        convergence_study(ExperimentKind::E1, inst, {1000, 1000}, 6);
    const ConvergenceTable b =
        convergence_study(ExperimentKind::E1, inst, {1000, 1000}, 6);
    CHECK(a.rows[0].estimate == b.rows[0].estimate);
    CHECK(a.rows[1].estimate == b.rows[1].estimate);
    // each row draws from its own derived stream
    CHECK(a.rows[0].estimate != a.rows[1].estimate);
    const ConvergenceTable c =
        convergence_study(ExperimentKind::E1, inst, {1000, 1000}, 7);
    CHECK((a.rows[0].estimate != c.rows[0].estimate ||
           a.rows[1].estimate != c.rows[1].estimate));
  }
  SUBCASE("run lengths are validated") {
    const Instance inst = ClassicalTriple{ClassicalState::uniform(2),
                                          Event(2, {1}), Event(2, {0})};
    CHECK_THROWS_AS(convergence_study(ExperimentKind::E1, inst, {}, 1),
                    ConfigError);
    CHECK_THROWS_AS(convergence_study(ExperimentKind::E1, inst, {100, 0}, 1),
                    ConfigError);
  }
}

TEST_CASE("full exact report") {
  SUBCASE("classical, everything defined") {
    const ExactReport rep = exact_report(ClassicalTriple{
        ClassicalState({0.4, 0.1, 0.2, 0.3}), Event(4, {1, 2}),
        Event(4, {0, 1})});
    REQUIRE(rep.r.has_value());
    CHECK(*rep.r == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(*rep.p == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(*rep.q == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(*rep.x == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(*rep.boost == false);
    CHECK(*rep.natural == false);
    CHECK(std::abs(*rep.ltp_residual) <= 1e-13);
    CHECK(rep.reasons.empty());
  }
  SUBCASE("classical, certain relevance") {
    const ExactReport rep = exact_report(ClassicalTriple{
        ClassicalState::uniform(2), Event(2, {0}), Event::full(2)});
    CHECK(*rep.r == 1.0);
    CHECK_FALSE(rep.p.has_value());
    CHECK_FALSE(rep.q.has_value());
    CHECK_FALSE(rep.natural.has_value());
    CHECK_FALSE(rep.ltp_residual.has_value());
    REQUIRE(rep.x.has_value());
    CHECK(*rep.x == 1.0);  // R is the whole space, so P(R|X) = 1
    REQUIRE(rep.boost.has_value());
    CHECK(*rep.boost == false);
    CHECK(rep.reasons.count("p") == 1);
    CHECK(rep.reasons.count("natural") == 1);
  }
  SUBCASE("classical, empty expansion") {
    const ExactReport rep = exact_report(ClassicalTriple{
        ClassicalState::uniform(2), Event::none(2), Event(2, {0})});
    CHECK_FALSE(rep.x.has_value());
    CHECK_FALSE(rep.boost.has_value());
    REQUIRE(rep.p.has_value());
    CHECK(*rep.p == 0.0);
    CHECK(*rep.q == 0.0);
    CHECK(*rep.natural == false);
    CHECK(rep.reasons.count("x") == 1);
    CHECK(rep.reasons.count("boost") == 1);
  }
  SUBCASE("quantum, maximal residual instance") {
    const ExactReport rep = exact_report(explicit_quantum_instance());
    CHECK(*rep.r == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(*rep.p == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*rep.q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*rep.x == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(*rep.boost == false);
    CHECK(*rep.natural == false);
    CHECK(*rep.ltp_residual == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rep.reasons.empty());
  }
  SUBCASE("quantum, orthogonal expansion test") {
    // rho = |0>, X = the |1| ray: post-selection can never succeed, but the
    // sequential joints exist and vanish.
    const ExactReport rep = exact_report(QuantumTriple{
        DensityMatrix::pure(ket({Complex(1), Complex(0)})),
        Projector::onto(ket({Complex(0), Complex(1)})),
        Projector::onto(ket({Complex(1), Complex(1)}))});
    CHECK(*rep.r == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(*rep.p == 0.0);
    CHECK(*rep.q == 0.0);
    CHECK(*rep.natural == false);
    REQUIRE(rep.ltp_residual.has_value());
    CHECK(*rep.ltp_residual == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK_FALSE(rep.x.has_value());
    CHECK_FALSE(rep.boost.has_value());
    CHECK(rep.reasons.count("x") == 1);
  }
  SUBCASE("quantum, certain relevance") {
    const ExactReport rep = exact_report(QuantumTriple{
        DensityMatrix::pure(ket({Complex(1), Complex(0)})),
        Projector::onto(ket({Complex(1), Complex(1)})),
        Projector::onto(ket({Complex(1), Complex(0)}))});
    CHECK(*rep.r == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(rep.p.has_value());
    CHECK_FALSE(rep.ltp_residual.has_value());
    REQUIRE(rep.x.has_value());
    CHECK(*rep.x == doctest::Approx(0.5).epsilon(1e-14));
    REQUIRE(rep.boost.has_value());
    CHECK(*rep.boost == false);  // 0.5 < 1: selecting on X lowers relevance
    CHECK(rep.reasons.count("natural") == 1);
  }
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include <relbeam/errors.hpp>
#include <relbeam/prob.hpp>
#include <relbeam/random.hpp>
#include <relbeam/tolerances.hpp>

using namespace relbeam;

namespace {

/// Every subset of {0..dim-1} as an Event, indexed by bitmask.
Event subset(std::size_t dim, unsigned mask) {
  std::vector<bool> ind(dim);
  for (std::size_t i = 0; i < dim; ++i) ind[i] = (mask >> i) & 1u;
  return Event::from_indicator(std::move(ind));
}

}  // namespace

TEST_CASE("classical state validates its weights") {
  CHECK_THROWS_AS(ClassicalState(std::vector<double>{}),
                  InvariantViolationError);
  CHECK_THROWS_AS(ClassicalState({0.5, -0.1, 0.6}), InvariantViolationError);
  CHECK_THROWS_AS(ClassicalState({0.5, std::nan("")}),
                  InvariantViolationError);
  CHECK_THROWS_AS(ClassicalState({0.5, 0.6}), InvariantViolationError);

  const ClassicalState s({0.25, 0.75});
  CHECK(s.dim() == 2);
  CHECK(s.weight(0) == 0.25);
  CHECK(s.weights() == std::vector<double>{0.25, 0.75});
}

TEST_CASE("uniform and point-mass factories") {
  const ClassicalState u = ClassicalState::uniform(4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(u.weight(i) == 0.25);
  CHECK_THROWS_AS(ClassicalState::uniform(0), InvariantViolationError);

  const ClassicalState p = ClassicalState::point_mass(3, 2);
  CHECK(p.weight(2) == 1.0);
  CHECK(p.weight(0) == 0.0);
  CHECK_THROWS_AS(ClassicalState::point_mass(3, 3), InvariantViolationError);
}

TEST_CASE("event algebra") {
  const Event e(4, {0, 1});
  CHECK(e.dim() == 4);
  CHECK(e.count() == 2);
  CHECK(e.contains(0));
  CHECK_FALSE(e.contains(2));
  CHECK(e.members() == std::vector<std::size_t>{0, 1});

  CHECK(e.complement().members() == std::vector<std::size_t>{2, 3});
  CHECK(e.intersect(Event(4, {1, 2})).members() ==
        std::vector<std::size_t>{1});
  CHECK(e.unite(Event(4, {2})).members() == std::vector<std::size_t>{0, 1, 2});

  CHECK(Event::full(3).count() == 3);
  CHECK(Event::none(3).count() == 0);
  CHECK_THROWS_AS(Event::from_members(3, {3}), DimensionMismatchError);
  CHECK_THROWS_AS(e.intersect(Event(3, {0})), DimensionMismatchError);
  CHECK_THROWS_AS(Event::from_indicator({}), InvariantViolationError);
}

TEST_CASE("event probability") {
  const ClassicalState u = ClassicalState::uniform(4);
  CHECK(prob(u, Event(4, {0, 1})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(prob(u, Event::none(4)) == 0.0);
  CHECK(prob(u, Event::full(4)) == 1.0);
  CHECK_THROWS_AS(prob(u, Event(3, {0})), DimensionMismatchError);
}

TEST_CASE("conditional probability and state revision") {
  const ClassicalState u = ClassicalState::uniform(4);
  CHECK(cond_prob(u, Event(4, {0}), Event(4, {0, 1})) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(cond_prob(u, Event(4, {0}), Event::none(4)),
                  NullConditioningError);

  const ClassicalState revised = condition(u, Event(4, {0, 1}));
  CHECK(revised.weight(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(revised.weight(2) == 0.0);
  CHECK_THROWS_AS(condition(u, Event::none(4)), NullConditioningError);

  const ClassicalState atom = ClassicalState::point_mass(2, 0);
  CHECK_THROWS_AS(condition(atom, Event(2, {1})), NullConditioningError);
}

TEST_CASE("two-branch decomposition of P(X) closes exactly") {
  const ClassicalState s({0.4, 0.1, 0.2, 0.3});
  for (unsigned x_mask = 0; x_mask < 16; ++x_mask) {
    for (unsigned r_mask = 1; r_mask < 15; ++r_mask) {
      const Event r = subset(4, r_mask);
      const double pr = prob(s, r);
      if (pr <= kNullMass || pr >= 1.0 - kNullMass) continue;
      CHECK(std::abs(ltp_residual(s, subset(4, x_mask), r)) <= 1e-13);
    }
  }
  CHECK_THROWS_AS(ltp_residual(s, Event(4, {0}), Event::none(4)),
                  DegenerateRelevanceError);
  CHECK_THROWS_AS(ltp_residual(s, Event(4, {0}), Event::full(4)),
                  DegenerateRelevanceError);
}

TEST_CASE("boost report on known instances") {
  SUBCASE("expansion inside the relevant set") {
    const BoostReport b = boost_indicators(ClassicalState::uniform(4),
                                           Event(4, {0}), Event(4, {0, 1}));
    CHECK(b.r == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b.p == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b.q == 0.0);
    CHECK(b.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.boost);
    CHECK(b.natural);
  }
  SUBCASE("expansion overlapping the non-relevant set more") {
    const BoostReport b = boost_indicators(ClassicalState({0.4, 0.1, 0.2, 0.3}),
                                           Event(4, {1, 2}), Event(4, {0, 1}));
    CHECK(b.r == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(b.p == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(b.q == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(b.x == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_FALSE(b.boost);
    CHECK_FALSE(b.natural);
  }
  SUBCASE("expanding by the full space changes nothing") {
    const BoostReport b = boost_indicators(ClassicalState({0.4, 0.1, 0.2, 0.3}),
                                           Event::full(4), Event(4, {0, 1}));
    CHECK(b.x == doctest::Approx(b.r).epsilon(1e-15));
    CHECK_FALSE(b.boost);
    CHECK_FALSE(b.natural);
  }
  SUBCASE("degenerate inputs are refused") {
    const ClassicalState u = ClassicalState::uniform(4);
    CHECK_THROWS_AS(boost_indicators(u, Event(4, {0}), Event::full(4)),
                    DegenerateRelevanceError);
    CHECK_THROWS_AS(boost_indicators(u, Event::none(4), Event(4, {0})),
                    NullConditioningError);
  }
}

TEST_CASE("the two verdicts agree on every nondegenerate instance") {
  // Exhaustive over all event pairs for a handful of states: the sign of
  // x - r must match the sign of p - q, and the two differences must be
  // related by the factor r(1-r)/P(X).
  const std::vector<ClassicalState> states = {
      ClassicalState::uniform(2),
      ClassicalState({0.9, 0.1}),
      ClassicalState::uniform(4),
      ClassicalState({0.4, 0.1, 0.2, 0.3}),
      ClassicalState({0.55, 0.05, 0.15, 0.05, 0.1, 0.1}),
  };
  for (const ClassicalState& s : states) {
    const auto dim = s.dim();
    const unsigned top = 1u << dim;
    for (unsigned x_mask = 0; x_mask < top; ++x_mask) {
      for (unsigned r_mask = 0; r_mask < top; ++r_mask) {
        const Event x = subset(dim, x_mask);
        const Event r = subset(dim, r_mask);
        const double pr = prob(s, r);
        const double px = prob(s, x);
        if (pr <= kNullMass || pr >= 1.0 - kNullMass || px <= kNullMass) {
          continue;
        }
        const BoostReport b = boost_indicators(s, x, r);
        CHECK(b.boost == b.natural);
        const double scale = b.r * (1.0 - b.r) / px;
        CHECK(std::abs((b.x - b.r) - (b.p - b.q) * scale) <= 1e-12);
      }
    }
  }
}

TEST_CASE("outcome sampling follows the weights") {
  SUBCASE("point mass always yields its atom") {
    const ClassicalState p = ClassicalState::point_mass(5, 3);
    RandomSource rng(11);
    for (int i = 0; i < 100; ++i) CHECK(sample_outcome(p, rng) == 3);
  }
  SUBCASE("frequencies concentrate") {
    const ClassicalState s({0.2, 0.8});
    RandomSource rng(42);
    const int n = 20000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += sample_outcome(s, rng) == 1 ? 1 : 0;
    const double freq = static_cast<double>(ones) / n;
    CHECK(std::abs(freq - 0.8) <= 5.0 * std::sqrt(0.8 * 0.2 / n));
  }
  SUBCASE("a fixed seed reproduces the sequence") {
    const ClassicalState s({0.3, 0.3, 0.4});
    RandomSource a(7), b(7);
    for (int i = 0; i < 200; ++i) {
      CHECK(sample_outcome(s, a) == sample_outcome(s, b));
    }
  }
}

#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "relbeam/errors.hpp"
#include "relbeam/random.hpp"

namespace relbeam {

/// Finite probability distribution over outcomes 0..n-1. Outcomes are bare
/// indices; weights are validated to be nonnegative and sum to 1.
class ClassicalState {
 public:
  explicit ClassicalState(std::vector<double> weights);

  static ClassicalState uniform(std::size_t dim);
  static ClassicalState point_mass(std::size_t dim, std::size_t outcome);

  std::size_t dim() const { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

/// Subset of the sample space, held as an indicator over outcomes.
class Event {
 public:
  Event(std::size_t dim, std::initializer_list<std::size_t> members);

  static Event from_indicator(std::vector<bool> indicator);
  static Event from_members(std::size_t dim,
                            const std::vector<std::size_t>& members);
  static Event full(std::size_t dim);
  static Event none(std::size_t dim);

  std::size_t dim() const { return indicator_.size(); }
  bool contains(std::size_t i) const { return indicator_[i]; }
  std::size_t count() const;
  std::vector<std::size_t> members() const;

  Event complement() const;
  Event intersect(const Event& other) const;
  Event unite(const Event& other) const;

 private:
  explicit Event(std::vector<bool> indicator);

  std::vector<bool> indicator_;
};

/// P(a): total weight of the member outcomes.
double prob(const ClassicalState& state, const Event& a);

/// P(a | given) = P(a ∩ given) / P(given). Throws NullConditioningError when
/// the conditioning event carries no mass.
double cond_prob(const ClassicalState& state, const Event& a,
                 const Event& given);

/// State revised by the outcome "given happened": weights renormalized on the
/// members of `given`, zero elsewhere.
ClassicalState condition(const ClassicalState& state, const Event& given);

/// P(X) - [P(X|R) P(R) + P(X|R̄) P(R̄)]. Identically zero (up to rounding)
/// for every classical state; exposed so the same probe runs on both models.
double ltp_residual(const ClassicalState& state, const Event& x,
                    const Event& r);

/// The four probabilities of the expansion criterion plus the two verdicts.
/// `boost` is x > r (expanding by X raises the relevant fraction); `natural`
/// is p > q (X occurs more often among relevant than non-relevant outcomes).
/// The two verdicts always agree: x - r equals (p - q) * r(1-r)/P(X).
struct BoostReport {
  double r = 0, p = 0, q = 0, x = 0;
  bool boost = false;
  bool natural = false;
};

BoostReport boost_indicators(const ClassicalState& state, const Event& x_event,
                             const Event& r_event);

/// Draws outcome i with probability weight(i).
std::size_t sample_outcome(const ClassicalState& state, RandomSource& rng);

}  // namespace relbeam

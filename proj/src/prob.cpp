#include "relbeam/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "relbeam/tolerances.hpp"

namespace relbeam {

namespace {

double clamp_unit(double v) {
  if (v < 0.0 && v >= -kProbTol) return 0.0;
  if (v > 1.0 && v <= 1.0 + kProbTol) return 1.0;
  return v;
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatchError(std::string(what) + ": dimension " +
                                 std::to_string(b) + " does not match state dimension " +
                                 std::to_string(a));
  }
}

}  // namespace

ClassicalState::ClassicalState(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw InvariantViolationError("classical state needs at least one outcome");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!(w >= 0.0)) {  // also rejects NaN
      throw InvariantViolationError("weight " + std::to_string(i) +
                                    " is negative or not a number");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    throw InvariantViolationError("weights sum to " + std::to_string(sum) +
                                  ", expected 1");
  }
}

ClassicalState ClassicalState::uniform(std::size_t dim) {
  if (dim == 0) throw InvariantViolationError("uniform state needs dim >= 1");
  return ClassicalState(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

ClassicalState ClassicalState::point_mass(std::size_t dim, std::size_t outcome) {
  if (outcome >= dim) throw InvariantViolationError("point mass outside sample space");
  std::vector<double> w(dim, 0.0);
  w[outcome] = 1.0;
  return ClassicalState(std::move(w));
}

Event::Event(std::vector<bool> indicator) : indicator_(std::move(indicator)) {
  if (indicator_.empty()) {
    throw InvariantViolationError("event needs a sample space of size >= 1");
  }
}

Event::Event(std::size_t dim, std::initializer_list<std::size_t> members)
    : Event(from_members(dim, std::vector<std::size_t>(members))) {}

Event Event::from_indicator(std::vector<bool> indicator) {
  return Event(std::move(indicator));
}

Event Event::from_members(std::size_t dim,
                          const std::vector<std::size_t>& members) {
  std::vector<bool> ind(dim, false);
  for (std::size_t m : members) {
    if (m >= dim) {
      throw DimensionMismatchError("event member " + std::to_string(m) +
                                   " outside sample space of size " +
                                   std::to_string(dim));
    }
    ind[m] = true;
  }
  return Event(std::move(ind));
}

Event Event::full(std::size_t dim) { return Event(std::vector<bool>(dim, true)); }

Event Event::none(std::size_t dim) { return Event(std::vector<bool>(dim, false)); }

std::size_t Event::count() const {
  return static_cast<std::size_t>(
      std::count(indicator_.begin(), indicator_.end(), true));
}

std::vector<std::size_t> Event::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < indicator_.size(); ++i) {
    if (indicator_[i]) out.push_back(i);
  }
  return out;
}

Event Event::complement() const {
  std::vector<bool> ind(indicator_);
  ind.flip();
  return Event(std::move(ind));
}

Event Event::intersect(const Event& other) const {
  require_same_dim(dim(), other.dim(), "intersect");
  std::vector<bool> ind(dim());
  for (std::size_t i = 0; i < dim(); ++i) ind[i] = indicator_[i] && other.indicator_[i];
  return Event(std::move(ind));
}

Event Event::unite(const Event& other) const {
  require_same_dim(dim(), other.dim(), "unite");
  std::vector<bool> ind(dim());
  for (std::size_t i = 0; i < dim(); ++i) ind[i] = indicator_[i] || other.indicator_[i];
  return Event(std::move(ind));
}

double prob(const ClassicalState& state, const Event& a) {
  require_same_dim(state.dim(), a.dim(), "prob");
  double sum = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (a.contains(i)) sum += state.weight(i);
  }
  return clamp_unit(sum);
}

double cond_prob(const ClassicalState& state, const Event& a,
                 const Event& given) {
  const double mass = prob(state, given);
  if (mass <= kNullMass) {
    throw NullConditioningError("conditioning event has probability " +
                                std::to_string(mass));
  }
  return clamp_unit(prob(state, a.intersect(given)) / mass);
}

ClassicalState condition(const ClassicalState& state, const Event& given) {
  const double mass = prob(state, given);
  if (mass <= kNullMass) {
    throw NullConditioningError("conditioning event has probability " +
                                std::to_string(mass));
  }
  std::vector<double> w(state.dim(), 0.0);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (given.contains(i)) w[i] = state.weight(i) / mass;
  }
  return ClassicalState(std::move(w));
}

namespace {

void require_nondegenerate_relevance(double pr) {
  if (pr <= kNullMass || pr >= 1.0 - kNullMass) {
    throw DegenerateRelevanceError("P(R) = " + std::to_string(pr) +
                                   "; a conditional on R or R̄ is undefined");
  }
}

}  // namespace

double ltp_residual(const ClassicalState& state, const Event& x,
                    const Event& r) {
  const double pr = prob(state, r);
  require_nondegenerate_relevance(pr);
  const double p = cond_prob(state, x, r);
  const double q = cond_prob(state, x, r.complement());
  return prob(state, x) - (p * pr + q * (1.0 - pr));
}

BoostReport boost_indicators(const ClassicalState& state, const Event& x_event,
                             const Event& r_event) {
  const double pr = prob(state, r_event);
  require_nondegenerate_relevance(pr);
  const double px = prob(state, x_event);
  if (px <= kNullMass) {
    throw NullConditioningError("P(X) = " + std::to_string(px) +
                                "; x = P(R|X) is undefined");
  }

  BoostReport report;
  report.r = pr;
  report.p = cond_prob(state, x_event, r_event);
  report.q = cond_prob(state, x_event, r_event.complement());
  report.x = cond_prob(state, r_event, x_event);

  // x - r and p - q differ by the positive factor r(1-r)/P(X), so the
  // equality band on x - r maps onto p - q through that factor.
  const double scale = pr * (1.0 - pr) / px;
  report.boost = report.x - report.r > kStrictMargin;
  report.natural = report.p - report.q > kStrictMargin / scale;
  return report;
}

std::size_t sample_outcome(const ClassicalState& state, RandomSource& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const double w = state.weight(i);
    if (w > 0.0) last_positive = i;
    acc += w;
    if (u < acc) return i;
  }
  // u landed in the rounding sliver above the accumulated sum.
  return last_positive;
}

}  // namespace relbeam

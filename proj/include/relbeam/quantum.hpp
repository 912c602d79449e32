#pragma once

#include <Eigen/Dense>
#include <complex>

#include "relbeam/errors.hpp"
#include "relbeam/prob.hpp"
#include "relbeam/random.hpp"

namespace relbeam {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Hermitian, positive semidefinite, trace-1 operator: the state a particle
/// is emitted in. Construction validates all three invariants entrywise /
/// spectrally at tolerance 1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);

  /// |v><v| / <v|v>. Throws on the zero vector.
  static DensityMatrix pure(const CVector& v);
  static DensityMatrix maximally_mixed(Eigen::Index dim);
  /// Diagonal embedding of a classical distribution.
  static DensityMatrix diagonal(const ClassicalState& state);
  /// Skips validation; the caller guarantees the invariants.
  static DensityMatrix unchecked(CMatrix entries);

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

 private:
  struct Trusted {};
  DensityMatrix(CMatrix entries, Trusted) : m_(std::move(entries)) {}

  CMatrix m_;
};

/// Hermitian idempotent operator: a yes/no property test. The complement
/// 1 - P answers "no" where P answers "yes".
class Projector {
 public:
  explicit Projector(CMatrix entries);

  static Projector identity(Eigen::Index dim);
  static Projector zero(Eigen::Index dim);
  /// Rank-1 projector onto the span of v. Throws on the zero vector.
  static Projector onto(const CVector& v);
  /// Diagonal 0/1 projector from an event indicator.
  static Projector diagonal(const Event& event);
  /// Skips validation; the caller guarantees the invariants.
  static Projector unchecked(CMatrix entries);

  Projector complement() const;

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

 private:
  struct Trusted {};
  Projector(CMatrix entries, Trusted) : m_(std::move(entries)) {}

  CMatrix m_;
};

/// Probability that a particle in state rho passes the test p: Re tr(P rho).
/// Values within 1e-10 of 0 or 1 are clamped; values farther outside [0,1]
/// signal corrupted inputs and throw InvariantViolationError.
double born_prob(const DensityMatrix& rho, const Projector& p);

/// Post-measurement state after the test p succeeds: P rho P / tr(P rho).
/// Throws NullPostSelectionError when the success probability is ~0.
DensityMatrix lueders_update(const DensityMatrix& rho, const Projector& p);

/// Conditional probability of passing x given the r test succeeded first:
/// tr(R rho R X) / tr(rho R). Equal to born_prob(lueders_update(rho, r), x).
/// The complementary conditional is cond_given_r(rho, x, r.complement()).
double cond_given_r(const DensityMatrix& rho, const Projector& x,
                    const Projector& r);

/// Relevance probability after post-selecting the beam on x:
/// tr(X rho X R) / tr(X rho). Equal to born_prob(lueders_update(rho, x), r).
double expansion_prob(const DensityMatrix& rho, const Projector& x,
                      const Projector& r);

/// The boost inequality in raw trace form, needing no division:
/// tr(X rho X R) > tr(X rho) tr(rho R) (strict, with a 1e-12 margin).
bool boost_condition(const DensityMatrix& rho, const Projector& x,
                     const Projector& r);

/// Aggregate report for one (rho, X, R) instance.
///
/// r and x are the Born and expansion probabilities, genuine values in [0,1].
/// p = tr(X rho X R)/r and q = tr(X rho X R̄)/(1-r) rescale the select-on-X
/// sequential joints by the relevance prior; their comparison is algebraically
/// the boost condition, and in the commuting (classical) case they reduce to
/// P(X|R) and P(X|R̄). Outside that case they can exceed 1 and are reported
/// unclamped. ltp_residual uses the measured-order terms tr(R rho R X),
/// tr(R̄ rho R̄ X), matching what the two-stage experiments estimate.
struct QBoostReport {
  double r = 0, p = 0, q = 0, x = 0;
  bool boost = false;
  bool natural = false;
  double ltp_residual = 0;
};

/// Evaluates the whole report; boost == natural by construction of the
/// comparison (the two differences share their sign exactly).
QBoostReport quantum_equivalence(const DensityMatrix& rho, const Projector& x,
                                 const Projector& r);

/// tr(X rho) - [tr(R rho R X) + tr(R̄ rho R̄ X)]: the gap between the direct
/// X frequency and its two-branch sequential decomposition. Zero whenever
/// rho, X, R commute; up to ±1/2 for dim-2 pure states and rank-1 tests.
double ltp_residual_q(const DensityMatrix& rho, const Projector& x,
                      const Projector& r);

/// Ginibre-induced random state of the given rank: G G†/tr(G G†) with G a
/// dim x rank matrix of independent complex standard normals.
DensityMatrix random_density(Eigen::Index dim, Eigen::Index rank,
                             RandomSource& rng);

/// Projector onto a Haar-random rank-dimensional subspace.
Projector random_projector(Eigen::Index dim, Eigen::Index rank,
                           RandomSource& rng);

struct QuantumTriple {
  DensityMatrix rho;
  Projector x;
  Projector r;
};

/// Diagonal transcription of a classical triple. Every quantum operation on
/// the result agrees with its classical counterpart.
QuantumTriple embed_classical(const ClassicalState& state, const Event& x_event,
                              const Event& r_event);

}  // namespace relbeam

#include "relbeam/quantum.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "relbeam/tolerances.hpp"

namespace relbeam {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InvariantViolationError(std::string(what) + ": matrix must be square and nonempty, got " +
                                  std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_hermitian(const CMatrix& m, const char* what) {
  const double gap = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(gap <= kOperatorTol)) {  // NaN entries fail here too
    throw InvariantViolationError(std::string(what) + ": not Hermitian (entrywise gap " +
                                  std::to_string(gap) + ")");
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionMismatchError(std::string(what) + ": operator dimensions " +
                                 std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

/// tr(A B) without forming the product.
Complex trace_of_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

/// Real part of a trace that must be real; a large imaginary part means the
/// operands violated their invariants.
double real_trace(Complex t, const char* what) {
  if (!(std::abs(t.imag()) <= kImagGuard)) {
    throw InvariantViolationError(std::string(what) + ": trace has imaginary part " +
                                  std::to_string(t.imag()));
  }
  return t.real();
}

/// Clamps a probability-valued result into [0,1]; values farther than the
/// operator tolerance outside signal corrupted inputs.
double clamp_probability(double v, const char* what) {
  if (!(v >= -kOperatorTol && v <= 1.0 + kOperatorTol)) {
    throw InvariantViolationError(std::string(what) + ": value " + std::to_string(v) +
                                  " outside [0,1] beyond tolerance");
  }
  if (v < 0.0) return 0.0;
  if (v > 1.0) return 1.0;
  return v;
}

}  // namespace

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)) {
  require_square(m_, "density matrix");
  require_hermitian(m_, "density matrix");
  const Complex tr = m_.trace();
  if (!(std::abs(tr - Complex(1.0, 0.0)) <= kOperatorTol)) {
    throw InvariantViolationError("density matrix: trace is not 1 (got " +
                                  std::to_string(tr.real()) + " + " +
                                  std::to_string(tr.imag()) + "i)");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (!(min_eig >= -kOperatorTol)) {
    throw InvariantViolationError("density matrix: smallest eigenvalue " +
                                  std::to_string(min_eig) + " is negative");
  }
}

DensityMatrix DensityMatrix::pure(const CVector& v) {
  const double norm2 = v.squaredNorm();
  if (norm2 <= 0.0) throw InvariantViolationError("pure state: zero vector");
  return DensityMatrix((v * v.adjoint()) / norm2, Trusted{});
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  if (dim < 1) throw InvariantViolationError("maximally mixed state needs dim >= 1");
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim), Trusted{});
}

DensityMatrix DensityMatrix::diagonal(const ClassicalState& state) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(state.dim()),
                            static_cast<Eigen::Index>(state.dim()));
  for (std::size_t i = 0; i < state.dim(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = state.weight(i);
  }
  return DensityMatrix(std::move(m), Trusted{});
}

DensityMatrix DensityMatrix::unchecked(CMatrix entries) {
  return DensityMatrix(std::move(entries), Trusted{});
}

Projector::Projector(CMatrix entries) : m_(std::move(entries)) {
  require_square(m_, "projector");
  require_hermitian(m_, "projector");
  const double gap = (m_ * m_ - m_).cwiseAbs().maxCoeff();
  if (!(gap <= kOperatorTol)) {
    throw InvariantViolationError("projector: not idempotent (entrywise gap " +
                                  std::to_string(gap) + ")");
  }
}

Projector Projector::identity(Eigen::Index dim) {
  if (dim < 1) throw InvariantViolationError("identity projector needs dim >= 1");
  return Projector(CMatrix::Identity(dim, dim), Trusted{});
}

Projector Projector::zero(Eigen::Index dim) {
  if (dim < 1) throw InvariantViolationError("zero projector needs dim >= 1");
  return Projector(CMatrix::Zero(dim, dim), Trusted{});
}

Projector Projector::onto(const CVector& v) {
  const double norm2 = v.squaredNorm();
  if (norm2 <= 0.0) throw InvariantViolationError("projector onto zero vector");
  return Projector((v * v.adjoint()) / norm2, Trusted{});
}

Projector Projector::diagonal(const Event& event) {
  const auto dim = static_cast<Eigen::Index>(event.dim());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (event.contains(static_cast<std::size_t>(i))) m(i, i) = 1.0;
  }
  return Projector(std::move(m), Trusted{});
}

Projector Projector::unchecked(CMatrix entries) {
  return Projector(std::move(entries), Trusted{});
}

Projector Projector::complement() const {
  return Projector(CMatrix::Identity(dim(), dim()) - m_, Trusted{});
}

double born_prob(const DensityMatrix& rho, const Projector& p) {
  require_same_dim(rho.dim(), p.dim(), "born_prob");
  const double v = real_trace(trace_of_product(p.matrix(), rho.matrix()), "born_prob");
  return clamp_probability(v, "born_prob");
}

DensityMatrix lueders_update(const DensityMatrix& rho, const Projector& p) {
  const double mass = born_prob(rho, p);
  if (mass <= kNullMass) {
    throw NullPostSelectionError("post-selection on a test with pass probability " +
                                 std::to_string(mass));
  }
  return DensityMatrix((p.matrix() * rho.matrix() * p.matrix()) / mass);
}

double cond_given_r(const DensityMatrix& rho, const Projector& x,
                    const Projector& r) {
  require_same_dim(rho.dim(), x.dim(), "cond_given_r");
  const double mass = born_prob(rho, r);
  if (mass <= kNullMass) {
    throw DegenerateRelevanceError("P(R) = " + std::to_string(mass) +
                                   "; the conditional is undefined");
  }
  const CMatrix selected = r.matrix() * rho.matrix() * r.matrix();
  const double joint = real_trace(trace_of_product(selected, x.matrix()), "cond_given_r");
  return clamp_probability(joint / mass, "cond_given_r");
}

double expansion_prob(const DensityMatrix& rho, const Projector& x,
                      const Projector& r) {
  require_same_dim(rho.dim(), r.dim(), "expansion_prob");
  const double mass = born_prob(rho, x);
  if (mass <= kNullMass) {
    throw NullPostSelectionError("P(X) = " + std::to_string(mass) +
                                 "; post-selection on X is impossible");
  }
  const CMatrix selected = x.matrix() * rho.matrix() * x.matrix();
  const double joint = real_trace(trace_of_product(selected, r.matrix()), "expansion_prob");
  return clamp_probability(joint / mass, "expansion_prob");
}

bool boost_condition(const DensityMatrix& rho, const Projector& x,
                     const Projector& r) {
  require_same_dim(rho.dim(), x.dim(), "boost_condition");
  require_same_dim(rho.dim(), r.dim(), "boost_condition");
  const CMatrix selected = x.matrix() * rho.matrix() * x.matrix();
  const double lhs = real_trace(trace_of_product(selected, r.matrix()), "boost_condition");
  const double rhs = born_prob(rho, x) * born_prob(rho, r);
  return lhs > rhs + kStrictMargin;
}

QBoostReport quantum_equivalence(const DensityMatrix& rho, const Projector& x,
                                 const Projector& r) {
  require_same_dim(rho.dim(), x.dim(), "quantum_equivalence");
  require_same_dim(rho.dim(), r.dim(), "quantum_equivalence");
  const double pr = born_prob(rho, r);
  if (pr <= kNullMass || pr >= 1.0 - kNullMass) {
    throw DegenerateRelevanceError("P(R) = " + std::to_string(pr) +
                                   "; p or q is undefined");
  }
  const double px = born_prob(rho, x);
  if (px <= kNullMass) {
    throw NullPostSelectionError("P(X) = " + std::to_string(px) +
                                 "; post-selection on X is impossible");
  }

  const Projector r_bar = r.complement();
  const CMatrix x_selected = x.matrix() * rho.matrix() * x.matrix();
  const double joint_r = real_trace(trace_of_product(x_selected, r.matrix()),
                                    "quantum_equivalence");
  const double joint_r_bar = real_trace(trace_of_product(x_selected, r_bar.matrix()),
                                        "quantum_equivalence");

  QBoostReport report;
  report.r = pr;
  report.x = clamp_probability(joint_r / px, "quantum_equivalence");
  report.p = joint_r / pr;
  report.q = joint_r_bar / (1.0 - pr);
  report.ltp_residual = ltp_residual_q(rho, x, r);

  // Same scaled-band scheme as the classical report: x - r equals
  // (p - q) * r(1-r)/P(X) identically, so the verdicts cannot differ.
  const double scale = pr * (1.0 - pr) / px;
  report.boost = report.x - report.r > kStrictMargin;
  report.natural = report.p - report.q > kStrictMargin / scale;
  return report;
}

double ltp_residual_q(const DensityMatrix& rho, const Projector& x,
                      const Projector& r) {
  require_same_dim(rho.dim(), x.dim(), "ltp_residual_q");
  require_same_dim(rho.dim(), r.dim(), "ltp_residual_q");
  const double pr = born_prob(rho, r);
  if (pr <= kNullMass || pr >= 1.0 - kNullMass) {
    throw DegenerateRelevanceError("P(R) = " + std::to_string(pr) +
                                   "; a sequential conditional is undefined");
  }
  const Projector r_bar = r.complement();
  const CMatrix kept = r.matrix() * rho.matrix() * r.matrix();
  const CMatrix dropped = r_bar.matrix() * rho.matrix() * r_bar.matrix();
  const double direct = real_trace(trace_of_product(x.matrix(), rho.matrix()), "ltp_residual_q");
  const double through_r = real_trace(trace_of_product(kept, x.matrix()), "ltp_residual_q");
  const double through_r_bar = real_trace(trace_of_product(dropped, x.matrix()), "ltp_residual_q");
  return direct - (through_r + through_r_bar);
}

namespace {

CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, RandomSource& rng) {
  CMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
  }
  return g;
}

}  // namespace

DensityMatrix random_density(Eigen::Index dim, Eigen::Index rank,
                             RandomSource& rng) {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw InvalidRankError("random_density: rank " + std::to_string(rank) +
                           " invalid for dim " + std::to_string(dim));
  }
  const CMatrix g = ginibre(dim, rank, rng);
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

Projector random_projector(Eigen::Index dim, Eigen::Index rank,
                           RandomSource& rng) {
  if (dim < 1 || rank < 0 || rank > dim) {
    throw InvalidRankError("random_projector: rank " + std::to_string(rank) +
                           " invalid for dim " + std::to_string(dim));
  }
  if (rank == 0) return Projector::zero(dim);
  if (rank == dim) return Projector::identity(dim);
  const CMatrix g = ginibre(dim, rank, rng);
  const Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix basis = qr.householderQ() * CMatrix::Identity(dim, rank);
  CMatrix p = basis * basis.adjoint();
  p = ((p + p.adjoint()) / 2.0).eval();
  return Projector(std::move(p));
}

QuantumTriple embed_classical(const ClassicalState& state, const Event& x_event,
                              const Event& r_event) {
  if (x_event.dim() != state.dim() || r_event.dim() != state.dim()) {
    throw DimensionMismatchError("embed_classical: event dimensions must match the state");
  }
  return QuantumTriple{DensityMatrix::diagonal(state), Projector::diagonal(x_event),
                       Projector::diagonal(r_event)};
}

}  // namespace relbeam

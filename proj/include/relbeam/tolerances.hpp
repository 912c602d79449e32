#pragma once

namespace relbeam {

// Absolute tolerances used across the library. Probabilities are compared at
// 1e-12, operator-valued invariants at 1e-10; both carry roughly the rounding
// noise of the sums and O(n^3) products that produce them.

/// Band for classical probability comparisons; |a-b| <= this counts as equal.
inline constexpr double kProbTol = 1e-12;

/// Mass below this is treated as zero when it appears in a denominator.
inline constexpr double kNullMass = 1e-15;

/// Entrywise tolerance for operator invariants (Hermitian, idempotent, PSD).
inline constexpr double kOperatorTol = 1e-10;

/// Band for quantum probability comparisons.
inline constexpr double kQuantumTol = 1e-10;

/// Traces of Hermitian products must be real up to this; beyond it the
/// inputs did not satisfy their invariants.
inline constexpr double kImagGuard = 1e-8;

/// Margin for the strict boost inequalities; differences inside it are ties.
inline constexpr double kStrictMargin = 1e-12;

}  // namespace relbeam

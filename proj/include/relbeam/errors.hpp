#pragma once

#include <stdexcept>
#include <string>

namespace relbeam {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operands built for sample spaces / Hilbert spaces of different sizes.
class DimensionMismatchError : public Error {
  using Error::Error;
};

/// Conditioning on an event whose probability is (numerically) zero.
class NullConditioningError : public Error {
  using Error::Error;
};

/// P(R) is 0 or 1, so one of the conditionals p, q is undefined.
class DegenerateRelevanceError : public Error {
  using Error::Error;
};

/// Post-selection on a test that succeeds with probability (numerically) zero.
class NullPostSelectionError : public Error {
  using Error::Error;
};

/// A quantity escaped the range its invariants guarantee; inputs are corrupted.
class InvariantViolationError : public Error {
  using Error::Error;
};

/// Requested rank is outside the admissible range for the dimension.
class InvalidRankError : public Error {
  using Error::Error;
};

/// The beam never produced enough survivors before the emission cap.
class ProgressImpossibleError : public Error {
  using Error::Error;
};

/// An estimate whose denominator count is zero was requested.
class AbsentEstimateError : public Error {
  using Error::Error;
};

/// Configuration text failed validation; the message carries the field path.
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace relbeam

#pragma once

#include <stdexcept>
#include <string>

namespace robust {

// Failure taxonomy for the engine. Every contract violation an operation can
// report maps onto exactly one of these types, so callers (and tests) can
// match failure modes precisely instead of parsing message strings.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of the function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structurally bad model input: dimension mismatch, non-symmetric or
// non-PSD matrix beyond the clipping window.
class InvalidModelError : public Error {
 public:
  using Error::Error;
};

// Contamination or trimming budget cannot be met (rate too large, or the
// requested removals would consume the whole sample).
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Too few observations for the statistic to be meaningful.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Requested direction net exceeds the configured size cap.
class NetTooLargeError : public Error {
 public:
  using Error::Error;
};

// Scale statistics collapsed to zero (e.g. all rows identical), so a
// data-driven parameter cannot be formed.
class RankDegenerateError : public Error {
 public:
  using Error::Error;
};

// Sampler parameters reject too much mass to be usable.
class InadmissibleParametersError : public Error {
 public:
  using Error::Error;
};

// Alternating projections failed to reach a feasible point.
class ProjectionFailedError : public Error {
 public:
  using Error::Error;
};

// Optimization problem has no finite optimum.
class UnboundedProblemError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration file or CLI arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure while reading or writing results.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace robust

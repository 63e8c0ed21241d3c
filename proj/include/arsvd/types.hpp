#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arsvd {

using Index = Eigen::Index;

// Row-major storage throughout. Operations that need A^T read the transpose
// view instead of materializing it, so the big data matrix is never copied.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Base class for all library errors. Subclasses map to CLI exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or conflicting options (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch; the message names both shapes.
class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failure (non-convergence, singular system) (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline std::string shape_str(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

/// Seed plus sub-stream id. Identical (seed, stream) pairs give identical
/// draw sequences; distinct streams are statistically independent.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Derived sub-stream, for independent draws inside one logical run.
  [[nodiscard]] RngSeed sub(std::uint64_t k) const;
};

}  // namespace arsvd

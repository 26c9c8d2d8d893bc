#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sympmor {

using Index = Eigen::Index;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Structural precondition violated (dimensions, ranges, non-finite input).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation failed numerically (solver breakdown, NaN propagation,
/// defect above tolerance).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization found fewer independent directions than requested.
class RankDeficiencyError : public NumericalError {
 public:
  RankDeficiencyError(const std::string& what, Index achieved)
      : NumericalError(what), achieved_rank(achieved) {}

  Index achieved_rank;
};

}  // namespace sympmor

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace warmgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when a matrix that must be symmetric positive definite fails to
/// factorize.
class NotSpdError : public std::runtime_error {
 public:
  explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an iterative solve blows past the divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iterations_done)
      : std::runtime_error(what), iterations(iterations_done) {}
  int iterations;
};

/// Thrown on malformed input files (CSV, config).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace warmgp

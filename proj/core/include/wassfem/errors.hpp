#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wassfem {

/// Invalid argument or violated precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Obstacle box edge that does not fall on a grid line.
class AlignmentError : public ArgumentError {
 public:
  AlignmentError(const std::string& what, int axis, double coordinate)
      : ArgumentError(what), axis_(axis), coordinate_(coordinate) {}
  int axis() const noexcept { return axis_; }
  double coordinate() const noexcept { return coordinate_; }

 private:
  int axis_;
  double coordinate_;
};

/// Iterative solver ran out of iterations. Carries the best iterate.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> best, double residual, int iterations)
      : std::runtime_error(what),
        best_(std::move(best)),
        residual_(residual),
        iterations_(iterations) {}
  const std::vector<double>& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> best_;
  double residual_;
  int iterations_;
};

/// Pointwise proximal solve failed to converge.
class ProxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration: parse error or semantic violation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unsupported input file (images).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wassfem

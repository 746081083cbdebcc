#pragma once

#include <stdexcept>
#include <string>

namespace adapt {

// Base of every exception thrown by the library. The category lets the
// command-line tool map failures onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  enum class Category { invalid_argument, io, solver, metric };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(Category::invalid_argument, what) {}
};

// Shape disagreement between coefficients, designs or weight vectors.
class DimensionError : public InvalidArgument {
 public:
  explicit DimensionError(const std::string& what) : InvalidArgument(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::io, what) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(Category::solver, what) {}
};

// Iteration cap reached; carries the objective where the solver stopped.
class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, double final_objective)
      : SolverError(what + " (final objective " + std::to_string(final_objective) + ")"),
        final_objective_(final_objective) {}

  double final_objective() const noexcept { return final_objective_; }

 private:
  double final_objective_;
};

class MetricError : public Error {
 public:
  explicit MetricError(const std::string& what) : Error(Category::metric, what) {}
};

}  // namespace adapt

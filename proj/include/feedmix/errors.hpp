#pragma once

#include <stdexcept>
#include <string>

#include "feedmix/model.hpp"

namespace feedmix {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario parameters violate the domain invariants (lambda <= 0, gamma
/// outside (0,1), ...).
class InvalidScenario : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A finite-reservoir record is asked to supply mu*x >= W.
class SaturatedReservoir : public Error {
 public:
  SaturatedReservoir(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// The combined reservoir cannot cover the demand.
class InfeasibleScenario : public Error {
 public:
  using Error::Error;
};

/// The scenario does not satisfy the hypotheses of the requested solver.
class RegimeMismatch : public Error {
 public:
  using Error::Error;
};

class RootBracketFailure : public Error {
 public:
  using Error::Error;
};

class SupportEnumerationOverflow : public Error {
 public:
  using Error::Error;
};

/// Every grid point violated the box constraints.
class EmptyGrid : public Error {
 public:
  using Error::Error;
};

/// The iteration cap was hit. Carries the best feasible iterate found.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, Solution best)
      : Error(what), best_(std::move(best)) {}
  const Solution& best() const noexcept { return best_; }

 private:
  Solution best_;
};

}  // namespace feedmix

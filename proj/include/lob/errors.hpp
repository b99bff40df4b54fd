#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lob {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A queue vector whose sign pattern is not a member of the state space.
class SignPatternViolation : public Error {
 public:
  SignPatternViolation(int index, const std::string& what) : Error(what), index_(index) {}
  /// Book index (in {-K..-1, 1..K}) of the first offending entry.
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// Every outgoing rate vanishes at the current state.
class AbsorbingState : public Error {
 public:
  using Error::Error;
};

/// A transition that would leave the state space or reverse a queue's sign.
class InvalidEvent : public Error {
 public:
  using Error::Error;
};

/// Generating function requested beyond the model's convergence radius.
class RadiusExceeded : public Error {
 public:
  using Error::Error;
};

class EmptyScan : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo moment estimate that does not look finite.
class DivergentBoundaryMoment : public Error {
 public:
  using Error::Error;
};

class StateSpaceTooLarge : public Error {
 public:
  StateSpaceTooLarge(std::size_t count, std::size_t bound, const std::string& what)
      : Error(what), count_(count), bound_(bound) {}
  std::size_t count() const noexcept { return count_; }
  std::size_t bound() const noexcept { return bound_; }

 private:
  std::size_t count_;
  std::size_t bound_;
};

/// The generator has more than one closed communicating class.
class Reducible : public Error {
 public:
  Reducible(std::vector<std::vector<std::size_t>> classes, const std::string& what)
      : Error(what), classes_(std::move(classes)) {}
  const std::vector<std::vector<std::size_t>>& closed_classes() const noexcept { return classes_; }

 private:
  std::vector<std::vector<std::size_t>> classes_;
};

class IllConditioned : public Error {
 public:
  IllConditioned(double residual, const std::string& what) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class WindowTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace lob

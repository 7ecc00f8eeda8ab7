#pragma once

#include <stdexcept>
#include <string>

namespace wmp {

/// Bad shapes, bad schedules, malformed configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that are mathematical facts about the input
/// (non-existence, failed preconditions) rather than programming errors.
class MathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A weighted Moore-Penrose inverse does not exist because one of the
/// factor operators is singular under the configured condition-number cap.
class NonExistent : public MathError {
 public:
  NonExistent(std::string factor, double condition_number);

  const std::string& factor() const noexcept { return factor_; }
  double condition_number() const noexcept { return cond_; }

 private:
  std::string factor_;
  double cond_;
};

class InvalidWeight : public MathError {
 public:
  using MathError::MathError;
};

class NotIdempotent : public MathError {
 public:
  explicit NotIdempotent(double residual);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class NotPositiveOnRange : public MathError {
 public:
  explicit NotPositiveOnRange(double smallest_eigenvalue);
  double smallest_eigenvalue() const noexcept { return smallest_; }

 private:
  double smallest_;
};

class NotPSD : public MathError {
 public:
  NotPSD(std::string which, double smallest_eigenvalue);
  double smallest_eigenvalue() const noexcept { return smallest_; }

 private:
  double smallest_;
};

class NotSeparated : public MathError {
 public:
  using MathError::MathError;
};

/// The norm criterion and the invertibility criterion for a separated pair
/// gave different verdicts; the instance sits inside the tolerance band.
class CriteriaDisagree : public MathError {
 public:
  CriteriaDisagree(double pq_norm, double two_minus_sum_cond);
  double pq_norm() const noexcept { return pq_norm_; }
  double two_minus_sum_cond() const noexcept { return cond_; }

 private:
  double pq_norm_;
  double cond_;
};

/// A computed object failed one of its own postconditions.
class InvariantViolation : public MathError {
 public:
  using MathError::MathError;
};

}  // namespace wmp

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wmp/matrix.hpp"

namespace wmp {

/// Thresholds behind every rank, invertibility and verification decision.
struct ToleranceConfig {
  /// Relative singular-value cutoff. When unset the cutoff is
  /// max(rows, cols) * machine epsilon, relative to the largest singular value.
  std::optional<double> rank_rtol;
  /// Largest condition number still treated as invertible.
  double inv_cond_max = 1e12;
  double verify_atol = 1e-9;
  double verify_rtol = 1e-9;
  /// ||PQ|| must stay below 1 - separation_margin for a separated pair.
  double separation_margin = 1e-6;
  /// Limit traces count as converged when err <= limit_rtol * (1 + ||target||).
  double limit_rtol = 1e-8;

  /// Throws InvalidArgument unless all thresholds are positive and rank_rtol < 1.
  void validate() const;
  double rank_tolerance(std::size_t rows, std::size_t cols) const;
  /// verify_atol + verify_rtol * scale
  double verify_bound(double scale) const { return verify_atol + verify_rtol * scale; }
};

/// Thin SVD: u is rows x k, vh is k x cols, k = min(rows, cols).
struct SvdFactorization {
  Matrix u;
  std::vector<double> sigma;
  Matrix vh;
  std::size_t numerical_rank = 0;
};

/// Singular values below rank_tolerance * max(sigma_max, reference_norm) do
/// not count towards the numerical rank. A positive reference_norm lets a
/// matrix that should be zero (a difference of nearly equal operators) be
/// judged against the scale it came from rather than its own rounding noise.
SvdFactorization svd(const Matrix& a, const ToleranceConfig& tol, double reference_norm = 0.0);
std::vector<double> singular_values(const Matrix& a);
std::size_t numerical_rank(const Matrix& a, const ToleranceConfig& tol, double reference_norm = 0.0);

/// Moore-Penrose inverse by truncated SVD. The zero matrix maps to the zero
/// matrix of transposed shape.
Matrix mp_inverse(const Matrix& a, const ToleranceConfig& tol, double reference_norm = 0.0);
/// Pseudoinverse keeping exactly the `rank` largest singular values.
Matrix mp_inverse_of_rank(const Matrix& a, std::size_t rank);
Matrix mp_inverse(const SvdFactorization& f);

/// A A^dagger, the orthogonal projector onto range(A).
Matrix projector_range(const Matrix& a, const ToleranceConfig& tol);
/// A^dagger A, the orthogonal projector onto range(A*).
Matrix projector_corange(const Matrix& a, const ToleranceConfig& tol);
/// Orthogonal projector onto null(A) ∩ null(B), computed as I - S^dagger S with S = [A; B].
Matrix projector_nullspace_pair(const Matrix& a, const Matrix& b, const ToleranceConfig& tol);

/// Orthonormal bases of range(A*) (cols x r) and null(A) (cols x (cols - r)).
struct RowSpaceSplit {
  Matrix range_basis;
  Matrix null_basis;
};
RowSpaceSplit row_space_split(const Matrix& a, const ToleranceConfig& tol);

/// Largest singular value.
double operator_norm(const Matrix& a);
/// sigma_max / sigma_min of a square matrix; +inf when singular.
double condition_number(const Matrix& a);
bool is_invertible(const Matrix& a, const ToleranceConfig& tol);
bool is_hermitian(const Matrix& a, const ToleranceConfig& tol);
bool is_positive_definite(const Matrix& a, const ToleranceConfig& tol);

/// Eigenvalues ascending, eigenvectors as columns.
struct HermitianEigen {
  std::vector<double> values;
  Matrix vectors;
};
HermitianEigen hermitian_eigen(const Matrix& a);
/// Square root of a Hermitian positive-semidefinite matrix; negative
/// eigenvalues from rounding are clamped to zero.
Matrix psd_sqrt(const Matrix& a);

/// Solves A X = B for square A by column-pivoted QR.
Matrix solve(const Matrix& a, const Matrix& b);
/// Returns B A^{-1}.
Matrix solve_right(const Matrix& b, const Matrix& a);
/// Explicit inverse; throws InvalidArgument for non-square input and
/// MathError when condition_number exceeds inv_cond_max.
Matrix inverse(const Matrix& a, const ToleranceConfig& tol);

/// first, first*r, ..., last with `count` points (count >= 2) or {first} when count == 1.
std::vector<double> geometric_schedule(double first, double last, std::size_t count);
/// Throws InvalidArgument unless the schedule is non-empty, positive and strictly decreasing.
void require_decreasing_schedule(std::span<const double> t);
/// Throws InvalidArgument unless the schedule is non-empty, positive and strictly increasing.
void require_increasing_schedule(std::span<const double> lambda);

struct LimitOutcome {
  std::vector<double> schedule;
  std::vector<Matrix> iterates;
  std::vector<double> errors;
  Matrix target;
  double final_error = 0.0;
  /// errors nonincreasing over the second half of the schedule
  bool tail_nonincreasing = true;
};

/// Iterates (T*T + tI)^{-1} T* along `schedule` and measures each against T^dagger.
LimitOutcome regularized_pinv_limit(const Matrix& t, std::span<const double> schedule,
                                    const ToleranceConfig& tol);

/// True when values[i+1] <= values[i] * (1 + slack) + floor over [first, end).
bool nonincreasing_from(std::span<const double> values, std::size_t first, double slack = 1e-9,
                        double floor = 0.0);

}  // namespace wmp

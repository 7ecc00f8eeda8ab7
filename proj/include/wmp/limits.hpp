#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wmp/linalg.hpp"
#include "wmp/matrix.hpp"
#include "wmp/weight.hpp"

// Limit formulas for weighted inverses.
//
// Throughout, A is m x n, B is p x n (same domain H = C^n), V is a weight on
// C^m and W a weight on C^p, both positive definite.
//
//   C_t = A*VA + t B*WB
//   lim_{t->0+} C_t^dagger A*V = A^dagger_{VU}            for U in Omega_{A,B,W}
//   lim_{l->inf} (l A + B)^dagger B = [(I - P) B (I - P)]^dagger B,  P = A^dagger A
//
// A pair (range(A*), range(B*)) is separated when ||A^dagger A B^dagger B|| < 1.

namespace wmp {

/// U = A*XA + B*WB + Y P_null, positive definite on H.
struct OmegaWeight {
  Weight u;
  Matrix x;
  /// P_null Y P_null, the part of Y that enters U.
  Matrix y;
  /// Orthogonal projector onto null(A) ∩ null(B).
  Matrix p_null;
};

/// X defaults to `v` when given, otherwise the identity; Y defaults to the
/// identity. Throws NotPositiveOnRange when A*XA + B*WB is not positive
/// definite on range(A*A + B*B) or Y is not positive definite on
/// null(A) ∩ null(B).
OmegaWeight omega_weight(const Matrix& a, const Matrix& b, const Weight& w,
                         const std::optional<Matrix>& x, const std::optional<Matrix>& y,
                         const ToleranceConfig& tol, const Weight* v = nullptr);

struct LimitRow {
  double parameter = 0.0;  ///< t or lambda
  Matrix iterate;
  double error = 0.0;  ///< ||iterate - target||
};

struct LimitTrace {
  std::vector<LimitRow> rows;
  Matrix target;
  /// final error <= limit_rtol * (1 + ||target||)
  bool converged = false;
  /// errors nonincreasing over the last five rows, up to rounding noise
  bool tail_nonincreasing = false;
  /// rank the iterates were computed with
  std::size_t pinned_rank = 0;
  /// one line per row whose free numerical rank differed from pinned_rank
  std::vector<std::string> diagnostics;

  double final_error() const { return rows.empty() ? 0.0 : rows.back().error; }
};

/// t_k = 10^-k, k = 1..10
std::vector<double> default_t_schedule();
/// lambda_k = 10^k, k = 0..8
std::vector<double> default_lambda_schedule();

/// C_t^dagger A*V at one t. C_t is solved on range([A; B]*), of dimension
/// `rank`, in a basis adapted to range(A*) ⊕ (range([A; B]*) ⊖ range(A*));
/// the second block row carries a factor t and is divided through by it, so
/// the system stays well conditioned as t -> 0.
Matrix regularized_weighted_iterate(const Matrix& a, const Matrix& b, const Weight& v,
                                    const Weight& w, double t, std::size_t rank);
/// The same quantity formed directly as pinv(A*VA + t B*WB) A*V.
Matrix regularized_weighted_iterate_direct(const Matrix& a, const Matrix& b, const Weight& v,
                                           const Weight& w, double t, std::size_t rank);

/// Iterates C_t^dagger A*V along `schedule` against the target A^dagger_{VU}.
/// Throws NonExistent when the target does not exist and InvalidArgument on a
/// bad schedule or mismatched shapes.
LimitTrace limit_t_to_zero(const Matrix& a, const Matrix& b, const Weight& v, const Weight& w,
                           const OmegaWeight& u, std::span<const double> schedule,
                           const ToleranceConfig& tol);

/// Iterates (lambda A + B)^dagger B against [(I - P) B (I - P)]^dagger B for
/// Hermitian positive-semidefinite A and B. Throws NotPSD otherwise.
LimitTrace limit_lambda_to_inf(const Matrix& a, const Matrix& b, std::span<const double> schedule,
                               const ToleranceConfig& tol);

struct SeparatedPairReport {
  /// ||A^dagger A B^dagger B||
  double pq_norm = 0.0;
  /// condition number of 2I - A^dagger A - B^dagger B
  double two_minus_sum_cond = 0.0;
  /// dim(range(A*) ∩ range(B*))
  std::size_t intersection_dim = 0;
  /// dim(range(A*) + range(B*))
  std::size_t sum_rank = 0;
  bool is_separated = false;
};

/// Both criteria are evaluated: pq_norm <= 1 - separation_margin and
/// cond(2I - P - Q) <= inv_cond_max. Throws CriteriaDisagree when they differ.
SeparatedPairReport separated_pair_check(const Matrix& a, const Matrix& b,
                                         const ToleranceConfig& tol);

struct SeparatedClosedForm {
  /// (2I - P - Q)^{-1} (A*VA)^dagger A*V
  Matrix pi;
  /// (A*VA)^dagger A*V - (I - P) Pi
  Matrix d;
  /// ||(A*VA + B*WB)^dagger A*V - D||
  double residual = 0.0;
  /// ||(A*VA + B*W'B)^dagger A*V - D|| for a random positive-definite W'
  double alternate_residual = 0.0;
};

/// Throws NotSeparated unless separated_pair_check reports a separated pair.
SeparatedClosedForm closed_form_separated(const Matrix& a, const Matrix& b, const Weight& v,
                                          const Weight& w, const ToleranceConfig& tol,
                                          std::uint64_t seed = 1);

struct BDecomposition {
  Matrix b1;
  Matrix b2;
  /// A^dagger_{VU} with U = A*VA + B*WB + P_null
  Matrix z;
  /// ||B2* W B1||
  double orthogonality = 0.0;
  /// ||(I - A^dagger A) B1*||
  double range_defect = 0.0;
  /// rank([A; B]) - rank(A), the rank B2 is pinned to
  std::size_t b2_rank = 0;
  SeparatedPairReport separation;
};

/// B1 = B Z A, B2 = B - B1. Throws NonExistent when Z does not exist and
/// InvariantViolation when a checked property of the split fails.
BDecomposition decompose_b(const Matrix& a, const Matrix& b, const Weight& v, const Weight& w,
                           const ToleranceConfig& tol);

struct GeneralLimit {
  LimitTrace trace;
  /// (2I - P - B2^dagger B2)^{-1} (A*VA)^dagger A*V
  Matrix pi_prime;
  BDecomposition decomposition;
  /// ||(A*VA + B2* W' B2)^dagger A*V - target|| for the supplied W'
  double wprime_residual = 0.0;
  /// the same for a second, random W'
  double alternate_residual = 0.0;
};

GeneralLimit general_limit_via_decomposition(const Matrix& a, const Matrix& b, const Weight& v,
                                             const Weight& w, const Weight& wprime,
                                             std::span<const double> schedule,
                                             const ToleranceConfig& tol, std::uint64_t seed = 1);

}  // namespace wmp

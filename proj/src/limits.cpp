#include "wmp/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "wmp/error.hpp"
#include "wmp/random.hpp"
#include "wmp/wmp.hpp"

namespace wmp {

namespace {

void require_same_domain(const Matrix& a, const Matrix& b, const char* what) {
  if (a.cols() != b.cols()) {
    throw InvalidArgument(std::string(what) + ": A and B must have the same number of columns, got " +
                          std::to_string(a.cols()) + " and " + std::to_string(b.cols()));
  }
}

void require_dim(const Weight& w, std::size_t dim, const char* what) {
  if (w.dim() != dim) {
    throw InvalidArgument(std::string(what) + ": weight must be " + std::to_string(dim) + "x" +
                          std::to_string(dim) + ", got " + std::to_string(w.dim()));
  }
}

void require_positive(const Weight& w, const char* what) {
  if (!w.positive_definite())
    throw InvalidArgument(std::string(what) + " must be positive definite");
}

// Rows past this many are inspected for a nonincreasing error tail.
constexpr std::size_t kTailRows = 5;

// (A*VA)^dagger A*V = (V^{1/2} A)^dagger V^{1/2}
Matrix weighted_left_factor(const Matrix& a, const Weight& v, const ToleranceConfig& tol) {
  const Matrix vh = psd_sqrt(v.matrix());
  return mp_inverse(vh * a, tol) * vh;
}

std::size_t stacked_rank(const Matrix& a, const Matrix& b, const ToleranceConfig& tol) {
  return numerical_rank(vstack(a, b), tol);
}

// Orthonormal basis (n x k) of the span of the first k right singular vectors of x.
Matrix leading_row_basis(const Matrix& x, std::size_t k) {
  const SvdFactorization f = svd(x, ToleranceConfig{});
  return f.vh.block(0, 0, k, x.cols()).adjoint();
}

// Orthonormal basis of range(q0) ⊖ range(q1), assuming range(q1) ⊆ range(q0).
Matrix complement_basis(const Matrix& q0, const Matrix& q1) {
  const std::size_t k = q0.cols() - std::min(q0.cols(), q1.cols());
  const Matrix rest = q0 - q1 * (q1.adjoint() * q0);
  const SvdFactorization f = svd(rest, ToleranceConfig{});
  return f.u.block(0, 0, rest.rows(), k);
}

// Solves the Hermitian system [[K11 + t E11, t E12], [t E21, t E22]] Y = [F1; t F2]
// after dividing the second block row by t, which leaves the solution
// unchanged and keeps the system well conditioned as t -> 0.
Matrix scaled_block_solve(const Matrix& k11, const Matrix& e, double t, const Matrix& f1,
                          const Matrix& f2) {
  const std::size_t r = k11.rows();
  const std::size_t s = e.rows();
  Matrix sys = e;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      sys(i, j) *= t;
      if (j < r) sys(i, j) += k11(i, j);
    }
  }
  Matrix rhs(s, f1.cols());
  rhs.set_block(0, 0, f1);
  if (s > r) rhs.set_block(r, 0, f2);
  if (s == 0) return rhs;
  return solve(sys, rhs);
}

// C_t^dagger A*V with C_t = A*VA + t B*WB. C_t is invertible on
// H0 = range([A; B]*) of dimension `rank`; in an orthonormal basis adapted to
// range(A*) ⊕ (H0 ⊖ range(A*)) the lower block row of C_t carries a factor t.
struct TEvaluator {
  TEvaluator(const Matrix& a, const Matrix& b, const Weight& v, const Weight& w, std::size_t rank,
             const ToleranceConfig& tol)
      : rank(rank), tol(tol) {
    const std::size_t r = std::min(numerical_rank(a, tol), rank);
    const Matrix q1 = leading_row_basis(a, r);
    const Matrix q2 = complement_basis(leading_row_basis(vstack(a, b), rank), q1);
    basis = hstack(q1, q2);
    const Matrix aq1 = a * q1;
    k11 = (aq1.adjoint() * v.matrix() * aq1).hermitian_part();
    const Matrix bq = b * basis;
    e = (bq.adjoint() * w.matrix() * bq).hermitian_part();
    f1 = aq1.adjoint() * v.matrix();
    f2 = Matrix::zeros(rank - r, a.rows());
    va = psd_sqrt(v.matrix()) * a;
    wb = psd_sqrt(w.matrix()) * b;
  }

  Matrix operator()(double t, std::size_t& free_rank) const {
    free_rank = numerical_rank(vstack(va, wb * Complex(std::sqrt(t))), tol);
    return basis * scaled_block_solve(k11, e, t, f1, f2);
  }

  std::size_t rank;
  const ToleranceConfig& tol;
  Matrix basis;
  Matrix k11;
  Matrix e;
  Matrix f1;
  Matrix f2;
  Matrix va;
  Matrix wb;
};

template <class Eval>
LimitTrace run_trace(std::span<const double> schedule, Matrix target, std::size_t pinned_rank,
                     Eval&& eval, const ToleranceConfig& tol) {
  LimitTrace out;
  out.target = std::move(target);
  out.pinned_rank = pinned_rank;
  const double scale = 1.0 + operator_norm(out.target);
  std::vector<double> errors;
  for (double s : schedule) {
    std::size_t free_rank = pinned_rank;
    LimitRow row;
    row.parameter = s;
    row.iterate = eval(s, free_rank);
    row.error = operator_norm(row.iterate - out.target);
    if (free_rank != pinned_rank) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "parameter %.3g: numerical rank %zu, pinned to %zu", s,
                    free_rank, pinned_rank);
      out.diagnostics.emplace_back(buf);
    }
    errors.push_back(row.error);
    out.rows.push_back(std::move(row));
  }
  out.converged = !out.rows.empty() && out.rows.back().error <= tol.limit_rtol * scale;
  const std::size_t first = errors.size() > kTailRows ? errors.size() - kTailRows : 0;
  out.tail_nonincreasing = nonincreasing_from(errors, first, 1e-6, 1e-3 * tol.limit_rtol * scale);
  return out;
}

void require_psd(const Matrix& x, const char* which, const ToleranceConfig& tol) {
  if (!x.square()) throw InvalidArgument(std::string(which) + " must be square");
  const double norm = operator_norm(x);
  if (!is_hermitian(x, tol)) throw NotPSD(which, std::numeric_limits<double>::quiet_NaN());
  const HermitianEigen e = hermitian_eigen(x.hermitian_part());
  const double smallest = e.values.empty() ? 0.0 : e.values.front();
  if (smallest < -tol.verify_bound(norm)) throw NotPSD(which, smallest);
}

// With b_rank set, range(B*) is taken as the span of that many leading right
// singular vectors instead of a tolerance decision.
SeparatedPairReport separation_report(const Matrix& a, const Matrix& b,
                                      std::optional<std::size_t> b_rank,
                                      const ToleranceConfig& tol) {
  require_same_domain(a, b, "separated_pair_check");
  const std::size_t n = a.cols();
  const std::size_t rank_a = numerical_rank(a, tol);
  const std::size_t rank_b = b_rank ? std::min(*b_rank, n) : numerical_rank(b, tol);
  const Matrix qa = leading_row_basis(a, rank_a);
  const Matrix qb = leading_row_basis(b, rank_b);
  const Matrix p = (qa * qa.adjoint()).hermitian_part();
  const Matrix q = (qb * qb.adjoint()).hermitian_part();
  SeparatedPairReport rep;
  rep.pq_norm = operator_norm(p * q);
  Matrix two = Matrix::identity(n) * Complex(2.0);
  two -= p;
  two -= q;
  // 2I - P - Q is PSD with norm at most 2; measure its conditioning against
  // unit scale so that P = Q = I (where it is pure rounding) reads as singular.
  if (n == 0) {
    rep.two_minus_sum_cond = 1.0;
  } else {
    const std::vector<double> s = singular_values(two);
    rep.two_minus_sum_cond = s.back() > 0.0 ? std::max(s.front(), 1.0) / s.back()
                                            : std::numeric_limits<double>::infinity();
  }
  rep.sum_rank = numerical_rank(hstack(qa, qb), tol);
  rep.intersection_dim = rank_a + rank_b - std::min(rank_a + rank_b, rep.sum_rank);
  const bool by_norm = rep.pq_norm <= 1.0 - tol.separation_margin;
  const bool by_inverse = rep.two_minus_sum_cond <= tol.inv_cond_max;
  if (by_norm != by_inverse) throw CriteriaDisagree(rep.pq_norm, rep.two_minus_sum_cond);
  rep.is_separated = by_norm;
  return rep;
}

Weight random_weight(std::size_t dim, std::uint64_t seed, const ToleranceConfig& tol) {
  Rng rng(seed);
  return Weight::make(random_positive_definite(rng, dim), tol);
}

}  // namespace

OmegaWeight omega_weight(const Matrix& a, const Matrix& b, const Weight& w,
                         const std::optional<Matrix>& x, const std::optional<Matrix>& y,
                         const ToleranceConfig& tol, const Weight* v) {
  require_same_domain(a, b, "omega_weight");
  require_dim(w, b.rows(), "omega_weight (W)");
  const std::size_t n = a.cols();
  Matrix xm;
  if (x) {
    xm = *x;
  } else if (v) {
    require_dim(*v, a.rows(), "omega_weight (V)");
    xm = v->matrix();
  } else {
    xm = Matrix::identity(a.rows());
  }
  if (!xm.square() || xm.rows() != a.rows())
    throw InvalidArgument("omega_weight: X must be square of A's row dimension");
  if (!is_hermitian(xm, tol)) throw InvalidArgument("omega_weight: X must be Hermitian");
  xm = xm.hermitian_part();
  Matrix ym = y ? *y : Matrix::identity(n);
  if (!ym.square() || ym.rows() != n)
    throw InvalidArgument("omega_weight: Y must be square of the domain dimension");
  if (!is_hermitian(ym, tol)) throw InvalidArgument("omega_weight: Y must be Hermitian");

  const RowSpaceSplit split = row_space_split(vstack(a, b), tol);
  const Matrix c = (a.adjoint() * xm * a + b.adjoint() * w.matrix() * b).hermitian_part();

  auto smallest_on = [&](const Matrix& basis, const Matrix& op) {
    const HermitianEigen e = hermitian_eigen((basis.adjoint() * op * basis).hermitian_part());
    double largest = 0.0;
    for (double l : e.values) largest = std::max(largest, std::abs(l));
    return std::pair{e.values.front(), largest / tol.inv_cond_max};
  };
  if (split.range_basis.cols() > 0) {
    const auto [smallest, floor] = smallest_on(split.range_basis, c);
    if (!(smallest > floor)) throw NotPositiveOnRange(smallest);
  }
  Matrix y_part = Matrix::zeros(n, n);
  if (split.null_basis.cols() > 0) {
    const auto [smallest, floor] = smallest_on(split.null_basis, ym.hermitian_part());
    if (!(smallest > floor)) throw NotPositiveOnRange(smallest);
    const Matrix& nb = split.null_basis;
    y_part = (nb * (nb.adjoint() * ym * nb) * nb.adjoint()).hermitian_part();
  }
  Matrix p_null = (split.null_basis * split.null_basis.adjoint()).hermitian_part();
  Weight u = Weight::make(c + y_part, tol);
  if (!u.positive_definite()) {
    throw NotPositiveOnRange(hermitian_eigen(u.matrix()).values.front());
  }
  return {std::move(u), std::move(xm), std::move(y_part), std::move(p_null)};
}

std::vector<double> default_t_schedule() { return geometric_schedule(1e-1, 1e-10, 10); }

std::vector<double> default_lambda_schedule() { return geometric_schedule(1e0, 1e8, 9); }

Matrix regularized_weighted_iterate(const Matrix& a, const Matrix& b, const Weight& v,
                                    const Weight& w, double t, std::size_t rank) {
  const ToleranceConfig tol;
  std::size_t free_rank = 0;
  return TEvaluator(a, b, v, w, rank, tol)(t, free_rank);
}

Matrix regularized_weighted_iterate_direct(const Matrix& a, const Matrix& b, const Weight& v,
                                           const Weight& w, double t, std::size_t rank) {
  const Matrix ah = a.adjoint();
  const Matrix c =
      (ah * v.matrix() * a + (b.adjoint() * w.matrix() * b) * Complex(t)).hermitian_part();
  return mp_inverse_of_rank(c, rank) * ah * v.matrix();
}

LimitTrace limit_t_to_zero(const Matrix& a, const Matrix& b, const Weight& v, const Weight& w,
                           const OmegaWeight& u, std::span<const double> schedule,
                           const ToleranceConfig& tol) {
  require_same_domain(a, b, "limit_t_to_zero");
  require_dim(v, a.rows(), "limit_t_to_zero (V)");
  require_dim(w, b.rows(), "limit_t_to_zero (W)");
  require_dim(u.u, a.cols(), "limit_t_to_zero (U)");
  require_positive(v, "V");
  require_positive(w, "W");
  require_decreasing_schedule(schedule);
  Matrix target = wmp_inverse(a, v, u.u, tol).inverse;
  const std::size_t rank = stacked_rank(a, b, tol);
  return run_trace(
      schedule, std::move(target), rank,
      TEvaluator{a, b, v, w, rank, tol},
      tol);
}

LimitTrace limit_lambda_to_inf(const Matrix& a, const Matrix& b, std::span<const double> schedule,
                               const ToleranceConfig& tol) {
  if (!a.square() || a.rows() != b.rows() || !b.square())
    throw InvalidArgument("limit_lambda_to_inf: A and B must be square of the same size");
  require_increasing_schedule(schedule);
  require_psd(a, "A", tol);
  require_psd(b, "B", tol);
  const Matrix ah = a.hermitian_part();
  const Matrix bh = b.hermitian_part();
  const std::size_t n = a.rows();
  const Matrix comp = Matrix::identity(n) - projector_corange(ah, tol);
  const Matrix squeezed = (comp * bh * comp).hermitian_part();
  Matrix target = mp_inverse(squeezed, tol, operator_norm(bh)) * bh;
  const std::size_t rank = numerical_rank(ah + bh, tol);
  // With t = 1/lambda, (lambda A + B)^dagger B = (A + t B)^dagger (t B), solved
  // on range(A + B) in a basis adapted to range(A) ⊕ (range(A + B) ⊖ range(A)).
  const std::size_t r = std::min(numerical_rank(ah, tol), rank);
  const Matrix q1 = leading_row_basis(ah, r);
  const Matrix basis = hstack(q1, complement_basis(leading_row_basis(ah + bh, rank), q1));
  const Matrix k11 = (q1.adjoint() * ah * q1).hermitian_part();
  const Matrix e = (basis.adjoint() * bh * basis).hermitian_part();
  const Matrix qb = basis.adjoint() * bh;
  const Matrix f1 = qb.block(0, 0, r, n);
  const Matrix f2 = qb.block(r, 0, rank - r, n);
  return run_trace(
      schedule, std::move(target), rank,
      [&](double lambda, std::size_t& free_rank) {
        free_rank = numerical_rank(ah * Complex(lambda) + bh, tol);
        const double t = 1.0 / lambda;
        return basis * scaled_block_solve(k11, e, t, f1 * Complex(t), f2);
      },
      tol);
}

SeparatedPairReport separated_pair_check(const Matrix& a, const Matrix& b,
                                         const ToleranceConfig& tol) {
  return separation_report(a, b, std::nullopt, tol);
}

SeparatedClosedForm closed_form_separated(const Matrix& a, const Matrix& b, const Weight& v,
                                          const Weight& w, const ToleranceConfig& tol,
                                          std::uint64_t seed) {
  require_dim(v, a.rows(), "closed_form_separated (V)");
  require_dim(w, b.rows(), "closed_form_separated (W)");
  require_positive(v, "V");
  require_positive(w, "W");
  const SeparatedPairReport rep = separated_pair_check(a, b, tol);
  if (!rep.is_separated) {
    throw NotSeparated("closed_form_separated: ||A^dagger A B^dagger B|| = " +
                       std::to_string(rep.pq_norm));
  }
  const std::size_t n = a.cols();
  const Matrix p = projector_corange(a, tol);
  const Matrix q = projector_corange(b, tol);
  const Matrix g = weighted_left_factor(a, v, tol);
  Matrix two = Matrix::identity(n) * Complex(2.0) - p - q;
  SeparatedClosedForm out;
  out.pi = solve(two, g);
  out.d = g - (Matrix::identity(n) - p) * out.pi;
  const std::size_t rank = stacked_rank(a, b, tol);
  out.residual = operator_norm(regularized_weighted_iterate(a, b, v, w, 1.0, rank) - out.d);
  const Weight alt = random_weight(b.rows(), seed, tol);
  out.alternate_residual =
      operator_norm(regularized_weighted_iterate(a, b, v, alt, 1.0, rank) - out.d);
  return out;
}

BDecomposition decompose_b(const Matrix& a, const Matrix& b, const Weight& v, const Weight& w,
                           const ToleranceConfig& tol) {
  require_same_domain(a, b, "decompose_b");
  require_dim(v, a.rows(), "decompose_b (V)");
  require_dim(w, b.rows(), "decompose_b (W)");
  require_positive(v, "V");
  require_positive(w, "W");
  const OmegaWeight u = omega_weight(a, b, w, std::nullopt, std::nullopt, tol, &v);
  BDecomposition out;
  out.z = wmp_inverse(a, v, u.u, tol).inverse;
  out.b1 = b * out.z * a;
  out.b2 = b - out.b1;
  const double b_norm = operator_norm(b);
  const Matrix comp = Matrix::identity(a.cols()) - projector_corange(a, tol);
  out.orthogonality = operator_norm(out.b2.adjoint() * w.matrix() * out.b1);
  out.range_defect = operator_norm(comp * out.b1.adjoint());
  const double bound = tol.verify_bound(b_norm * b_norm * operator_norm(w.matrix()));
  if (out.orthogonality > bound) {
    throw InvariantViolation("decompose_b: ||B2* W B1|| = " + std::to_string(out.orthogonality));
  }
  if (out.range_defect > tol.verify_bound(b_norm)) {
    throw InvariantViolation("decompose_b: ||(I - A^dagger A) B1*|| = " +
                             std::to_string(out.range_defect));
  }
  // range(A*) + range(B*) = range(A*) ⊕ range(B2*)
  const std::size_t rank_a = numerical_rank(a, tol);
  out.b2_rank = stacked_rank(a, b, tol) - std::min(stacked_rank(a, b, tol), rank_a);
  out.separation = separation_report(a, out.b2, out.b2_rank, tol);
  if (!out.separation.is_separated) {
    throw InvariantViolation("decompose_b: (range(A*), range(B2*)) is not separated, ||PQ|| = " +
                             std::to_string(out.separation.pq_norm));
  }
  return out;
}

GeneralLimit general_limit_via_decomposition(const Matrix& a, const Matrix& b, const Weight& v,
                                             const Weight& w, const Weight& wprime,
                                             std::span<const double> schedule,
                                             const ToleranceConfig& tol, std::uint64_t seed) {
  require_decreasing_schedule(schedule);
  GeneralLimit out;
  out.decomposition = decompose_b(a, b, v, w, tol);
  const Matrix& b2 = out.decomposition.b2;
  require_dim(wprime, b2.rows(), "general_limit_via_decomposition (W')");
  require_positive(wprime, "W'");
  const std::size_t n = a.cols();
  const std::size_t rank_a = numerical_rank(a, tol);
  const Matrix qa = leading_row_basis(a, rank_a);
  const Matrix qb2 = leading_row_basis(b2, out.decomposition.b2_rank);
  const Matrix p = (qa * qa.adjoint()).hermitian_part();
  const Matrix q2 = (qb2 * qb2.adjoint()).hermitian_part();
  const Matrix g = weighted_left_factor(a, v, tol);
  out.pi_prime = solve(Matrix::identity(n) * Complex(2.0) - p - q2, g);
  Matrix target = g - (Matrix::identity(n) - p) * out.pi_prime;

  // B2 is a difference of nearly equal operators; drop its rounding noise
  // outside the pinned row space before forming A*VA + B2*W'B2.
  const Matrix b2_clean = b2 * q2;
  const std::size_t rank_sep = rank_a + out.decomposition.b2_rank;
  out.wprime_residual = operator_norm(
      regularized_weighted_iterate(a, b2_clean, v, wprime, 1.0, rank_sep) - target);
  const Weight alt = random_weight(b2.rows(), seed, tol);
  out.alternate_residual =
      operator_norm(regularized_weighted_iterate(a, b2_clean, v, alt, 1.0, rank_sep) - target);

  const std::size_t rank = stacked_rank(a, b, tol);
  out.trace = run_trace(
      schedule, std::move(target), rank,
      TEvaluator{a, b, v, w, rank, tol},
      tol);
  return out;
}

}  // namespace wmp

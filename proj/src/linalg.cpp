#include "wmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eigen_bridge.hpp"
#include "wmp/error.hpp"

namespace wmp {

using detail::as_eigen;
using detail::from_eigen;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

using ColMatrix = Eigen::MatrixXcd;

void require_square(const Matrix& a, const char* what) {
  if (!a.square()) {
    throw InvalidArgument(std::string(what) + ": expected a square matrix, got " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace

void ToleranceConfig::validate() const {
  if (rank_rtol && (!(*rank_rtol > 0.0) || !(*rank_rtol < 1.0)))
    throw InvalidArgument("ToleranceConfig: rank_rtol must lie in (0, 1)");
  if (!(inv_cond_max > 0.0)) throw InvalidArgument("ToleranceConfig: inv_cond_max must be positive");
  if (!(verify_atol > 0.0)) throw InvalidArgument("ToleranceConfig: verify_atol must be positive");
  if (!(verify_rtol > 0.0)) throw InvalidArgument("ToleranceConfig: verify_rtol must be positive");
  if (!(separation_margin > 0.0) || !(separation_margin < 1.0))
    throw InvalidArgument("ToleranceConfig: separation_margin must lie in (0, 1)");
  if (!(limit_rtol > 0.0)) throw InvalidArgument("ToleranceConfig: limit_rtol must be positive");
}

double ToleranceConfig::rank_tolerance(std::size_t rows, std::size_t cols) const {
  if (rank_rtol) return *rank_rtol;
  return static_cast<double>(std::max<std::size_t>({rows, cols, 1})) * kEps;
}

SvdFactorization svd(const Matrix& a, const ToleranceConfig& tol, double reference_norm) {
  SvdFactorization f;
  const std::size_t k = std::min(a.rows(), a.cols());
  if (k == 0) {
    f.u = Matrix(a.rows(), 0);
    f.vh = Matrix(0, a.cols());
    return f;
  }
  const ColMatrix e = as_eigen(a);
  Eigen::JacobiSVD<ColMatrix> solver(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.u = from_eigen(solver.matrixU());
  f.vh = from_eigen(solver.matrixV().adjoint());
  const auto& s = solver.singularValues();
  f.sigma.assign(s.data(), s.data() + s.size());
  const double scale = std::max(f.sigma.front(), reference_norm);
  const double cutoff = tol.rank_tolerance(a.rows(), a.cols()) * scale;
  f.numerical_rank = static_cast<std::size_t>(
      std::count_if(f.sigma.begin(), f.sigma.end(), [&](double v) { return v > cutoff; }));
  return f;
}

std::vector<double> singular_values(const Matrix& a) {
  if (a.empty()) return {};
  const ColMatrix e = as_eigen(a);
  Eigen::JacobiSVD<ColMatrix> solver(e);
  const auto& s = solver.singularValues();
  return {s.data(), s.data() + s.size()};
}

std::size_t numerical_rank(const Matrix& a, const ToleranceConfig& tol, double reference_norm) {
  return svd(a, tol, reference_norm).numerical_rank;
}

Matrix mp_inverse(const SvdFactorization& f) {
  const std::size_t m = f.u.rows();
  const std::size_t n = f.vh.cols();
  Matrix out(n, m);
  for (std::size_t r = 0; r < f.numerical_rank; ++r) {
    const double inv = 1.0 / f.sigma[r];
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vi = std::conj(f.vh(r, i)) * inv;
      if (vi == Complex{}) continue;
      for (std::size_t j = 0; j < m; ++j) out(i, j) += vi * std::conj(f.u(j, r));
    }
  }
  return out;
}

Matrix mp_inverse(const Matrix& a, const ToleranceConfig& tol, double reference_norm) {
  return mp_inverse(svd(a, tol, reference_norm));
}

Matrix mp_inverse_of_rank(const Matrix& a, std::size_t rank) {
  SvdFactorization f = svd(a, ToleranceConfig{});
  f.numerical_rank = std::min(rank, f.sigma.size());
  while (f.numerical_rank > 0 && !(f.sigma[f.numerical_rank - 1] > 0.0)) --f.numerical_rank;
  return mp_inverse(f);
}

namespace {

// U_r U_r^* for the first r columns of u.
Matrix column_projector(const Matrix& u, std::size_t r) {
  const std::size_t n = u.rows();
  Matrix basis = u.block(0, 0, n, r);
  return basis * basis.adjoint();
}

}  // namespace

Matrix projector_range(const Matrix& a, const ToleranceConfig& tol) {
  const SvdFactorization f = svd(a, tol);
  return column_projector(f.u, f.numerical_rank).hermitian_part();
}

Matrix projector_corange(const Matrix& a, const ToleranceConfig& tol) {
  const SvdFactorization f = svd(a, tol);
  return column_projector(f.vh.adjoint(), f.numerical_rank).hermitian_part();
}

Matrix projector_nullspace_pair(const Matrix& a, const Matrix& b, const ToleranceConfig& tol) {
  if (a.cols() != b.cols()) {
    throw InvalidArgument("projector_nullspace_pair: column counts differ (" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
  }
  const Matrix stacked = vstack(a, b);
  return Matrix::identity(a.cols()) - projector_corange(stacked, tol);
}

RowSpaceSplit row_space_split(const Matrix& a, const ToleranceConfig& tol) {
  const std::size_t n = a.cols();
  if (a.rows() == 0 || n == 0) return {Matrix(n, 0), Matrix::identity(n)};
  const ColMatrix e = as_eigen(a);
  Eigen::JacobiSVD<ColMatrix> solver(e, Eigen::ComputeFullV);
  const auto& s = solver.singularValues();
  const double cutoff = tol.rank_tolerance(a.rows(), a.cols()) * s(0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cutoff) ++r;
  const ColMatrix& v = solver.matrixV();
  return {from_eigen(v.leftCols(r)), from_eigen(v.rightCols(static_cast<Eigen::Index>(n) - r))};
}

double operator_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  return singular_values(a).front();
}

double condition_number(const Matrix& a) {
  require_square(a, "condition_number");
  if (a.empty()) return 1.0;
  const std::vector<double> s = singular_values(a);
  if (!(s.back() > 0.0)) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

bool is_invertible(const Matrix& a, const ToleranceConfig& tol) {
  require_square(a, "is_invertible");
  return condition_number(a) <= tol.inv_cond_max;
}

bool is_hermitian(const Matrix& a, const ToleranceConfig& tol) {
  if (!a.square()) return false;
  return operator_norm(a - a.adjoint()) <= tol.verify_bound(operator_norm(a));
}

bool is_positive_definite(const Matrix& a, const ToleranceConfig& tol) {
  require_square(a, "is_positive_definite");
  if (a.empty()) return true;
  if (!is_hermitian(a, tol)) return false;
  const HermitianEigen eig = hermitian_eigen(a);
  const double sigma_max = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  return eig.values.front() > sigma_max / tol.inv_cond_max;
}

HermitianEigen hermitian_eigen(const Matrix& a) {
  require_square(a, "hermitian_eigen");
  HermitianEigen out;
  if (a.empty()) return out;
  const ColMatrix e = as_eigen(a.hermitian_part());
  Eigen::SelfAdjointEigenSolver<ColMatrix> solver(e);
  const auto& values = solver.eigenvalues();
  out.values.assign(values.data(), values.data() + values.size());
  out.vectors = from_eigen(solver.eigenvectors());
  return out;
}

Matrix psd_sqrt(const Matrix& a) {
  const HermitianEigen eig = hermitian_eigen(a);
  const std::size_t n = a.rows();
  Matrix scaled = eig.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double root = std::sqrt(std::max(eig.values[j], 0.0));
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= root;
  }
  return (scaled * eig.vectors.adjoint()).hermitian_part();
}

Matrix solve(const Matrix& a, const Matrix& b) {
  require_square(a, "solve");
  if (a.rows() != b.rows()) throw InvalidArgument("solve: right-hand side has the wrong row count");
  if (a.empty() || b.empty()) return Matrix(a.cols(), b.cols());
  const ColMatrix ea = as_eigen(a);
  const ColMatrix eb = as_eigen(b);
  const ColMatrix x = ea.colPivHouseholderQr().solve(eb);
  return from_eigen(x);
}

Matrix solve_right(const Matrix& b, const Matrix& a) {
  // X A = B  <=>  A* X* = B*
  return solve(a.adjoint(), b.adjoint()).adjoint();
}

Matrix inverse(const Matrix& a, const ToleranceConfig& tol) {
  require_square(a, "inverse");
  const double cond = condition_number(a);
  if (!(cond <= tol.inv_cond_max)) {
    throw MathError("inverse: matrix is singular to working tolerance (condition number " +
                    std::to_string(cond) + ")");
  }
  return solve(a, Matrix::identity(a.rows()));
}

std::vector<double> geometric_schedule(double first, double last, std::size_t count) {
  if (count == 0) throw InvalidArgument("geometric_schedule: count must be positive");
  if (!(first > 0.0) || !(last > 0.0))
    throw InvalidArgument("geometric_schedule: endpoints must be positive");
  if (count == 1) return {first};
  std::vector<double> out(count);
  const double log_first = std::log10(first);
  const double step = (std::log10(last) - log_first) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::pow(10.0, log_first + step * static_cast<double>(i));
  out.front() = first;
  out.back() = last;
  return out;
}

void require_decreasing_schedule(std::span<const double> t) {
  if (t.empty()) throw InvalidArgument("schedule is empty");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !std::isfinite(t[i]))
      throw InvalidArgument("schedule entries must be positive and finite");
    if (i > 0 && !(t[i] < t[i - 1])) throw InvalidArgument("schedule must be strictly decreasing");
  }
}

void require_increasing_schedule(std::span<const double> lambda) {
  if (lambda.empty()) throw InvalidArgument("schedule is empty");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i]))
      throw InvalidArgument("schedule entries must be positive and finite");
    if (i > 0 && !(lambda[i] > lambda[i - 1]))
      throw InvalidArgument("schedule must be strictly increasing");
  }
}

bool nonincreasing_from(std::span<const double> values, std::size_t first, double slack,
                        double floor) {
  for (std::size_t i = first + 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] * (1.0 + slack) + floor) return false;
  }
  return true;
}

LimitOutcome regularized_pinv_limit(const Matrix& t, std::span<const double> schedule,
                                    const ToleranceConfig& tol) {
  require_decreasing_schedule(schedule);
  LimitOutcome out;
  out.schedule.assign(schedule.begin(), schedule.end());
  out.target = mp_inverse(t, tol);
  const Matrix th = t.adjoint();
  const Matrix gram = th * t;
  const std::size_t n = t.cols();
  for (double s : schedule) {
    Matrix shifted = gram;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += s;
    Matrix iterate = solve(shifted, th);
    out.errors.push_back(operator_norm(iterate - out.target));
    out.iterates.push_back(std::move(iterate));
  }
  out.final_error = out.errors.back();
  const double floor = tol.verify_atol * 1e-3;
  out.tail_nonincreasing = nonincreasing_from(out.errors, out.errors.size() / 2, 1e-9, floor);
  return out;
}

}  // namespace wmp

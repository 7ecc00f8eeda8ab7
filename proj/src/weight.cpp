#include "wmp/weight.hpp"

#include <string>

#include "wmp/error.hpp"

namespace wmp {

Weight Weight::make(const Matrix& m, const ToleranceConfig& tol) {
  if (!m.square()) {
    throw InvalidArgument("Weight: expected a square matrix, got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
  const double norm = operator_norm(m);
  const double asymmetry = operator_norm(m - m.adjoint());
  if (asymmetry > tol.verify_bound(norm)) {
    throw InvalidWeight("Weight: matrix is not Hermitian (||W - W*|| = " +
                        std::to_string(asymmetry) + ")");
  }
  Matrix sym = m.hermitian_part();
  const double cond = condition_number(sym);
  if (!(cond <= tol.inv_cond_max)) {
    throw InvalidWeight("Weight: matrix is not invertible (condition number " +
                        std::to_string(cond) + ")");
  }
  Matrix inv = wmp::inverse(sym, tol).hermitian_part();
  const bool positive = is_positive_definite(sym, tol);
  return Weight(std::move(sym), std::move(inv), positive);
}

Weight Weight::identity(std::size_t n) {
  return Weight(Matrix::identity(n), Matrix::identity(n), true);
}

Weight Weight::block_diag(const Weight& a, const Weight& b) {
  return Weight(wmp::block_diag(a.matrix_, b.matrix_), wmp::block_diag(a.inverse_, b.inverse_),
                a.positive_ && b.positive_);
}

}  // namespace wmp

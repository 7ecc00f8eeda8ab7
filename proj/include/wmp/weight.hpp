#pragma once

#include <cstddef>

#include "wmp/linalg.hpp"
#include "wmp/matrix.hpp"

namespace wmp {

/// A self-adjoint invertible matrix used to redefine an inner product,
/// <x, y>_W = <x, W y>. Not necessarily positive.
///
/// Validation happens once, here: the input is replaced by its Hermitian
/// part when the asymmetry is within tolerance and rejected otherwise, the
/// condition number is checked against inv_cond_max, and the inverse and
/// definiteness flag are cached. A Weight is immutable afterwards.
class Weight {
 public:
  /// Throws InvalidWeight (non-Hermitian or singular) or InvalidArgument (non-square).
  static Weight make(const Matrix& m, const ToleranceConfig& tol);
  static Weight identity(std::size_t n);
  /// diag(a, b)
  static Weight block_diag(const Weight& a, const Weight& b);

  const Matrix& matrix() const noexcept { return matrix_; }
  const Matrix& inverse() const noexcept { return inverse_; }
  bool positive_definite() const noexcept { return positive_; }
  std::size_t dim() const noexcept { return matrix_.rows(); }

  /// The weight W^{-1}.
  Weight inverted() const { return Weight(inverse_, matrix_, positive_); }

 private:
  Weight(Matrix m, Matrix inv, bool positive)
      : matrix_(std::move(m)), inverse_(std::move(inv)), positive_(positive) {}

  Matrix matrix_;
  Matrix inverse_;
  bool positive_ = false;
};

}  // namespace wmp

#pragma once

#include <Eigen/Dense>

#include "wmp/matrix.hpp"

namespace wmp::detail {

using EMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const EMatrix> as_eigen(const Matrix& m) {
  return {m.entries().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

template <typename Derived>
Matrix from_eigen(const Eigen::MatrixBase<Derived>& e) {
  Matrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return out;
}

}  // namespace wmp::detail

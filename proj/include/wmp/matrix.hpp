#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace wmp {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major, double precision.
///
/// Every operator in the library is a `Matrix`; real data is embedded with
/// zero imaginary parts. Arithmetic returns new values, so a `Matrix` handed
/// to any library function is never modified.
class Matrix {
 public:
  Matrix() = default;
  /// rows x cols zero matrix.
  Matrix(std::size_t rows, std::size_t cols);
  /// Takes row-major entries; throws InvalidArgument on a length mismatch
  /// or on a non-finite entry.
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static Matrix identity(std::size_t n);
  /// Row-major real entries.
  static Matrix real(std::size_t rows, std::size_t cols, std::initializer_list<double> entries);
  static Matrix real(std::size_t rows, std::size_t cols, std::span<const double> entries);
  static Matrix diagonal(std::span<const double> values);
  static Matrix diagonal(std::initializer_list<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const Complex> entries() const noexcept { return data_; }
  std::span<Complex> entries() noexcept { return data_; }

  /// Conjugate transpose.
  Matrix adjoint() const;
  Matrix transpose() const;
  Matrix conj() const;

  Matrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const;
  void set_block(std::size_t row0, std::size_t col0, const Matrix& src);

  /// (A + A*) / 2
  Matrix hermitian_part() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(Complex s);

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Matrix operator*(Complex s, Matrix m);
Matrix operator*(Matrix m, Complex s);

/// Frobenius norm.
double frobenius_norm(const Matrix& a);
/// Largest entry modulus.
double max_abs(const Matrix& a);

/// [a b]
Matrix hstack(const Matrix& a, const Matrix& b);
/// [a; b]
Matrix vstack(const Matrix& a, const Matrix& b);
/// [[a 0]; [0 b]]
Matrix block_diag(const Matrix& a, const Matrix& b);

std::ostream& operator<<(std::ostream& os, const Matrix& m);

}  // namespace wmp

#include "wmp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "wmp/error.hpp"
#include "wmp/kernels.hpp"

namespace wmp {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidArgument("Matrix: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                          std::to_string(data_.size()));
  }
  if (!all_finite()) throw InvalidArgument("Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::real(std::size_t rows, std::size_t cols, std::initializer_list<double> entries) {
  return real(rows, cols, std::span<const double>(entries.begin(), entries.size()));
}

Matrix Matrix::real(std::size_t rows, std::size_t cols, std::span<const double> entries) {
  std::vector<Complex> data(entries.begin(), entries.end());
  return Matrix(rows, cols, std::move(data));
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::diagonal(std::initializer_list<double> values) {
  return diagonal(std::span<const double>(values.begin(), values.size()));
}

Matrix Matrix::adjoint() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

Matrix Matrix::conj() const {
  Matrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

Matrix Matrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                     std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_) throw InvalidArgument("block: out of range");
  Matrix out(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>((row0 + i) * cols_ + col0), ncols,
                out.data_.begin() + static_cast<std::ptrdiff_t>(i * ncols));
  return out;
}

void Matrix::set_block(std::size_t row0, std::size_t col0, const Matrix& src) {
  if (row0 + src.rows() > rows_ || col0 + src.cols() > cols_)
    throw InvalidArgument("set_block: out of range");
  for (std::size_t i = 0; i < src.rows(); ++i)
    for (std::size_t j = 0; j < src.cols(); ++j) (*this)(row0 + i, col0 + j) = src(i, j);
}

Matrix Matrix::hermitian_part() const {
  if (!square()) throw InvalidArgument("hermitian_part: matrix is not square");
  Matrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "operator+");
  kernels::active().axpy(data_.size(), Complex(1.0), rhs.data_.data(), data_.data());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "operator-");
  kernels::active().axpy(data_.size(), Complex(-1.0), rhs.data_.data(), data_.data());
  return *this;
}

Matrix& Matrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator-(Matrix m) { return m *= Complex(-1.0); }
Matrix operator*(Complex s, Matrix m) { return m *= s; }
Matrix operator*(Matrix m, Complex s) { return m *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw InvalidArgument("operator*: inner dimensions " + std::to_string(lhs.cols()) + " and " +
                          std::to_string(rhs.rows()) + " differ");
  }
  Matrix out(lhs.rows(), rhs.cols());
  if (out.empty()) return out;
  if (lhs.cols() == 0) return out;
  kernels::active().gemm(lhs.rows(), rhs.cols(), lhs.cols(), lhs.entries().data(),
                         rhs.entries().data(), out.entries().data());
  return out;
}

double frobenius_norm(const Matrix& a) {
  return std::sqrt(kernels::active().sum_abs2(a.size(), a.entries().data()));
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (const Complex& z : a.entries()) m = std::max(m, std::abs(z));
  return m;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidArgument("hstack: row counts differ");
  Matrix out(a.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw InvalidArgument("vstack: column counts differ");
  Matrix out(a.rows() + b.rows(), a.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), 0, b);
  return out;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), a.cols(), b);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(6);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i == 0 ? "[" : " ");
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Complex z = m(i, j);
      os << (j == 0 ? "" : ", ") << z.real();
      if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    }
    os << (i + 1 == m.rows() ? "]" : ";\n");
  }
  if (m.rows() == 0) os << "[]";
  os.flags(flags);
  os.precision(prec);
  return os;
}

}  // namespace wmp

#include <doctest.h>

#include <cmath>
#include <limits>

#include "support/oracles.hpp"
#include "wmp/error.hpp"
#include "wmp/random.hpp"

using namespace wmp;
using wmp::testing::EMatrix;
using wmp::testing::to_eigen;

TEST_CASE("construction validates entries") {
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<Complex>(3)), InvalidArgument);
  std::vector<Complex> bad(4);
  bad[2] = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(Matrix(2, 2, bad), InvalidArgument);
  bad[2] = Complex(0.0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(Matrix(2, 2, bad), InvalidArgument);

  const Matrix z(3, 2);
  CHECK(z.rows() == 3);
  CHECK(z.cols() == 2);
  CHECK(z.size() == 6);
  CHECK(max_abs(z) == 0.0);
}

TEST_CASE("row-major layout and adjoint") {
  const Matrix a(2, 3, {{1, 1}, {2, 0}, {3, -1}, {4, 0}, {5, 2}, {6, 0}});
  CHECK(a(0, 2) == Complex(3, -1));
  CHECK(a(1, 1) == Complex(5, 2));
  const Matrix h = a.adjoint();
  CHECK(h.rows() == 3);
  CHECK(h(2, 0) == Complex(3, 1));
  CHECK(h.adjoint() == a);
  CHECK(a.transpose()(2, 0) == Complex(3, -1));
  CHECK(a.conj()(0, 0) == Complex(1, -1));
}

TEST_CASE("products match Eigen") {
  Rng rng(5);
  for (std::size_t m : {1, 3, 7})
    for (std::size_t k : {1, 4, 9})
      for (std::size_t n : {1, 2, 8}) {
        const Matrix a = gaussian_matrix(rng, m, k);
        const Matrix b = gaussian_matrix(rng, k, n);
        const EMatrix ref = to_eigen(a) * to_eigen(b);
        const EMatrix got = to_eigen(a * b);
        CHECK((got - ref).norm() <= 1e-13 * (1.0 + ref.norm()));
      }
  CHECK_THROWS_AS(Matrix(2, 3) * Matrix(2, 3), InvalidArgument);
}

TEST_CASE("sums, scaling and norms") {
  const Matrix a = Matrix::real(2, 2, {3, 0, 0, -4});
  CHECK(frobenius_norm(a) == doctest::Approx(5.0));
  CHECK(max_abs(a) == 4.0);
  const Matrix b = a * Complex(0, 1);
  CHECK(b(1, 1) == Complex(0, -4));
  CHECK((a + a - a) == a);
  CHECK((-a)(0, 0) == Complex(-3, 0));
  CHECK_THROWS_AS(a + Matrix(2, 3), InvalidArgument);
}

TEST_CASE("blocks and stacking") {
  const Matrix a = Matrix::real(2, 2, {1, 2, 3, 4});
  const Matrix b = Matrix::real(2, 1, {5, 6});
  const Matrix h = hstack(a, b);
  CHECK(h.cols() == 3);
  CHECK(h(1, 2) == Complex(6, 0));
  const Matrix v = vstack(a, a);
  CHECK(v.rows() == 4);
  CHECK(v.block(2, 0, 2, 2) == a);
  const Matrix d = block_diag(a, b);
  CHECK(d.rows() == 4);
  CHECK(d.cols() == 3);
  CHECK(d(2, 2) == Complex(5, 0));
  CHECK(d(0, 2) == Complex(0, 0));
  Matrix s(3, 3);
  s.set_block(1, 1, a);
  CHECK(s(2, 2) == Complex(4, 0));
  CHECK_THROWS_AS(a.block(1, 1, 2, 1), InvalidArgument);
  CHECK_THROWS_AS(hstack(a, Matrix(3, 1)), InvalidArgument);
}

TEST_CASE("hermitian part and identity helpers") {
  const Matrix a(2, 2, {{1, 0}, {2, 1}, {0, 0}, {3, 0}});
  const Matrix h = a.hermitian_part();
  CHECK(h == h.adjoint());
  CHECK(h(0, 1) == Complex(1, 0.5));
  CHECK(Matrix::identity(3)(1, 1) == Complex(1, 0));
  CHECK(Matrix::diagonal({1.0, 2.0})(1, 1) == Complex(2, 0));
  CHECK_THROWS_AS(Matrix(2, 3).hermitian_part(), InvalidArgument);
}

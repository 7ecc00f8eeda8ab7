#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "wmp/error.hpp"
#include "wmp/linalg.hpp"

using namespace wmp;
namespace wt = wmp::testing;

namespace {

const Matrix kExampleA = Matrix::real(4, 4, {1, 0, 1, -1, 0, 0, 1, 3, 0, -2, 0, 2, 0, 0, 0, 0});

double dist(const Matrix& x, const Matrix& y) { return operator_norm(x - y); }

}  // namespace

TEST_CASE("tolerance configuration") {
  ToleranceConfig tol;
  CHECK_NOTHROW(tol.validate());
  CHECK(tol.inv_cond_max == 1e12);
  CHECK(tol.verify_atol == 1e-9);
  CHECK(tol.rank_tolerance(3, 7) == doctest::Approx(7 * 2.220446049250313e-16));
  tol.rank_rtol = 1.0;
  CHECK_THROWS_AS(tol.validate(), InvalidArgument);
  tol.rank_rtol = 1e-10;
  CHECK(tol.rank_tolerance(3, 7) == 1e-10);
  tol.verify_atol = 0.0;
  CHECK_THROWS_AS(tol.validate(), InvalidArgument);
  tol.verify_atol = 1e-9;
  tol.inv_cond_max = -1.0;
  CHECK_THROWS_AS(tol.validate(), InvalidArgument);
}

TEST_CASE("svd factors reconstruct the input") {
  const ToleranceConfig tol;
  Rng rng(11);
  for (int k = 0; k < 30; ++k) {
    const std::size_t m = wt::uniform_size(rng, 1, 9);
    const std::size_t n = wt::uniform_size(rng, 1, 9);
    const std::size_t r = wt::uniform_size(rng, 0, std::min(m, n));
    const Matrix a = wt::random_of_rank(rng, m, n, r);
    const SvdFactorization f = svd(a, tol);
    CHECK(f.numerical_rank == r);
    for (std::size_t i = 1; i < f.sigma.size(); ++i) CHECK(f.sigma[i] <= f.sigma[i - 1]);
    for (double s : f.sigma) CHECK(s >= 0.0);
    const Matrix s = Matrix::diagonal(f.sigma);
    CHECK(dist(f.u * s * f.vh, a) <= 1e-12 * (1.0 + operator_norm(a)));
    const std::size_t k2 = f.sigma.size();
    CHECK(dist(f.u.adjoint() * f.u, Matrix::identity(k2)) <= 1e-12);
    CHECK(dist(f.vh * f.vh.adjoint(), Matrix::identity(k2)) <= 1e-12);
  }
}

TEST_CASE("pseudoinverse agrees with a complete orthogonal decomposition") {
  const ToleranceConfig tol;
  Rng rng(12);
  for (int k = 0; k < 60; ++k) {
    const std::size_t m = wt::uniform_size(rng, 1, 12);
    const std::size_t n = wt::uniform_size(rng, 1, 10);
    const Matrix a = wt::random_of_rank(rng, m, n, wt::uniform_size(rng, 0, std::min(m, n)));
    const Matrix x = mp_inverse(a, tol);
    const Matrix ref = wt::from_eigen(wt::pinv(wt::to_eigen(a), 1e-10));
    CHECK(dist(x, ref) <= 1e-8 * (1.0 + operator_norm(ref)));
    const Matrix id_m = Matrix::identity(m);
    const Matrix id_n = Matrix::identity(n);
    const auto d = wt::penrose_defects(a, id_m, id_n, x);
    for (double v : d) CHECK(v <= 1e-9 * (1.0 + operator_norm(a)) * (1.0 + operator_norm(x)));
  }
}

TEST_CASE("pseudoinverse of the worked example") {
  const ToleranceConfig tol;
  const Matrix expected = Matrix::real(4, 4,
                                       {11.0 / 27, 1.0 / 27, 2.0 / 27, 0,      //
                                        -4.0 / 27, 7.0 / 27, -13.0 / 27, 0,    //
                                        4.0 / 9, 2.0 / 9, -1.0 / 18, 0,        //
                                        -4.0 / 27, 7.0 / 27, 1.0 / 54, 0});
  const Matrix x = mp_inverse(kExampleA, tol);
  CHECK(max_abs(x - expected) <= 1e-12);
  CHECK(numerical_rank(kExampleA, tol) == 3);
}

TEST_CASE("zero and rank-deficient edge cases") {
  const ToleranceConfig tol;
  const Matrix z(3, 2);
  const Matrix x = mp_inverse(z, tol);
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 3);
  CHECK(max_abs(x) == 0.0);
  CHECK(numerical_rank(z, tol) == 0);
  const Matrix e = Matrix::real(2, 2, {1, 0, 0, 0});
  CHECK(mp_inverse(e, tol) == e);
  CHECK(mp_inverse_of_rank(Matrix::real(2, 2, {2, 0, 0, 1e-3}), 1)(1, 1) == Complex(0, 0));
}

TEST_CASE("projectors are Hermitian idempotents with the right range") {
  const ToleranceConfig tol;
  Rng rng(13);
  for (int k = 0; k < 20; ++k) {
    const std::size_t m = wt::uniform_size(rng, 1, 8);
    const std::size_t n = wt::uniform_size(rng, 1, 8);
    const std::size_t r = wt::uniform_size(rng, 0, std::min(m, n));
    const Matrix a = wt::random_of_rank(rng, m, n, r);
    const Matrix p = projector_range(a, tol);
    const Matrix q = projector_corange(a, tol);
    CHECK(dist(p, p.adjoint()) <= 1e-12);
    CHECK(dist(p * p, p) <= 1e-12);
    CHECK(dist(q * q, q) <= 1e-12);
    CHECK(dist(p * a, a) <= 1e-11 * (1.0 + operator_norm(a)));
    CHECK(dist(a * q, a) <= 1e-11 * (1.0 + operator_norm(a)));
    const RowSpaceSplit s = row_space_split(a, tol);
    CHECK(s.range_basis.cols() == r);
    CHECK(s.null_basis.cols() == n - r);
    CHECK(dist(s.range_basis * s.range_basis.adjoint(), q) <= 1e-12);
    if (n > r) CHECK(operator_norm(a * s.null_basis) <= 1e-11 * (1.0 + operator_norm(a)));
  }
}

TEST_CASE("nullspace-pair projector") {
  const ToleranceConfig tol;
  const Matrix a = Matrix::real(1, 3, {1, 0, 0});
  const Matrix b = Matrix::real(1, 3, {0, 1, 0});
  const Matrix p = projector_nullspace_pair(a, b, tol);
  const Matrix expected = Matrix::real(3, 3, {0, 0, 0, 0, 0, 0, 0, 0, 1});
  CHECK(dist(p, expected) <= 1e-14);
  CHECK_THROWS_AS(projector_nullspace_pair(a, Matrix(1, 2), tol), InvalidArgument);

  Rng rng(14);
  for (int k = 0; k < 10; ++k) {
    const Matrix x = wt::random_of_rank(rng, 2, 6, 2);
    const Matrix y = wt::random_of_rank(rng, 3, 6, 2);
    const Matrix q = projector_nullspace_pair(x, y, tol);
    CHECK(operator_norm(x * q) <= 1e-11 * operator_norm(x));
    CHECK(operator_norm(y * q) <= 1e-11 * operator_norm(y));
    Complex tr = 0.0;
    for (std::size_t i = 0; i < 6; ++i) tr += q(i, i);
    CHECK(std::abs(tr - Complex(2.0)) <= 1e-12);
    CHECK(dist(q * q, q) <= 1e-12);
  }
}

TEST_CASE("conditioning and invertibility decisions") {
  const ToleranceConfig tol;
  CHECK(condition_number(Matrix::diagonal({4.0, 0.5})) == doctest::Approx(8.0));
  CHECK(std::isinf(condition_number(Matrix::real(2, 2, {1, 0, 0, 0}))));
  CHECK(is_invertible(Matrix::diagonal({1.0, 1e-11}), tol));
  CHECK_FALSE(is_invertible(Matrix::diagonal({1.0, 1e-13}), tol));
  CHECK_THROWS_AS(inverse(Matrix::real(2, 2, {1, 2, 2, 4}), tol), MathError);
  CHECK_THROWS_AS(inverse(Matrix(2, 3), tol), InvalidArgument);
  const Matrix a = Matrix::real(2, 2, {2, 1, 1, 3});
  CHECK(dist(inverse(a, tol) * a, Matrix::identity(2)) <= 1e-15 * 10);
  const Matrix b = Matrix::real(2, 1, {1, 2});
  CHECK(dist(a * solve(a, b), b) <= 1e-14);
  const Matrix c = Matrix::real(1, 2, {1, 2});
  CHECK(dist(solve_right(c, a) * a, c) <= 1e-14);
}

TEST_CASE("Hermitian predicates, eigen and square root") {
  const ToleranceConfig tol;
  const Matrix n = Matrix::real(4, 4, {2, 1, 1, 0, 1, 2, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1});
  CHECK(is_hermitian(n, tol));
  CHECK(is_positive_definite(n, tol));
  CHECK_FALSE(is_positive_definite(Matrix::diagonal({1.0, -1.0}), tol));
  CHECK_FALSE(is_hermitian(Matrix::real(2, 2, {1, 1, 0, 1}), tol));
  const HermitianEigen e = hermitian_eigen(n);
  for (std::size_t i = 1; i < e.values.size(); ++i) CHECK(e.values[i] >= e.values[i - 1]);
  const Matrix recon = e.vectors * Matrix::diagonal(e.values) * e.vectors.adjoint();
  CHECK(dist(recon, n) <= 1e-13);
  const Matrix s = psd_sqrt(n);
  CHECK(dist(s * s, n) <= 1e-13);
  CHECK(dist(s, s.adjoint()) <= 1e-14);
}

TEST_CASE("schedules") {
  const std::vector<double> t = geometric_schedule(1e-1, 1e-4, 4);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == 1e-1);
  CHECK(t[3] == doctest::Approx(1e-4));
  CHECK(t[2] == doctest::Approx(1e-3));
  CHECK(geometric_schedule(2.0, 5.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(geometric_schedule(1.0, 0.0, 3), InvalidArgument);
  CHECK_NOTHROW(require_decreasing_schedule(t));
  CHECK_THROWS_AS(require_increasing_schedule(t), InvalidArgument);
  CHECK_THROWS_AS(require_decreasing_schedule(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(require_decreasing_schedule(std::vector<double>{1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(require_increasing_schedule(std::vector<double>{-1.0, 1.0}), InvalidArgument);
}

TEST_CASE("monotone tail check") {
  const std::vector<double> v{5, 4, 4, 3, 1};
  CHECK(nonincreasing_from(v, 0));
  const std::vector<double> w{5, 4, 4.5, 3};
  CHECK_FALSE(nonincreasing_from(w, 0));
  CHECK(nonincreasing_from(w, 2));
  CHECK(nonincreasing_from(w, 0, 0.2));
  const std::vector<double> noise{1e-15, 3e-15, 2e-15};
  CHECK_FALSE(nonincreasing_from(noise, 0));
  CHECK(nonincreasing_from(noise, 0, 1e-9, 1e-13));
}

TEST_CASE("regularized pseudoinverse limit") {
  const ToleranceConfig tol;
  Rng rng(15);
  const Matrix t = random_with_spectrum(rng, 5, 4, 2, 0.5, 2.0);
  const LimitOutcome out = regularized_pinv_limit(t, geometric_schedule(1e-1, 1e-8, 8), tol);
  CHECK(out.iterates.size() == 8);
  CHECK(out.final_error <= 1e-7);
  CHECK(out.tail_nonincreasing);
  CHECK(dist(out.target, mp_inverse(t, tol)) <= 1e-14);
  for (std::size_t i = 1; i < out.errors.size(); ++i) CHECK(out.errors[i] <= out.errors[i - 1]);
}

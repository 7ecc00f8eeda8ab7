#include "wmp/random.hpp"

#include <algorithm>

#include "wmp/linalg.hpp"

namespace wmp {

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, bool complex) {
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Complex& z : out.entries()) {
    const double re = normal(rng);
    const double im = complex ? normal(rng) : 0.0;
    z = Complex(re, im);
  }
  return out;
}

Matrix random_positive_definite(Rng& rng, std::size_t n, bool complex) {
  const Matrix g = gaussian_matrix(rng, n, n, complex);
  Matrix gram = (g.adjoint() * g).hermitian_part();
  const double delta = 1e-3 * operator_norm(gram);
  for (std::size_t i = 0; i < n; ++i) gram(i, i) += delta;
  return gram;
}

Matrix random_isometry(Rng& rng, std::size_t rows, std::size_t cols, bool complex) {
  const Matrix g = gaussian_matrix(rng, rows, std::max<std::size_t>(cols, 1), complex);
  const SvdFactorization f = svd(g, ToleranceConfig{});
  return f.u.block(0, 0, rows, cols);
}

Matrix random_with_spectrum(Rng& rng, std::size_t rows, std::size_t cols, std::size_t rank,
                            double lo, double hi, bool complex) {
  rank = std::min({rank, rows, cols});
  std::uniform_real_distribution<double> sigma(lo, hi);
  std::vector<double> s(rank);
  for (double& x : s) x = sigma(rng);
  const Matrix u = random_isometry(rng, rows, rank, complex);
  const Matrix v = random_isometry(rng, cols, rank, complex);
  return u * Matrix::diagonal(s) * v.adjoint();
}

Matrix random_hermitian_weight(Rng& rng, std::size_t n, double lo, double hi, bool indefinite,
                               bool complex) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> ev(n);
  for (double& x : ev) x = (indefinite && sign(rng) ? -1.0 : 1.0) * mag(rng);
  const Matrix q = random_isometry(rng, n, n, complex);
  return (q * Matrix::diagonal(ev) * q.adjoint()).hermitian_part();
}

}  // namespace wmp

#pragma once

#include <cstddef>
#include <random>

#include "wmp/matrix.hpp"

namespace wmp {

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts
/// (imaginary parts zero when `complex` is false).
Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, bool complex = true);

/// G*G + δI with G square Gaussian and δ = 1e-3 ||G*G||.
Matrix random_positive_definite(Rng& rng, std::size_t n, bool complex = true);

/// rows x cols with orthonormal columns (cols <= rows).
Matrix random_isometry(Rng& rng, std::size_t rows, std::size_t cols, bool complex = true);

/// U diag(s) V* with random isometries U, V and `rank` singular values drawn
/// uniformly from [lo, hi].
Matrix random_with_spectrum(Rng& rng, std::size_t rows, std::size_t cols, std::size_t rank,
                            double lo, double hi, bool complex = true);

/// Q diag(l) Q* with Q unitary and |l| uniform in [lo, hi]; each sign is
/// flipped with probability 1/2 when `indefinite`.
Matrix random_hermitian_weight(Rng& rng, std::size_t n, double lo, double hi, bool indefinite,
                               bool complex = true);

}  // namespace wmp

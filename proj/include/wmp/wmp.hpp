#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wmp/linalg.hpp"
#include "wmp/matrix.hpp"
#include "wmp/weight.hpp"

// Weighted Moore-Penrose inverses for self-adjoint invertible weights.
//
// Shapes: A maps H = C^n to K = C^m (A is m x n). The codomain weight M acts
// on K (m x m) and the domain weight N acts on H (n x n). The weighted
// inverse X = A^dagger_{MN} is the n x m matrix with
//
//   AXA = A,  XAX = X,  (MAX)* = MAX,  (NXA)* = NXA.
//
// It exists exactly when R_{A,N} = A^dagger A + (I - A^dagger A) N and
// L_{A,M^{-1}} = A A^dagger + M^{-1} (I - A A^dagger) are both invertible, and
// then X = R_{A,N}^{-1} A^dagger L_{A,M^{-1}}^{-1}.

namespace wmp {

/// T^# = N^{-1} T* M, the adjoint of T with respect to the weighted inner products.
Matrix weighted_adjoint(const Matrix& t, const Weight& m, const Weight& n);

/// A^dagger A + (I - A^dagger A) X for square X on the domain side.
Matrix r_operator(const Matrix& a, const Matrix& x, const ToleranceConfig& tol);
/// A A^dagger + Y (I - A A^dagger) for square Y on the codomain side.
Matrix l_operator(const Matrix& a, const Matrix& y, const ToleranceConfig& tol);

struct ExistenceReport {
  Matrix mp;        ///< A^dagger
  Matrix r_factor;  ///< R_{A,N}
  Matrix l_factor;  ///< L_{A,M^{-1}}
  double r_cond = 0.0;
  double l_cond = 0.0;
  bool r_invertible = false;
  bool l_invertible = false;
  bool exists = false;
};

ExistenceReport wmp_exists(const Matrix& a, const Weight& m, const Weight& n,
                           const ToleranceConfig& tol);

/// Operator-norm defects ||AXA - A||, ||XAX - X||, ||MAX - (MAX)*||, ||NXA - (NXA)*||.
struct PenroseResiduals {
  std::array<double, 4> values{};
  double max() const;
  bool within(double bound) const { return max() <= bound; }
};

PenroseResiduals verify_weighted_penrose(const Matrix& a, const Matrix& m, const Matrix& n,
                                         const Matrix& x);
inline PenroseResiduals verify_weighted_penrose(const Matrix& a, const Weight& m, const Weight& n,
                                                const Matrix& x) {
  return verify_weighted_penrose(a, m.matrix(), n.matrix(), x);
}

struct WmpResult {
  Matrix inverse;   ///< A^dagger_{MN}; empty when !exists
  Matrix mp;        ///< A^dagger
  Matrix r_factor;  ///< R_{A,N}
  Matrix l_factor;  ///< L_{A,M^{-1}}
  double r_cond = 0.0;
  double l_cond = 0.0;
  PenroseResiduals penrose;
  bool exists = false;
};

/// Reports non-existence through `exists` instead of throwing.
WmpResult try_wmp_inverse(const Matrix& a, const Weight& m, const Weight& n,
                          const ToleranceConfig& tol);
/// Throws NonExistent naming the singular factor and its condition number.
WmpResult wmp_inverse(const Matrix& a, const Weight& m, const Weight& n,
                      const ToleranceConfig& tol);

/// Positive-definite replacement weights with the same weighted inverse:
///   T_{A,N} = A^dagger A + N (I - A^dagger A) N = R_{A,N}* R_{A,N}
///   S_{A,M} = [A A^dagger + M^{-1} (I - A A^dagger) M^{-1}]^{-1}
struct PositiveReduction {
  Weight s;  ///< codomain side
  Weight t;  ///< domain side
};

/// Throws NonExistent when A^dagger_{MN} does not exist.
PositiveReduction positive_reduction(const Matrix& a, const Weight& m, const Weight& n,
                                     const ToleranceConfig& tol);

/// Positive-definite domain weights Ñ with A^dagger_{I Ñ} = A^dagger_{I N}.
///
/// In an orthonormal basis adapted to range(A*) ⊕ null(A), every such Ñ is
///   [[I, N0*], [0, I]] · diag(K, Ñ22) · [[I, 0], [N0, I]]
/// with N0 = N22^{-1} N21 fixed by N and K, Ñ22 positive definite.
struct DomainWeightFamily {
  /// rank(A) is 0 or dim(H): every positive-definite weight qualifies and
  /// no samples are drawn.
  bool degenerate = false;
  Matrix n0;  ///< N22^{-1} N21 (empty when degenerate)
  std::vector<Weight> samples;
};

/// Draws `count` members with K and Ñ22 of the form G*G + δI, G Gaussian,
/// δ = 1e-3 ||G*G||. Throws NonExistent when R_{A,N} is singular.
DomainWeightFamily equivalent_domain_weights(const Matrix& a, const Weight& n, std::size_t count,
                                             std::uint64_t seed, const ToleranceConfig& tol);

/// The family member with the given positive-definite blocks Ñ22 (on null(A))
/// and K = Ñ11 - N0* Ñ22 N0 (on range(A*)). Requires 0 < rank(A) < dim(H).
Weight domain_weight_from_blocks(const Matrix& a, const Weight& n, const Matrix& n22,
                                 const Matrix& schur, const ToleranceConfig& tol);

struct TransferResult {
  Matrix factor;
  /// Norm of the defect in the transfer identity.
  double residual = 0.0;
};

/// R_{M;N1,N2} = A^dagger_{MN1} A + (I - A^dagger_{MN1} A) N1^{-1} N2, with
/// A^dagger_{MN1} = R_{M;N1,N2} A^dagger_{MN2}.
TransferResult weight_transfer_domain(const Matrix& a, const Weight& m, const Weight& n1,
                                      const Weight& n2, const ToleranceConfig& tol);
/// L_{M1,M2;N} = A A^dagger_{M1N} + M2^{-1} M1 (I - A A^dagger_{M1N}), with
/// A^dagger_{M1N} = A^dagger_{M2N} L_{M1,M2;N}.
TransferResult weight_transfer_codomain(const Matrix& a, const Weight& m1, const Weight& m2,
                                        const Weight& n, const ToleranceConfig& tol);

/// rho(A) = [[0, A], [A*, 0]] on K ⊕ H with block weight T = diag(M, N^{-1}).
/// The weighted inverse of rho(A) for weights (T, T^{-1}) is
/// [[0, (A^dagger_{MN})*], [A^dagger_{MN}, 0]].
struct RhoEmbedding {
  Matrix rho;
  Weight t;
};
RhoEmbedding rho_embed(const Matrix& a, const Weight& m, const Weight& n);

/// m(Q) = 1/2 (|Q*| + Q*) |Q*|^dagger (|Q*| + I)^{-1} (|Q*| + Q) with
/// |Q*| = (Q Q*)^{1/2}. Throws NotIdempotent when ||Q^2 - Q|| exceeds the
/// verification bound.
Matrix matched_projection(const Matrix& q, const ToleranceConfig& tol);

}  // namespace wmp

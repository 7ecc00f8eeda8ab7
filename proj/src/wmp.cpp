#include "wmp/wmp.hpp"

#include <algorithm>
#include <string>

#include "wmp/error.hpp"
#include "wmp/random.hpp"

namespace wmp {

namespace {

void require_weights_fit(const Matrix& a, std::size_t m_dim, std::size_t n_dim, const char* what) {
  if (m_dim != a.rows() || n_dim != a.cols()) {
    throw InvalidArgument(std::string(what) + ": weights must be " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.rows()) + " (codomain) and " +
                          std::to_string(a.cols()) + "x" + std::to_string(a.cols()) +
                          " (domain), got " + std::to_string(m_dim) + " and " +
                          std::to_string(n_dim));
  }
}

// Pseudoinverse together with the two orthogonal projectors from one SVD.
struct MpParts {
  Matrix mp;
  Matrix p_range;    // A A^dagger
  Matrix p_corange;  // A^dagger A
};

MpParts mp_parts(const Matrix& a, const ToleranceConfig& tol) {
  const SvdFactorization f = svd(a, tol);
  const std::size_t r = f.numerical_rank;
  const Matrix ur = f.u.block(0, 0, a.rows(), r);
  const Matrix vr = f.vh.block(0, 0, r, a.cols()).adjoint();
  return {mp_inverse(f), (ur * ur.adjoint()).hermitian_part(),
          (vr * vr.adjoint()).hermitian_part()};
}

// P + (I - P) X
Matrix r_from_projector(const Matrix& p, const Matrix& x) {
  return p + (Matrix::identity(p.rows()) - p) * x;
}

// P + Y (I - P)
Matrix l_from_projector(const Matrix& p, const Matrix& y) {
  return p + y * (Matrix::identity(p.rows()) - p);
}

}  // namespace

Matrix weighted_adjoint(const Matrix& t, const Weight& m, const Weight& n) {
  require_weights_fit(t, m.dim(), n.dim(), "weighted_adjoint");
  return n.inverse() * t.adjoint() * m.matrix();
}

Matrix r_operator(const Matrix& a, const Matrix& x, const ToleranceConfig& tol) {
  if (!x.square() || x.rows() != a.cols())
    throw InvalidArgument("r_operator: X must be square of the domain dimension");
  return r_from_projector(projector_corange(a, tol), x);
}

Matrix l_operator(const Matrix& a, const Matrix& y, const ToleranceConfig& tol) {
  if (!y.square() || y.rows() != a.rows())
    throw InvalidArgument("l_operator: Y must be square of the codomain dimension");
  return l_from_projector(projector_range(a, tol), y);
}

ExistenceReport wmp_exists(const Matrix& a, const Weight& m, const Weight& n,
                           const ToleranceConfig& tol) {
  require_weights_fit(a, m.dim(), n.dim(), "wmp_exists");
  MpParts parts = mp_parts(a, tol);
  ExistenceReport rep;
  rep.r_factor = r_from_projector(parts.p_corange, n.matrix());
  rep.l_factor = l_from_projector(parts.p_range, m.inverse());
  rep.mp = std::move(parts.mp);
  rep.r_cond = condition_number(rep.r_factor);
  rep.l_cond = condition_number(rep.l_factor);
  rep.r_invertible = rep.r_cond <= tol.inv_cond_max;
  rep.l_invertible = rep.l_cond <= tol.inv_cond_max;
  rep.exists = rep.r_invertible && rep.l_invertible;
  return rep;
}

double PenroseResiduals::max() const { return *std::max_element(values.begin(), values.end()); }

PenroseResiduals verify_weighted_penrose(const Matrix& a, const Matrix& m, const Matrix& n,
                                         const Matrix& x) {
  if (x.rows() != a.cols() || x.cols() != a.rows())
    throw InvalidArgument("verify_weighted_penrose: X must have the shape of A*");
  require_weights_fit(a, m.rows(), n.rows(), "verify_weighted_penrose");
  const Matrix ax = a * x;
  const Matrix xa = x * a;
  const Matrix max_ = m * ax;
  const Matrix nxa = n * xa;
  PenroseResiduals r;
  r.values[0] = operator_norm(ax * a - a);
  r.values[1] = operator_norm(xa * x - x);
  r.values[2] = operator_norm(max_ - max_.adjoint());
  r.values[3] = operator_norm(nxa - nxa.adjoint());
  return r;
}

WmpResult try_wmp_inverse(const Matrix& a, const Weight& m, const Weight& n,
                          const ToleranceConfig& tol) {
  ExistenceReport rep = wmp_exists(a, m, n, tol);
  WmpResult out;
  out.exists = rep.exists;
  out.r_cond = rep.r_cond;
  out.l_cond = rep.l_cond;
  if (rep.exists) {
    const Matrix left = solve(rep.r_factor, rep.mp);
    out.inverse = solve_right(left, rep.l_factor);
    out.penrose = verify_weighted_penrose(a, m, n, out.inverse);
  }
  out.mp = std::move(rep.mp);
  out.r_factor = std::move(rep.r_factor);
  out.l_factor = std::move(rep.l_factor);
  return out;
}

WmpResult wmp_inverse(const Matrix& a, const Weight& m, const Weight& n,
                      const ToleranceConfig& tol) {
  WmpResult out = try_wmp_inverse(a, m, n, tol);
  if (!out.exists) {
    if (out.r_cond > tol.inv_cond_max) throw NonExistent("R_{A,N}", out.r_cond);
    throw NonExistent("L_{A,M^-1}", out.l_cond);
  }
  return out;
}

PositiveReduction positive_reduction(const Matrix& a, const Weight& m, const Weight& n,
                                     const ToleranceConfig& tol) {
  require_weights_fit(a, m.dim(), n.dim(), "positive_reduction");
  const ExistenceReport rep = wmp_exists(a, m, n, tol);
  if (!rep.r_invertible) throw NonExistent("R_{A,N}", rep.r_cond);
  if (!rep.l_invertible) throw NonExistent("L_{A,M^-1}", rep.l_cond);
  const MpParts parts = mp_parts(a, tol);
  const Matrix in = Matrix::identity(a.cols());
  const Matrix t = parts.p_corange + n.matrix() * (in - parts.p_corange) * n.matrix();
  // S^{-1} = L L*, so S = L^{-*} L^{-1}.
  const Matrix l_inv = inverse(rep.l_factor, tol);
  return {Weight::make((l_inv.adjoint() * l_inv).hermitian_part(), tol),
          Weight::make(t.hermitian_part(), tol)};
}

namespace {

struct BlockBasis {
  Matrix q1;  // range(A*)
  Matrix q2;  // null(A)
  Matrix n21;
  Matrix n22;
  Matrix n0;
};

BlockBasis block_basis(const Matrix& a, const Weight& n, const ToleranceConfig& tol) {
  RowSpaceSplit split = row_space_split(a, tol);
  BlockBasis b;
  b.q1 = std::move(split.range_basis);
  b.q2 = std::move(split.null_basis);
  b.n21 = b.q2.adjoint() * n.matrix() * b.q1;
  b.n22 = (b.q2.adjoint() * n.matrix() * b.q2).hermitian_part();
  return b;
}

Weight assemble_domain_weight(const BlockBasis& b, const Matrix& n22t, const Matrix& schur,
                              const ToleranceConfig& tol) {
  const Matrix n21t = n22t * b.n0;
  const Matrix n11t = schur + b.n0.adjoint() * n22t * b.n0;
  const std::size_t r = b.q1.cols();
  const std::size_t k = b.q2.cols();
  Matrix blocks(r + k, r + k);
  blocks.set_block(0, 0, n11t);
  blocks.set_block(0, r, n21t.adjoint());
  blocks.set_block(r, 0, n21t);
  blocks.set_block(r, r, n22t);
  const Matrix q = hstack(b.q1, b.q2);
  return Weight::make((q * blocks * q.adjoint()).hermitian_part(), tol);
}

}  // namespace

DomainWeightFamily equivalent_domain_weights(const Matrix& a, const Weight& n, std::size_t count,
                                             std::uint64_t seed, const ToleranceConfig& tol) {
  if (n.dim() != a.cols()) throw InvalidArgument("equivalent_domain_weights: N has the wrong size");
  DomainWeightFamily family;
  BlockBasis b = block_basis(a, n, tol);
  if (b.q1.cols() == 0 || b.q2.cols() == 0) {
    family.degenerate = true;
    return family;
  }
  const double r_cond = condition_number(r_operator(a, n.matrix(), tol));
  if (!(r_cond <= tol.inv_cond_max)) throw NonExistent("R_{A,N}", r_cond);
  b.n0 = solve(b.n22, b.n21);
  family.n0 = b.n0;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix n22t = random_positive_definite(rng, b.q2.cols());
    const Matrix schur = random_positive_definite(rng, b.q1.cols());
    family.samples.push_back(assemble_domain_weight(b, n22t, schur, tol));
  }
  return family;
}

Weight domain_weight_from_blocks(const Matrix& a, const Weight& n, const Matrix& n22,
                                 const Matrix& schur, const ToleranceConfig& tol) {
  if (n.dim() != a.cols()) throw InvalidArgument("domain_weight_from_blocks: N has the wrong size");
  BlockBasis b = block_basis(a, n, tol);
  if (b.q1.cols() == 0 || b.q2.cols() == 0)
    throw InvalidArgument("domain_weight_from_blocks: requires 0 < rank(A) < dim(H)");
  if (n22.rows() != b.q2.cols() || !n22.square() || schur.rows() != b.q1.cols() || !schur.square())
    throw InvalidArgument("domain_weight_from_blocks: block sizes do not match rank(A)");
  const double r_cond = condition_number(r_operator(a, n.matrix(), tol));
  if (!(r_cond <= tol.inv_cond_max)) throw NonExistent("R_{A,N}", r_cond);
  b.n0 = solve(b.n22, b.n21);
  return assemble_domain_weight(b, n22, schur, tol);
}

TransferResult weight_transfer_domain(const Matrix& a, const Weight& m, const Weight& n1,
                                      const Weight& n2, const ToleranceConfig& tol) {
  const Matrix x1 = wmp_inverse(a, m, n1, tol).inverse;
  const Matrix x2 = wmp_inverse(a, m, n2, tol).inverse;
  const Matrix x1a = x1 * a;
  TransferResult out;
  out.factor = x1a + (Matrix::identity(a.cols()) - x1a) * n1.inverse() * n2.matrix();
  out.residual = operator_norm(x1 - out.factor * x2);
  return out;
}

TransferResult weight_transfer_codomain(const Matrix& a, const Weight& m1, const Weight& m2,
                                        const Weight& n, const ToleranceConfig& tol) {
  const Matrix x1 = wmp_inverse(a, m1, n, tol).inverse;
  const Matrix x2 = wmp_inverse(a, m2, n, tol).inverse;
  const Matrix ax1 = a * x1;
  TransferResult out;
  out.factor = ax1 + m2.inverse() * m1.matrix() * (Matrix::identity(a.rows()) - ax1);
  out.residual = operator_norm(x1 - x2 * out.factor);
  return out;
}

RhoEmbedding rho_embed(const Matrix& a, const Weight& m, const Weight& n) {
  require_weights_fit(a, m.dim(), n.dim(), "rho_embed");
  const std::size_t k = a.rows();
  const std::size_t h = a.cols();
  Matrix rho(k + h, k + h);
  rho.set_block(0, k, a);
  rho.set_block(k, 0, a.adjoint());
  return {std::move(rho), Weight::block_diag(m, n.inverted())};
}

Matrix matched_projection(const Matrix& q, const ToleranceConfig& tol) {
  if (!q.square()) throw InvalidArgument("matched_projection: Q must be square");
  const double norm = operator_norm(q);
  const double defect = operator_norm(q * q - q);
  if (defect > tol.verify_bound(norm)) throw NotIdempotent(defect);
  const std::size_t n = q.rows();
  const Matrix id = Matrix::identity(n);
  const Matrix qh = q.adjoint();
  // Q = U S V* gives |Q*| = U S U* and |Q*|^dagger = U_r S_r^{-1} U_r*.
  const SvdFactorization f = svd(q, tol);
  Matrix abs_qh(n, n);
  Matrix abs_qh_pinv(n, n);
  for (std::size_t k = 0; k < f.sigma.size(); ++k) {
    const Matrix u = f.u.block(0, k, n, 1);
    const Matrix uu = u * u.adjoint();
    abs_qh += uu * Complex(f.sigma[k]);
    if (k < f.numerical_rank) abs_qh_pinv += uu * Complex(1.0 / f.sigma[k]);
  }
  const Matrix left = 0.5 * (abs_qh + qh);
  const Matrix right = solve(abs_qh + id, abs_qh + q);
  return left * abs_qh_pinv * right;
}

}  // namespace wmp

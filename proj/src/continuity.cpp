#include "wmp/continuity.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wmp/error.hpp"
#include "wmp/random.hpp"
#include "wmp/wmp.hpp"

namespace wmp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_shape(const Matrix& x, std::size_t rows, std::size_t cols) {
  return x.rows() == rows && x.cols() == cols;
}

double inverse_norm(const Matrix& x) {
  const std::vector<double> s = singular_values(x);
  return s.empty() ? 0.0 : 1.0 / s.back();
}

struct BaseParts {
  Matrix wmp;
  Matrix mp;
  Matrix p_corange;
  Matrix p_range;
};

ContinuityRow evaluate_term(const PerturbationTerm& term, double index, const BaseParts& base,
                            const ToleranceConfig& tol) {
  ContinuityRow row;
  row.index = index;
  const Matrix mp = mp_inverse(term.a, tol);
  row.values[2] = operator_norm(mp);
  row.values[3] = operator_norm(mp * term.a - base.p_corange);
  row.values[4] = operator_norm(term.a * mp - base.p_range);
  row.values[5] = operator_norm(mp - base.mp);
  row.values[0] = kNaN;
  row.values[1] = kNaN;
  row.factor_bound = kNaN;
  std::optional<Weight> m;
  std::optional<Weight> n;
  try {
    m = Weight::make(term.m, tol);
    n = Weight::make(term.n, tol);
  } catch (const InvalidWeight&) {
    return row;
  }
  const WmpResult r = try_wmp_inverse(term.a, *m, *n, tol);
  if (!r.exists) return row;
  row.exists = true;
  row.values[0] = operator_norm(r.inverse - base.wmp);
  row.values[1] = operator_norm(r.inverse);
  row.factor_bound = inverse_norm(r.r_factor) * row.values[2] * inverse_norm(r.l_factor);
  return row;
}

ColumnSummary summarize(const std::vector<ContinuityRow>& rows, std::size_t column,
                        std::size_t tail_start, const ToleranceConfig& tol) {
  ColumnSummary s;
  std::vector<double> tail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = rows[i].values[column];
    if (std::isnan(v)) continue;
    s.sup = std::max(s.sup, v);
    s.final_value = v;
    if (i >= tail_start) tail.push_back(v);
  }
  if (tail.size() < 2) return s;
  const double first = tail.front();
  const double last = tail.back();
  const double floor = tol.verify_atol;
  s.tail_growth = first > 0.0 ? last / first : (last > 0.0 ? INFINITY : 1.0);
  if (last > floor && last >= 10.0 * first) {
    s.trend = Trend::diverging;
  } else if (nonincreasing_from(tail, 0, 1e-9, floor) && (last < first || last <= floor)) {
    s.trend = Trend::decreasing;
  } else {
    s.trend = Trend::bounded;
  }
  return s;
}

}  // namespace

std::string_view trend_name(Trend t) {
  switch (t) {
    case Trend::decreasing:
      return "decreasing";
    case Trend::bounded:
      return "bounded";
    case Trend::diverging:
      return "diverging";
  }
  return "bounded";
}

void PerturbationSequence::validate() const {
  if (m.dim() != a.rows() || n.dim() != a.cols())
    throw InvalidArgument("perturbation: base weights do not fit A");
  if (!index.empty() && index.size() != terms.size())
    throw InvalidArgument("perturbation: index length differs from the number of terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const PerturbationTerm& t = terms[i];
    if (!same_shape(t.a, a.rows(), a.cols()) || !same_shape(t.m, a.rows(), a.rows()) ||
        !same_shape(t.n, a.cols(), a.cols())) {
      throw InvalidArgument("perturbation: term " + std::to_string(i + 1) +
                            " is not shape-compatible with the base problem");
    }
    if (kind == SequenceKind::weights_only && !(t.a == a)) {
      throw InvalidArgument("perturbation: term " + std::to_string(i + 1) +
                            " changes A in a weights-only sequence");
    }
  }
}

ContinuityDiagnostics run_diagnostics(const PerturbationSequence& seq,
                                      const ToleranceConfig& tol) {
  seq.validate();
  const WmpResult base_result = wmp_inverse(seq.a, seq.m, seq.n, tol);
  BaseParts base{base_result.inverse, base_result.mp, base_result.mp * seq.a,
                 seq.a * base_result.mp};

  ContinuityDiagnostics out;
  out.rows.reserve(seq.terms.size());
  for (std::size_t i = 0; i < seq.terms.size(); ++i) {
    const double index = seq.index.empty() ? static_cast<double>(i + 1) : seq.index[i];
    out.rows.push_back(evaluate_term(seq.terms[i], index, base, tol));
  }

  const std::size_t count = out.rows.size();
  const std::size_t window = std::max<std::size_t>(2, count / 4);
  out.tail_start = count > window ? count - window : 0;
  for (std::size_t c = 0; c < kContinuityColumns; ++c) {
    out.columns[c] = summarize(out.rows, c, out.tail_start, tol);
    if (kConvergenceColumn[c]) {
      out.convergent = out.convergent && out.columns[c].trend == Trend::decreasing;
    } else {
      out.bounded = out.bounded && out.columns[c].trend != Trend::diverging;
    }
  }

  for (std::size_t i = count; i > 0; --i) {
    if (!out.rows[i - 1].exists) break;
    out.n0 = i;
  }
  for (const ContinuityRow& row : out.rows) {
    if (!row.exists) continue;
    const double norm = row.values[1];
    if (norm > row.factor_bound * (1.0 + 1e-9) + tol.verify_atol) out.factor_bound_holds = false;
  }
  return out;
}

ContinuityDiagnostics perturb_weights_only(const Matrix& a, const Weight& m, const Weight& n,
                                           std::span<const Matrix> m_seq,
                                           std::span<const Matrix> n_seq,
                                           const ToleranceConfig& tol) {
  if (m_seq.size() != n_seq.size())
    throw InvalidArgument("perturb_weights_only: M_n and N_n sequences differ in length");
  PerturbationSequence seq{a, m, n, {}, SequenceKind::weights_only, {}};
  seq.terms.reserve(m_seq.size());
  for (std::size_t i = 0; i < m_seq.size(); ++i) seq.terms.push_back({a, m_seq[i], n_seq[i]});
  return run_diagnostics(seq, tol);
}

PerturbationSequence rank_preserving_sequence(const Matrix& a, const Weight& m, const Weight& n,
                                              std::size_t count, std::uint64_t seed,
                                              const ToleranceConfig& tol) {
  Rng rng(seed);
  const SvdFactorization f = svd(a, tol);
  const Matrix e = gaussian_matrix(rng, a.rows(), a.cols());
  Matrix g = projector_range(a, tol) * e * projector_corange(a, tol);
  const double g_norm = operator_norm(g);
  if (f.numerical_rank > 0 && g_norm > 0.0)
    g *= Complex(0.5 * f.sigma[f.numerical_rank - 1] / g_norm);
  PerturbationSequence seq{a, m, n, {}, SequenceKind::full, {}};
  for (std::size_t k = 1; k <= count; ++k) {
    seq.terms.push_back({a + g * Complex(1.0 / static_cast<double>(k)), m.matrix(), n.matrix()});
    seq.index.push_back(static_cast<double>(k));
  }
  return seq;
}

PerturbationSequence rank_dropping_sequence(const Matrix& a, const Weight& m, const Weight& n,
                                            std::size_t count, std::uint64_t seed,
                                            const ToleranceConfig& tol) {
  Rng rng(seed);
  const Matrix f = gaussian_matrix(rng, a.rows(), a.cols());
  const Matrix g = (Matrix::identity(a.rows()) - projector_range(a, tol)) * f *
                   (Matrix::identity(a.cols()) - projector_corange(a, tol));
  PerturbationSequence seq{a, m, n, {}, SequenceKind::full, {}};
  double k = 1.0;
  for (std::size_t i = 0; i < count; ++i, k *= 4.0) {
    seq.terms.push_back({a + g * Complex(1.0 / k), m.matrix(), n.matrix()});
    seq.index.push_back(k);
  }
  return seq;
}

PerturbationSequence weights_shift_sequence(const Matrix& a, const Weight& m, const Weight& n,
                                            std::size_t count) {
  PerturbationSequence seq{a, m, n, {}, SequenceKind::weights_only, {}};
  const Matrix id = Matrix::identity(a.cols());
  for (std::size_t k = 1; k <= count; ++k) {
    seq.terms.push_back({a, m.matrix(), n.matrix() + id * Complex(1.0 / static_cast<double>(k))});
    seq.index.push_back(static_cast<double>(k));
  }
  return seq;
}

}  // namespace wmp

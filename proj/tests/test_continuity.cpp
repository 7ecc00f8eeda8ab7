#include <doctest.h>

#include <cmath>

#include "support/instances.hpp"
#include "wmp/continuity.hpp"
#include "wmp/error.hpp"

using namespace wmp;
namespace wt = wmp::testing;

namespace {

struct Base {
  Matrix a;
  Weight m;
  Weight n;
};

Base make_base(std::uint64_t seed) {
  const ToleranceConfig tol;
  Rng rng(seed);
  Matrix a = random_with_spectrum(rng, 6, 5, 3, 0.5, 2.0);
  Weight m = Weight::make(wt::random_weight_matrix(rng, 6, false), tol);
  Weight n = Weight::make(wt::random_weight_matrix(rng, 5, false), tol);
  return {std::move(a), std::move(m), std::move(n)};
}

}  // namespace

TEST_CASE("rank-preserving perturbations converge") {
  const ToleranceConfig tol;
  const Base b = make_base(3);
  const PerturbationSequence seq = rank_preserving_sequence(b.a, b.m, b.n, 200, 5, tol);
  CHECK(seq.terms.size() == 200);
  const ContinuityDiagnostics d = run_diagnostics(seq, tol);
  CHECK(d.convergent);
  CHECK(d.bounded);
  CHECK(d.factor_bound_holds);
  REQUIRE(d.n0.has_value());
  CHECK(*d.n0 == 1);
  CHECK(d.tail_start == 150);
  for (std::size_t c = 0; c < kContinuityColumns; ++c) {
    CHECK(d.columns[c].trend != Trend::diverging);
    if (kConvergenceColumn[c]) CHECK(d.columns[c].final_value * 200.0 <= 100.0);
  }
}

TEST_CASE("rank-dropping perturbations are flagged") {
  const ToleranceConfig tol;
  const Base b = make_base(3);
  const PerturbationSequence seq = rank_dropping_sequence(b.a, b.m, b.n, 12, 5, tol);
  CHECK(seq.index.back() == std::pow(4.0, 11));
  const ContinuityDiagnostics d = run_diagnostics(seq, tol);
  CHECK_FALSE(d.bounded);
  CHECK_FALSE(d.convergent);
  CHECK(d.columns[2].trend == Trend::diverging);
  CHECK(d.columns[2].tail_growth >= 10.0);
}

TEST_CASE("weight-only perturbations") {
  const ToleranceConfig tol;
  const Base b = make_base(4);
  const PerturbationSequence seq = weights_shift_sequence(b.a, b.m, b.n, 40);
  CHECK(seq.kind == SequenceKind::weights_only);
  const ContinuityDiagnostics d = run_diagnostics(seq, tol);
  CHECK(d.convergent);
  CHECK(d.columns[0].trend == Trend::decreasing);
  for (std::size_t c = 3; c < kContinuityColumns; ++c) CHECK(d.columns[c].sup <= 1e-11);
  CHECK(d.columns[2].trend != Trend::diverging);

  std::vector<Matrix> ms(5, b.m.matrix());
  std::vector<Matrix> ns;
  for (int k = 1; k <= 5; ++k) ns.push_back(b.n.matrix() * Complex(1.0 + 1.0 / k));
  const ContinuityDiagnostics w = perturb_weights_only(b.a, b.m, b.n, ms, ns, tol);
  CHECK(w.rows.size() == 5);
  CHECK_THROWS_AS(perturb_weights_only(b.a, b.m, b.n, ms, std::vector<Matrix>(2), tol),
                  InvalidArgument);
}

TEST_CASE("missing inverses and n0") {
  const ToleranceConfig tol;
  const Matrix a = Matrix::real(2, 2, {1, 0, 0, 0});
  const Matrix swap = Matrix::real(2, 2, {0, 1, 1, 0});
  PerturbationSequence seq{a, Weight::identity(2), Weight::identity(2), {}, SequenceKind::weights_only, {}};
  seq.terms.push_back({a, Matrix::identity(2), Matrix::identity(2)});
  seq.terms.push_back({a, Matrix::identity(2), swap});
  seq.terms.push_back({a, Matrix::identity(2), Matrix::identity(2)});
  seq.terms.push_back({a, Matrix::identity(2), Matrix::identity(2)});
  const ContinuityDiagnostics d = run_diagnostics(seq, tol);
  CHECK(d.rows[0].exists);
  CHECK_FALSE(d.rows[1].exists);
  CHECK(std::isnan(d.rows[1].values[0]));
  REQUIRE(d.n0.has_value());
  CHECK(*d.n0 == 3);

  seq.terms.push_back({a, Matrix::identity(2), swap});
  CHECK_FALSE(run_diagnostics(seq, tol).n0.has_value());

  seq.terms.push_back({Matrix::identity(2), Matrix::identity(2), Matrix::identity(2)});
  CHECK_THROWS_AS(run_diagnostics(seq, tol), InvalidArgument);
  seq.kind = SequenceKind::full;
  seq.terms.push_back({Matrix(2, 3), Matrix::identity(2), Matrix::identity(3)});
  CHECK_THROWS_AS(run_diagnostics(seq, tol), InvalidArgument);

  PerturbationSequence bad{a, Weight::identity(2), Weight::make(swap, tol), {}, SequenceKind::full, {}};
  CHECK_THROWS_AS(run_diagnostics(bad, tol), NonExistent);
}

TEST_CASE("trend names") {
  CHECK(trend_name(Trend::decreasing) == "decreasing");
  CHECK(trend_name(Trend::bounded) == "bounded");
  CHECK(trend_name(Trend::diverging) == "diverging");
}

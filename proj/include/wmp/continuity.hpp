#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wmp/linalg.hpp"
#include "wmp/matrix.hpp"
#include "wmp/weight.hpp"

// Finite-prefix diagnostics for sequences (A_n, M_n, N_n) -> (A, M, N).
//
// Every term gets six columns:
//   0  ||(A_n)^dagger_{M_n N_n} - A^dagger_{MN}||
//   1  ||(A_n)^dagger_{M_n N_n}||
//   2  ||A_n^dagger||
//   3  ||A_n^dagger A_n - A^dagger A||
//   4  ||A_n A_n^dagger - A A^dagger||
//   5  ||A_n^dagger - A^dagger||
// Columns 1 and 2 are boundedness proxies, the rest convergence proxies.
// Trends are judged on a tail window made of the last quarter of the terms.

namespace wmp {

inline constexpr std::size_t kContinuityColumns = 6;
inline constexpr std::array<std::string_view, kContinuityColumns> kContinuityColumnNames = {
    "wmp_diff", "wmp_norm", "mp_norm", "corange_proj_diff", "range_proj_diff", "mp_diff"};
inline constexpr std::array<bool, kContinuityColumns> kConvergenceColumn = {true,  false, false,
                                                                            true,  true,  true};

enum class SequenceKind { full, weights_only };

struct PerturbationTerm {
  Matrix a;
  /// Hermitian, not necessarily invertible
  Matrix m;
  Matrix n;
};

struct PerturbationSequence {
  Matrix a;
  Weight m;
  Weight n;
  std::vector<PerturbationTerm> terms;
  SequenceKind kind = SequenceKind::full;
  /// Index n attached to each term (1-based), used for rate checks. Defaults to 1, 2, ...
  std::vector<double> index;

  /// Throws InvalidArgument on a shape mismatch or, for weights-only
  /// sequences, when some A_n differs from A.
  void validate() const;
};

enum class Trend { decreasing, bounded, diverging };
std::string_view trend_name(Trend t);

struct ContinuityRow {
  double index = 0.0;
  /// M_n, N_n are weights and (A_n)^dagger_{M_n N_n} exists
  bool exists = false;
  /// NaN in columns 0 and 1 when !exists
  std::array<double, kContinuityColumns> values{};
  /// ||R_{A_n,N_n}^{-1}|| ||A_n^dagger|| ||L_{A_n,M_n^{-1}}^{-1}||, NaN when !exists
  double factor_bound = 0.0;
};

struct ColumnSummary {
  double sup = 0.0;
  double final_value = 0.0;
  /// last / first value over the tail window
  double tail_growth = 0.0;
  Trend trend = Trend::bounded;
};

struct ContinuityDiagnostics {
  std::vector<ContinuityRow> rows;
  std::array<ColumnSummary, kContinuityColumns> columns{};
  /// first row of the tail window
  std::size_t tail_start = 0;
  /// smallest 1-based position from which every term has an inverse
  std::optional<std::size_t> n0;
  /// ||(A_n)^dagger_{M_n N_n}|| <= factor_bound on every existing row
  bool factor_bound_holds = true;
  /// no boundedness column diverges
  bool bounded = true;
  /// every convergence column is decreasing
  bool convergent = true;
};

/// Throws NonExistent when A^dagger_{MN} does not exist.
ContinuityDiagnostics run_diagnostics(const PerturbationSequence& seq, const ToleranceConfig& tol);

/// Weights-only sequence A_n = A with the given M_n and N_n (equal lengths).
ContinuityDiagnostics perturb_weights_only(const Matrix& a, const Weight& m, const Weight& n,
                                           std::span<const Matrix> m_seq,
                                           std::span<const Matrix> n_seq,
                                           const ToleranceConfig& tol);

/// A_n = A + (1/n) A A^dagger E A^dagger A for n = 1..count, with E Gaussian
/// and scaled so that ||E|| = sigma_min(A) / 2; the rank never changes.
PerturbationSequence rank_preserving_sequence(const Matrix& a, const Weight& m, const Weight& n,
                                              std::size_t count, std::uint64_t seed,
                                              const ToleranceConfig& tol);
/// A_n = A + (1/n) (I - A A^dagger) F (I - A^dagger A) for n = 4^0, ..., 4^(count-1).
PerturbationSequence rank_dropping_sequence(const Matrix& a, const Weight& m, const Weight& n,
                                            std::size_t count, std::uint64_t seed,
                                            const ToleranceConfig& tol);
/// A_n = A, M_n = M, N_n = N + (1/n) I for n = 1..count.
PerturbationSequence weights_shift_sequence(const Matrix& a, const Weight& m, const Weight& n,
                                            std::size_t count);

}  // namespace wmp

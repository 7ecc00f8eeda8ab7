#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wmp/continuity.hpp"
#include "wmp/linalg.hpp"
#include "wmp/matrix.hpp"

// Problem bundles and Matrix Market files.
//
// A bundle is one JSON object. Every key other than the reserved ones names a
// matrix role and holds {"rows": r, "cols": c, "re": [...], "im": [...]} with
// row-major entries ("im" optional; "re" may also be a list of rows).
// Reserved keys:
//   "tolerance"  {"rank_rtol", "inv_cond_max", "verify_atol", "verify_rtol",
//                 "separation_margin", "limit_rtol"}, all optional
//   "schedule"   list of parameters for limit subcommands
//   "terms"      list of {"A", "M", "N"} matrices for perturbation sequences
//   "index"      list of sequence indices matching "terms"

namespace wmp {

/// File cannot be read or written, or its contents do not parse.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemBundle {
  std::map<std::string, Matrix, std::less<>> matrices;
  ToleranceConfig tolerance;
  /// tolerance fields the bundle set explicitly
  std::vector<std::string> tolerance_keys;
  std::optional<std::vector<double>> schedule;
  std::vector<PerturbationTerm> terms;
  std::vector<double> index;

  bool has(std::string_view role) const { return matrices.find(role) != matrices.end(); }
  /// Throws IoError naming the role when it is absent.
  const Matrix& require(std::string_view role) const;
};

ProblemBundle parse_bundle(std::string_view json_text);
ProblemBundle read_bundle(const std::filesystem::path& path);

/// JSON object of the given matrices, numbers at 17 significant digits.
std::string bundle_to_json(const std::map<std::string, Matrix, std::less<>>& matrices);
void write_bundle(const std::filesystem::path& path,
                  const std::map<std::string, Matrix, std::less<>>& matrices);

/// Dense "%%MatrixMarket matrix array" files: real, integer or complex;
/// general, symmetric, skew-symmetric or hermitian.
Matrix parse_matrix_market(std::string_view text);
Matrix read_matrix_market(const std::filesystem::path& path);
/// Column-major array file, "real" unless some entry has a nonzero imaginary part.
std::string to_matrix_market(const Matrix& m);
void write_matrix_market(const std::filesystem::path& path, const Matrix& m);

/// %.17g, with "null" for non-finite values.
std::string format_number(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace wmp

#include <doctest.h>

#include <filesystem>
#include <limits>

#include "support/instances.hpp"
#include "wmp/io.hpp"

using namespace wmp;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "wmp_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("bundle parsing") {
  const ProblemBundle b = parse_bundle(R"({
    "A": {"rows": 2, "cols": 2, "re": [[1, 2], [3, 4]], "im": [0, 1, 0, -1]},
    "M": {"rows": 1, "cols": 1, "re": [5]},
    "tolerance": {"verify_atol": 1e-7, "rank_rtol": 1e-10},
    "schedule": [0.1, 0.01]
  })");
  REQUIRE(b.has("A"));
  CHECK(b.require("A")(0, 1) == Complex(2, 1));
  CHECK(b.require("A")(1, 1) == Complex(4, -1));
  CHECK(b.require("M")(0, 0) == Complex(5, 0));
  CHECK_FALSE(b.has("N"));
  CHECK_THROWS_AS(b.require("N"), IoError);
  CHECK(b.tolerance.verify_atol == 1e-7);
  CHECK(b.tolerance.rank_rtol == 1e-10);
  CHECK(b.tolerance.inv_cond_max == 1e12);
  CHECK(b.tolerance_keys.size() == 2);
  REQUIRE(b.schedule.has_value());
  CHECK(b.schedule->size() == 2);
}

TEST_CASE("bundle errors") {
  CHECK_THROWS_AS(parse_bundle("{"), IoError);
  CHECK_THROWS_AS(parse_bundle("[1, 2]"), IoError);
  CHECK_THROWS_AS(parse_bundle(R"({"A": {"rows": 2, "cols": 2, "re": [1, 2, 3]}})"), IoError);
  CHECK_THROWS_AS(parse_bundle(R"({"A": {"rows": 1, "cols": 1}})"), IoError);
  CHECK_THROWS_AS(parse_bundle(R"({"A": {"rows": 1, "cols": 1, "re": ["x"]}})"), IoError);
  CHECK_THROWS_AS(parse_bundle(R"({"tolerance": {"bogus": 1}})"), IoError);
  CHECK_THROWS_AS(parse_bundle(R"({"tolerance": {"verify_atol": -1}})"), IoError);
  CHECK_THROWS_AS(parse_bundle(R"({"schedule": [1, "a"]})"), IoError);
  CHECK_THROWS_AS(parse_bundle(R"({"terms": [{"A": {"rows": 1, "cols": 1, "re": [1]}}]})"), IoError);
  CHECK_THROWS_AS(read_bundle(scratch("does_not_exist.json")), IoError);
}

TEST_CASE("perturbation terms in bundles") {
  const ProblemBundle b = parse_bundle(R"({
    "terms": [{"A": {"rows": 1, "cols": 1, "re": [1]},
               "M": {"rows": 1, "cols": 1, "re": [2]},
               "N": {"rows": 1, "cols": 1, "re": [3]}}],
    "index": [7]
  })");
  REQUIRE(b.terms.size() == 1);
  CHECK(b.terms[0].n(0, 0) == Complex(3, 0));
  CHECK(b.index == std::vector<double>{7});
}

TEST_CASE("bundle round trip is exact") {
  Rng rng(61);
  std::map<std::string, Matrix, std::less<>> ms;
  ms["X"] = gaussian_matrix(rng, 3, 4);
  ms["Y"] = gaussian_matrix(rng, 2, 2, false);
  ms["tiny"] = Matrix::real(1, 2, {std::numeric_limits<double>::denorm_min(), -1e308});
  const auto path = scratch("round.json");
  write_bundle(path, ms);
  const ProblemBundle back = read_bundle(path);
  for (const auto& [k, v] : ms) CHECK(back.require(k) == v);
  CHECK(bundle_to_json(ms) == bundle_to_json(back.matrices));
}

TEST_CASE("Matrix Market round trip is exact") {
  Rng rng(62);
  for (bool complex : {false, true}) {
    const Matrix m = gaussian_matrix(rng, 4, 3, complex);
    const auto path = scratch(complex ? "c.mtx" : "r.mtx");
    write_matrix_market(path, m);
    CHECK(read_matrix_market(path) == m);
    CHECK(to_matrix_market(read_matrix_market(path)) == to_matrix_market(m));
  }
}

TEST_CASE("Matrix Market storage variants") {
  const Matrix g = parse_matrix_market(
      "%%MatrixMarket matrix array real general\n% comment\n2 3\n1\n2\n3\n4\n5\n6\n");
  CHECK(g == Matrix::real(2, 3, {1, 3, 5, 2, 4, 6}));

  const Matrix s = parse_matrix_market("%%MatrixMarket matrix array integer symmetric\n2 2\n1\n2\n3\n");
  CHECK(s == Matrix::real(2, 2, {1, 2, 2, 3}));

  const Matrix k = parse_matrix_market("%%MatrixMarket matrix array real skew-symmetric\n3 3\n1\n2\n3\n");
  CHECK(k == Matrix::real(3, 3, {0, -1, -2, 1, 0, -3, 2, 3, 0}));

  const Matrix h = parse_matrix_market(
      "%%MatrixMarket matrix array complex hermitian\n2 2\n1 0\n2 1\n3 0\n");
  CHECK(h(1, 0) == Complex(2, 1));
  CHECK(h(0, 1) == Complex(2, -1));

  CHECK_THROWS_AS(parse_matrix_market("2 2\n1\n2\n3\n4\n"), IoError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n"),
                  IoError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix array pattern general\n1 1\n"), IoError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n"),
                  IoError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\nabc\n"), IoError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix array real hermitian\n1 1\n1\n"), IoError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "null");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "null");
}

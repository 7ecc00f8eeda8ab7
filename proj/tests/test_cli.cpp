#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "wmp/io.hpp"
#include "wmp/limits.hpp"
#include "wmp/wmp.hpp"

using namespace wmp;

namespace {

const std::filesystem::path kData = WMP_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return (kData / name).string(); }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "wmp_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("worked example prints the expected digits") {
  const Run r = run({"wmp", "--bundle", data("worked_example.json")});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("0.142857142857") != std::string::npos);
  CHECK(r.out.find("-0.392857142857") != std::string::npos);
  CHECK(r.out.find("0.107142857143") != std::string::npos);
}

TEST_CASE("designed-singular bundle exits 2 naming R") {
  const Run r = run({"exists", "--bundle", data("singular_r.json")});
  CHECK(r.code == cli::kExitMath);
  CHECK(r.err.find("R_{A,N}") != std::string::npos);
  CHECK(r.err.find("condition number") != std::string::npos);
  const Run w = run({"wmp", "--bundle", data("singular_r.json")});
  CHECK(w.code == cli::kExitMath);
  CHECK(w.err.find("R_{A,N}") != std::string::npos);
}

TEST_CASE("limit-t0 on a separated instance") {
  const Run r = run({"limit-t0", "--bundle", data("sep.json"), "--schedule", "1e-1:1e-8", "--json"});
  REQUIRE(r.code == cli::kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["result"]["trace"].size() == 8);
  CHECK(doc["result"]["tail_nonincreasing"] == true);
  CHECK(doc["result"]["schedule_source"] == "flag");
}

TEST_CASE("usage and I/O exit codes") {
  CHECK(run({}).code == cli::kExitUsage);
  const Run u = run({"frobnicate"});
  CHECK(u.code == cli::kExitUsage);
  CHECK(u.err.find("unknown subcommand") != std::string::npos);
  CHECK(run({"wmp", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"wmp", "--bundle", data("missing.json")}).code == cli::kExitIo);
  CHECK(run({"verify", "--bundle", data("worked_example.json")}).code == cli::kExitIo);
  CHECK(run({"wmp", "--bundle", data("worked_example.json"), "--rank-rtol", "2"}).code ==
        cli::kExitUsage);
  CHECK(run({"limit-t0", "--bundle", data("sep.json"), "--schedule", "1:x"}).code ==
        cli::kExitUsage);
  CHECK(run({"wmp", "--role", "A"}).code == cli::kExitUsage);
  CHECK(run({"wmp", "--schedule", "1:2:x"}).code == cli::kExitUsage);
}

TEST_CASE("thin adapter: CLI and library produce identical matrices") {
  const ToleranceConfig tol;
  const ProblemBundle b = read_bundle(data("worked_example.json"));
  const Matrix direct =
      wmp_inverse(b.require("A"), Weight::make(b.require("M"), tol), Weight::make(b.require("N"), tol), tol)
          .inverse;
  const auto json_out = scratch("x.json");
  REQUIRE(run({"wmp", "--bundle", data("worked_example.json"), "--out", json_out.string()}).code == 0);
  CHECK(read_bundle(json_out).require("X") == direct);
  const auto mtx_out = scratch("x.mtx");
  REQUIRE(run({"wmp", "--bundle", data("worked_example.json"), "--out", mtx_out.string()}).code == 0);
  CHECK(read_matrix_market(mtx_out) == direct);

  const ProblemBundle s = read_bundle(data("sep.json"));
  const Weight v = Weight::make(s.require("V"), tol);
  const Weight w = Weight::make(s.require("W"), tol);
  const SeparatedClosedForm cf = closed_form_separated(s.require("A"), s.require("B"), v, w, tol, 1);
  const auto cf_out = scratch("cf.json");
  REQUIRE(run({"closed-form", "--bundle", data("sep.json"), "--out", cf_out.string()}).code == 0);
  const ProblemBundle back = read_bundle(cf_out);
  CHECK(back.require("D") == cf.d);
  CHECK(back.require("Pi") == cf.pi);
}

TEST_CASE("verify accepts the computed inverse via --role") {
  const auto mtx_out = scratch("v.mtx");
  REQUIRE(run({"wmp", "--bundle", data("worked_example.json"), "--out", mtx_out.string()}).code == 0);
  const Run ok = run({"verify", "--bundle", data("worked_example.json"), "--role",
                      "X=" + mtx_out.string()});
  CHECK(ok.code == cli::kExitOk);
  const auto wrong = scratch("wrong.mtx");
  write_matrix_market(wrong, Matrix::identity(4));
  const Run bad = run({"verify", "--bundle", data("worked_example.json"), "--role",
                       "X=" + wrong.string()});
  CHECK(bad.code == cli::kExitMath);
}

TEST_CASE("json reports carry tolerance provenance") {
  const Run r = run({"wmp", "--bundle", data("indefinite.json"), "--json", "--rank-rtol", "1e-11"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["tolerance"]["sources"]["verify_atol"] == "bundle");
  CHECK(doc["tolerance"]["sources"]["rank_rtol"] == "flag");
  CHECK(doc["tolerance"]["sources"]["inv_cond_max"] == "default");
  CHECK(doc["tolerance"]["values"]["verify_atol"] == 1e-10);
  CHECK(doc["result"].contains("penrose_residuals"));
  CHECK(doc["result"].contains("r_cond"));
}

TEST_CASE("every subcommand runs on the sample data") {
  const std::vector<std::vector<std::string>> cases = {
      {"reduce", "--bundle", data("indefinite.json")},
      {"rho", "--bundle", data("indefinite.json")},
      {"separated", "--bundle", data("sep.json")},
      {"decompose", "--bundle", data("overlap.json")},
      {"limit-lambda", "--bundle", data("psd_pair.json")},
      {"matched-projection", "--bundle", data("idempotent.json")},
      {"perturb", "--bundle", data("weights_sequence.json")},
      {"perturb", "--bundle", data("worked_example.json"), "--generate", "rank-preserving", "--count",
       "40"},
  };
  for (const auto& args : cases) {
    const Run r = run(args);
    INFO(args[0]);
    CHECK(r.code == cli::kExitOk);
    CHECK_FALSE(r.out.empty());
  }
  CHECK(run({"perturb", "--bundle", data("worked_example.json"), "--generate", "sideways"}).code ==
        cli::kExitUsage);
  CHECK(run({"closed-form", "--bundle", data("overlap.json")}).code == cli::kExitMath);
}

#include "wmp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wmp/error.hpp"

namespace wmp {

namespace {

using nlohmann::json;

const char* const kReserved[] = {"tolerance", "schedule", "terms", "index"};

bool is_reserved(std::string_view key) {
  for (const char* r : kReserved)
    if (key == r) return true;
  return false;
}

std::size_t size_field(const json& j, const char* key, std::string_view role) {
  if (!j.contains(key) || !j[key].is_number_unsigned())
    throw IoError("matrix '" + std::string(role) + "': missing or invalid \"" + key + "\"");
  return j[key].get<std::size_t>();
}

std::vector<double> flat_numbers(const json& j, std::size_t rows, std::size_t cols,
                                 std::string_view role, const char* key) {
  std::vector<double> out;
  out.reserve(rows * cols);
  auto push = [&](const json& x) {
    if (!x.is_number()) throw IoError("matrix '" + std::string(role) + "': non-numeric entry");
    out.push_back(x.get<double>());
  };
  if (!j.is_array()) throw IoError("matrix '" + std::string(role) + "': \"" + key + "\" must be a list");
  for (const json& x : j) {
    if (x.is_array()) {
      for (const json& y : x) push(y);
    } else {
      push(x);
    }
  }
  if (out.size() != rows * cols) {
    throw IoError("matrix '" + std::string(role) + "': \"" + key + "\" has " +
                  std::to_string(out.size()) + " entries, expected " +
                  std::to_string(rows * cols));
  }
  return out;
}

Matrix matrix_from_json(const json& j, std::string_view role) {
  if (!j.is_object()) throw IoError("matrix '" + std::string(role) + "' must be an object");
  const std::size_t rows = size_field(j, "rows", role);
  const std::size_t cols = size_field(j, "cols", role);
  if (!j.contains("re")) throw IoError("matrix '" + std::string(role) + "': missing \"re\"");
  const std::vector<double> re = flat_numbers(j["re"], rows, cols, role, "re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = flat_numbers(j["im"], rows, cols, role, "im");
  std::vector<Complex> entries(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) entries[i] = Complex(re[i], im[i]);
  try {
    return Matrix(rows, cols, std::move(entries));
  } catch (const InvalidArgument& e) {
    throw IoError("matrix '" + std::string(role) + "': " + e.what());
  }
}

ToleranceConfig tolerance_from_json(const json& j, std::vector<std::string>& keys) {
  if (!j.is_object()) throw IoError("\"tolerance\" must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "rank_rtol" && key != "inv_cond_max" && key != "verify_atol" &&
        key != "verify_rtol" && key != "separation_margin" && key != "limit_rtol")
      throw IoError("tolerance: unknown field '" + key + "'");
    keys.push_back(key);
  }
  ToleranceConfig tol;
  auto read = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw IoError(std::string("tolerance.") + key + " must be a number");
    field = j[key].get<double>();
  };
  if (j.contains("rank_rtol")) {
    double r = 0.0;
    read("rank_rtol", r);
    tol.rank_rtol = r;
  }
  read("inv_cond_max", tol.inv_cond_max);
  read("verify_atol", tol.verify_atol);
  read("verify_rtol", tol.verify_rtol);
  read("separation_margin", tol.separation_margin);
  read("limit_rtol", tol.limit_rtol);
  try {
    tol.validate();
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("tolerance: ") + e.what());
  }
  return tol;
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw IoError(std::string("\"") + what + "\" must be a list of numbers");
  std::vector<double> out;
  for (const json& x : j) {
    if (!x.is_number()) throw IoError(std::string("\"") + what + "\" must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void append_matrix(std::string& out, const Matrix& m) {
  bool complex = false;
  for (const Complex& z : m.entries()) complex = complex || z.imag() != 0.0;
  out += "{\"rows\": " + std::to_string(m.rows()) + ", \"cols\": " + std::to_string(m.cols()) +
         ", \"re\": [";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ", ";
    out += format_number(m.entries()[i].real());
  }
  out += "]";
  if (complex) {
    out += ", \"im\": [";
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i) out += ", ";
      out += format_number(m.entries()[i].imag());
    }
    out += "]";
  }
  out += "}";
}

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const char* first = token.data();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw IoError("Matrix Market line " + std::to_string(line) + ": bad number '" +
                  std::string(token) + "'");
  return v;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

const Matrix& ProblemBundle::require(std::string_view role) const {
  const auto it = matrices.find(role);
  if (it == matrices.end()) throw IoError("bundle has no matrix for role '" + std::string(role) + "'");
  return it->second;
}

ProblemBundle parse_bundle(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("bundle is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("bundle must be a JSON object");
  ProblemBundle b;
  for (const auto& [key, value] : doc.items()) {
    if (is_reserved(key)) continue;
    b.matrices.emplace(key, matrix_from_json(value, key));
  }
  if (doc.contains("tolerance")) b.tolerance = tolerance_from_json(doc["tolerance"], b.tolerance_keys);
  if (doc.contains("schedule")) b.schedule = numbers(doc["schedule"], "schedule");
  if (doc.contains("index")) b.index = numbers(doc["index"], "index");
  if (doc.contains("terms")) {
    if (!doc["terms"].is_array()) throw IoError("\"terms\" must be a list");
    std::size_t k = 0;
    for (const json& t : doc["terms"]) {
      ++k;
      const std::string where = "terms[" + std::to_string(k) + "]";
      if (!t.is_object()) throw IoError(where + " must be an object");
      PerturbationTerm term;
      for (const char* role : {"A", "M", "N"}) {
        if (!t.contains(role)) throw IoError(where + " has no '" + role + "'");
      }
      term.a = matrix_from_json(t["A"], where + ".A");
      term.m = matrix_from_json(t["M"], where + ".M");
      term.n = matrix_from_json(t["N"], where + ".N");
      b.terms.push_back(std::move(term));
    }
  }
  return b;
}

ProblemBundle read_bundle(const std::filesystem::path& path) {
  return parse_bundle(read_text_file(path));
}

std::string bundle_to_json(const std::map<std::string, Matrix, std::less<>>& matrices) {
  std::string out = "{";
  bool first = true;
  for (const auto& [role, m] : matrices) {
    out += first ? "\n  " : ",\n  ";
    first = false;
    out += json(role).dump() + ": ";
    append_matrix(out, m);
  }
  out += first ? "}\n" : "\n}\n";
  return out;
}

void write_bundle(const std::filesystem::path& path,
                  const std::map<std::string, Matrix, std::less<>>& matrices) {
  write_text_file(path, bundle_to_json(matrices));
}

Matrix parse_matrix_market(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IoError("Matrix Market: empty input");
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw IoError("Matrix Market: missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix" || format != "array")
    throw IoError("Matrix Market: only dense 'matrix array' files are supported");
  const bool complex = field == "complex";
  if (!complex && field != "real" && field != "integer" && field != "double")
    throw IoError("Matrix Market: unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" &&
      symmetry != "hermitian")
    throw IoError("Matrix Market: unsupported symmetry '" + symmetry + "'");
  if (symmetry == "hermitian" && !complex)
    throw IoError("Matrix Market: hermitian symmetry requires a complex field");

  std::vector<std::string> tokens;
  bool have_size = false;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> token_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!have_size) {
      long long r = -1;
      long long c = -1;
      if (!(ls >> r >> c) || r < 0 || c < 0)
        throw IoError("Matrix Market line " + std::to_string(line_no) + ": bad size line");
      rows = static_cast<std::size_t>(r);
      cols = static_cast<std::size_t>(c);
      have_size = true;
      continue;
    }
    std::string tok;
    while (ls >> tok) {
      tokens.push_back(tok);
      token_lines.push_back(line_no);
    }
  }
  if (!have_size) throw IoError("Matrix Market: missing size line");
  const bool general = symmetry == "general";
  if (!general && rows != cols) throw IoError("Matrix Market: symmetric storage needs a square matrix");

  std::size_t expected = 0;
  if (general) {
    expected = rows * cols;
  } else if (symmetry == "skew-symmetric") {
    expected = rows * (rows - (rows > 0 ? 1 : 0)) / 2;
  } else {
    expected = rows * (rows + 1) / 2;
  }
  const std::size_t per = complex ? 2 : 1;
  if (tokens.size() != expected * per) {
    throw IoError("Matrix Market: expected " + std::to_string(expected * per) + " values, found " +
                  std::to_string(tokens.size()));
  }

  Matrix m(rows, cols);
  std::size_t k = 0;
  auto next = [&]() {
    const double re = parse_double(tokens[k], token_lines[k]);
    ++k;
    double im = 0.0;
    if (complex) {
      im = parse_double(tokens[k], token_lines[k]);
      ++k;
    }
    return Complex(re, im);
  };
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t first_row = general ? 0 : (symmetry == "skew-symmetric" ? j + 1 : j);
    for (std::size_t i = first_row; i < rows; ++i) {
      const Complex z = next();
      m(i, j) = z;
      if (general || i == j) continue;
      if (symmetry == "symmetric") m(j, i) = z;
      else if (symmetry == "skew-symmetric") m(j, i) = -z;
      else m(j, i) = std::conj(z);
    }
  }
  if (!m.all_finite()) throw IoError("Matrix Market: non-finite entry");
  return m;
}

Matrix read_matrix_market(const std::filesystem::path& path) {
  return parse_matrix_market(read_text_file(path));
}

std::string to_matrix_market(const Matrix& m) {
  bool complex = false;
  for (const Complex& z : m.entries()) complex = complex || z.imag() != 0.0;
  std::string out = std::string("%%MatrixMarket matrix array ") + (complex ? "complex" : "real") +
                    " general\n" + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out += format_number(m(i, j).real());
      if (complex) out += " " + format_number(m(i, j).imag());
      out += "\n";
    }
  }
  return out;
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m) {
  write_text_file(path, to_matrix_market(m));
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace wmp

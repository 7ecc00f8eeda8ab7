#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "wmp/continuity.hpp"
#include "wmp/error.hpp"
#include "wmp/io.hpp"
#include "wmp/limits.hpp"
#include "wmp/wmp.hpp"

namespace wmp::cli {

namespace {

using nlohmann::json;
using MatrixMap = std::map<std::string, Matrix, std::less<>>;

struct Options {
  std::string bundle;
  std::vector<std::string> roles;
  std::string out;
  bool json = false;
  std::optional<double> rank_rtol;
  std::optional<double> verify_atol;
  std::string schedule;
  std::optional<std::uint64_t> seed;
  std::string generate;
  std::size_t count = 0;
};

struct Context {
  ProblemBundle bundle;
  ToleranceConfig tol;
  json tol_sources = json::object();
  const Options* opts = nullptr;

  const Matrix& role(std::string_view name) const { return bundle.require(name); }
  std::optional<Matrix> optional_role(std::string_view name) const {
    if (!bundle.has(name)) return std::nullopt;
    return bundle.require(name);
  }
  Weight weight(std::string_view name, std::size_t dim_if_absent) const {
    if (!bundle.has(name)) return Weight::identity(dim_if_absent);
    return Weight::make(bundle.require(name), tol);
  }
  std::uint64_t seed() const { return opts->seed.value_or(1); }
};

struct Report {
  json data = json::object();
  std::ostringstream text;
  MatrixMap outputs;
  int code = kExitOk;
  std::string diagnostic;
};

// ---- formatting ----

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt_complex(const Complex& z) {
  if (z.imag() == 0.0) return fmt12(z.real());
  std::string s = fmt12(z.real());
  s += z.imag() < 0 ? " - " : " + ";
  s += fmt12(std::abs(z.imag())) + "i";
  return s;
}

void print_matrix(std::ostream& os, std::string_view name, const Matrix& m) {
  os << name << " (" << m.rows() << "x" << m.cols() << "):\n";
  double scale = 0.0;
  for (const Complex& z : m.entries()) scale = std::max(scale, std::abs(z));
  const double dust = 1e-14 * scale;
  auto clean = [dust](double x) { return std::abs(x) <= dust ? 0.0 : x; };
  std::vector<std::string> cells(m.size());
  std::size_t width = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Complex& z = m.entries()[i];
    cells[i] = fmt_complex({clean(z.real()), clean(z.imag())});
    width = std::max(width, cells[i].size());
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << " ";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const std::string& c = cells[i * m.cols() + j];
      os << "  " << std::string(width - c.size(), ' ') << c;
    }
    os << "\n";
  }
}

json matrix_json(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  bool complex = false;
  for (const Complex& z : m.entries()) {
    re.push_back(z.real());
    im.push_back(z.imag());
    complex = complex || z.imag() != 0.0;
  }
  json j = {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}};
  if (complex) j["im"] = im;
  return j;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// JSON text with every floating-point number at 17 significant digits.
void dump(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close(static_cast<std::size_t>(depth) * 2, ' ');
  switch (j.type()) {
    case json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    case json::value_t::array: {
      bool scalars = true;
      for (const json& x : j) scalars = scalars && !x.is_structured();
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += scalars ? ", " : ",";
        if (!scalars) out += "\n" + pad;
        dump(j[i], out, depth + 1);
      }
      if (!scalars && !j.empty()) out += "\n" + close;
      out += "]";
      return;
    }
    case json::value_t::object: {
      out += "{";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        out += first ? "\n" : ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        dump(value, out, depth + 1);
      }
      if (!first) out += "\n" + close;
      out += "}";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string dump17(const json& j) {
  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

std::string residual_line(const PenroseResiduals& r) {
  std::string s;
  for (double v : r.values) s += (s.empty() ? "" : "  ") + fmt12(v);
  return s;
}

json residual_json(const PenroseResiduals& r) {
  return {{"AXA-A", r.values[0]}, {"XAX-X", r.values[1]}, {"MAX-(MAX)*", r.values[2]},
          {"NXA-(NXA)*", r.values[3]}};
}

// ---- schedules ----

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--schedule", "expected a:b or a:b:count, got '" + text + "'");
    }
  }
  if (parts.size() != 2 && parts.size() != 3)
    throw CLI::ValidationError("--schedule", "expected a:b or a:b:count, got '" + text + "'");
  const double a = parts[0];
  const double b = parts[1];
  if (!(a > 0.0) || !(b > 0.0))
    throw CLI::ValidationError("--schedule", "endpoints must be positive");
  std::size_t count = 0;
  if (parts.size() == 3) {
    if (!(parts[2] >= 1.0) || parts[2] != std::floor(parts[2]))
      throw CLI::ValidationError("--schedule", "count must be a positive integer");
    count = static_cast<std::size_t>(parts[2]);
  } else {
    count = static_cast<std::size_t>(std::lround(std::abs(std::log10(b / a)))) + 1;
  }
  return geometric_schedule(a, b, count);
}

std::vector<double> resolve_schedule(const Context& ctx, std::vector<double> fallback,
                                     json& source) {
  if (!ctx.opts->schedule.empty()) {
    source = "flag";
    return parse_schedule(ctx.opts->schedule);
  }
  if (ctx.bundle.schedule) {
    source = "bundle";
    return *ctx.bundle.schedule;
  }
  source = "default";
  return fallback;
}

void add_trace(Report& r, const LimitTrace& trace, std::string_view parameter) {
  json rows = json::array();
  r.text << "  " << parameter << std::string(parameter.size() < 20 ? 20 - parameter.size() : 0, ' ')
         << "error\n";
  for (const LimitRow& row : trace.rows) {
    rows.push_back({{parameter, row.parameter}, {"error", row.error}});
    const std::string p = fmt12(row.parameter);
    r.text << "  " << p << std::string(p.size() < 20 ? 20 - p.size() : 1, ' ') << fmt12(row.error)
           << "\n";
  }
  r.text << "converged: " << (trace.converged ? "yes" : "no")
         << "   tail nonincreasing: " << (trace.tail_nonincreasing ? "yes" : "no")
         << "   pinned rank: " << trace.pinned_rank << "\n";
  for (const std::string& d : trace.diagnostics) r.text << "diagnostic: " << d << "\n";
  r.data["trace"] = rows;
  r.data["converged"] = trace.converged;
  r.data["tail_nonincreasing"] = trace.tail_nonincreasing;
  r.data["pinned_rank"] = trace.pinned_rank;
  r.data["diagnostics"] = trace.diagnostics;
  r.data["final_error"] = trace.final_error();
  r.data["target"] = matrix_json(trace.target);
  r.outputs["target"] = trace.target;
  if (!trace.rows.empty()) r.outputs["iterate"] = trace.rows.back().iterate;
}

json separation_json(const SeparatedPairReport& s) {
  return {{"pq_norm", s.pq_norm},
          {"two_minus_sum_cond", number_or_null(s.two_minus_sum_cond)},
          {"intersection_dim", s.intersection_dim},
          {"sum_rank", s.sum_rank},
          {"is_separated", s.is_separated}};
}

void separation_text(std::ostream& os, const SeparatedPairReport& s) {
  os << "||A^dagger A B^dagger B|| = " << fmt12(s.pq_norm) << "\n"
     << "cond(2I - A^dagger A - B^dagger B) = " << fmt12(s.two_minus_sum_cond) << "\n"
     << "dim(range(A*) ∩ range(B*)) = " << s.intersection_dim << "\n"
     << "dim(range(A*) + range(B*)) = " << s.sum_rank << "\n"
     << "separated: " << (s.is_separated ? "yes" : "no") << "\n";
}

// ---- subcommands ----

void cmd_wmp(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Weight m = ctx.weight("M", a.rows());
  const Weight n = ctx.weight("N", a.cols());
  const WmpResult res = wmp_inverse(a, m, n, ctx.tol);
  print_matrix(r.text, "A^dagger_MN", res.inverse);
  r.text << "cond(R_{A,N}) = " << fmt12(res.r_cond) << "   cond(L_{A,M^-1}) = "
         << fmt12(res.l_cond) << "\n"
         << "penrose residuals: " << residual_line(res.penrose) << "\n";
  r.data["inverse"] = matrix_json(res.inverse);
  r.data["mp"] = matrix_json(res.mp);
  r.data["r_factor"] = matrix_json(res.r_factor);
  r.data["l_factor"] = matrix_json(res.l_factor);
  r.data["r_cond"] = res.r_cond;
  r.data["l_cond"] = res.l_cond;
  r.data["penrose_residuals"] = residual_json(res.penrose);
  r.outputs["X"] = res.inverse;
}

void cmd_exists(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Weight m = ctx.weight("M", a.rows());
  const Weight n = ctx.weight("N", a.cols());
  const ExistenceReport rep = wmp_exists(a, m, n, ctx.tol);
  r.text << "cond(R_{A,N}) = " << fmt12(rep.r_cond)
         << (rep.r_invertible ? "   invertible" : "   singular") << "\n"
         << "cond(L_{A,M^-1}) = " << fmt12(rep.l_cond)
         << (rep.l_invertible ? "   invertible" : "   singular") << "\n"
         << "exists: " << (rep.exists ? "yes" : "no") << "\n";
  r.data["r_cond"] = number_or_null(rep.r_cond);
  r.data["l_cond"] = number_or_null(rep.l_cond);
  r.data["r_invertible"] = rep.r_invertible;
  r.data["l_invertible"] = rep.l_invertible;
  r.data["exists"] = rep.exists;
  r.outputs["R"] = rep.r_factor;
  r.outputs["L"] = rep.l_factor;
  if (!rep.exists) {
    r.code = kExitMath;
    r.diagnostic = !rep.r_invertible
                       ? "R_{A,N} is singular (condition number " + fmt12(rep.r_cond) + ")"
                       : "L_{A,M^-1} is singular (condition number " + fmt12(rep.l_cond) + ")";
  }
}

void cmd_reduce(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Weight m = ctx.weight("M", a.rows());
  const Weight n = ctx.weight("N", a.cols());
  const PositiveReduction pr = positive_reduction(a, m, n, ctx.tol);
  const Matrix original = wmp_inverse(a, m, n, ctx.tol).inverse;
  const Matrix reduced = wmp_inverse(a, pr.s, pr.t, ctx.tol).inverse;
  const double diff = operator_norm(original - reduced);
  print_matrix(r.text, "S_{A,M}", pr.s.matrix());
  print_matrix(r.text, "T_{A,N}", pr.t.matrix());
  r.text << "S positive definite: " << (pr.s.positive_definite() ? "yes" : "no")
         << "   T positive definite: " << (pr.t.positive_definite() ? "yes" : "no") << "\n"
         << "||A^dagger_MN - A^dagger_ST|| = " << fmt12(diff) << "\n";
  r.data["S"] = matrix_json(pr.s.matrix());
  r.data["T"] = matrix_json(pr.t.matrix());
  r.data["S_positive_definite"] = pr.s.positive_definite();
  r.data["T_positive_definite"] = pr.t.positive_definite();
  r.data["inverse_difference"] = diff;
  r.outputs["S"] = pr.s.matrix();
  r.outputs["T"] = pr.t.matrix();
}

void cmd_limit_t0(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Matrix& b = ctx.role("B");
  const Weight v = ctx.weight("V", a.rows());
  const Weight w = ctx.weight("W", b.rows());
  const OmegaWeight u =
      omega_weight(a, b, w, ctx.optional_role("X"), ctx.optional_role("Y"), ctx.tol, &v);
  json source;
  const std::vector<double> schedule = resolve_schedule(ctx, default_t_schedule(), source);
  const LimitTrace trace = limit_t_to_zero(a, b, v, w, u, schedule, ctx.tol);
  r.data["schedule_source"] = source;
  r.data["U"] = matrix_json(u.u.matrix());
  add_trace(r, trace, "t");
  r.outputs["U"] = u.u.matrix();
}

void cmd_limit_lambda(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Matrix& b = ctx.role("B");
  json source;
  const std::vector<double> schedule = resolve_schedule(ctx, default_lambda_schedule(), source);
  const LimitTrace trace = limit_lambda_to_inf(a, b, schedule, ctx.tol);
  r.data["schedule_source"] = source;
  add_trace(r, trace, "lambda");
}

void cmd_separated(const Context& ctx, Report& r) {
  const SeparatedPairReport rep = separated_pair_check(ctx.role("A"), ctx.role("B"), ctx.tol);
  separation_text(r.text, rep);
  r.data = separation_json(rep);
}

void cmd_closed_form(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Matrix& b = ctx.role("B");
  const Weight v = ctx.weight("V", a.rows());
  const Weight w = ctx.weight("W", b.rows());
  const SeparatedClosedForm cf = closed_form_separated(a, b, v, w, ctx.tol, ctx.seed());
  print_matrix(r.text, "Pi", cf.pi);
  print_matrix(r.text, "D", cf.d);
  r.text << "||(A*VA + B*WB)^dagger A*V - D|| = " << fmt12(cf.residual) << "\n"
         << "same with a random W' = " << fmt12(cf.alternate_residual) << "\n";
  r.data["Pi"] = matrix_json(cf.pi);
  r.data["D"] = matrix_json(cf.d);
  r.data["residual"] = cf.residual;
  r.data["alternate_residual"] = cf.alternate_residual;
  r.data["seed"] = ctx.seed();
  r.outputs["Pi"] = cf.pi;
  r.outputs["D"] = cf.d;
}

void cmd_decompose(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Matrix& b = ctx.role("B");
  const Weight v = ctx.weight("V", a.rows());
  const Weight w = ctx.weight("W", b.rows());
  const Weight wprime = ctx.bundle.has("Wprime") ? ctx.weight("Wprime", b.rows()) : w;
  json source;
  const std::vector<double> schedule = resolve_schedule(ctx, default_t_schedule(), source);
  const GeneralLimit g =
      general_limit_via_decomposition(a, b, v, w, wprime, schedule, ctx.tol, ctx.seed());
  const BDecomposition& d = g.decomposition;
  print_matrix(r.text, "B1", d.b1);
  print_matrix(r.text, "B2", d.b2);
  r.text << "||B2* W B1|| = " << fmt12(d.orthogonality) << "\n"
         << "||(I - A^dagger A) B1*|| = " << fmt12(d.range_defect) << "\n"
         << "rank(B2) = " << d.b2_rank << "\n";
  separation_text(r.text, d.separation);
  print_matrix(r.text, "Pi'", g.pi_prime);
  r.text << "||(A*VA + B2*W'B2)^dagger A*V - limit|| = " << fmt12(g.wprime_residual)
         << "   (random W': " << fmt12(g.alternate_residual) << ")\n";
  r.data["B1"] = matrix_json(d.b1);
  r.data["B2"] = matrix_json(d.b2);
  r.data["Z"] = matrix_json(d.z);
  r.data["orthogonality"] = d.orthogonality;
  r.data["range_defect"] = d.range_defect;
  r.data["b2_rank"] = d.b2_rank;
  r.data["separation"] = separation_json(d.separation);
  r.data["Pi_prime"] = matrix_json(g.pi_prime);
  r.data["wprime_residual"] = g.wprime_residual;
  r.data["alternate_residual"] = g.alternate_residual;
  r.data["schedule_source"] = source;
  r.data["seed"] = ctx.seed();
  add_trace(r, g.trace, "t");
  r.outputs["B1"] = d.b1;
  r.outputs["B2"] = d.b2;
  r.outputs["Z"] = d.z;
  r.outputs["Pi_prime"] = g.pi_prime;
}

void cmd_verify(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Matrix& x = ctx.role("X");
  const Matrix m = ctx.bundle.has("M") ? ctx.role("M") : Matrix::identity(a.rows());
  const Matrix n = ctx.bundle.has("N") ? ctx.role("N") : Matrix::identity(a.cols());
  if (m.rows() != a.rows() || !m.square() || n.rows() != a.cols() || !n.square() ||
      x.rows() != a.cols() || x.cols() != a.rows())
    throw InvalidArgument("shapes of A, M, N and X are inconsistent");
  const PenroseResiduals res = verify_weighted_penrose(a, m, n, x);
  const bool ok = res.within(ctx.tol.verify_atol);
  r.text << "||AXA - A||        = " << fmt12(res.values[0]) << "\n"
         << "||XAX - X||        = " << fmt12(res.values[1]) << "\n"
         << "||MAX - (MAX)*||   = " << fmt12(res.values[2]) << "\n"
         << "||NXA - (NXA)*||   = " << fmt12(res.values[3]) << "\n"
         << "within verify_atol: " << (ok ? "yes" : "no") << "\n";
  r.data["penrose_residuals"] = residual_json(res);
  r.data["within"] = ok;
  if (!ok) {
    r.code = kExitMath;
    r.diagnostic = "X fails the weighted Penrose equations (max residual " + fmt12(res.max()) + ")";
  }
}

void cmd_perturb(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Weight m = ctx.weight("M", a.rows());
  const Weight n = ctx.weight("N", a.cols());
  const PerturbationSequence seq = [&] {
    const std::string& gen = ctx.opts->generate;
    const std::size_t count = ctx.opts->count;
    if (gen == "rank-preserving")
      return rank_preserving_sequence(a, m, n, count ? count : 1000, ctx.seed(), ctx.tol);
    if (gen == "rank-dropping")
      return rank_dropping_sequence(a, m, n, count ? count : 12, ctx.seed(), ctx.tol);
    if (gen == "weights-shift") return weights_shift_sequence(a, m, n, count ? count : 50);
    if (ctx.bundle.terms.empty())
      throw IoError("the bundle has no \"terms\" and no --generate was given");
    PerturbationSequence s{a, m, n, ctx.bundle.terms, SequenceKind::weights_only,
                           ctx.bundle.index};
    for (const PerturbationTerm& t : s.terms)
      if (!(t.a == a)) s.kind = SequenceKind::full;
    return s;
  }();
  const ContinuityDiagnostics d = run_diagnostics(seq, ctx.tol);
  r.text << "kind: " << (seq.kind == SequenceKind::full ? "full" : "weights-only")
         << "   terms: " << d.rows.size() << "   tail window starts at term " << d.tail_start + 1
         << "\n";
  r.text << "  n           exists";
  for (std::string_view name : kContinuityColumnNames) r.text << "  " << name;
  r.text << "\n";
  json rows = json::array();
  for (const ContinuityRow& row : d.rows) {
    r.text << "  " << fmt12(row.index) << "  " << (row.exists ? "yes" : "no");
    json jr = {{"n", row.index}, {"exists", row.exists}};
    for (std::size_t c = 0; c < kContinuityColumns; ++c) {
      r.text << "  " << fmt12(row.values[c]);
      jr[std::string(kContinuityColumnNames[c])] = number_or_null(row.values[c]);
    }
    jr["factor_bound"] = number_or_null(row.factor_bound);
    rows.push_back(jr);
    r.text << "\n";
  }
  json cols = json::object();
  r.text << "column summary over the computed prefix:\n";
  for (std::size_t c = 0; c < kContinuityColumns; ++c) {
    const ColumnSummary& s = d.columns[c];
    r.text << "  " << kContinuityColumnNames[c] << ": sup " << fmt12(s.sup) << ", final "
           << fmt12(s.final_value) << ", tail growth " << fmt12(s.tail_growth) << ", "
           << trend_name(s.trend) << "\n";
    cols[std::string(kContinuityColumnNames[c])] = {{"sup", s.sup},
                                                   {"final", s.final_value},
                                                   {"tail_growth", number_or_null(s.tail_growth)},
                                                   {"trend", trend_name(s.trend)}};
  }
  r.text << "bounded: " << (d.bounded ? "yes" : "no")
         << "   convergent: " << (d.convergent ? "yes" : "no")
         << "   factor bound holds: " << (d.factor_bound_holds ? "yes" : "no") << "\n";
  if (d.n0) {
    r.text << "n0 = " << *d.n0 << "\n";
  } else {
    r.text << "n0: the last term has no weighted inverse\n";
  }
  r.data["kind"] = seq.kind == SequenceKind::full ? "full" : "weights-only";
  r.data["rows"] = rows;
  r.data["columns"] = cols;
  r.data["tail_start"] = d.tail_start;
  r.data["bounded"] = d.bounded;
  r.data["convergent"] = d.convergent;
  r.data["factor_bound_holds"] = d.factor_bound_holds;
  r.data["n0"] = d.n0 ? json(*d.n0) : json(nullptr);
  r.data["note"] = "trends certify only the computed finite prefix";
}

void cmd_matched_projection(const Context& ctx, Report& r) {
  const Matrix& q = ctx.role("Q");
  const Matrix mq = matched_projection(q, ctx.tol);
  const double herm = operator_norm(mq - mq.adjoint());
  const double idem = operator_norm(mq * mq - mq);
  print_matrix(r.text, "m(Q)", mq);
  r.text << "||m(Q) - m(Q)*|| = " << fmt12(herm) << "   ||m(Q)^2 - m(Q)|| = " << fmt12(idem)
         << "\n";
  r.data["mQ"] = matrix_json(mq);
  r.data["hermitian_defect"] = herm;
  r.data["idempotent_defect"] = idem;
  r.outputs["mQ"] = mq;
}

void cmd_rho(const Context& ctx, Report& r) {
  const Matrix& a = ctx.role("A");
  const Weight m = ctx.weight("M", a.rows());
  const Weight n = ctx.weight("N", a.cols());
  const RhoEmbedding e = rho_embed(a, m, n);
  const Matrix inv = wmp_inverse(e.rho, e.t, e.t.inverted(), ctx.tol).inverse;
  const Matrix direct = wmp_inverse(a, m, n, ctx.tol).inverse;
  const std::size_t k = a.rows();
  const Matrix lower = inv.block(k, 0, a.cols(), k);
  const Matrix upper = inv.block(0, k, k, a.cols());
  const double d_lower = operator_norm(lower - direct);
  const double d_upper = operator_norm(upper - direct.adjoint());
  print_matrix(r.text, "rho(A)", e.rho);
  print_matrix(r.text, "rho(A)^dagger_{T,T^-1}", inv);
  r.text << "||lower-left block - A^dagger_MN|| = " << fmt12(d_lower) << "\n"
         << "||upper-right block - (A^dagger_MN)*|| = " << fmt12(d_upper) << "\n";
  r.data["rho"] = matrix_json(e.rho);
  r.data["T"] = matrix_json(e.t.matrix());
  r.data["rho_inverse"] = matrix_json(inv);
  r.data["lower_block_difference"] = d_lower;
  r.data["upper_block_difference"] = d_upper;
  r.outputs["rho"] = e.rho;
  r.outputs["T"] = e.t.matrix();
  r.outputs["rho_inverse"] = inv;
}

using Handler = void (*)(const Context&, Report&);

struct Subcommand {
  const char* name;
  const char* help;
  Handler handler;
};

const Subcommand kSubcommands[] = {
    {"wmp", "weighted Moore-Penrose inverse of A for weights M, N", cmd_wmp},
    {"exists", "decide existence through the invertibility of R_{A,N} and L_{A,M^-1}", cmd_exists},
    {"reduce", "positive-definite weights S_{A,M}, T_{A,N} with the same inverse", cmd_reduce},
    {"limit-t0", "(A*VA + tB*WB)^dagger A*V as t -> 0", cmd_limit_t0},
    {"limit-lambda", "(lambda A + B)^dagger B as lambda -> infinity", cmd_limit_lambda},
    {"separated", "separated-pair check for (range(A*), range(B*))", cmd_separated},
    {"closed-form", "closed form of (A*VA + B*WB)^dagger A*V for a separated pair",
     cmd_closed_form},
    {"decompose", "split B = B1 + B2 and evaluate the general limit", cmd_decompose},
    {"verify", "weighted Penrose residuals of a candidate X", cmd_verify},
    {"perturb", "continuity diagnostics over a perturbation sequence", cmd_perturb},
    {"matched-projection", "matched projection m(Q) of an idempotent Q", cmd_matched_projection},
    {"rho", "block embedding rho(A) and its weighted inverse", cmd_rho},
};

void add_common_options(CLI::App* sub, Options& o) {
  sub->add_option("--bundle", o.bundle, "JSON problem bundle");
  sub->add_option("--role", o.roles, "name=path of a Matrix Market array file")->take_all();
  sub->add_option("--out", o.out, "write result matrices (JSON, or Matrix Market for .mtx)");
  sub->add_flag("--json", o.json, "emit the report as JSON");
  sub->add_option("--rank-rtol", o.rank_rtol, "relative singular-value cutoff");
  sub->add_option("--verify-atol", o.verify_atol, "absolute residual threshold");
  sub->add_option("--schedule", o.schedule, "a:b (one point per decade) or a:b:count");
  sub->add_option("--seed", o.seed, "seed for randomized checks");
}

Context load_context(const Options& o) {
  Context ctx;
  ctx.opts = &o;
  if (!o.bundle.empty()) ctx.bundle = read_bundle(o.bundle);
  for (const std::string& arg : o.roles) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
      throw CLI::ValidationError("--role", "expected name=path, got '" + arg + "'");
    ctx.bundle.matrices.insert_or_assign(arg.substr(0, eq),
                                         read_matrix_market(arg.substr(eq + 1)));
  }
  ctx.tol = ctx.bundle.tolerance;
  for (const char* key : {"rank_rtol", "inv_cond_max", "verify_atol", "verify_rtol",
                          "separation_margin", "limit_rtol"})
    ctx.tol_sources[key] = "default";
  for (const std::string& key : ctx.bundle.tolerance_keys) ctx.tol_sources[key] = "bundle";
  if (o.rank_rtol) {
    ctx.tol.rank_rtol = *o.rank_rtol;
    ctx.tol_sources["rank_rtol"] = "flag";
  }
  if (o.verify_atol) {
    ctx.tol.verify_atol = *o.verify_atol;
    ctx.tol_sources["verify_atol"] = "flag";
  }
  try {
    ctx.tol.validate();
  } catch (const InvalidArgument& e) {
    throw CLI::ValidationError("tolerance", e.what());
  }
  return ctx;
}

json tolerance_json(const Context& ctx) {
  json t = json::object();
  t["rank_rtol"] = ctx.tol.rank_rtol ? json(*ctx.tol.rank_rtol) : json("max(rows,cols)*eps");
  t["inv_cond_max"] = ctx.tol.inv_cond_max;
  t["verify_atol"] = ctx.tol.verify_atol;
  t["verify_rtol"] = ctx.tol.verify_rtol;
  t["separation_margin"] = ctx.tol.separation_margin;
  t["limit_rtol"] = ctx.tol.limit_rtol;
  return {{"values", t}, {"sources", ctx.tol_sources}};
}

const char* primary_output(std::string_view command) {
  if (command == "wmp") return "X";
  if (command == "closed-form") return "D";
  if (command == "decompose") return "target";
  if (command == "limit-t0" || command == "limit-lambda") return "target";
  if (command == "matched-projection") return "mQ";
  if (command == "rho") return "rho_inverse";
  if (command == "reduce") return "T";
  if (command == "exists") return "R";
  return nullptr;
}

void write_outputs(const std::string& path, std::string_view command, const MatrixMap& outputs) {
  if (!path.ends_with(".mtx")) {
    write_bundle(path, outputs);
    return;
  }
  const char* primary = primary_output(command);
  if (primary && outputs.count(primary)) {
    write_matrix_market(path, outputs.at(primary));
  } else if (outputs.size() == 1) {
    write_matrix_market(path, outputs.begin()->second);
  } else {
    throw IoError("--out: no single result matrix for a .mtx file; use a .json path");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Moore-Penrose inverses for self-adjoint invertible weights", "wmptool"};
  app.require_subcommand(1);
  Options opts;
  std::map<CLI::App*, const Subcommand*> table;
  for (const Subcommand& s : kSubcommands) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common_options(sub, opts);
    if (std::string_view(s.name) == "perturb") {
      sub->add_option("--generate", opts.generate, "built-in sequence instead of bundle terms")
          ->check(CLI::IsMember({"rank-preserving", "rank-dropping", "weights-shift"}));
      sub->add_option("--count", opts.count, "number of generated terms");
    }
    table[sub] = &s;
  }

  if (!args.empty() && !args.front().starts_with("-") && 
      std::none_of(std::begin(kSubcommands), std::end(kSubcommands),
                   [&](const Subcommand& c) { return args.front() == c.name; })) {
    err << "unknown subcommand '" << args.front() << "'\n" << app.help();
    return kExitUsage;
  }
  std::vector<const char*> argv{"wmptool"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const Subcommand& sub = *table.at(chosen);
  try {
    if (!opts.schedule.empty()) parse_schedule(opts.schedule);
    const Context ctx = load_context(opts);
    Report report;
    sub.handler(ctx, report);
    if (!opts.out.empty()) write_outputs(opts.out, sub.name, report.outputs);
    if (opts.json) {
      json doc = {{"command", sub.name},
                  {"exit_code", report.code},
                  {"tolerance", tolerance_json(ctx)},
                  {"result", report.data}};
      if (!report.diagnostic.empty()) doc["diagnostic"] = report.diagnostic;
      out << dump17(doc);
    } else {
      out << report.text.str();
    }
    if (!report.diagnostic.empty()) err << sub.name << ": " << report.diagnostic << "\n";
    return report.code;
  } catch (const CLI::ValidationError& e) {
    err << sub.name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << sub.name << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const NonExistent& e) {
    err << sub.name << ": the weighted inverse does not exist: " << e.factor()
        << " is singular (condition number " << fmt12(e.condition_number()) << ")\n";
    return kExitMath;
  } catch (const MathError& e) {
    err << sub.name << ": " << e.what() << "\n";
    return kExitMath;
  } catch (const InvalidArgument& e) {
    err << sub.name << ": " << e.what() << "\n";
    return kExitMath;
  }
}

}  // namespace wmp::cli

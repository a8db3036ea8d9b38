#include "bvflow/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace bvflow::io {

namespace {

const json& require(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(what + ": missing \"" + key + "\"");
  return j.at(key);
}

template <class T> Matrix<T> matrix_from_json(const json& j, int n, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw InputError(what + ": expected " + std::to_string(n) + " rows");
  Matrix<T> M(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
      throw InputError(what + ": row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k) M(i, k) = scalar_from_json<T>(j[i][k], what);
  }
  return M;
}

template <class T> json matrix_to_json(const Matrix<T>& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows; ++i) {
    json r = json::array();
    for (int k = 0; k < M.cols; ++k) r.push_back(scalar_to_json(M(i, k)));
    rows.push_back(r);
  }
  return rows;
}

std::string scalar_string(const json& j, const std::string& what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long>());
  if (j.is_number()) return j.dump();
  throw InputError(what + ": expected a number or \"p/q\" string");
}

}  // namespace

template <class T> T scalar_from_json(const json& j, const std::string& what) {
  try {
    if (j.is_string()) return Scalar<T>::parse(j.get<std::string>());
    if (j.is_number_integer()) return Scalar<T>::from_int(j.get<long>());
    if (j.is_number()) return Scalar<T>::from_double(j.get<double>());
  } catch (const std::invalid_argument& e) {
    throw InputError(what + ": " + e.what());
  }
  throw InputError(what + ": expected a number or \"p/q\" string");
}

template <class T> json scalar_to_json(const T& x) {
  if constexpr (Scalar<T>::exact) return Scalar<T>::str(x);
  else return x;
}

template <class T> FreeModel<T> fixture_from_json(const json& j) {
  const std::string what = "fixture";
  const json& dj = require(j, "degrees", what);
  if (!dj.is_array() || dj.empty()) throw InputError("fixture: degrees must be a nonempty array");
  std::vector<int> degrees;
  for (const auto& d : dj) {
    if (!d.is_number_integer()) throw InputError("fixture: degrees must be integers");
    degrees.push_back(d.get<int>());
  }
  const int n = static_cast<int>(degrees.size());
  if (n > kMaxDim) throw InputError("fixture: dimension " + std::to_string(n) + " exceeds " + std::to_string(kMaxDim));
  try {
    GradedBasis<T> b(degrees, matrix_from_json<T>(require(j, "omega", what), n, "fixture omega"));
    auto endo = [&](const char* key, int p) {
      Endomorphism<T> A{p, matrix_from_json<T>(require(j, key, what), n, std::string("fixture ") + key)};
      if (!respects_degree(b, A))
        throw InputError(std::string("fixture: ") + key + " has entries violating the degree " + std::to_string(p) + " pattern");
      return A;
    };
    FreeModel<T> m(b, make_gl11(b, endo("Q", 1), endo("Qbar", -1), endo("H", 0)));
    for (const auto& c : validate_gl11(m.basis, m.s))
      if (!c.pass) throw InputError("fixture violates gl(1|1) axiom " + c.name + " (residual " + c.residual_text + ")");
    return m;
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("fixture: ") + e.what());
  }
}

template <class T> json fixture_to_json(const FreeModel<T>& m) {
  json j;
  j["degrees"] = m.basis.degrees();
  j["omega"] = matrix_to_json(m.basis.omega());
  j["Q"] = matrix_to_json(m.s.Q.m);
  j["Qbar"] = matrix_to_json(m.s.Qbar.m);
  j["H"] = matrix_to_json(m.s.H.m);
  return j;
}

FreeModel<double> to_float(const FreeModel<mpq_class>& m) {
  auto cv = [](const Matrix<mpq_class>& M) {
    Matrix<double> D(M.rows, M.cols);
    for (size_t k = 0; k < M.a.size(); ++k) D.a[k] = M.a[k].get_d();
    return D;
  };
  GradedBasis<double> b(m.basis.degrees(), cv(m.basis.omega()));
  auto e = [&](const Endomorphism<mpq_class>& A) { return Endomorphism<double>{A.degree, cv(A.m)}; };
  return FreeModel<double>(b, make_gl11(b, e(m.s.Q), e(m.s.Qbar), e(m.s.H)));
}

template <class T> HbarSeries<T> series_from_json(const json& j, const std::shared_ptr<const Grading>& g, int order) {
  if (!j.is_array()) throw InputError("interaction: expected an array of terms");
  HbarSeries<T> s(g, order);
  for (const auto& term : j) {
    const std::string what = "interaction term";
    T c = scalar_from_json<T>(require(term, "coeff", what), what);
    const json& ex = require(term, "exponents", what);
    if (!ex.is_array() || static_cast<int>(ex.size()) != g->dim())
      throw InputError("interaction term: exponents must list " + std::to_string(g->dim()) + " entries");
    Monomial m;
    for (int i = 0; i < g->dim(); ++i) {
      if (!ex[i].is_number_integer() || ex[i].get<int>() < 0 || ex[i].get<int>() > 255)
        throw InputError("interaction term: exponents must be small nonnegative integers");
      m.e[i] = static_cast<std::uint8_t>(ex[i].get<int>());
      if (odd(g->eps[i]) && m.e[i] > 1) {
        c = T(0);  // x^2 = 0 for odd coordinates
      }
    }
    int hp = term.contains("hbar_power") ? term.at("hbar_power").get<int>() : 0;
    if (hp < 0 || hp > order)
      throw InputError("interaction term: hbar_power " + std::to_string(hp) + " outside 0.." + std::to_string(order));
    if (!Scalar<T>::is_zero(c)) s[hp].add_term(m, c);
  }
  return s;
}

template <class T> json series_to_json(const HbarSeries<T>& s) {
  json out = json::array();
  const int n = s.grading() ? s.grading()->dim() : 0;
  for (int k = 0; k <= s.order(); ++k)
    for (const auto& [m, c] : s[k].terms()) {
      json ex = json::array();
      for (int i = 0; i < n; ++i) ex.push_back(static_cast<int>(m.e[i]));
      out.push_back({{"coeff", scalar_to_json(c)}, {"exponents", ex}, {"hbar_power", k}});
    }
  return out;
}

std::string monomial_name(const Monomial& m, int dim) {
  std::string s;
  for (int i = 0; i < dim; ++i) {
    if (!m.e[i]) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i);
    if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
  }
  return s.empty() ? "1" : s;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> c = {"extended", "free-flow", "gl11", "identities", "perturbation", "reconstruct"};
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Scenario Scenario::from_json(const json& j, const std::string& base_dir) {
  static const std::set<std::string> keys = {
      "scalar",  "fixture", "gl11",    "sampler",     "max_degree", "hbar_order",   "grid",     "fd_step",
      "steps",   "tolerance", "fd_tolerance", "trajectory_tolerance", "seed", "samples", "interaction",
      "complete_interaction", "allow_truncation", "checks", "output"};
  if (!j.is_object()) throw InputError("scenario: expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw InputError("scenario: unknown key \"" + k + "\"");
  Scenario s;
  try {
    if (j.contains("scalar")) s.scalar = j.at("scalar").get<std::string>();
    int sources = j.contains("fixture") + j.contains("gl11") + j.contains("sampler");
    if (sources != 1) throw InputError("scenario: exactly one of fixture, gl11, sampler is required");
    if (j.contains("fixture")) {
      std::filesystem::path p = j.at("fixture").get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      if (!std::filesystem::exists(p)) throw InputError("scenario: fixture " + p.string() + " does not exist");
      s.gl11 = read_json_file(p.string());
    }
    if (j.contains("gl11")) s.gl11 = j.at("gl11");
    if (j.contains("sampler")) {
      const json& sp = j.at("sampler");
      s.sampler = std::make_pair(require(sp, "dim", "sampler").get<int>(), require(sp, "seed", "sampler").get<unsigned long>());
    }
    if (j.contains("max_degree")) s.max_degree = j.at("max_degree").get<int>();
    if (j.contains("hbar_order")) s.hbar_order = j.at("hbar_order").get<int>();
    if (j.contains("grid")) {
      s.grid.clear();
      for (const auto& v : j.at("grid")) s.grid.push_back(scalar_string(v, "grid"));
    }
    if (j.contains("fd_step")) s.fd_step = scalar_string(j.at("fd_step"), "fd_step");
    if (j.contains("steps")) s.steps = j.at("steps").get<int>();
    if (j.contains("tolerance")) s.tolerance = j.at("tolerance").get<double>();
    if (j.contains("fd_tolerance")) s.fd_tolerance = j.at("fd_tolerance").get<double>();
    if (j.contains("trajectory_tolerance")) s.trajectory_tolerance = j.at("trajectory_tolerance").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<unsigned long>();
    if (j.contains("samples")) s.samples = j.at("samples").get<int>();
    if (j.contains("interaction")) s.interaction = j.at("interaction");
    if (j.contains("complete_interaction")) s.complete_interaction = j.at("complete_interaction").get<bool>();
    if (j.contains("allow_truncation")) s.allow_truncation = j.at("allow_truncation").get<bool>();
    if (j.contains("checks")) s.checks = j.at("checks").get<std::vector<std::string>>();
    if (j.contains("output")) s.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
  return s;
}

json Scenario::to_json() const {
  json j;
  j["scalar"] = scalar;
  if (sampler) j["sampler"] = {{"dim", sampler->first}, {"seed", sampler->second}};
  else j["gl11"] = gl11;
  j["max_degree"] = max_degree;
  j["hbar_order"] = hbar_order;
  j["grid"] = grid;
  j["fd_step"] = fd_step;
  j["steps"] = steps;
  j["tolerance"] = tolerance;
  j["fd_tolerance"] = fd_tolerance;
  j["trajectory_tolerance"] = trajectory_tolerance;
  j["seed"] = seed;
  j["samples"] = samples;
  if (!interaction.is_null()) j["interaction"] = interaction;
  j["complete_interaction"] = complete_interaction;
  j["allow_truncation"] = allow_truncation;
  j["checks"] = checks;
  j["output"] = output;
  return j;
}

Scenario load_scenario(const std::string& path) {
  json j = read_json_file(path);
  // A report carries its scenario; re-running it reproduces the report.
  if (j.is_object() && j.contains("scenario") && j.contains("checks") && j.at("checks").is_array() &&
      j.at("checks").size() > 0 && j.at("checks")[0].is_object())
    j = j.at("scenario");
  std::string base = std::filesystem::path(path).parent_path().string();
  return Scenario::from_json(j, base.empty() ? "." : base);
}

json report_json(const Scenario& sc, const std::vector<CheckRecord>& records, bool pass, const std::vector<std::string>& notes,
                 const ReportOptions& opt) {
  json checks = json::array();
  for (const auto& c : records) {
    json r = {{"name", c.name},   {"residual", c.residual}, {"residual_text", c.residual_text},
              {"tolerance", c.tolerance}, {"pass", c.pass}, {"truncated", c.truncated}};
    if (opt.timing) r["wall_time"] = c.wall_time;
    checks.push_back(r);
  }
  return {{"version", "bvflow-report-1"}, {"pass", pass}, {"notes", notes}, {"checks", checks}, {"scenario", sc.to_json()}};
}

std::string report_csv(const std::vector<CheckRecord>& records, const ReportOptions& opt) {
  std::ostringstream o;
  o << "name,residual,tolerance,pass,truncated" << (opt.timing ? ",wall_time" : "") << "\n";
  for (const auto& c : records) {
    o << c.name << "," << c.residual_text << "," << Scalar<double>::str(c.tolerance) << "," << (c.pass ? "true" : "false") << ","
      << (c.truncated ? "true" : "false");
    if (opt.timing) o << "," << Scalar<double>::str(c.wall_time);
    o << "\n";
  }
  return o.str();
}

#define BVFLOW_INST(T)                                                                               \
  template T scalar_from_json<T>(const json&, const std::string&);                                   \
  template json scalar_to_json<T>(const T&);                                                         \
  template FreeModel<T> fixture_from_json<T>(const json&);                                           \
  template json fixture_to_json<T>(const FreeModel<T>&);                                             \
  template HbarSeries<T> series_from_json<T>(const json&, const std::shared_ptr<const Grading>&, int); \
  template json series_to_json<T>(const HbarSeries<T>&);
BVFLOW_INST(mpq_class)
BVFLOW_INST(double)
#undef BVFLOW_INST

}  // namespace bvflow::io

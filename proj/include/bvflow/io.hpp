#pragma once

#include "bvflow/perturbation.hpp"

#include <json.hpp>

#include <optional>

namespace bvflow::io {

using json = nlohmann::json;

// Malformed input or a violated invariant on load; maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rationals are "p/q" strings (or integers); float mode also accepts JSON numbers.
template <class T> T scalar_from_json(const json& j, const std::string& what);
template <class T> json scalar_to_json(const T& x);

// {degrees, omega, Q, Qbar, H}; F is derived. Throws InputError naming the violated invariant.
template <class T> FreeModel<T> fixture_from_json(const json& j);
template <class T> json fixture_to_json(const FreeModel<T>& m);
FreeModel<double> to_float(const FreeModel<mpq_class>& m);

// [{coeff, exponents, hbar_power}, ...]
template <class T> HbarSeries<T> series_from_json(const json& j, const std::shared_ptr<const Grading>& g, int order);
template <class T> json series_to_json(const HbarSeries<T>& s);
std::string monomial_name(const Monomial& m, int dim);

struct Scenario {
  std::string scalar = "rational";  // rational | f64
  json gl11;                        // inline fixture (a fixture path is resolved on load)
  std::optional<std::pair<int, unsigned long>> sampler;  // (dim, seed)
  int max_degree = 4;
  int hbar_order = 4;
  std::vector<std::string> grid = {"0", "1/2", "1"};
  std::string fd_step = "1/10000";
  int steps = 100;
  double tolerance = 0;  // static identities in float mode; 0 selects the default
  double fd_tolerance = 1e-7;
  double trajectory_tolerance = 1e-6;
  unsigned long seed = 1;
  int samples = 20;
  json interaction;  // polynomial literal, may be null
  bool complete_interaction = false;
  bool allow_truncation = false;
  std::vector<std::string> checks;
  std::string output = "json";

  static Scenario from_json(const json& j, const std::string& base_dir);
  json to_json() const;
};

const std::vector<std::string>& known_checks();
Scenario load_scenario(const std::string& path);
json read_json_file(const std::string& path);

struct ReportOptions {
  bool timing = false;
};

json report_json(const Scenario& sc, const std::vector<CheckRecord>& records, bool pass, const std::vector<std::string>& notes,
                 const ReportOptions& opt);
std::string report_csv(const std::vector<CheckRecord>& records, const ReportOptions& opt);

}  // namespace bvflow::io

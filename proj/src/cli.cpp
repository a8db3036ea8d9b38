#include "bvflow/cli.hpp"

#include "bvflow/identities.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace bvflow::cli {

using io::InputError;
using io::json;
using io::Scenario;

namespace {

constexpr const char* kVersion = "bvflow 1.0.0";

struct SuiteOut {
  std::vector<CheckRecord> records;
  std::vector<std::string> notes;
};

using Clock = std::chrono::steady_clock;

// Stamps records emitted since `from` with the time spent since `start`.
void stamp(std::vector<CheckRecord>& v, size_t from, Clock::time_point start) {
  const double dt = std::chrono::duration<double>(Clock::now() - start).count();
  for (size_t i = from; i < v.size(); ++i) v[i].wall_time = dt;
}

template <class T> std::vector<T> parse_grid(const Scenario& sc) {
  std::vector<T> g;
  for (const auto& s : sc.grid) g.push_back(io::scalar_from_json<T>(json(s), "grid"));
  return g;
}

template <class T> T parse_step(const Scenario& sc) { return io::scalar_from_json<T>(json(sc.fd_step), "fd_step"); }

template <class T> FreeModel<T> load_model(const Scenario& sc) {
  if (sc.sampler) return sample_gl11<T>(sc.sampler->first, sc.sampler->second);
  return io::fixture_from_json<T>(sc.gl11);
}

template <class T> double static_tol(const Scenario& sc, double float_default) {
  if (sc.tolerance > 0) return sc.tolerance;
  return Scalar<T>::exact ? 0.0 : float_default;
}

template <class T> double fd_tol(const Scenario& sc) { return Scalar<T>::exact ? 0.0 : sc.fd_tolerance; }

template <class T> T max_of(const T& a, const T& b) { return a < b ? b : a; }

HbarSeries<double> series_to_float(const HbarSeries<mpq_class>& s, const std::shared_ptr<const Grading>& g) {
  HbarSeries<double> r(g, s.order());
  for (int k = 0; k <= s.order(); ++k)
    for (const auto& [m, c] : s[k].terms()) r[k].add_term(m, c.get_d());
  return r;
}

int lowest_order(const Poly<double>& p) {
  int lo = std::numeric_limits<int>::max();
  for (const auto& [m, c] : p.terms()) {
    int d = 0;
    for (auto e : m.e) d += e;
    lo = std::min(lo, d);
  }
  return lo == std::numeric_limits<int>::max() ? 3 : lo;
}

template <class T> struct Suites {
  const Scenario& sc;
  FreeModel<T> m;
  std::vector<T> grid;
  T h;

  explicit Suites(const Scenario& s) : sc(s), m(load_model<T>(s)), grid(parse_grid<T>(s)), h(parse_step<T>(s)) {}

  const GradedBasis<T>& b() const { return m.basis; }
  int probe_degree(int cap) const { return std::min(sc.max_degree, cap); }

  SuiteOut identities() {
    SuiteOut o;
    IdentityOptions opt;
    opt.seed = sc.seed;
    opt.samples = sc.samples;
    opt.max_total = std::min(sc.max_degree, 5);
    auto t0 = Clock::now();
    o.records = identity_suite(b(), opt, sc.tolerance);
    stamp(o.records, 0, t0);
    return o;
  }

  SuiteOut gl11() {
    SuiteOut o;
    auto t0 = Clock::now();
    o.records = validate_gl11(b(), m.s, sc.tolerance);
    stamp(o.records, 0, t0);
    return o;
  }

  SuiteOut free_flow_suite() {
    SuiteOut o;
    auto& v = o.records;
    const double tol = static_tol<T>(sc, 1e-10);
    auto t0 = Clock::now();

    T qme(0);
    for (const auto& t : grid) {
      auto S = HbarSeries<T>::from_poly(free_action(m, t), 0);
      qme = max_of(qme, qme_residual(b(), S, free_laplacian(m, t), false).max_abs());
    }
    v.push_back(make_check("free.qme", qme, tol));
    stamp(v, 0, t0);

    t0 = Clock::now();
    size_t mark = v.size();
    auto F = free_family(m, grid, h, sc.max_degree);
    auto fs = flow_suite(b(), F, monomial_probes(b(), probe_degree(4)), SuiteTolerance{tol, fd_tol<T>(sc)}, "free.flow.");
    v.insert(v.end(), fs.begin(), fs.end());
    stamp(v, mark, t0);

    t0 = Clock::now();
    mark = v.size();
    T built(0);
    bool trunc = false;
    const auto probes = monomial_probes(b(), probe_degree(4));
    for (const auto& t : grid) {
      auto A = free_deformer(m, t);
      for (const auto& f : probes) {
        auto r = flow_built_laplacian(b(), F, grid.front(), t, f);
        trunc = trunc || r.truncated;
        built = max_of(built, (r.value - laplacian(b(), f, A)).max_abs());
      }
    }
    v.push_back(make_check("free.flow_built_laplacian", built, tol, trunc));

    T transport(0), drive(0);
    trunc = false;
    for (const auto& t : grid) {
      auto r = apply_flow(free_flow(m, t, grid.front(), sc.max_degree), free_action(m, grid.front()));
      trunc = trunc || r.truncated;
      transport = max_of(transport, (r.value - free_action(m, t)).max_abs());
      Poly<T> rate = ad_form(b(), m.s.H, free_action(m, t)).scaled(Scalar<T>::frac(1, 2));
      drive = max_of(drive, (free_action_rate(m, t) - rate).max_abs());
    }
    v.push_back(make_check("free.action_transport", transport, tol, trunc));
    v.push_back(make_check("free.hamiltonian_drive", drive, tol));
    stamp(v, mark, t0);
    return o;
  }

  // Polchinski projection by central differences, with the O(h^2) rate measured at h and h/2.
  static void polchinski_fd(const FreeModel<double>& fm, const std::vector<double>& g, double hd, const Scenario& sc,
                            SuiteOut& o) {
    double r1 = 0, worst_ratio_dev = 0;
    bool any_order = false;
    for (double t : g) {
      double a = polchinski_residual(fm, t, hd), c = polchinski_residual(fm, t, hd / 2);
      r1 = std::max(r1, a);
      // Rounding in the difference quotient is about eps |S| / h; below that floor the rate is noise.
      const double floor = 64 * std::numeric_limits<double>::epsilon() * (1 + free_action(fm, t).max_abs()) / hd;
      if (a > floor) {
        any_order = true;
        worst_ratio_dev = std::max(worst_ratio_dev, std::fabs(a / c - 4.0));
      }
    }
    o.records.push_back(make_check("extended.polchinski_fd", r1, sc.fd_tolerance));
    if (any_order) o.records.push_back(make_check("extended.polchinski_fd_order", worst_ratio_dev, 0.5));
    else o.notes.push_back("extended.polchinski_fd_order: residual at the rounding floor, no convergence rate to measure");
  }

  SuiteOut extended() {
    SuiteOut o;
    auto t0 = Clock::now();
    o.records = extended_suite(m, grid, probe_degree(3), static_tol<T>(sc, 1e-10));
    T exact(0);
    for (const auto& t : grid) exact = max_of(exact, polchinski_residual(m, t, T(0)));
    o.records.push_back(make_check("extended.polchinski", exact, static_tol<T>(sc, 1e-10)));
    if constexpr (Scalar<T>::exact) {
      std::vector<double> gd;
      for (const auto& t : grid) gd.push_back(t.get_d());
      polchinski_fd(io::to_float(m), gd, h.get_d(), sc, o);
      o.notes.push_back("extended.polchinski_fd: finite differences evaluated in float");
    } else {
      polchinski_fd(m, grid, h, sc, o);
    }
    stamp(o.records, 0, t0);
    return o;
  }

  static Generator<T> free_gen(const FreeModel<T>& fm, const T& t) {
    Generator<T> g;
    g.linear = free_generator_matrix(fm);
    g.hamiltonian = Poly<T>(fm.basis.grading());
    g.deformer = free_deformer(fm, t);
    g.r_dot = Poly<T>(fm.basis.grading());
    return g;
  }

  template <class U> static U image_error(const FlowMap<U>& a, const FlowMap<U>& c) {
    U e(0);
    for (size_t k = 0; k < a.images.size(); ++k) e = max_of(e, (a.images[k] - c.images[k]).max_abs());
    return e;
  }

  // RK4 error ratio at n and 2n steps against the closed form.
  static void rk4_order(const FreeModel<double>& fm, double s, double t, int steps, int D, SuiteOut& o) {
    auto gen = [&](const double& u) { return Suites<double>::free_gen(fm, u); };
    auto closed = free_flow(fm, t, s, D);
    const int n = std::max(2, steps / 4);
    double e1 = image_error(reconstruct_flow(fm.basis, std::function<Generator<double>(const double&)>(gen), s, t, n, D), closed);
    double e2 =
        image_error(reconstruct_flow(fm.basis, std::function<Generator<double>(const double&)>(gen), s, t, 2 * n, D), closed);
    if (e1 < 1e-13) {
      o.notes.push_back("reconstruct.rk4_order: RK4 reproduces the closed form to 1e-13 (nilpotent generator), no rate to measure");
      return;
    }
    o.records.push_back(make_check("reconstruct.rk4_order", std::fabs(e1 / e2 - 16.0), 3.0));
  }

  SuiteOut reconstruct() {
    SuiteOut o;
    auto& v = o.records;
    auto t0 = Clock::now();
    const T s = grid.front(), t = grid.back();
    std::function<Generator<T>(const T&)> gen = [this](const T& u) { return free_gen(m, u); };
    auto R = reconstruct_flow(b(), gen, s, t, sc.steps, sc.max_degree);
    auto closed = free_flow(m, t, s, sc.max_degree);
    v.push_back(make_check("reconstruct.free_images", image_error(R, closed), 1e-8, R.truncated));
    v.push_back(make_check("reconstruct.jacobian", R.log_jacobian.max_abs(), static_tol<T>(sc, 1e-10)));
    CanonicalMapWitness<T> w{R, free_deformer(m, s), free_deformer(m, t)};
    auto rep = canonical_residual(b(), w, monomial_probes(b(), probe_degree(3)), 2);
    // RK4 is approximate, so canonicality holds to the discretization error.
    v.push_back(make_check("reconstruct.canonical", rep.canonical, 1e-8, rep.truncated));

    T bl(0), ev(0);
    const auto probes = monomial_probes(b(), probe_degree(2));
    std::function<Endomorphism<T>(const T&)> deformer = [this](const T& u) { return free_deformer(m, u); };
    const int stencil = Scalar<T>::exact ? b().dim() : 1;
    for (const auto& u : grid) {
      auto hyp = check_generator(b(), gen, deformer, u, h, stencil, probes);
      bl = max_of(bl, hyp.bracket_law);
      ev = max_of(ev, hyp.evolution);
    }
    v.push_back(make_check("reconstruct.generator_bracket_law", bl, fd_tol<T>(sc)));
    v.push_back(make_check("reconstruct.generator_evolution", ev, fd_tol<T>(sc)));

    if constexpr (Scalar<T>::exact) rk4_order(io::to_float(m), s.get_d(), t.get_d(), sc.steps, sc.max_degree, o);
    else rk4_order(m, s, t, sc.steps, sc.max_degree, o);
    stamp(v, 0, t0);
    return o;
  }

  HbarSeries<T> interaction(std::vector<std::string>& notes) {
    if (sc.interaction.is_null()) throw InputError("perturbation: the scenario has no interaction");
    const int D = sc.max_degree, K = sc.hbar_order;
    HbarSeries<T> I = io::series_from_json<T>(sc.interaction, b().grading(), K);
    if (sc.complete_interaction) {
      for (int k = 1; k <= K; ++k)
        if (!I[k].is_zero()) throw InputError("perturbation: complete_interaction expects an hbar^0 literal");
      auto C = complete_interaction(m, I[0], grid.front(), D, K);
      if (!C.consistent) notes.push_back("perturbation: hbar corrections of the seed are not solvable in the window");
      I = C.series;
    }
    bool dropped = false;
    I = window(I, D, &dropped);
    if (dropped) notes.push_back("perturbation: interaction terms beyond the truncation window were dropped");
    try {
      check_series(I, 0, 2, "interaction");
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    return I;
  }

  SuiteOut perturbation(const std::string& trajectory_path) {
    SuiteOut o;
    auto& v = o.records;
    auto t0 = Clock::now();
    const int D = sc.max_degree;
    const T s = grid.front();
    const double tol = static_tol<T>(sc, 1e-9);
    HbarSeries<T> I = interaction(o.notes);

    v.push_back(make_check("perturbation.me_initial", interaction_me_residual(m, I, s, D).max_abs(), tol));
    v.push_back(make_check("perturbation.full_vs_interaction",
                           (full_me_residual(m, I, s, D) - interaction_me_residual(m, I, s, D)).max_abs(),
                           static_tol<T>(sc, 1e-12)));

    Poly<double> lead(b().grading());
    for (const auto& [mo, c] : I[0].terms()) lead.add_term(mo, Scalar<T>::to_double(c));
    auto P = partner_solve(m, I, s, D, std::max(2, lowest_order(lead)));
    const double ptol = Scalar<T>::exact ? 0.0 : 1e-8;
    if (P.consistent) {
      v.push_back(make_check("perturbation.partner_residual", P.residual, ptol));
      v.push_back(make_check("perturbation.full_partner", full_partner_residual(m, I, P.series, s, D).max_abs(), ptol));
      v.push_back(make_check("perturbation.transport", transport_residual(m, I, P.series, s, D).max_abs(), ptol));
      std::function<Generator<T>(const T&)> gen = [&](const T& u) { return generator_component(m, P.series, u, 0); };
      std::function<Endomorphism<T>(const T&)> deformer = [this](const T& u) { return free_deformer(m, u); };
      auto hyp = check_generator(b(), gen, deformer, s, h, Scalar<T>::exact ? b().dim() : 1,
                                 monomial_probes(b(), probe_degree(2)));
      v.push_back(make_check("perturbation.generator_bracket_law", hyp.bracket_law, fd_tol<T>(sc)));
      v.push_back(make_check("perturbation.generator_evolution", hyp.evolution, fd_tol<T>(sc)));
    } else {
      o.notes.push_back("perturbation.partner_residual: no solution in the window, residual " + Scalar<T>::str(P.residual) +
                        "; partner checks skipped");
    }
    stamp(v, 0, t0);

    t0 = Clock::now();
    const size_t mark = v.size();
    if constexpr (Scalar<T>::exact) {
      auto fm = io::to_float(m);
      std::vector<double> gd;
      for (const auto& t : grid) gd.push_back(t.get_d());
      trajectory(fm, series_to_float(I, fm.basis.grading()), gd, h.get_d(), sc, o, trajectory_path);
      o.notes.push_back("perturbation trajectory integrated in float");
    } else {
      trajectory(m, I, grid, h, sc, o, trajectory_path);
    }
    stamp(v, mark, t0);
    return o;
  }

  static void trajectory(const FreeModel<double>& fm, const HbarSeries<double>& I0, const std::vector<double>& g, double h,
                         const Scenario& sc, SuiteOut& o, const std::string& path) {
    const int D = sc.max_degree;
    const double span = g.back() - g.front();
    std::vector<HbarSeries<double>> states{I0};
    bool trunc = false;
    for (size_t k = 1; k < g.size(); ++k) {
      int n = std::max(2, static_cast<int>(std::ceil(sc.steps * (g[k] - g[k - 1]) / span)));
      auto r = rge_evolve(fm, states.back(), g[k - 1], g[k], n, D);
      trunc = trunc || r.truncated;
      states.push_back(r.value);
    }
    double me = 0, split = 0;
    for (size_t k = 0; k < g.size(); ++k) {
      me = std::max(me, interaction_me_residual(fm, states[k], g[k], D).max_abs());
      auto fwd = rge_evolve(fm, states[k], g[k], g[k] + h, 2, D).value;
      auto bwd = rge_evolve(fm, states[k], g[k], g[k] - h, 2, D).value;
      auto dIdt = (fwd - bwd).scaled(1.0 / (2 * h));
      split = std::max(split, polchinski_split_residual(fm, states[k], dIdt, g[k], D).max_abs());
    }
    o.records.push_back(make_check("perturbation.trajectory_me", me, sc.trajectory_tolerance, trunc));
    o.records.push_back(make_check("perturbation.polchinski_split", split, sc.fd_tolerance));

    const int n = std::max(2, sc.steps / 8);
    auto ref = rge_evolve(fm, I0, g.front(), g.back(), 16 * n, D).value;
    double e1 = (rge_evolve(fm, I0, g.front(), g.back(), n, D).value - ref).max_abs();
    double e2 = (rge_evolve(fm, I0, g.front(), g.back(), 2 * n, D).value - ref).max_abs();
    if (e1 < 1e-13) o.notes.push_back("perturbation.rk4_order: RK4 exact to 1e-13 on this interaction, no rate to measure");
    else o.records.push_back(make_check("perturbation.rk4_order", std::fabs(e1 / e2 - 16.0), 3.0));

    if (!path.empty()) {
      std::ofstream f(path);
      if (!f) throw InputError("cannot write " + path);
      f << "t,hbar_order,monomial,coeff\n";
      const int dim = fm.basis.dim();
      for (size_t k = 0; k < g.size(); ++k)
        for (int q = 0; q <= states[k].order(); ++q)
          for (const auto& [mo, c] : states[k][q].terms())
            f << Scalar<double>::str(g[k]) << "," << q << "," << io::monomial_name(mo, dim) << "," << Scalar<double>::str(c)
              << "\n";
    }
  }

  SuiteOut run(const std::string& name, const std::string& trajectory_path) {
    if (name == "identities") return identities();
    if (name == "gl11") return gl11();
    if (name == "free-flow") return free_flow_suite();
    if (name == "extended") return extended();
    if (name == "reconstruct") return reconstruct();
    if (name == "perturbation") return perturbation(trajectory_path);
    throw InputError("unknown check \"" + name + "\"");
  }
};

int thread_cap() {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* e = std::getenv("BVFLOW_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(e, &end, 10);
    if (end != e && n > 0) cap = static_cast<int>(n);
  }
  return std::max(1, cap);
}

template <class T> RunResult run_typed(const Scenario& sc, bool timing, const std::string& trajectory_path) {
  std::vector<std::string> checks = effective_checks(sc);
  std::sort(checks.begin(), checks.end());
  checks.erase(std::unique(checks.begin(), checks.end()), checks.end());

  const Suites<T> proto(sc);
  std::vector<SuiteOut> outs(checks.size());
  std::vector<std::exception_ptr> errs(checks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    Suites<T> local = proto;  // private copy: suites share no mutable state
    for (size_t i; (i = next++) < checks.size();) {
      try {
        outs[i] = local.run(checks[i], trajectory_path);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(thread_cap(), static_cast<int>(checks.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  RunResult r;
  for (auto& o : outs) {
    r.records.insert(r.records.end(), o.records.begin(), o.records.end());
    r.notes.insert(r.notes.end(), o.notes.begin(), o.notes.end());
  }
  if (!timing)
    for (auto& c : r.records) c.wall_time = 0;
  r.pass = all_pass(r.records);
  std::vector<std::string> truncated;
  for (const auto& c : r.records)
    if (c.truncated) truncated.push_back(c.name);
  if (!truncated.empty()) {
    std::string names;
    for (const auto& t : truncated) names += (names.empty() ? "" : ", ") + t;
    if (sc.allow_truncation) {
      r.notes.push_back("truncation allowed: " + names);
    } else {
      r.notes.push_back("failed: truncation without allow_truncation in " + names);
      r.pass = false;
    }
  }
  r.exit_code = r.pass ? 0 : 1;
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

}  // namespace

std::vector<std::string> effective_checks(const Scenario& sc) {
  if (!sc.checks.empty()) return sc.checks;
  std::vector<std::string> c = {"extended", "free-flow", "gl11", "identities", "reconstruct"};
  if (!sc.interaction.is_null()) c.push_back("perturbation");
  return c;
}

void validate_scenario(const Scenario& sc) {
  if (sc.scalar != "rational" && sc.scalar != "f64") throw InputError("scalar must be rational or f64, got " + sc.scalar);
  if (sc.output != "json" && sc.output != "csv") throw InputError("output must be json or csv, got " + sc.output);
  if (sc.max_degree < 2 || sc.max_degree > 12) throw InputError("max_degree must lie in 2..12");
  if (sc.hbar_order < 0 || sc.hbar_order > 12) throw InputError("hbar_order must lie in 0..12");
  if (sc.steps < 2) throw InputError("steps must be at least 2");
  if (sc.samples < 1) throw InputError("samples must be positive");
  if (sc.tolerance < 0) throw InputError("tolerance must be positive");
  if (!(sc.fd_tolerance > 0) || !(sc.trajectory_tolerance > 0)) throw InputError("tolerances must be positive");
  for (const auto& c : sc.checks) {
    const auto& k = io::known_checks();
    if (std::find(k.begin(), k.end(), c) == k.end()) throw InputError("unknown check \"" + c + "\"");
  }
  if (sc.grid.size() < 2) throw InputError("grid needs at least two points");
  auto check_order = [&](auto tag) {
    using T = decltype(tag);
    auto g = parse_grid<T>(sc);
    for (size_t k = 1; k < g.size(); ++k)
      if (!(g[k - 1] < g[k])) throw InputError("grid must be strictly increasing");
    if (!(T(0) < parse_step<T>(sc))) throw InputError("fd_step must be positive");
  };
  if (sc.scalar == "rational") check_order(mpq_class());
  else check_order(0.0);
}

RunResult run_scenario(const Scenario& sc, bool timing, const std::string& trajectory_path) {
  validate_scenario(sc);
  if (sc.scalar == "rational") return run_typed<mpq_class>(sc, timing, trajectory_path);
  return run_typed<double>(sc, timing, trajectory_path);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flows of deformed BV Laplacians: identity suites, free and extended flows, perturbative evolution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string scenario_path, fixture, out_path, csv_path, trajectory, scalar, output, grid, fd_step;
  int max_degree = 0, hbar_order = -1, steps = 0;
  double tolerance = -1;
  long seed = -1;
  bool timing = false;

  auto add_common = [&](CLI::App* c) {
    c->add_option("scenario", scenario_path, "Scenario JSON (a previous report is accepted)");
    c->add_option("--scalar", scalar, "rational | f64");
    c->add_option("--max-degree", max_degree, "Polynomial truncation degree");
    c->add_option("--hbar-order", hbar_order, "hbar truncation order");
    c->add_option("--grid", grid, "Comma separated t values, e.g. 0,1/2,1");
    c->add_option("--fd-step", fd_step, "Finite difference step");
    c->add_option("--steps", steps, "RK4 steps over the grid span");
    c->add_option("--tolerance", tolerance, "Tolerance for static identities in float mode");
    c->add_option("--seed", seed, "Seed for randomized suites");
    c->add_option("--output", output, "json | csv");
    c->add_option("--fixture", fixture, "gl(1|1) fixture JSON replacing the scenario's");
    c->add_option("--out", out_path, "Write the report here instead of stdout");
    c->add_option("--csv", csv_path, "Also write a CSV report here");
    c->add_flag("--timing", timing, "Record wall time per check");
  };
  auto* check = app.add_subcommand("check", "Run the scenario's suites");
  auto* flow = app.add_subcommand("flow", "Free and extended flow suites");
  auto* evolve = app.add_subcommand("evolve", "Perturbative evolution suite");
  auto* recon = app.add_subcommand("reconstruct", "Flow reconstruction from the free generator");
  for (auto* c : {check, flow, evolve, recon}) add_common(c);
  evolve->add_option("--trajectory", trajectory, "Write the evolved interaction as CSV");

  auto* sample = app.add_subcommand("sample", "Search a gl(1|1) structure and print it as a fixture");
  int dim = 0;
  unsigned long sample_seed = 0;
  std::string sample_scalar = "rational", sample_out;
  sample->add_option("--dim", dim, "2, 4 or 6")->required();
  sample->add_option("--seed", sample_seed, "Search seed")->required();
  sample->add_option("--scalar", sample_scalar, "rational | f64");
  sample->add_option("--out", sample_out, "Write the fixture here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sample->parsed()) {
      json j;
      if (sample_scalar == "rational") j = io::fixture_to_json(sample_gl11<mpq_class>(dim, sample_seed));
      else if (sample_scalar == "f64") j = io::fixture_to_json(sample_gl11<double>(dim, sample_seed));
      else throw InputError("scalar must be rational or f64");
      const std::string text = j.dump(2) + "\n";
      if (sample_out.empty()) out << text;
      else write_text(sample_out, text);
      return 0;
    }

    Scenario sc;
    if (!scenario_path.empty()) sc = io::load_scenario(scenario_path);
    else if (fixture.empty()) throw InputError("a scenario or --fixture is required");
    if (!fixture.empty()) {
      sc.gl11 = io::read_json_file(fixture);
      sc.sampler.reset();
    }
    if (!scalar.empty()) sc.scalar = scalar;
    if (max_degree) sc.max_degree = max_degree;
    if (hbar_order >= 0) sc.hbar_order = hbar_order;
    if (!grid.empty()) {
      sc.grid.clear();
      std::stringstream ss(grid);
      for (std::string item; std::getline(ss, item, ',');) sc.grid.push_back(item);
    }
    if (!fd_step.empty()) sc.fd_step = fd_step;
    if (steps) sc.steps = steps;
    if (tolerance >= 0) {
      if (tolerance == 0) throw InputError("tolerance must be positive");
      sc.tolerance = tolerance;
    }
    if (seed >= 0) sc.seed = static_cast<unsigned long>(seed);
    if (!output.empty()) sc.output = output;
    if (flow->parsed()) sc.checks = {"extended", "free-flow"};
    if (evolve->parsed()) sc.checks = {"perturbation"};
    if (recon->parsed()) sc.checks = {"reconstruct"};
    if (sc.checks.empty()) sc.checks = effective_checks(sc);
    if (!sc.sampler && sc.gl11.is_null()) throw InputError("the scenario names no gl(1|1) structure");

    RunResult r = run_scenario(sc, timing, trajectory);
    io::ReportOptions ro{timing};
    const std::string text = sc.output == "csv" ? io::report_csv(r.records, ro)
                                                : io::report_json(sc, r.records, r.pass, r.notes, ro).dump(2) + "\n";
    if (out_path.empty()) out << text;
    else write_text(out_path, text);
    if (!csv_path.empty()) write_text(csv_path, io::report_csv(r.records, ro));
    for (const auto& n : r.notes)
      if (n.rfind("failed:", 0) == 0) err << n << "\n";
    for (const auto& c : r.records)
      if (!c.pass) err << "FAIL " << c.name << " residual " << c.residual_text << " tolerance " << c.tolerance << "\n";
    return r.exit_code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bvflow::cli

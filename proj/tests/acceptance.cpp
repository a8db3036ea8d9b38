// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "support.hpp"

#include "bvflow/cli.hpp"
#include "bvflow/identities.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

using namespace bvtest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string source(const std::string& rel) { return std::string(BVFLOW_SOURCE_DIR) + "/" + rel; }

template <class T = Q> FreeModel<T> load(const std::string& name) {
  return io::fixture_from_json<T>(io::read_json_file(source("fixtures/" + name)));
}

struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<Q> grid_q() { return {Q(0), Q(1, 4), Q(1, 2), Q(3, 4), Q(1)}; }
std::vector<double> grid_f() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

bool failing(const std::vector<CheckRecord>& v, const std::string& name) {
  for (const auto& c : v)
    if (c.name == name) return !c.pass;
  return false;
}

void criterion1(Verdict& v) {
  auto t0 = Clock::now();
  std::vector<GradedBasis<Q>> bases;
  for (const auto& b : basis_zoo())
    if (b.dim() == 4) bases.push_back(b);
  auto res = sign_pinning_search(bases, 5, 4);
  const double secs = seconds_since(t0);
  v.detail << "candidates " << res.candidates << ", survivors " << res.survivors.size() << ", " << secs << " s";
  v.require(res.survivors.size() == 1, "exactly one survivor");
  v.require(!res.survivors.empty() && res.survivors[0] == SignConvention::pinned(), "survivor is the frozen convention");
  v.require(secs < 10, "under 10 s");
}

void criterion2(Verdict& v) {
  auto t0 = Clock::now();
  std::map<std::string, int> tuples;
  std::map<std::string, bool> exact;
  unsigned long seed = 7;
  for (const auto& b : basis_zoo()) {
    IdentityOptions opt;
    opt.seed = seed++;
    opt.samples = 40;
    opt.max_total = 5;
    for (const auto& c : identity_suite(b, opt)) {
      tuples[c.name] += opt.samples;
      exact.try_emplace(c.name, true);
      exact[c.name] = exact[c.name] && c.pass && c.residual_text == "0";
    }
  }
  const double secs = seconds_since(t0);
  int min_tuples = tuples.empty() ? 0 : 1 << 30;
  for (const auto& [n, k] : tuples) min_tuples = std::min(min_tuples, k);
  v.detail << tuples.size() << " identities, >= " << min_tuples << " tuples each, " << secs << " s";
  for (const char* name : {"identities.seven_term", "identities.laplacian_square", "identities.laplacian_commute",
                           "identities.antisymmetry", "identities.jacobi", "identities.leibniz",
                           "identities.bracket_from_laplacian"})
    v.require(tuples.count(name) == 1, std::string("ran ") + name);
  for (const auto& [n, ok] : exact) v.require(ok, n + " exactly zero");
  v.require(min_tuples >= 200, ">= 200 tuples");
  v.require(secs < 60, "under 60 s");
}

void criterion3(Verdict& v) {
  for (const char* name : {"gl11_dim2.json", "gl11_dim4.json"}) {
    auto m = load(name);
    auto recs = validate_gl11(m.basis, m.s);
    bool all = recs.size() == gl11_axiom_names().size();
    for (const auto& r : recs) all = all && r.pass && r.residual_text == "0";
    v.require(all, std::string(name) + " exact");
  }
  auto m = load("gl11_dim4.json");
  auto s = m.s;
  s.Q = Q(2) * s.Q;
  v.require(failing(validate_gl11(m.basis, s), "gl11.comm_QQbar_H"), "scaled Q names comm_QQbar_H");
  s = m.s;
  s.F = s.F + Endomorphism<Q>::identity(4);
  v.require(failing(validate_gl11(m.basis, s), "gl11.transpose_F"), "shifted F names transpose_F");
  auto d2 = load("gl11_dim2.json");
  auto s2 = d2.s;
  s2.H = Endomorphism<Q>::zero(2, 0);
  s2.H.m(0, 0) = 1;
  v.require(failing(validate_gl11(d2.basis, s2), "gl11.trace_H"), "traceful H names trace_H");
  auto j = io::fixture_to_json(m);
  j["Qbar"] = io::fixture_to_json(sample_gl11<Q>(4, 2))["Qbar"];
  std::string msg;
  try {
    io::fixture_from_json<Q>(j);
  } catch (const io::InputError& e) {
    msg = e.what();
  }
  v.require(msg.find("axiom gl11.") != std::string::npos, "loader names the axiom");
  v.detail << "15 checks at dims 2 and 4; loader: " << (msg.empty() ? "accepted" : msg);
}

void criterion4(Verdict& v) {
  auto m = load("gl11_dim4.json");
  bool qme_exact = true;
  for (const auto& t : grid_q())
    qme_exact = qme_exact && qme_residual(m.basis, HbarSeries<Q>::from_poly(free_action(m, t), 0), free_laplacian(m, t), false).is_zero();
  auto g = load<double>("gl11_ghost.json");
  double qme_f = 0;
  for (double t : grid_f())
    qme_f = std::max(qme_f, qme_residual(g.basis, HbarSeries<double>::from_poly(free_action(g, t), 0), free_laplacian(g, t), false).max_abs());
  v.require(qme_exact, "rational QME exact");
  v.require(qme_f <= 1e-10, "float QME <= 1e-10");

  double worst = 0;
  bool pass = true;
  auto F = free_family(m, grid_q(), Q(1, 10000), 6);
  for (const auto& r : flow_suite(m.basis, F, monomial_probes(m.basis, 4), SuiteTolerance{0, 1e-7})) pass = pass && r.pass;
  auto G = free_family(g, grid_f(), 1e-4, 6);
  for (const auto& r : flow_suite(g.basis, G, monomial_probes(g.basis, 3), SuiteTolerance{1e-7, 1e-7})) {
    pass = pass && r.pass;
    worst = std::max(worst, r.residual);
  }
  v.require(pass, "flow suites within 1e-7");

  bool built = true;
  for (const auto& t : grid_q())
    for (const auto& f : monomial_probes(m.basis, 4))
      built = built && flow_built_laplacian(m.basis, F, Q(0), t, f).value == laplacian(m.basis, f, free_deformer(m, t));
  v.require(built, "conjugation-built Laplacian exact on degree <= 4");
  v.detail << "float QME " << qme_f << ", float flow suite worst " << worst;
}

void criterion5(Verdict& v) {
  auto m = load("gl11_dim4.json");
  bool exact = true;
  for (const auto& r : extended_suite(m, grid_q(), 3, 0)) exact = exact && r.pass && r.residual_text == "0";
  for (const auto& t : grid_q()) {
    auto X = extended_family(m, t);
    exact = exact && soul_derivation(m, X.action.body) == X.action.soul;
  }
  v.require(exact, "rational extended suite exact");
  auto g = load<double>("gl11_ghost.json");
  double me = 0;
  for (double t : grid_f()) {
    auto r = extended_me_residual(g, t);
    me = std::max({me, r.body, r.soul});
  }
  v.require(me <= 1e-10, "float extended ME <= 1e-10");
  double p1 = 0, dev = 0;
  for (double t : grid_f()) {
    const double a = polchinski_residual(g, t, 1e-4), c = polchinski_residual(g, t, 5e-5);
    p1 = std::max(p1, a);
    dev = std::max(dev, std::fabs(a / c - 4));
  }
  v.require(p1 <= 1e-7, "Polchinski residual <= 1e-7 at h = 1e-4");
  v.require(dev <= 0.5, "ratio r(h)/r(h/2) within 4 +- 0.5");
  v.detail << "float ME " << me << ", Polchinski " << p1 << ", order deviation " << dev;
}

void criterion6(Verdict& v) {
  auto g = load<double>("gl11_ghost.json");
  std::function<Generator<double>(const double&)> gen = [&](const double& t) {
    return Generator<double>{free_generator_matrix(g), Poly<double>(g.basis.grading()), free_deformer(g, t),
                             Poly<double>(g.basis.grading())};
  };
  auto closed = free_flow(g, 1.0, 0.0, 6);
  auto err = [&](int steps) {
    auto R = reconstruct_flow(g.basis, gen, 0.0, 1.0, steps, 6);
    double e = 0;
    for (int k = 0; k < g.basis.dim(); ++k) e = std::max(e, (R.images[k] - closed.images[k]).max_abs());
    return e;
  };
  const double e100 = err(100), ratio = err(25) / err(50);
  v.require(e100 <= 1e-8, "100 steps within 1e-8");
  v.require(std::fabs(ratio - 16) <= 3, "ratio 16 +- 3");
  v.detail << "error at 100 steps " << e100 << ", ratio " << ratio;
}

void criterion7(Verdict& v) {
  auto g = load<double>("gl11_ghost.json");
  auto C = complete_interaction(g, Poly<double>::from_factors(g.basis.grading(), {1, 2, 3}, 0.3), 0.0, 6, 4);
  const double me0 = interaction_me_residual(g, C.series, 0.0, 6).max_abs();
  v.require(C.consistent && me0 <= 1e-9, "seed ME <= 1e-9");
  auto ev = rge_evolve(g, C.series, 0.0, 1.0, 200, 6);
  const double me1 = interaction_me_residual(g, ev.value, 1.0, 6).max_abs();
  v.require(me1 <= 1e-6, "evolved ME <= 1e-6");

  auto m = load("gl11_dim4.json");
  Rng r(701);
  bool identical = true;
  for (int trial = 0; trial < 5; ++trial) {
    HbarSeries<Q> I(m.basis.grading(), 2);
    I[0] = random_poly(m.basis, 0, 5, 4, r);
    I[1] = random_poly(m.basis, 0, 3, 3, r);
    I = window(I, 5);
    identical = identical && (full_me_residual(m, I, Q(1, 2), 5) - interaction_me_residual(m, I, Q(1, 2), 5)).is_zero();
  }
  v.require(identical, "full and interaction residuals identical");

  auto P = partner_solve(g, C.series, 0.0, 6, 3);
  v.detail << "seed ME " << me0 << ", ME after evolution " << me1 << (ev.truncated ? " (window truncated)" : "")
           << ", partner residual " << P.residual << (P.consistent ? "" : " (no solution)");
  if (P.consistent) {
    const double full = full_partner_residual(g, C.series, P.series, 0.0, 6).max_abs();
    v.detail << ", full partner " << full;
    v.require(full <= 1e-8, "full partner <= 1e-8");
  }
}

struct Proc {
  int code;
  std::string out;
};

Proc run_binary(const std::string& bin, const std::string& args) {
  Proc p{-1, {}};
  FILE* f = ::popen((bin + " " + args + " 2>/dev/null").c_str(), "r");
  if (!f) return p;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) p.out.append(buf, n);
  const int st = ::pclose(f);
  p.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

Proc run_inprocess(const std::string& args) {
  std::vector<std::string> parts{"bvflow"};
  std::istringstream in(args);
  for (std::string w; in >> w;) parts.push_back(w);
  std::vector<const char*> argv;
  for (const auto& s : parts) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

void criterion8(Verdict& v) {
  const char* bin = std::getenv("BVFLOW_BIN");
  auto go = [&](const std::string& args) { return bin ? run_binary(bin, args) : run_inprocess(args); };
  v.detail << (bin ? "binary" : "in-process");
  for (const char* scen : {"scenarios/dim2_all.json", "scenarios/dim4_all.json"}) {
    auto a = go("check " + source(scen)), b = go("check " + source(scen));
    v.require(a.code == 0 && !a.out.empty() && a.out == b.out, std::string("byte-identical ") + scen);
  }
  v.require(go("check " + source("scenarios/minimal.json")).code == 0, "pass scenario exits 0");
  v.require(go("check " + source("scenarios/fail.json")).code == 1, "failing scenario exits 1");
  v.require(go("check " + source("scenarios/parse_error.json")).code == 2, "malformed scenario exits 2");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, void (*)(Verdict&)>> criteria = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                                                                      {4, criterion4}, {5, criterion5}, {6, criterion6},
                                                                      {7, criterion7}, {8, criterion8}};
  auto t0 = Clock::now();
  int failed = 0;
  for (const auto& [n, fn] : criteria) {
    Verdict v;
    auto t = Clock::now();
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    std::cout << "criterion " << n << ": " << (v.ok ? "PASS" : "FAIL") << "  " << v.detail.str() << "  ("
              << seconds_since(t) << " s)" << std::endl;
    failed += v.ok ? 0 : 1;
  }
  std::cout << "total " << seconds_since(t0) << " s, " << failed << " failed" << std::endl;
  return failed == 0 ? 0 : 1;
}

#include "doctest.h"
#include "support.hpp"

#include "bvflow/cli.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bvtest;
namespace fs = std::filesystem;

namespace {

std::string source(const std::string& rel) { return std::string(BVFLOW_SOURCE_DIR) + "/" + rel; }

struct Out {
  int code;
  std::string out, err;
};

Out run(std::vector<std::string> args) {
  args.insert(args.begin(), "bvflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("bvflow_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& text) {
  auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

int exit_status(const std::string& cmd) {
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("exit codes: pass, check failure, parse error") {
  CHECK(run({"check", source("scenarios/minimal.json")}).code == 0);
  CHECK(run({"check", source("scenarios/dim2_all.json")}).code == 0);
  auto fail = run({"check", source("scenarios/fail.json")});
  CHECK(fail.code == 1);
  CHECK(fail.err.find("FAIL perturbation.me_initial") != std::string::npos);
  auto bad = run({"check", source("scenarios/parse_error.json")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("omega") != std::string::npos);
  CHECK(run({"check", source("scenarios/missing.json")}).code == 2);
  CHECK(run({"check", "--no-such-flag", source("scenarios/minimal.json")}).code == 2);
  CHECK(run({"sample", "--dim", "3"}).code == 2);
}

TEST_CASE("the installed binary honours the same exit codes") {
  const char* bin = std::getenv("BVFLOW_BIN");
  if (!bin) {
    MESSAGE("BVFLOW_BIN not set; skipped");
    return;
  }
  const std::string b = bin;
  CHECK(exit_status(b + " check " + source("scenarios/minimal.json") + " > /dev/null") == 0);
  CHECK(exit_status(b + " check " + source("scenarios/fail.json") + " > /dev/null 2>&1") == 1);
  CHECK(exit_status(b + " check " + source("scenarios/parse_error.json") + " > /dev/null 2>&1") == 2);
  CHECK(exit_status(b + " --version > /dev/null") == 0);
}

TEST_CASE("rational reports are byte-identical across runs") {
  auto a = run({"check", source("scenarios/dim2_all.json")});
  auto c = run({"check", source("scenarios/dim2_all.json")});
  REQUIRE(a.code == 0);
  CHECK(a.out == c.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["version"] == "bvflow-report-1");
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() > 20);
  for (const auto& r : j["checks"]) {
    CHECK(r.contains("name"));
    CHECK(r["residual_text"] == "0");
    CHECK(r["pass"] == true);
  }
}

TEST_CASE("a report re-run as a scenario reproduces itself") {
  auto first = run({"check", source("scenarios/dim2_all.json"), "--out", (scratch() / "r1.json").string()});
  REQUIRE(first.code == 0);
  CHECK(first.out.empty());
  auto second = run({"check", (scratch() / "r1.json").string(), "--out", (scratch() / "r2.json").string()});
  REQUIRE(second.code == 0);
  CHECK(slurp(scratch() / "r1.json") == slurp(scratch() / "r2.json"));
}

TEST_CASE("CSV output") {
  auto r = run({"check", source("scenarios/minimal.json"), "--output", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "name,residual,tolerance,pass,truncated");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    ++rows;
  }
  CHECK(rows > 0);

  auto t = run({"check", source("scenarios/minimal.json"), "--csv", (scratch() / "t.csv").string(), "--timing"});
  REQUIRE(t.code == 0);
  CHECK(slurp(scratch() / "t.csv").rfind("name,residual,tolerance,pass,truncated,wall_time\n", 0) == 0);
}

TEST_CASE("command-line overrides and verbs") {
  auto r = run({"check", source("scenarios/minimal.json"), "--grid", "0,1/3,1", "--max-degree", "3"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["scenario"]["grid"] == nlohmann::json::array({"0", "1/3", "1"}));
  CHECK(j["scenario"]["max_degree"] == 3);

  auto f = run({"flow", source("scenarios/dim2_all.json")});
  REQUIRE(f.code == 0);
  std::set<std::string> prefixes;
  const auto fj = nlohmann::json::parse(f.out);
  for (const auto& c : fj["checks"]) {
    const std::string n = c["name"];
    prefixes.insert(n.substr(0, n.find('.')));
  }
  CHECK(prefixes == std::set<std::string>{"extended", "free"});

  auto rc = run({"reconstruct", source("scenarios/dim2_all.json")});
  CHECK(rc.code == 0);
  const auto rj = nlohmann::json::parse(rc.out);
  for (const auto& c : rj["checks"]) CHECK(c["name"].get<std::string>().rfind("reconstruct.", 0) == 0);

  auto traj = scratch() / "traj.csv";
  auto ev = run({"evolve", source("scenarios/ghost_f64.json"), "--trajectory", traj.string()});
  CHECK(ev.code == 0);
  CHECK(slurp(traj).rfind("t,hbar_order,monomial,coeff\n", 0) == 0);
}

TEST_CASE("sample prints a loadable fixture") {
  auto s = run({"sample", "--dim", "4", "--seed", "1"});
  REQUIRE(s.code == 0);
  std::ifstream in(source("fixtures/gl11_dim4.json"));
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(s.out == ss.str());
  auto f = run({"sample", "--dim", "6", "--seed", "2", "--scalar", "f64"});
  CHECK(f.code == 0);
  CHECK_NOTHROW(io::fixture_from_json<double>(nlohmann::json::parse(f.out)));
}

TEST_CASE("malformed scenarios exit with code 2") {
  const std::string fx = "\"" + source("fixtures/gl11_dim2.json") + "\"";
  auto scen = [&](const std::string& name, const std::string& body) { return write(name, body).string(); };
  CHECK(run({"check", scen("unknown_key.json", "{\"fixture\": " + fx + ", \"colour\": 1}")}).code == 2);
  CHECK(run({"check", scen("unknown_check.json", "{\"fixture\": " + fx + ", \"checks\": [\"nope\"]}")}).code == 2);
  CHECK(run({"check", scen("bad_grid.json", "{\"fixture\": " + fx + ", \"grid\": [\"1\", \"0\"]}")}).code == 2);
  CHECK(run({"check", scen("short_grid.json", "{\"fixture\": " + fx + ", \"grid\": [\"0\"]}")}).code == 2);
  CHECK(run({"check", scen("bad_scalar.json", "{\"fixture\": " + fx + ", \"scalar\": \"f32\"}")}).code == 2);
  CHECK(run({"check", scen("two_sources.json", "{\"fixture\": " + fx + ", \"sampler\": {\"dim\": 2, \"seed\": 1}}")}).code == 2);
  CHECK(run({"check", scen("not_json.json", "{ fixture")}).code == 2);
  CHECK(run({"check", scen("float_rational.json", "{\"fixture\": " + fx + ", \"grid\": [0, 0.5]}")}).code == 2);
  CHECK(run({"check", scen("degree.json", "{\"fixture\": " + fx + ", \"max_degree\": 40}")}).code == 2);
}

TEST_CASE("truncation without permission fails the run") {
  auto r = run({"check", source("scenarios/ghost_f64.json")});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  bool truncated = false;
  for (const auto& c : j["checks"]) truncated = truncated || c["truncated"].get<bool>();
  if (truncated) {
    auto sc = nlohmann::json::parse(slurp(source("scenarios/ghost_f64.json")));
    sc["allow_truncation"] = false;
    sc["fixture"] = source("fixtures/gl11_ghost.json");
    auto p = write("no_trunc.json", sc.dump());
    auto f = run({"check", p.string()});
    CHECK(f.code == 1);
    CHECK(f.out.find("truncation without allow_truncation") != std::string::npos);
  }
}

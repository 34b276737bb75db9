#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "symprox/cli.hpp"
#include "symprox/errors.hpp"
#include "symprox/io.hpp"

using namespace symprox;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / "symprox_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

int cli(std::vector<std::string> args) { return run_cli(args); }

// Runs the installed binary, capturing stderr.
int binary(const std::string& args, std::string* err) {
  const char* bin = std::getenv("SYMPROX_BIN");
  REQUIRE(bin != nullptr);
  auto log = fs::temp_directory_path() / "symprox_test_cli" / "stderr.txt";
  int rc = std::system((std::string(bin) + " " + args + " >/dev/null 2>" + log.string()).c_str());
  if (err) *err = slurp(log);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Json small_fig1() {
  auto j = bundled_config("fig1_sowl");
  j["trials"] = 2;
  j["grid_size"] = 1024;
  return j;
}

}  // namespace

TEST_CASE("bundled configs") {
  auto names = bundled_config_names();
  CHECK(names.size() == 6);
  for (const auto& n : names) CHECK(bundled_config(n).contains("kind"));

  auto m = bundled_config("fig3_sowl_M");
  REQUIRE(m["panels"].size() == 3);
  std::vector<double> ms;
  for (const auto& p : m["panels"]) {
    CHECK(p["taus"] == Json::array({1.0}));
    ms.push_back(p["theta"]["prior"]["atoms"][2].get<double>());
  }
  CHECK(ms == std::vector<double>{0.0, 1.0, 10.0});

  auto l2 = bundled_config("fig3_l2power");
  std::vector<double> alphas;
  for (const auto& p : l2["panels"]) {
    alphas.push_back(p["penalty"]["alpha"].get<double>());
    CHECK(p["theta"]["gaussian_quantiles"] == 1000);
    CHECK(p["taus"] == Json::array({0.25, 1.0, 5.0}));
  }
  CHECK(alphas == std::vector<double>{1.0, 2.0, 4.0});

  auto f1 = bundled_config("fig1_sowl");
  CHECK(f1["taus"] == Json::array({0.5, 1.0, 2.5}));
  CHECK(f1["theta"]["p"] == 1000);
  CHECK_THROWS_AS(bundled_config("nope"), Error);

  auto dir = scratch("list");
  CHECK(cli({"list-configs", "--write", dir.string()}) == kExitOk);
  for (const auto& n : names) CHECK(read_json(dir / (n + ".json")) == bundled_config(n));
}

TEST_CASE("figure run writes scatter, theory and report") {
  auto dir = scratch("fig1");
  auto out = run_experiment(small_fig1(), dir.string());
  for (const char* tau : {"0.5", "1", "2.5"}) {
    CHECK(fs::exists(dir / (std::string("scatter_tau") + tau + ".csv")));
    CHECK(fs::exists(dir / (std::string("theory_tau") + tau + ".csv")));
  }
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "gaps.csv"));
  auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest["kind"] == "seq-sim");
  CHECK(manifest["seed"] == 1);
  CHECK(manifest["config"] == small_fig1());
  CHECK(out["results"].size() == 3);

  auto gaps = read_csv(dir / "gaps.csv");
  CHECK(gaps.size() == 1 + 3 * 2);
  CHECK(gaps[0] == std::vector<std::string>{"tau", "trial", "gap", "w2"});

  // Below the first weight the map is soft thresholding at sqrt(2).
  auto map = read_pr1_csv(dir / "theory_tau0.5.csv");
  for (double y : {-3.0, -1.0, 0.0, 0.7, 1.5, 2.2, 4.0}) {
    double soft = std::copysign(std::max(std::abs(y) - std::sqrt(2.0), 0.0), y);
    CHECK(std::abs(map(y) - soft) <= 1e-6);
  }
}

TEST_CASE("reruns are byte-identical") {
  auto a = scratch("rerun_a"), b = scratch("rerun_b");
  run_experiment(small_fig1(), a.string());
  run_experiment(small_fig1(), b.string());
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".csv") CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
}

TEST_CASE("toml config through the binary") {
  auto dir = scratch("toml");
  spit(dir / "c.toml",
       "kind = \"seq-sim\"\nseed = 11\ntau = 1.0\ntrials = 2\ngrid_size = 256\n"
       "[theta]\np = 200\n[theta.prior]\natoms = [-1.0, 0.0, 1.0]\nweights = [0.1, 0.8, 0.1]\n"
       "[penalty]\nvariant = \"separable\"\nscale = 1.0\n[penalty.scalar]\nkind = \"abs\"\nxi = 0.5\n");
  std::string err;
  CHECK(binary("seq-sim --config " + (dir / "c.toml").string() + " --out " + (dir / "out").string(), &err) == 0);
  CHECK(err.empty());
  auto rep = read_json(dir / "out" / "report.json");
  for (double g : rep["results"][0]["gaps"]) CHECK(g <= 1e-20);
}

TEST_CASE("missing seed names the field") {
  auto dir = scratch("seed");
  auto j = small_fig1();
  j.erase("seed");
  write_json(dir / "c.json", j);
  std::string err;
  CHECK(binary("run " + (dir / "c.json").string() + " --out " + (dir / "out").string(), &err) == kExitValidation);
  CHECK(err.find("missing required field 'seed'") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "report.json"));
}

TEST_CASE("validation, numerical and io exit codes") {
  auto dir = scratch("codes");
  auto j = small_fig1();
  j["bogus"] = 1;
  write_json(dir / "unknown.json", j);
  CHECK(cli({"run", (dir / "unknown.json").string(), "--out", (dir / "o").string()}) == kExitValidation);

  Json fp{{"kind", "fixed-point"},
          {"theta", {{"values", {1.0, 0.0, -1.0, 0.0}}}},
          {"delta", 0.5},
          {"sigma", 0.5},
          {"penalty", {{"variant", "separable"}, {"scalar", {{"kind", "quadratic"}, {"c", 1.0}}}, {"scale", 0.0}}},
          {"grid_size", 64}};
  write_json(dir / "fp.json", fp);
  CHECK(cli({"fixed-point", "--config", (dir / "fp.json").string()}) == kExitNumerical);

  CHECK(cli({"run", (dir / "absent.json").string()}) == kExitIo);
  CHECK(cli({"risk", "--prior", (dir / "absent.csv").string(), "--tau", "1"}) == kExitIo);
  CHECK(cli({"seq-sim", "--config", (dir / "fp.json").string(), "--out", (dir / "o").string()}) == kExitValidation);
  CHECK(cli({"no-such-command"}) == kExitValidation);
}

TEST_CASE("single-shot subcommands") {
  auto dir = scratch("single");
  write_measure_csv(dir / "prior.csv", EmpiricalMeasure1D({-1.0, 0.0, 1.0}, {0.1, 0.8, 0.1}));
  write_json(dir / "pen.json", to_json(PenaltySpec{Slope{fixtures::thirds()}, 0.5}));
  spit(dir / "y.csv", "y\n3\n-1\n0.5\n2\n");

  CHECK(cli({"prox", "--penalty", (dir / "pen.json").string(), "--input", (dir / "y.csv").string(), "--out",
             (dir / "prox").string()}) == kExitOk);
  CHECK(read_json(dir / "prox" / "prox.json")["kkt_residual"].get<double>() <= 1e-10);
  CHECK(read_csv(dir / "prox" / "prox.csv").size() == 5);

  CHECK(cli({"scalar-rep", "--penalty", (dir / "pen.json").string(), "--prior", (dir / "prior.csv").string(),
             "--tau", "1", "--m", "256", "--out", (dir / "rep").string()}) == kExitOk);
  CHECK(read_json(dir / "rep" / "scalar_rep.json")["pr1_violations"] == 0);
  CHECK(read_pr1_csv(dir / "rep" / "map.csv").size() == 256);

  CHECK(cli({"risk", "--prior", (dir / "prior.csv").string(), "--tau", "0.5", "--m", "512", "--out",
             (dir / "risk").string()}) == kExitOk);
  auto r = read_json(dir / "risk" / "risk.json")["results"][0];
  CHECK(r["bayes_risk"].get<double>() <= r["r_sep"].get<double>() + 1e-9);
  CHECK(r["r_sep"].get<double>() <= 0.25);

  CHECK(cli({"tau-sep", "--prior", (dir / "prior.csv").string(), "--sigma", "0.2", "--delta", "0.5", "--m", "512",
             "--out", (dir / "ts").string()}) == kExitOk);
  auto t = read_json(dir / "ts" / "tau_sep.json");
  CHECK(t["tau_sep_squared"].get<double>() >= 0.04);

  fs::create_directories(dir / "fam");
  spit(dir / "fam" / "a.csv", "x,g\n0,0\n1,1\n2,2\n");
  spit(dir / "fam" / "b.csv", "x,g\n0,0\n1,2\n2,4\n");
  CHECK(cli({"adapt-check", "--family", (dir / "fam").string(), "--out", (dir / "ad").string()}) == kExitOk);
  CHECK(read_json(dir / "ad" / "adapt_check.json")["passed"] == true);
  spit(dir / "fam" / "c.csv", "x,g\n0,2\n1,1\n2,0\n");
  CHECK(cli({"adapt-check", "--family", (dir / "fam").string(), "--out", (dir / "ad").string()}) == kExitOk);
  CHECK(read_json(dir / "ad" / "adapt_check.json")["passed"] == false);
}

TEST_CASE("io round trips") {
  auto dir = scratch("io");
  EmpiricalMeasure1D mu({-2.5, 0.1, 1.0 / 3.0}, {0.2, 0.5, 0.3});
  write_measure_csv(dir / "mu.csv", mu);
  auto back = read_measure(dir / "mu.csv");
  CHECK(back.atoms() == mu.atoms());
  CHECK(back.weights() == mu.weights());
  CHECK(measure_from_json(to_json(mu)).atoms() == mu.atoms());

  std::vector<double> y{3.0, -1.2, 0.4, 2.2, -0.1, 0.0};
  for (const auto& c : fixtures::penalty_corpus()) {
    auto f = penalty_from_json(to_json(c.f));
    CHECK_MESSAGE(to_json(f) == to_json(c.f), c.label);
    CHECK_MESSAGE(prox(f, y) == prox(c.f, y), c.label);
  }
  CHECK_THROWS_AS(penalty_from_json(Json{{"variant", "l2power"}, {"alpha", 0.5}, {"scale", 1.0}}), Error);

  PR1Map m{{-1.0, 0.0, 2.0}, {-0.5, 0.0, 1.0 / 3.0}, 0.25, 0.75};
  write_pr1_csv(dir / "m.csv", m);
  auto mb = read_pr1_csv(dir / "m.csv");
  CHECK(mb.y == m.y);
  CHECK(mb.x == m.x);
  CHECK(mb.slope_left == m.slope_left);
  CHECK(mb.slope_right == m.slope_right);
  CHECK(read_json(dir / "m.csv.json")["slope_rule"] == "boundary-segment-slope");

  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  {
    CsvWriter w(dir / "q.csv", {"name", "value"});
    w.row(std::vector<std::string>{"a,b", "line\nbreak"});
  }
  auto rows = read_csv(dir / "q.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"a,b", "line\nbreak"});
  CHECK(slurp(dir / "q.csv").find("\r\n") != std::string::npos);

  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  spit(dir / "bad.toml", "kind = \n");
  CHECK_THROWS_AS(load_config(dir / "bad.toml"), Error);
}

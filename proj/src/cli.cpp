#include "symprox/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "symprox/adaptivity.hpp"
#include "symprox/errors.hpp"
#include "symprox/linear_model.hpp"
#include "symprox/parallel.hpp"
#include "symprox/risk.hpp"
#include "symprox/scalar_rep.hpp"
#include "symprox/sequence_model.hpp"

namespace symprox {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Schema helpers

const std::set<std::string> kTolKeys{"prox_tol", "prox_max_iters", "sowl_method", "fp_tol",
                                     "damping",  "max_outer",      "fit_tol",     "fit_max_iters"};

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), Errc::InvalidArgument, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(allowed.count(it.key()) > 0, Errc::InvalidArgument, where + ": unknown field '" + it.key() + "'");
}

const Json& need(const Json& j, const std::string& key) {
  auto it = j.find(key);
  require(it != j.end(), Errc::InvalidArgument, "missing required field '" + key + "'");
  return *it;
}

double as_number(const Json& v, const std::string& key) {
  require(v.is_number(), Errc::InvalidArgument, "field '" + key + "' must be a number");
  double d = v.get<double>();
  require(std::isfinite(d), Errc::InvalidArgument, "field '" + key + "' must be finite");
  return d;
}

double get_number(const Json& j, const std::string& key, std::optional<double> def = std::nullopt) {
  if (!j.contains(key)) {
    require(def.has_value(), Errc::InvalidArgument, "missing required field '" + key + "'");
    return *def;
  }
  return as_number(j[key], key);
}

std::size_t get_count(const Json& j, const std::string& key, std::optional<std::size_t> def = std::nullopt) {
  if (!j.contains(key)) {
    require(def.has_value(), Errc::InvalidArgument, "missing required field '" + key + "'");
    return *def;
  }
  const auto& v = j[key];
  require(v.is_number_integer() && v.get<long long>() >= 0, Errc::InvalidArgument,
          "field '" + key + "' must be a nonnegative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

std::uint64_t get_seed(const Json& j) {
  const auto& v = need(j, "seed");
  require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), Errc::InvalidArgument,
          "field 'seed' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::vector<double> get_numbers(const Json& j, const std::string& key) {
  const auto& v = need(j, key);
  require(v.is_array(), Errc::InvalidArgument, "field '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e, key));
  return out;
}

std::vector<double> get_taus(const Json& j) {
  require(j.contains("taus") != j.contains("tau"), Errc::InvalidArgument, "give exactly one of 'tau' or 'taus'");
  auto taus = j.contains("taus") ? get_numbers(j, "taus") : std::vector<double>{get_number(j, "tau")};
  require(!taus.empty(), Errc::InvalidArgument, "field 'taus' must not be empty");
  return taus;
}

std::vector<std::size_t> get_ps(const Json& j) {
  if (!j.contains("ps")) return {};
  auto v = get_numbers(j, "ps");
  std::vector<std::size_t> out;
  for (double p : v) {
    require(p >= 1 && p == std::floor(p), Errc::InvalidArgument, "field 'ps' must hold positive integers");
    out.push_back(static_cast<std::size_t>(p));
  }
  return out;
}

const Json& tolerances(const Json& j) {
  static const Json empty = Json::object();
  if (!j.contains("tolerances")) return empty;
  check_keys(j["tolerances"], kTolKeys, "tolerances");
  return j["tolerances"];
}

ProxOptions prox_options(const Json& j) {
  const auto& t = tolerances(j);
  ProxOptions o;
  o.tol = get_number(t, "prox_tol", o.tol);
  o.max_iters = static_cast<long>(get_count(t, "prox_max_iters", static_cast<std::size_t>(o.max_iters)));
  if (t.contains("sowl_method")) {
    require(t["sowl_method"].is_string(), Errc::InvalidArgument, "field 'sowl_method' must be a string");
    auto m = t["sowl_method"].get<std::string>();
    require(m == "exact" || m == "alternating", Errc::InvalidArgument,
            "field 'sowl_method' must be exact or alternating");
    o.sowl = m == "exact" ? SowlMethod::Exact : SowlMethod::Alternating;
  }
  require(o.tol > 0.0, Errc::InvalidArgument, "field 'prox_tol' must be positive");
  return o;
}

EmpiricalMeasure1D get_prior(const Json& j) {
  require(j.contains("prior") != j.contains("prior_file"), Errc::InvalidArgument,
          "give exactly one of 'prior' or 'prior_file'");
  if (j.contains("prior")) return measure_from_json(j["prior"]);
  require(j["prior_file"].is_string(), Errc::InvalidArgument, "field 'prior_file' must be a path");
  return read_measure(j["prior_file"].get<std::string>());
}

ThetaSpec with_dimension(ThetaSpec t, std::size_t p) {
  require(t.kind != ThetaSpec::Kind::Values, Errc::InvalidArgument,
          "field 'ps' needs theta given by 'prior' or 'gaussian_quantiles'");
  t.p = p;
  return t;
}

std::string tau_tag(double tau) { return fmt::format("{}", tau); }

// ---------------------------------------------------------------------------
// Output bookkeeping

struct Output {
  fs::path root;
  std::vector<std::string> files;

  fs::path file(const fs::path& rel) {
    auto full = root / rel;
    fs::create_directories(full.parent_path());
    files.push_back(rel.generic_string());
    return full;
  }
  void map(const fs::path& rel, const PR1Map& m) {
    write_pr1_csv(file(rel), m);
    files.push_back(rel.generic_string() + ".json");
  }
  void json(const fs::path& rel, const Json& j) { write_json(file(rel), j); }
};

Json summary_json(const Summary& s) {
  return Json{{"mean", s.mean}, {"median", s.median}, {"q10", s.q10}, {"q90", s.q90}, {"max", s.max}};
}

Json threshold_json(double t) { return std::isfinite(t) ? Json(t) : Json(nullptr); }

// ---------------------------------------------------------------------------
// seq-sim

struct SeqParams {
  SequenceConfig base;
  std::vector<double> taus;
  std::vector<std::size_t> ps;
};

SeqParams parse_seq(const Json& j) {
  check_keys(j, {"kind", "description", "out", "seed", "theta", "penalty", "tau", "taus", "grid_size", "trials",
                 "map_source", "scatter_points", "ps", "tolerances"},
             "seq-sim config");
  SeqParams s;
  s.base.seed = get_seed(j);
  s.base.theta = theta_from_json(need(j, "theta"));
  s.base.penalty = penalty_from_json(need(j, "penalty"));
  s.taus = get_taus(j);
  s.base.grid_size = get_count(j, "grid_size", 4096);
  s.base.trials = get_count(j, "trials", 20);
  s.base.scatter_points = get_count(j, "scatter_points", 100);
  s.base.prox = prox_options(j);
  if (j.contains("map_source")) {
    auto m = j["map_source"];
    require(m == "empirical" || m == "population", Errc::InvalidArgument,
            "field 'map_source' must be empirical or population");
    s.base.map_source = m == "empirical" ? MapSource::Empirical : MapSource::Population;
  }
  s.ps = get_ps(j);
  for (double tau : s.taus) {
    auto c = s.base;
    c.tau = tau;
    c.validate();
  }
  for (auto p : s.ps) with_dimension(s.base.theta, p);
  return s;
}

Json exec_seq_one(const SequenceConfig& base, const std::vector<double>& taus, Output& out, const fs::path& dir) {
  Json results = Json::array();
  std::vector<std::vector<double>> gap_rows;
  for (double tau : taus) {
    auto c = base;
    c.tau = tau;
    auto r = separability_experiment(c);
    const auto tag = tau_tag(tau);
    out.map(dir / ("theory_tau" + tag + ".csv"), r.map);
    {
      CsvWriter w(out.file(dir / ("scatter_tau" + tag + ".csv")), {"y", "theta_hat"});
      for (const auto& [y, x] : r.scatter) w.row(std::vector<double>{y, x});
    }
    for (std::size_t t = 0; t < r.gaps.size(); ++t)
      gap_rows.push_back({tau, static_cast<double>(t), r.gaps[t], r.w2[t]});
    results.push_back(Json{{"tau", tau},
                           {"snr", r.snr ? Json(*r.snr) : Json(nullptr)},
                           {"zero_threshold", threshold_json(zero_threshold(r.map))},
                           {"gaps", r.gaps},
                           {"w2", r.w2},
                           {"gap_summary", summary_json(r.gap_summary)},
                           {"w2_summary", summary_json(r.w2_summary)}});
  }
  {
    CsvWriter w(out.file(dir / "gaps.csv"), {"tau", "trial", "gap", "w2"});
    for (const auto& row : gap_rows)
      w.row(std::vector<std::string>{format_double(row[0]), fmt::format("{}", static_cast<long>(row[1])),
                                     format_double(row[2]), format_double(row[3])});
  }
  Json report{{"p", base.theta.dimension()}, {"penalty", to_json(base.penalty)}, {"results", results}};
  out.json(dir / "report.json", report);
  return report;
}

Json exec_seq(const SeqParams& s, Output& out) {
  if (s.ps.empty()) return exec_seq_one(s.base, s.taus, out, "");
  Json sweep = Json::array();
  std::vector<std::vector<double>> medians(s.taus.size());
  for (auto p : s.ps) {
    auto c = s.base;
    c.theta = with_dimension(c.theta, p);
    auto rep = exec_seq_one(c, s.taus, out, fmt::format("p{}", p));
    for (std::size_t k = 0; k < s.taus.size(); ++k) {
      double med = rep["results"][k]["gap_summary"]["median"].get<double>();
      medians[k].push_back(med);
      sweep.push_back(Json{{"p", p},
                           {"tau", s.taus[k]},
                           {"median_gap", med},
                           {"median_w2", rep["results"][k]["w2_summary"]["median"]}});
    }
  }
  Json trend = Json::array();
  for (std::size_t k = 0; k < s.taus.size(); ++k) {
    bool dec = true;
    for (std::size_t i = 1; i < medians[k].size(); ++i) dec = dec && medians[k][i] < medians[k][i - 1];
    trend.push_back(Json{{"tau", s.taus[k]}, {"median_gap_strictly_decreasing", dec}});
  }
  Json report{{"ps", s.ps}, {"sweep", sweep}, {"trend", trend}};
  out.json("report.json", report);
  return report;
}

// ---------------------------------------------------------------------------
// fixed-point and lm-sim

const std::set<std::string> kLinearKeys{"kind",  "description", "out",   "theta",      "delta",
                                        "sigma", "penalty",     "grid_size", "se", "tolerances"};

LinearConfig parse_linear(const Json& j) {
  LinearConfig c;
  c.theta = theta_from_json(need(j, "theta"));
  c.delta = get_number(j, "delta");
  c.sigma = get_number(j, "sigma");
  c.penalty = penalty_from_json(need(j, "penalty"));
  c.grid_size = get_count(j, "grid_size", 4096);
  c.se.prox = prox_options(j);
  if (j.contains("se")) {
    const auto& se = j["se"];
    check_keys(se, {"quadrature", "gh_nodes"}, "se");
    if (se.contains("quadrature")) {
      auto q = se["quadrature"];
      require(q == "exact" || q == "gauss-hermite", Errc::InvalidArgument,
              "field 'quadrature' must be exact or gauss-hermite");
      c.se.method = q == "exact" ? SeQuadrature::Exact : SeQuadrature::GaussHermite;
    }
    c.se.gh_nodes = static_cast<int>(get_count(se, "gh_nodes", 61));
    require(c.se.gh_nodes >= 21, Errc::InvalidArgument, "field 'gh_nodes' must be >= 21");
  }
  const auto& t = tolerances(j);
  c.fp_tol = get_number(t, "fp_tol", c.fp_tol);
  c.damping = get_number(t, "damping", c.damping);
  c.max_outer = static_cast<int>(get_count(t, "max_outer", static_cast<std::size_t>(c.max_outer)));
  c.fit_tol = get_number(t, "fit_tol", c.fit_tol);
  c.fit_max_iters = static_cast<long>(get_count(t, "fit_max_iters", static_cast<std::size_t>(c.fit_max_iters)));
  require(c.fp_tol > 0.0 && c.fit_tol > 0.0, Errc::InvalidArgument, "tolerances must be positive");
  return c;
}

Json solution_json(const FixedPointSolution& fp) {
  return Json{{"tau_star", fp.tau_star},
              {"lambda_star", fp.lambda_star},
              {"predicted_mse", fp.predicted_mse},
              {"gordon_value", std::isfinite(fp.gordon_value) ? Json(fp.gordon_value) : Json(nullptr)},
              {"residual_tau", fp.residual_tau},
              {"residual_lambda", fp.residual_lambda},
              {"outer_iterations", fp.outer_iterations},
              {"map_nodes", fp.map.size()}};
}

LinearConfig parse_fixed_point(const Json& j) {
  check_keys(j, kLinearKeys, "fixed-point config");
  auto c = parse_linear(j);
  c.validate();
  return c;
}

Json exec_fixed_point(const LinearConfig& c, Output* out) {
  auto fp = solve_fixed_point(c);
  auto res = solution_json(fp);
  if (out) {
    out->map("A_star.csv", fp.map);
    out->json("solution.json", res);
  }
  return res;
}

struct LmParams {
  LinearConfig base;
  std::vector<std::size_t> ps;
  bool separable = false;
};

LmParams parse_lm(const Json& j) {
  auto keys = kLinearKeys;
  keys.insert({"seed", "trials", "joint_subsample", "ps", "separable_equivalent"});
  check_keys(j, keys, "lm-sim config");
  LmParams s;
  s.base = parse_linear(j);
  s.base.seed = get_seed(j);
  s.base.trials = get_count(j, "trials", 10);
  s.base.joint_subsample = get_count(j, "joint_subsample", 512);
  s.ps = get_ps(j);
  if (j.contains("separable_equivalent")) {
    require(j["separable_equivalent"].is_boolean(), Errc::InvalidArgument,
            "field 'separable_equivalent' must be true or false");
    s.separable = j["separable_equivalent"].get<bool>();
  }
  s.base.validate();
  for (auto p : s.ps) {
    auto c = s.base;
    c.theta = with_dimension(c.theta, p);
    c.validate();
  }
  return s;
}

Json lm_report_json(const LmReport& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials)
    trials.push_back(Json{{"scalar_gap", t.scalar_gap},
                          {"w2", t.w2},
                          {"empirical_mse", t.empirical_mse},
                          {"iterations", t.iterations}});
  return Json{{"fixed_point", solution_json(r.fp)},
              {"trials", trials},
              {"gap_summary", summary_json(r.gap_summary)},
              {"w2_summary", summary_json(r.w2_summary)}};
}

void write_lm_files(const LmReport& r, Output& out, const fs::path& dir) {
  for (std::size_t k = 0; k < r.joints.size(); ++k) {
    CsvWriter w(out.file(dir / fmt::format("joint_trial{}.csv", k)), {"theta_hat", "theta"});
    for (const auto& pt : r.joints[k]) w.row(std::vector<double>{pt.u, pt.v});
  }
  {
    CsvWriter w(out.file(dir / "predicted_joint.csv"), {"predicted", "theta"});
    for (const auto& pt : r.predicted) w.row(std::vector<double>{pt.u, pt.v});
  }
  CsvWriter w(out.file(dir / "trials.csv"), {"trial", "scalar_gap", "w2", "empirical_mse", "iterations"});
  for (std::size_t t = 0; t < r.trials.size(); ++t) {
    const auto& tr = r.trials[t];
    w.row(std::vector<std::string>{fmt::format("{}", t), format_double(tr.scalar_gap), format_double(tr.w2),
                                   format_double(tr.empirical_mse), fmt::format("{}", tr.iterations)});
  }
}

Json exec_lm_one(const LinearConfig& c, bool separable, Output& out, const fs::path& dir) {
  auto fp = solve_fixed_point(c);
  auto rep = lm_concentration_experiment(c, fp, true);
  write_lm_files(rep, out, dir);
  out.map(dir / "A_star.csv", fp.map);
  Json report = lm_report_json(rep);
  report["p"] = c.p();
  report["n"] = c.n();
  if (separable) {
    auto sc = c;
    sc.penalty = separable_equivalent(fp);
    auto sfp = solve_fixed_point(sc);
    auto srep = lm_concentration_experiment(sc, sfp, true);
    write_lm_files(srep, out, dir / "separable");
    Json sj = lm_report_json(srep);
    double a = rep.gap_summary.median, b = srep.gap_summary.median;
    sj["gap_median_ratio"] = a > 0.0 ? Json(b / a) : Json(nullptr);
    report["separable_equivalent"] = sj;
  }
  out.json(dir / "report.json", report);
  return report;
}

Json exec_lm(const LmParams& s, Output& out) {
  if (s.ps.empty()) return exec_lm_one(s.base, s.separable, out, "");
  Json sweep = Json::array();
  for (auto p : s.ps) {
    auto c = s.base;
    c.theta = with_dimension(c.theta, p);
    auto rep = exec_lm_one(c, s.separable, out, fmt::format("p{}", p));
    sweep.push_back(Json{{"p", p},
                         {"median_scalar_gap", rep["gap_summary"]["median"]},
                         {"median_w2", rep["w2_summary"]["median"]}});
  }
  Json report{{"ps", s.ps}, {"sweep", sweep}};
  out.json("report.json", report);
  return report;
}

// ---------------------------------------------------------------------------
// risk and tau-sep

struct RiskParams {
  EmpiricalMeasure1D prior;
  std::vector<double> taus;
  std::size_t m;
};

RiskParams parse_risk(const Json& j) {
  check_keys(j, {"kind", "description", "out", "prior", "prior_file", "tau", "taus", "m"}, "risk config");
  RiskParams r{get_prior(j), get_taus(j), get_count(j, "m", 4096)};
  require(r.m >= 256, Errc::InvalidArgument, "field 'm' must be >= 256");
  for (double t : r.taus) require(t > 0.0, Errc::InvalidArgument, "tau must be positive");
  return r;
}

Json exec_risk(const RiskParams& p, Output* out) {
  Json results = Json::array();
  for (double tau : p.taus) {
    auto r = optimal_separable_risk(p.prior, tau, p.m);
    results.push_back(Json{{"tau", tau},
                           {"r_sep", r.r_sep},
                           {"bayes_risk", r.bayes_risk},
                           {"optimal_map_risk", r.map_risk},
                           {"bayes_max_slope", r.bayes_max_slope},
                           {"bayes_in_pr1", r.bayes_in_pr1}});
    if (out) {
      out->map("optimal_map_tau" + tau_tag(tau) + ".csv", r.optimal_map);
      out->map("bayes_map_tau" + tau_tag(tau) + ".csv", r.bayes_map);
    }
  }
  Json res{{"m", p.m}, {"results", results}};
  if (out) out->json("risk.json", res);
  return res;
}

struct TauSepParams {
  EmpiricalMeasure1D prior;
  double sigma, delta;
  std::size_t m;
};

TauSepParams parse_tau_sep(const Json& j) {
  check_keys(j, {"kind", "description", "out", "prior", "prior_file", "sigma", "delta", "m"}, "tau-sep config");
  TauSepParams t{get_prior(j), get_number(j, "sigma"), get_number(j, "delta"), get_count(j, "m", 4096)};
  require(t.sigma >= 0.0 && t.delta > 0.0, Errc::InvalidArgument, "tau-sep needs sigma >= 0 and delta > 0");
  require(t.m >= 256, Errc::InvalidArgument, "field 'm' must be >= 256");
  return t;
}

Json exec_tau_sep(const TauSepParams& p, Output* out) {
  auto t = tau_sep(p.prior, p.sigma, p.delta, p.m);
  Json res{{"sigma", p.sigma},         {"delta", p.delta},
           {"tau_sep_squared", t.tau2}, {"tau_sep", t.tau},
           {"risk_lower_bound", t.risk_bound}, {"probes", t.probes}};
  if (out) out->json("tau_sep.json", res);
  return res;
}

// ---------------------------------------------------------------------------
// adapt-check

struct AdaptParams {
  std::vector<std::string> names;
  std::vector<JointSample2D> family;
  int max_cycle;
};

AdaptParams parse_adapt(const Json& j) {
  check_keys(j, {"kind", "description", "out", "family_dir", "couplings", "max_cycle"}, "adapt-check config");
  AdaptParams a;
  a.max_cycle = static_cast<int>(get_count(j, "max_cycle", 3));
  require(j.contains("family_dir") != j.contains("couplings"), Errc::InvalidArgument,
          "give exactly one of 'family_dir' or 'couplings'");
  if (j.contains("family_dir")) {
    require(j["family_dir"].is_string(), Errc::InvalidArgument, "field 'family_dir' must be a path");
    fs::path dir = j["family_dir"].get<std::string>();
    require(fs::is_directory(dir), Errc::Io, "family directory " + dir.string() + " does not exist");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      a.names.push_back(f.filename().string());
      a.family.push_back(read_coupling_csv(f));
    }
  } else {
    const auto& cs = j["couplings"];
    require(cs.is_array(), Errc::InvalidArgument, "field 'couplings' must be an array of [x, g] lists");
    for (std::size_t k = 0; k < cs.size(); ++k) {
      std::vector<Point2> pts;
      for (const auto& pt : cs[k]) {
        require(pt.is_array() && pt.size() == 2, Errc::InvalidArgument, "coupling points must be [x, g] pairs");
        pts.push_back({as_number(pt[0], "couplings"), as_number(pt[1], "couplings")});
      }
      a.names.push_back(fmt::format("coupling{}", k));
      a.family.push_back(JointSample2D(pts));
    }
  }
  require(!a.family.empty(), Errc::InvalidArgument, "adapt-check needs at least one coupling");
  return a;
}

Json exec_adapt(const AdaptParams& a, Output* out) {
  auto rep = joint_cm_check(a.family, a.max_cycle);
  Json ind = Json::array();
  for (std::size_t i = 0; i < rep.individual.size(); ++i) {
    Json e{{"coupling", a.names[i]}, {"support_cyclically_monotone", rep.individual[i].monotone}};
    if (const auto& w = rep.individual[i].witness)
      e["witness"] = Json::array({Json::array({w->first.u, w->first.v}), Json::array({w->second.u, w->second.v})});
    ind.push_back(e);
  }
  Json tuples = Json::array();
  for (const auto& t : rep.tuples) {
    Json members = Json::array();
    for (auto m : t.members) members.push_back(a.names[m]);
    tuples.push_back(Json{{"cycle", members},
                          {"diagonal", t.diagonal},
                          {"achieved", t.achieved},
                          {"pairwise_upper", t.upper},
                          {"margin", t.margin},
                          {"exact", t.exact},
                          {"violated", t.violated},
                          {"certified", t.certified}});
  }
  Json res{{"passed", rep.passed},
           {"scope", "necessary-condition audit over cycles of length <= max_cycle on finite supports"},
           {"max_cycle", a.max_cycle},
           {"violations", rep.violations},
           {"min_margin", rep.min_margin},
           {"individual", ind},
           {"tuples", tuples}};
  if (out) out->json("adapt_check.json", res);
  return res;
}

// ---------------------------------------------------------------------------
// prox and scalar-rep

struct ProxParams {
  PenaltySpec penalty;
  std::vector<double> y;
  ProxOptions opt;
};

ProxParams parse_prox(const Json& j) {
  check_keys(j, {"kind", "description", "out", "penalty", "y", "y_file", "tolerances"}, "prox config");
  ProxParams p;
  p.penalty = penalty_from_json(need(j, "penalty"));
  p.opt = prox_options(j);
  require(j.contains("y") != j.contains("y_file"), Errc::InvalidArgument, "give exactly one of 'y' or 'y_file'");
  if (j.contains("y")) {
    p.y = get_numbers(j, "y");
  } else {
    require(j["y_file"].is_string(), Errc::InvalidArgument, "field 'y_file' must be a path");
    fs::path f = j["y_file"].get<std::string>();
    auto rows = read_csv(f);
    require(!rows.empty() && !rows[0].empty() && rows[0][0] == "y", Errc::InvalidArgument,
            f.string() + ": first column must be 'y'");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      try {
        p.y.push_back(std::stod(rows[r][0]));
      } catch (const std::logic_error&) {
        fail(Errc::InvalidArgument, f.string() + ": bad number '" + rows[r][0] + "'");
      }
    }
  }
  require(!p.y.empty(), Errc::InvalidArgument, "prox input is empty");
  return p;
}

Json exec_prox(const ProxParams& p, Output* out) {
  auto x = prox(p.penalty, p.y, p.opt);
  double kkt = kkt_residual(p.penalty, p.y, x);
  Json res{{"p", p.y.size()},
           {"penalty", to_json(p.penalty)},
           {"kkt_residual", kkt},
           {"value", p.penalty.evaluable() ? Json(evaluate(p.penalty, x)) : Json(nullptr)}};
  if (out) {
    CsvWriter w(out->file("prox.csv"), {"y", "x"});
    for (std::size_t i = 0; i < x.size(); ++i) w.row(std::vector<double>{p.y[i], x[i]});
    out->json("prox.json", res);
  } else {
    res["x"] = x;
  }
  return res;
}

struct ScalarRepParams {
  PenaltySpec penalty;
  EmpiricalMeasure1D mu;
  double tau;
  std::size_t m;
  ProxOptions opt;
};

ScalarRepParams parse_scalar_rep(const Json& j) {
  check_keys(j, {"kind", "description", "out", "penalty", "prior", "prior_file", "tau", "m", "tolerances"},
             "scalar-rep config");
  ScalarRepParams s{penalty_from_json(need(j, "penalty")), get_prior(j), get_number(j, "tau", 0.0),
                    get_count(j, "m", 4096), prox_options(j)};
  require(s.tau >= 0.0, Errc::InvalidArgument, "tau must be >= 0");
  require(s.m >= 16, Errc::InvalidArgument, "field 'm' must be >= 16");
  return s;
}

Json exec_scalar_rep(const ScalarRepParams& s, Output* out) {
  auto A = effective_scalar_rep(s.penalty, gaussian_convolve(s.mu, s.tau, s.m), s.opt);
  Json res{{"nodes", A.size()},
           {"slope_left", A.slope_left},
           {"slope_right", A.slope_right},
           {"max_segment_slope", A.size() > 1 ? A.max_segment_slope() : 0.0},
           {"zero_threshold", threshold_json(zero_threshold(A))},
           {"pr1_violations", validate_pr1(A).size()}};
  if (out) {
    out->map("map.csv", A);
    out->json("scalar_rep.json", res);
  }
  return res;
}

// ---------------------------------------------------------------------------
// appendix-figures

struct Panel {
  std::string name;
  ThetaSpec theta;
  PenaltySpec penalty;
  std::vector<double> taus;
  std::size_t grid_size, scatter_points;
};

struct AppendixParams {
  std::uint64_t seed;
  std::vector<Panel> panels;
  ProxOptions opt;
};

AppendixParams parse_appendix(const Json& j) {
  check_keys(j, {"kind", "description", "out", "seed", "panels", "tolerances"}, "appendix-figures config");
  AppendixParams a;
  a.seed = get_seed(j);
  a.opt = prox_options(j);
  const auto& ps = need(j, "panels");
  require(ps.is_array() && !ps.empty(), Errc::InvalidArgument, "field 'panels' must be a nonempty array");
  std::set<std::string> seen;
  for (const auto& pj : ps) {
    check_keys(pj, {"name", "theta", "penalty", "tau", "taus", "grid_size", "scatter_points"}, "panel");
    Panel p;
    const auto& n = need(pj, "name");
    require(n.is_string(), Errc::InvalidArgument, "panel name must be a string");
    p.name = n.get<std::string>();
    require(seen.insert(p.name).second, Errc::InvalidArgument, "duplicate panel name '" + p.name + "'");
    p.theta = theta_from_json(need(pj, "theta"));
    p.penalty = penalty_from_json(need(pj, "penalty"));
    p.taus = get_taus(pj);
    p.grid_size = get_count(pj, "grid_size", 4096);
    p.scatter_points = get_count(pj, "scatter_points", 100);
    require(p.grid_size >= 16, Errc::InvalidArgument, "grid_size must be >= 16");
    for (double t : p.taus) require(t >= 0.0, Errc::InvalidArgument, "tau must be >= 0");
    a.panels.push_back(std::move(p));
  }
  return a;
}

Json exec_appendix(const AppendixParams& a, Output& out) {
  Json panels = Json::array();
  for (const auto& p : a.panels) {
    Json results = Json::array();
    for (double tau : p.taus) {
      auto r = theory_panel(p.theta, tau, p.penalty, p.grid_size, a.seed, p.scatter_points, a.opt);
      const auto tag = tau_tag(tau);
      out.map(p.name + "_theory_tau" + tag + ".csv", r.theory);
      CsvWriter w(out.file(p.name + "_scatter_tau" + tag + ".csv"), {"y", "theta_hat"});
      for (const auto& [y, x] : r.scatter) w.row(std::vector<double>{y, x});
      results.push_back(Json{{"tau", tau}, {"zero_threshold", threshold_json(r.zero_threshold)}});
    }
    panels.push_back(Json{{"name", p.name}, {"penalty", to_json(p.penalty)}, {"results", results}});
  }
  Json report{{"panels", panels}};
  out.json("report.json", report);
  return report;
}

// ---------------------------------------------------------------------------
// Bundled configs

Json sparse_prior(double m) {
  return Json{{"atoms", {-m, 0.0, m}}, {"weights", {0.05, 0.9, 0.05}}};
}

Json thirds_sowl() {
  return Json{{"variant", "sowl"}, {"profile", {{0.333, 2.0}, {0.667, 1.0}, {1.0, 0.5}}}, {"scale", 1.0}};
}

Json lasso_payload() {
  return Json{{"theta", {{"prior", sparse_prior(1.0)}, {"p", 2000}}},
              {"delta", 0.64},
              {"sigma", 0.25},
              {"penalty", {{"variant", "separable"}, {"scalar", {{"kind", "abs"}, {"xi", 0.3}}}, {"scale", 1.0}}},
              {"grid_size", 4096}};
}

Json make_bundled(const std::string& name) {
  if (name == "fig1_sowl") {
    return Json{{"kind", "seq-sim"},
                {"description", "Sequence model, SOWL weights 2/1/0.5 by thirds, 50/900/50 sparse theta"},
                {"seed", 1},
                {"theta", {{"prior", sparse_prior(1.0)}, {"p", 1000}}},
                {"penalty", thirds_sowl()},
                {"taus", {0.5, 1.0, 2.5}},
                {"grid_size", 4096},
                {"trials", 20},
                {"scatter_points", 100}};
  }
  if (name == "fig3_l2power") {
    Json panels = Json::array();
    for (double a : {1.0, 2.0, 4.0})
      panels.push_back(Json{{"name", fmt::format("l2power_alpha{}", a)},
                            {"theta", {{"gaussian_quantiles", 1000}}},
                            {"penalty", {{"variant", "l2power"}, {"alpha", a}, {"scale", 1.0}}},
                            {"taus", {0.25, 1.0, 5.0}}});
    return Json{{"kind", "appendix-figures"},
                {"description", "Power of the l2 norm, theta at N(0,1) quantiles j/(p+1)"},
                {"seed", 3},
                {"panels", panels}};
  }
  if (name == "fig3_l1power") {
    Json panels = Json::array();
    for (double a : {1.0, 2.0})
      panels.push_back(Json{{"name", fmt::format("l1power_alpha{}", a)},
                            {"theta", {{"prior", sparse_prior(1.0)}, {"p", 1000}}},
                            {"penalty", {{"variant", "l1power"}, {"alpha", a}, {"scale", 1.0}}},
                            {"taus", {0.25, 1.0, 5.0}}});
    return Json{{"kind", "appendix-figures"},
                {"description", "Power of the l1 norm, 50/900/50 sparse theta"},
                {"seed", 4},
                {"panels", panels}};
  }
  if (name == "fig3_sowl_M") {
    Json panels = Json::array();
    for (double m : {0.0, 1.0, 10.0})
      panels.push_back(Json{{"name", fmt::format("sowl_M{}", m)},
                            {"theta", {{"prior", sparse_prior(m)}, {"p", 1000}}},
                            {"penalty", thirds_sowl()},
                            {"taus", {1.0}}});
    return Json{{"kind", "appendix-figures"},
                {"description", "SOWL weights 2/1/0.5 by thirds, prior .05 at -M, .9 at 0, .05 at M"},
                {"seed", 5},
                {"panels", panels}};
  }
  if (name == "lasso_fixed_point") {
    Json j{{"kind", "fixed-point"}, {"description", "LASSO state evolution, delta 0.64, sigma 0.25, xi 0.3"}};
    j.update(lasso_payload());
    return j;
  }
  if (name == "concentration_sweep") {
    Json j = make_bundled("fig1_sowl");
    j["description"] = "Median separability gap of the SOWL sequence model across p";
    j["ps"] = {250, 1000, 4000};
    return j;
  }
  fail(Errc::InvalidArgument, "unknown bundled config '" + name + "'");
}

// ---------------------------------------------------------------------------
// Dispatch

const std::set<std::string> kKinds{"seq-sim", "fixed-point", "lm-sim",     "risk",          "tau-sep",
                                   "adapt-check", "prox",    "scalar-rep", "appendix-figures"};
const std::set<std::string> kWritingKinds{"seq-sim", "lm-sim", "appendix-figures"};

std::string kind_of(const Json& config) {
  require(config.is_object(), Errc::InvalidArgument, "config must be an object");
  const auto& k = need(config, "kind");
  require(k.is_string() && kKinds.count(k.get<std::string>()) > 0, Errc::InvalidArgument,
          "field 'kind' must be one of seq-sim, fixed-point, lm-sim, risk, tau-sep, adapt-check, prox, scalar-rep, "
          "appendix-figures");
  return k.get<std::string>();
}

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::NoConvergence:
    case Errc::NoSolution:
    case Errc::BracketFailure: return kExitNumerical;
    case Errc::Io: return kExitIo;
    default: return kExitValidation;
  }
}

}  // namespace

std::vector<std::string> bundled_config_names() {
  return {"fig1_sowl", "fig3_l2power", "fig3_l1power", "fig3_sowl_M", "lasso_fixed_point", "concentration_sweep"};
}

Json bundled_config(const std::string& name) { return make_bundled(name); }

Json run_experiment(const Json& config, const std::string& out_dir) {
  const auto kind = kind_of(config);
  const auto start = std::chrono::steady_clock::now();
  Output out{out_dir, {}};
  Output* outp = out_dir.empty() ? nullptr : &out;
  require(outp || kWritingKinds.count(kind) == 0, Errc::InvalidArgument,
          kind + " needs an output directory (--out or field 'out')");
  if (outp) {
    std::error_code ec;
    fs::create_directories(out.root, ec);
    require(!ec, Errc::Io, "cannot create output directory " + out.root.string() + ": " + ec.message());
  }

  // Every payload is parsed and validated before any computation starts.
  Json result;
  std::optional<std::uint64_t> seed;
  if (kind == "seq-sim") {
    auto p = parse_seq(config);
    seed = p.base.seed;
    result = exec_seq(p, out);
  } else if (kind == "fixed-point") {
    result = exec_fixed_point(parse_fixed_point(config), outp);
  } else if (kind == "lm-sim") {
    auto p = parse_lm(config);
    seed = p.base.seed;
    result = exec_lm(p, out);
  } else if (kind == "risk") {
    result = exec_risk(parse_risk(config), outp);
  } else if (kind == "tau-sep") {
    result = exec_tau_sep(parse_tau_sep(config), outp);
  } else if (kind == "adapt-check") {
    result = exec_adapt(parse_adapt(config), outp);
  } else if (kind == "prox") {
    result = exec_prox(parse_prox(config), outp);
  } else if (kind == "scalar-rep") {
    result = exec_scalar_rep(parse_scalar_rep(config), outp);
  } else {
    auto p = parse_appendix(config);
    seed = p.seed;
    result = exec_appendix(p, out);
  }

  if (outp) {
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json manifest{{"tool", "symprox"},
                  {"version", kVersion},
                  {"kind", kind},
                  {"seed", seed ? Json(*seed) : Json(nullptr)},
                  {"threads", thread_count()},
                  {"wall_time_seconds", wall},
                  {"config", config},
                  {"outputs", out.files}};
    write_json(out.root / "manifest.json", manifest);
  }
  return result;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Symmetric penalties, proximal operators and their scalar representations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker cap (also SYMPROX_THREADS)")->check(CLI::PositiveNumber);

  std::string config_path, out_dir, prior_path, penalty_path, input_path, family_dir, write_dir, show_name;
  double tau = 0.0, sigma = 0.0, delta = 0.0;
  std::size_t m = 4096;
  int max_cycle = 3;

  auto config_cmd = [&](const char* name, const char* help, bool out_required) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--config", config_path, "Config file (.toml or .json)")->required();
    auto* o = c->add_option("--out", out_dir, "Output directory");
    if (out_required) o->required();
    return c;
  };
  auto* seq = config_cmd("seq-sim", "Sequence-model separability experiment", true);
  auto* fpc = config_cmd("fixed-point", "Solve the (tau, lambda) fixed-point system", false);
  auto* lm = config_cmd("lm-sim", "Linear-model concentration experiment", true);
  auto* apx = config_cmd("appendix-figures", "Theory curves and scatter for figure panels", true);

  auto* proxc = app.add_subcommand("prox", "Proximal operator of a penalty");
  proxc->add_option("--penalty", penalty_path, "Penalty JSON file")->required();
  proxc->add_option("--input", input_path, "CSV with a y column")->required();
  proxc->add_option("--out", out_dir, "Output directory");

  auto* rep = app.add_subcommand("scalar-rep", "Effective scalar representation on a convolved grid");
  rep->add_option("--penalty", penalty_path, "Penalty JSON file")->required();
  rep->add_option("--prior", prior_path, "Measure (.json or .csv)")->required();
  rep->add_option("--tau", tau, "Noise level")->required();
  rep->add_option("--m", m, "Grid size");
  rep->add_option("--out", out_dir, "Output directory");

  auto* risk = app.add_subcommand("risk", "Optimal separable risk");
  risk->add_option("--prior", prior_path, "Measure (.json or .csv)")->required();
  risk->add_option("--tau", tau, "Noise level")->required();
  risk->add_option("--m", m, "Grid size");
  risk->add_option("--out", out_dir, "Output directory");

  auto* tsep = app.add_subcommand("tau-sep", "Critical noise level of the separable lower bound");
  tsep->add_option("--prior", prior_path, "Measure (.json or .csv)")->required();
  tsep->add_option("--sigma", sigma, "Noise scale")->required();
  tsep->add_option("--delta", delta, "Sampling ratio n/p")->required();
  tsep->add_option("--m", m, "Grid size");
  tsep->add_option("--out", out_dir, "Output directory");

  auto* adapt = app.add_subcommand("adapt-check", "Joint cyclic monotonicity audit");
  adapt->add_option("--family", family_dir, "Directory of coupling CSVs (columns x,g)")->required();
  adapt->add_option("--max-cycle", max_cycle, "Longest cycle audited (2-4)");
  adapt->add_option("--out", out_dir, "Output directory");

  auto* list = app.add_subcommand("list-configs", "List or write the bundled configs");
  list->add_option("--write", write_dir, "Write each config as <name>.json into this directory");
  list->add_option("--show", show_name, "Print one config");

  auto* run = app.add_subcommand("run", "Run any experiment config");
  run->add_option("config", config_path, "Config file (.toml or .json)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides field 'out')");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  if (threads > 0) set_thread_count(threads);

  try {
    Json config;
    auto with_kind = [&](const std::string& kind) {
      config = load_config(config_path);
      require(config.is_object(), Errc::InvalidArgument, "config must be an object");
      if (config.contains("kind"))
        require(config["kind"] == kind, Errc::InvalidArgument,
                "config kind '" + config["kind"].dump() + "' does not match subcommand " + kind);
      config["kind"] = kind;
    };
    if (*seq) {
      with_kind("seq-sim");
    } else if (*fpc) {
      with_kind("fixed-point");
    } else if (*lm) {
      with_kind("lm-sim");
    } else if (*apx) {
      with_kind("appendix-figures");
    } else if (*proxc) {
      config = Json{{"kind", "prox"}, {"penalty", read_json(penalty_path)}, {"y_file", input_path}};
    } else if (*rep) {
      config = Json{{"kind", "scalar-rep"}, {"penalty", read_json(penalty_path)}, {"prior_file", prior_path},
                    {"tau", tau}, {"m", m}};
    } else if (*risk) {
      config = Json{{"kind", "risk"}, {"prior_file", prior_path}, {"tau", tau}, {"m", m}};
    } else if (*tsep) {
      config = Json{{"kind", "tau-sep"}, {"prior_file", prior_path}, {"sigma", sigma}, {"delta", delta}, {"m", m}};
    } else if (*adapt) {
      config = Json{{"kind", "adapt-check"}, {"family_dir", family_dir}, {"max_cycle", max_cycle}};
    } else if (*list) {
      if (!show_name.empty()) {
        std::cout << bundled_config(show_name).dump(2) << "\n";
        return kExitOk;
      }
      if (!write_dir.empty()) {
        std::error_code ec;
        fs::create_directories(write_dir, ec);
        require(!ec, Errc::Io, "cannot create " + write_dir + ": " + ec.message());
      }
      for (const auto& n : bundled_config_names()) {
        std::cout << n << "\n";
        if (!write_dir.empty()) write_json(fs::path(write_dir) / (n + ".json"), bundled_config(n));
      }
      return kExitOk;
    } else if (*run) {
      config = load_config(config_path);
      kind_of(config);
      if (out_dir.empty() && config.contains("out")) {
        require(config["out"].is_string(), Errc::InvalidArgument, "field 'out' must be a path");
        out_dir = config["out"].get<std::string>();
      }
    }
    auto result = run_experiment(config, out_dir);
    std::cout << result.dump(2) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "symprox: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "symprox: Io: " << e.what() << "\n";
    return kExitIo;
  } catch (const Json::exception& e) {
    std::cerr << "symprox: InvalidArgument: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "symprox: internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace symprox

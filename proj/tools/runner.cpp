#include "runner.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "livsic/cohomology.hpp"
#include "livsic/errors.hpp"
#include "livsic/gibbs_markov.hpp"
#include "livsic/inducing.hpp"
#include "livsic/numerics.hpp"
#include "livsic/transfer.hpp"

namespace livsic::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<Interval> interval_or_none(const std::string& text) {
  if (text == "none") return std::nullopt;
  return parse_interval(text);
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

double parse_number(const std::string& text, const std::string& spec) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError("observable '" + spec + "': bad number '" + text + "'");
  return v;
}

Observable table_observable(const PiecewiseMap& map, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("observable table '" + path + "' cannot be read");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected x,value");
    try {
      std::size_t a = 0, b = 0;
      const std::string xs = line.substr(0, comma), vs = line.substr(comma + 1);
      const double x = std::stod(xs, &a);
      const double v = std::stod(vs, &b);
      rows.emplace_back(x, v);
    } catch (const std::exception&) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected x,value");
    }
  }
  if (rows.size() < 2) throw ConfigError("observable table '" + path + "' needs at least two rows");
  std::sort(rows.begin(), rows.end());
  std::vector<double> xs, vs;
  for (const auto& [x, v] : rows) {
    xs.push_back(x);
    vs.push_back(v);
  }
  RealFn fn = [xs, vs](double x) {
    if (x <= xs.front()) return vs.front();
    if (x >= xs.back()) return vs.back();
    const auto i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return vs[i - 1] + t * (vs[i] - vs[i - 1]);
  };
  return make_observable(map, std::move(fn), 1.0, "table:" + path);
}

std::string combine(const std::vector<Verdict>& verdicts) {
  bool inconclusive = false;
  for (auto v : verdicts) {
    if (v == Verdict::fail) return "fail";
    inconclusive = inconclusive || v == Verdict::inconclusive;
  }
  return inconclusive ? "inconclusive" : "pass";
}

class Run {
 public:
  Run(AnalysisConfig config, const RunOptions& options) : cfg_(std::move(config)), opts_(options) {
    out_ = opts_.out_dir.empty() ? cfg_.text("output.dir") : opts_.out_dir;
    seed_ = cfg_.u64("seed");
  }

  const AnalysisConfig& cfg() const { return cfg_; }
  std::uint64_t seed(const std::string& stage) const { return derive_seed(stage, seed_); }
  json& results() { return results_; }
  void set_summary(std::string s) { summary_ = std::move(s); }

  template <class Fn>
  auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
    if (!opts_.quiet) std::cerr << "[livsic] " << name << " ..." << std::flush;
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      timings_[name] = s;
      stages_.push_back(name);
      if (!opts_.quiet) std::cerr << " " << fmt(s, 3) << " s\n";
    };
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        finish();
      } else {
        auto r = fn();
        finish();
        return r;
      }
    } catch (const ConfigError&) {
      if (!opts_.quiet) std::cerr << " config error\n";
      throw;
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      if (!opts_.quiet) std::cerr << " error\n";
      throw StageError(name, e.what());
    }
  }

  void csv(const std::string& file, const std::vector<std::string>& header,
           const std::function<void(CsvWriter&)>& fill) {
    if (!opts_.write_files) return;
    fs::create_directories(out_);
    CsvWriter w((fs::path(out_) / file).string(), header);
    fill(w);
    w.close();
    artifacts_.push_back(file);
  }

  json finish(const std::string& command, const std::string& scenario) {
    json report;
    report["schema"] = kReportSchema;
    report["tool_version"] = kToolVersion;
    report["command"] = command;
    report["scenario"] = scenario.empty() ? json(nullptr) : json(scenario);
    report["config"] = cfg_.values();
    report["stages"] = stages_;
    report["timings"] = timings_;
    report["timestamp"] = utc_timestamp();
    report["summary"] = summary_;
    report["results"] = results_;
    if (opts_.write_files) artifacts_.push_back("report.json");
    std::sort(artifacts_.begin(), artifacts_.end());
    report["artifacts"] = artifacts_;
    if (opts_.write_files) {
      fs::create_directories(out_);
      std::ofstream f(fs::path(out_) / "report.json", std::ios::binary);
      if (!f) throw StageError("report", "cannot write " + (fs::path(out_) / "report.json").string());
      f << dump_report(report);
    }
    return report;
  }

 private:
  AnalysisConfig cfg_;
  RunOptions opts_;
  std::string out_;
  std::uint64_t seed_ = 1;
  json results_ = json::object();
  json timings_ = json::object();
  std::vector<std::string> stages_;
  std::vector<std::string> artifacts_;
  std::string summary_;
};

struct Subject {
  PiecewiseMap map;
  Observable f;
  std::optional<double> centering;
};

Subject subject(Run& run) {
  PiecewiseMap map = run.stage("map", [&] { return build_map(run.cfg()); });
  Observable f = run.stage("observable", [&] { return build_observable(map, run.cfg().text("observable.spec")); });
  run.results()["map"] = map.describe();
  run.results()["observable"] = f.descriptor;
  std::optional<double> c;
  if (run.cfg().boolean("observable.center")) {
    const auto& cfg = run.cfg();
    InvariantMeanOptions o;
    o.steps = cfg.u64("centering.steps");
    o.burn_in = cfg.u64("centering.burn_in");
    o.n_bins = cfg.u64("centering.n_bins");
    o.tolerance = cfg.real("centering.tol");
    o.seed = run.seed("centering");
    const InvariantMean m = run.stage("centering", [&] { return invariant_mean(map, f.fn, o); });
    run.results()["centering"] = to_json(m);
    c = m.value;
    f = shifted(f, m.value);
  }
  return {std::move(map), std::move(f), c};
}

std::string pass_fail(const AxiomReport& r) { return r.axiom + " " + to_string(r.verdict); }

void cmd_axioms(Run& run) {
  const auto& cfg = run.cfg();
  const PiecewiseMap map = run.stage("map", [&] { return build_map(cfg); });
  run.results()["map"] = map.describe();
  std::string system = cfg.text("axioms.system");
  if (system == "auto") system = map.alpha() ? "induced" : "map";
  const std::size_t samples = cfg.u64("axioms.samples");
  const std::size_t n_cells = cfg.u64("axioms.cells");

  std::optional<InducedSystem> induced;
  std::vector<Branch> elements;
  if (system == "induced") {
    induced = run.stage("induce", [&] {
      return induce(map, parse_interval(cfg.text("induce.y")), cfg.u64("induce.n_max"));
    });
    elements = elements_of(*induced, n_cells);
  } else {
    elements = elements_of(map);
  }
  json& out = run.results()["axioms"];
  out["system"] = system;
  out["elements"] = elements.size();
  std::vector<std::string> parts;

  const AxiomReport exp = run.stage("axioms.expansion", [&] {
    return check_expansion(elements, samples, run.seed("axioms.expansion"));
  });
  const AxiomReport dist = run.stage("axioms.distortion", [&] {
    return check_distortion(elements, samples, run.seed("axioms.distortion"));
  });
  const AxiomReport bip = run.stage("axioms.bip", [&] { return check_bip(elements); });
  out["expansion"] = to_json(exp);
  out["distortion"] = to_json(dist);
  out["bip"] = to_json(bip);
  parts = {pass_fail(exp), pass_fail(dist), pass_fail(bip)};

  if (induced) {
    const auto tower_reports = run.stage("axioms.tower", [&] {
      const YoungTower tower = tower_of(*induced);
      return check_tower_axioms(tower, n_cells, samples, run.seed("axioms.tower"));
    });
    json arr = json::array();
    std::vector<Verdict> vs;
    for (const auto& r : tower_reports) {
      arr.push_back(to_json(r));
      vs.push_back(r.verdict);
    }
    out["tower"] = {{"verdict", combine(vs)}, {"checks", arr}};
    parts.push_back("tower " + combine(vs));
  }

  const AxiomReport iter = run.stage("axioms.iterate-distortion", [&] {
    const std::size_t k = cfg.u64("axioms.k_max"), z = cfg.u64("axioms.z_samples"),
                      sym = cfg.u64("axioms.symbol_limit");
    const auto s = run.seed("axioms.iterate-distortion");
    return induced ? check_iterate_distortion(*induced, k, z, sym, s)
                   : check_iterate_distortion(elements, k, z, sym, s);
  });
  out["iterate_distortion"] = to_json(iter);
  parts.push_back(pass_fail(iter));

  DoeblinFortetOptions df;
  df.n_bins = cfg.u64("transfer.n_bins");
  df.p_max = cfg.u64("transfer.p_max");
  df.test_functions = cfg.u64("transfer.test_functions");
  df.seed = run.seed("axioms.doeblin-fortet");
  try {
    const DoeblinFortetEstimate est = run.stage("axioms.doeblin-fortet", [&] {
      try {
        return induced ? doeblin_fortet_estimate(*induced, df) : doeblin_fortet_estimate(map, df);
      } catch (const PreconditionError& e) {
        throw StageError("axioms.doeblin-fortet", std::string("skipped: ") + e.what());
      }
    });
    out["doeblin_fortet"] = to_json(est);
    parts.push_back(std::string("doeblin-fortet ") + (est.passed ? "pass" : "fail") + " (eta=" + fmt(est.eta, 4) + ")");
  } catch (const StageError& e) {
    if (e.stage() != "axioms.doeblin-fortet") throw;
    out["doeblin_fortet"] = {{"verdict", "skipped"}, {"note", e.what()}};
    parts.push_back("doeblin-fortet skipped");
  }

  if (induced) {
    const AxiomReport raw = run.stage("axioms.raw-expansion", [&] {
      return check_expansion(elements_of(map), samples, run.seed("axioms.raw-expansion"));
    });
    out["raw_map_expansion"] = to_json(raw);
  }

  std::string summary = system + " system:";
  for (std::size_t i = 0; i < parts.size(); ++i) summary += (i ? ", " : " ") + parts[i];
  run.set_summary(summary);
}

void cmd_induce(Run& run) {
  const auto& cfg = run.cfg();
  const PiecewiseMap map = run.stage("map", [&] { return build_map(cfg); });
  const Interval y = parse_interval(cfg.text("induce.y"));
  const InducedSystem sys = run.stage("induce", [&] { return induce(map, y, cfg.u64("induce.n_max")); });
  const YoungTower tower = run.stage("tower", [&] { return tower_of(sys); });
  double covered = 0.0;
  for (std::size_t n = 1; n <= sys.resolved(); ++n) covered += sys.cell(n).length();
  const std::size_t shown = std::min<std::size_t>(cfg.u64("induce.cells"), sys.resolved());
  json cells = json::array();
  std::vector<std::array<double, 5>> rows;
  for (std::size_t n = 1; n <= shown; ++n) {
    const Interval b = sys.cell(n);
    const double mid = 0.5 * (b.lo + b.hi);
    const double dmin = std::min({sys.derivative(n, b.lo), sys.derivative(n, mid), sys.derivative(n, b.hi)});
    rows.push_back({static_cast<double>(n), b.lo, b.hi, b.length(), dmin});
    cells.push_back({{"n", n}, {"cell", b.to_string()}, {"length", b.length()}, {"min_derivative", dmin}});
  }
  run.results()["map"] = map.describe();
  run.results()["induce"] = {{"y", y.to_string()},
                             {"resolved", sys.resolved()},
                             {"tail", sys.unresolved_tail().to_string()},
                             {"tail_length", sys.tail_length()},
                             {"covered_length", covered},
                             {"expansion", sys.expansion()},
                             {"tower_levels", tower.level_count()},
                             {"lebesgue_return_integral", tower.kac_sum()},
                             {"cells", cells}};
  run.csv("return_partition.csv", {"n", "left", "right", "length", "min_derivative"}, [&](CsvWriter& w) {
    for (const auto& r : rows) w.row({r.begin(), r.end()});
  });
  run.set_summary("resolved " + std::to_string(sys.resolved()) + " return cells on " + y.to_string() +
                  ", tail length " + fmt(sys.tail_length(), 3) + ", expansion " + fmt(sys.expansion(), 6));
}

ObstructionReport obstructions(Run& run, const Subject& s, std::size_t max_period, double tol) {
  const ObstructionReport rep = run.stage("livsic", [&] { return livsic_obstructions(s.map, s.f, max_period, tol); });
  json j = to_json(s.map, rep);
  if (s.centering) {
    for (const auto& e : rep.entries) {
      if (e.orbit.period() == 1 && e.orbit.points.front() == 0.0) {
        j["neutral_fixed_point"] = {{"sum", e.sum}, {"minus_c", -*s.centering}, {"difference", std::abs(e.sum + *s.centering)}};
      }
    }
  }
  run.results()["livsic"] = std::move(j);
  run.csv("obstructions.csv", {"period", "point", "sum"}, [&](CsvWriter& w) {
    for (const auto& e : rep.entries) w.row({static_cast<double>(e.orbit.period()), e.orbit.points.front(), e.sum});
  });
  return rep;
}

void cmd_livsic(Run& run) {
  const Subject s = subject(run);
  const ObstructionReport rep = obstructions(run, s, run.cfg().u64("livsic.max_period"), run.cfg().real("livsic.tol"));
  run.set_summary(rep.verdict(s.map));
}

std::optional<HolderEstimate> solve_and_estimate(Run& run, const Subject& s) {
  const auto& cfg = run.cfg();
  std::optional<json> rejected;
  const std::optional<SampledFunction> solved = run.stage("solve", [&]() -> std::optional<SampledFunction> {
    try {
      return solve_coboundary(s.map, s.f, cfg.u64("solve.orbit_length"), cfg.real_or_random("solve.x0"),
                              run.seed("solve"));
    } catch (const NotACoboundaryError& e) {
      rejected = json{{"status", "not-a-coboundary"}, {"point", e.point()}, {"discrepancy", e.discrepancy()},
                      {"message", e.what()}};
      return std::nullopt;
    }
  });
  if (!solved) {
    run.results()["solve"] = *rejected;
    run.set_summary("not a coboundary: inconsistent values at x=" + fmt((*rejected)["point"].get<double>(), 17));
    return std::nullopt;
  }
  const SampledFunction& u = *solved;
  json j = to_json(u);
  j["status"] = "solved";
  const std::string spec = cfg.text("observable.spec");
  if (spec.rfind("coboundary-of:", 0) == 0) {
    // u = g - g(x0) exactly, so u - g must be constant
    const auto& g = corpus_function(spec.substr(14));
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = u.values[i] - g.fn(u.points[i]);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    j["recovery_error"] = hi - lo;
  }
  run.results()["solve"] = std::move(j);
  run.csv("u.csv", {"point", "value"}, [&](CsvWriter& w) {
    for (std::size_t i = 0; i < u.size(); ++i) w.row({u.points[i], u.values[i]});
  });
  HolderOptions ho;
  ho.metric = cfg.text("solve.metric") == "symbolic" ? Metric::symbolic : Metric::euclidean;
  ho.restriction = interval_or_none(cfg.text("solve.restrict"));
  ho.map = &s.map;
  ho.seed = run.seed("holder");
  const double gamma = cfg.real("solve.gamma");
  const HolderEstimate h = run.stage("holder", [&] { return holder_estimate(u, gamma, ho); });
  run.results()["holder"] = to_json(h);
  run.csv("holder_bands.csv", {"k", "pairs", "evaluated", "constant", "reliable"}, [&](CsvWriter& w) {
    for (const auto& b : h.bands) {
      if (b.pairs == 0) continue;
      w.row({static_cast<double>(b.k), static_cast<double>(b.pairs), static_cast<double>(b.evaluated), b.constant,
             b.reliable ? 1.0 : 0.0});
    }
  });
  return h;
}

std::string holder_summary(const HolderEstimate& h, std::size_t orbit_points) {
  std::string where = h.restriction ? " on " + h.restriction->to_string() : std::string();
  return "recovered u on " + std::to_string(orbit_points) + " orbit points; Hölder-" + fmt(h.gamma) + " constant" +
         where + " " + fmt(h.max_constant(), 4) + ", stability ratio " + fmt(h.stability_ratio, 4);
}

void cmd_solve(Run& run) {
  const Subject s = subject(run);
  if (auto h = solve_and_estimate(run, s)) run.set_summary(holder_summary(*h, run.results()["solve"]["points"].get<std::size_t>()));
}

LatticeVerdict lattice(Run& run, const Subject& s, const std::string& stage, json& out) {
  const auto& cfg = run.cfg();
  const ObstructionReport rep = run.stage(stage + ".obstructions", [&] {
    return livsic_obstructions(s.map, s.f, cfg.u64("aperiodicity.max_period"), cfg.real("livsic.tol"));
  });
  const LatticeVerdict v = run.stage(stage, [&] {
    return aperiodicity_test(s.map, rep, cfg.u64("aperiodicity.k_max"), cfg.real("aperiodicity.tol"));
  });
  out = to_json(v);
  out["orbits"] = rep.entries.size();
  return v;
}

void cmd_aperiodicity(Run& run) {
  const Subject s = subject(run);
  const LatticeVerdict v = lattice(run, s, "aperiodicity", run.results()["aperiodicity"]);
  run.set_summary(v.summary());
}

std::string variance_summary(const VarianceEstimate& v) {
  std::string s = "σ² = " + fmt(v.sigma2) + " (" + v.method + ")";
  if (std::isfinite(v.ci_low)) s += ", 95% CI [" + fmt(v.ci_low) + ", " + fmt(v.ci_high) + "]";
  return s;
}

void cmd_variance(Run& run) {
  const Subject s = subject(run);
  const auto& cfg = run.cfg();
  const std::string mode = cfg.text("variance.mode");
  VarianceParams p;
  p.n_bins = cfg.u64("variance.n_bins");
  p.max_lag = cfg.u64("variance.max_lag");
  p.steps = cfg.u64("variance.steps");
  p.burn_in = cfg.u64("variance.burn_in");
  p.batch_length = cfg.u64("variance.batch_length");
  p.streams = cfg.u64("variance.streams");
  p.bootstrap = cfg.u64("variance.bootstrap");
  std::vector<std::string> parts;
  json& out = run.results()["variance"];
  if (mode == "ulam" || mode == "both") {
    p.mode = VarianceMode::ulam;
    p.seed = run.seed("variance.ulam");
    const VarianceEstimate v = run.stage("variance.ulam", [&] { return green_kubo_variance(s.map, s.f, p); });
    out["ulam"] = to_json(v);
    parts.push_back(variance_summary(v));
    run.csv("correlations.csv", {"lag", "correlation", "partial_sum"}, [&](CsvWriter& w) {
      for (std::size_t k = 0; k < v.correlations.size(); ++k) {
        w.row({static_cast<double>(k), v.correlations[k], k < v.partial_sums.size() ? v.partial_sums[k] : NAN});
      }
    });
    const UlamOperator op = run.stage("variance.ulam-matrix", [&] { return ulam_matrix(s.map, p.n_bins); });
    const Eigen::VectorXd rho = run.stage("variance.density", [&] { return invariant_density(op, p.density_tol); });
    run.csv("density.csv", {"bin_center", "density"}, [&](CsvWriter& w) {
      for (Eigen::Index i = 0; i < rho.size(); ++i) w.row({(static_cast<double>(i) + 0.5) * op.bin_width(), rho[i]});
    });
    run.csv("ulam_matrix.csv", {"row", "col", "value"}, [&](CsvWriter& w) {
      for (int c = 0; c < op.matrix.outerSize(); ++c) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.matrix, c); it; ++it) {
          w.row({static_cast<double>(it.row()), static_cast<double>(it.col()), it.value()});
        }
      }
    });
  }
  if (mode == "monte-carlo" || mode == "both") {
    p.mode = VarianceMode::monte_carlo;
    p.seed = run.seed("variance.monte-carlo");
    const VarianceEstimate v = run.stage("variance.monte-carlo", [&] { return green_kubo_variance(s.map, s.f, p); });
    out["monte_carlo"] = to_json(v);
    parts.push_back(variance_summary(v));
  }
  std::string summary;
  for (const auto& part : parts) summary += (summary.empty() ? "" : "; ") + part;
  run.set_summary(summary);
}

void scenario_defaults(AnalysisConfig& cfg, const std::string& name) {
  auto d = [&](const char* k, const char* v) { cfg.apply_default(k, v); };
  if (name == "corollary-1" || name == "corollary-2" || name == "variance-positivity") {
    d("map.name", "lsv");
    d("map.alpha", "0.25");
    d("observable.spec", "log-derivative");
    d("observable.center", "true");
    d("livsic.max_period", "10");
    d("aperiodicity.max_period", "10");
    d("aperiodicity.k_max", "50");
    d("aperiodicity.tol", "1e-4");
    d("variance.mode", "monte-carlo");
  } else if (name == "theorem-2-regularity") {
    d("map.name", "lsv");
    d("map.alpha", "0.5");
    d("observable.spec", "coboundary-of:g1");
    d("observable.center", "false");
    d("livsic.max_period", "12");
    d("livsic.tol", "1e-7");
    d("solve.orbit_length", "10000");
    d("solve.gamma", "1");
    d("solve.metric", "euclidean");
    d("solve.restrict", "(0.5,1]");
  } else {
    std::string list;
    for (const auto& s : scenarios()) list += (list.empty() ? "" : ", ") + s;
    throw ConfigError("unknown scenario '" + name + "' (expected one of: " + list + ")");
  }
}

void run_scenario(Run& run, const std::string& name) {
  if (name == "corollary-1") {
    const Subject s = subject(run);
    const ObstructionReport rep =
        obstructions(run, s, run.cfg().u64("livsic.max_period"), run.cfg().real("livsic.tol"));
    run.set_summary(rep.verdict(s.map));
  } else if (name == "corollary-2") {
    const Subject s = subject(run);
    const LatticeVerdict v = lattice(run, s, "aperiodicity", run.results()["aperiodicity"]);
    const PiecewiseMap d = doubling_map();
    const Subject control{d, indicator(d, Interval::left_open(0.5, 1.0)), std::nullopt};
    json& c = run.results()["control"];
    const LatticeVerdict cv = lattice(run, control, "control", c);
    c["map"] = d.describe();
    c["observable"] = control.f.descriptor;
    run.set_summary(v.summary() + "; control: " + cv.summary());
  } else if (name == "theorem-2-regularity") {
    const Subject s = subject(run);
    const ObstructionReport rep =
        obstructions(run, s, run.cfg().u64("livsic.max_period"), run.cfg().real("livsic.tol"));
    std::string summary = rep.verdict(s.map);
    if (auto h = solve_and_estimate(run, s)) summary += "; " + holder_summary(*h, run.results()["solve"]["points"].get<std::size_t>());
    run.set_summary(summary);
  } else {
    cmd_variance(run);
    const json& mc = run.results()["variance"]["monte_carlo"];
    const double lo = mc["ci95"][0].is_number() ? mc["ci95"][0].get<double>() : NAN;
    const double hi = mc["ci95"][1].is_number() ? mc["ci95"][1].get<double>() : NAN;
    const bool excludes = (lo > 0.0) || (hi < 0.0);
    run.results()["ci_excludes_zero"] = excludes;
    run.set_summary("σ² = " + fmt(mc["sigma2"].get<double>()) + ", 95% CI [" + fmt(lo) + ", " + fmt(hi) + "] " +
                    (excludes ? "excludes 0" : "contains 0"));
  }
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"axioms", "induce", "livsic", "solve", "aperiodicity", "variance", "scenario"};
  return c;
}

const std::vector<std::string>& scenarios() {
  static const std::vector<std::string> s = {"corollary-1", "corollary-2", "theorem-2-regularity", "variance-positivity"};
  return s;
}

PiecewiseMap build_map(const AnalysisConfig& config) {
  if (config.text("map.name") == "doubling") return doubling_map();
  return lsv_map(config.real("map.alpha"));
}

Observable build_observable(const PiecewiseMap& map, const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "log-derivative" && colon == std::string::npos) return log_derivative(map);
  if (colon == std::string::npos || arg.empty()) throw ConfigError("observable '" + spec + "' is not recognised");
  if (kind == "coboundary-of") {
    for (const auto& g : coboundary_corpus()) {
      if (g.name == arg) return coboundary_of(map, g);
    }
    throw ConfigError("observable '" + spec + "': unknown function '" + arg + "' (expected g1, g2 or g3)");
  }
  if (kind == "affine") {
    const std::string a = replace_all(arg, "\xE2\x88\x92", "-");  // U+2212 minus sign
    const auto comma = a.find(',');
    if (comma == std::string::npos) throw ConfigError("observable '" + spec + "': expected affine:<a,b>");
    return affine(map, parse_number(a.substr(0, comma), spec), parse_number(a.substr(comma + 1), spec));
  }
  if (kind == "indicator") {
    try {
      return indicator(map, parse_interval(arg));
    } catch (const livsic::Error& e) {
      throw ConfigError("observable '" + spec + "': " + e.what());
    }
  }
  if (kind == "table") return table_observable(map, arg);
  throw ConfigError("observable '" + spec + "' is not recognised");
}

json run(const std::string& command, const std::string& scenario, AnalysisConfig config, const RunOptions& options) {
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  if (command == "scenario") scenario_defaults(config, scenario);
  if (config.text("map.name") == "lsv") {
    const double a = config.real("map.alpha");
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("key 'map.alpha': " + config.text("map.alpha") + " is not in (0,1)");
  }
  Run run(std::move(config), options);
  if (command == "axioms") cmd_axioms(run);
  else if (command == "induce") cmd_induce(run);
  else if (command == "livsic") cmd_livsic(run);
  else if (command == "solve") cmd_solve(run);
  else if (command == "aperiodicity") cmd_aperiodicity(run);
  else if (command == "variance") cmd_variance(run);
  else run_scenario(run, scenario);
  return run.finish(command, command == "scenario" ? scenario : "");
}

}  // namespace livsic::cli

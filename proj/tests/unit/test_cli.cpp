#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "report.hpp"
#include "runner.hpp"

using namespace livsic;
using namespace livsic::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("livsic-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(LIVSIC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

AnalysisConfig quick(const std::string& text) {
  AnalysisConfig c = AnalysisConfig::parse(text);
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const AnalysisConfig c = AnalysisConfig::parse(
      "# comment\n"
      "seed = 7\n"
      "[map]\n"
      "name = doubling\n"
      "[livsic]\n"
      "max_period = 8   # trailing\n");
  CHECK(c.u64("seed") == 7);
  CHECK(c.text("map.name") == "doubling");
  CHECK(c.u64("livsic.max_period") == 8);
  CHECK(c.real("map.alpha") == 0.5);
  CHECK(c.explicitly_set("map.name"));
  CHECK_FALSE(c.explicitly_set("map.alpha"));
  CHECK_FALSE(c.real_or_random("solve.x0").has_value());
}

TEST_CASE("strict schema") {
  try {
    AnalysisConfig::parse("map.colour = red\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("map.colour") != std::string::npos);
  }
  CHECK_THROWS_AS(AnalysisConfig::parse("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(AnalysisConfig::parse("seed = -1\n"), ConfigError);
  CHECK_THROWS_AS(AnalysisConfig::parse("map.name = tent\n"), ConfigError);
  CHECK_THROWS_AS(AnalysisConfig::parse("map.alpha = abc\n"), ConfigError);
  CHECK_THROWS_AS(AnalysisConfig::parse("observable.center = maybe\n"), ConfigError);
  CHECK_THROWS_AS(AnalysisConfig::parse("[map\nname = lsv\n"), ConfigError);
  CHECK_THROWS_AS(AnalysisConfig::parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(AnalysisConfig::parse("induce.y = (0.5,\n"), ConfigError);
  AnalysisConfig c;
  CHECK_THROWS_AS(c.set("nope", "1"), ConfigError);
}

TEST_CASE("scenario defaults respect explicit keys") {
  AnalysisConfig c = AnalysisConfig::parse("map.alpha = 0.3\n");
  c.apply_default("map.alpha", "0.25");
  c.apply_default("map.name", "doubling");
  CHECK(c.real("map.alpha") == 0.3);
  CHECK(c.text("map.name") == "doubling");
  CHECK_THROWS_AS(c.apply_default("map.name", "tent"), ConfigError);
}

TEST_CASE("observable specs") {
  const auto d = doubling_map();
  CHECK(build_observable(d, "affine:1,-0.5").fn(0.75) == 0.25);
  CHECK(build_observable(d, "affine:1,−0.5").fn(0.75) == 0.25);
  CHECK(build_observable(d, "indicator:(0.5,1]").fn(0.5) == 0.0);
  CHECK(build_observable(d, "indicator:(0.5,1]").fn(0.75) == 1.0);
  const auto g1 = build_observable(d, "coboundary-of:g1");
  CHECK(g1.fn(0.3) == doctest::Approx(0.3 * 0.7 - 0.6 * 0.4).epsilon(1e-14));
  const auto t = lsv_map(0.5);
  CHECK(build_observable(t, "log-derivative").fn(0.75) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(build_observable(d, "coboundary-of:g9"), ConfigError);
  CHECK_THROWS_AS(build_observable(d, "affine:1"), ConfigError);
  CHECK_THROWS_AS(build_observable(d, "sine"), ConfigError);
  CHECK_THROWS_AS(build_observable(d, "table:/nonexistent/file.csv"), ConfigError);

  const fs::path dir = scratch("table");
  std::ofstream(dir / "f.csv") << "x,value\n0,0\n1,2\n";
  const auto tab = build_observable(d, "table:" + (dir / "f.csv").string());
  CHECK(tab.fn(0.25) == 0.5);
  CHECK(tab.fn(1.0) == 2.0);
  std::ofstream(dir / "bad.csv") << "0,0\n0.5 1\n";
  CHECK_THROWS_AS(build_observable(d, "table:" + (dir / "bad.csv").string()), ConfigError);
}

TEST_CASE("livsic on a doubling coboundary") {
  AnalysisConfig c = quick("map.name = doubling\nobservable.spec = coboundary-of:g1\n");
  const json r = run("livsic", "", c, {.out_dir = scratch("livsic").string()});
  CHECK(r["summary"] == "unobstructed up to period 10");
  CHECK(r["results"]["livsic"]["verdict"] == "unobstructed up to period 10");
  CHECK(r["schema"] == kReportSchema);
  const fs::path dir = fs::temp_directory_path() / "livsic-test-livsic";
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "obstructions.csv"));
}

TEST_CASE("variance on the doubling map") {
  AnalysisConfig c = quick(
      "map.name = doubling\nobservable.spec = affine:1,-0.5\nvariance.steps = 1000000\nvariance.bootstrap = 200\n");
  const json r = run("variance", "", c, {.out_dir = "", .quiet = true, .write_files = false});
  const double u = r["results"]["variance"]["ulam"]["sigma2"];
  const double mc = r["results"]["variance"]["monte_carlo"]["sigma2"];
  CHECK(std::abs(u - 0.25) <= 0.02);
  CHECK(std::abs(mc - 0.25) <= 0.02);
}

TEST_CASE("corollary-1 scenario") {
  const json r = run("scenario", "corollary-1", AnalysisConfig(), {.out_dir = "", .quiet = true, .write_files = false});
  CHECK(r["summary"] == "obstructed at fixed point 0");
  const json& n = r["results"]["livsic"]["neutral_fixed_point"];
  CHECK(n["difference"].get<double>() == 0.0);
  CHECK(n["sum"].get<double>() < -0.1);
}

TEST_CASE("stage attribution") {
  AnalysisConfig c = quick("map.name = lsv\nobservable.spec = log-derivative\nvariance.n_bins = 1\nvariance.mode = ulam\n");
  try {
    run("variance", "", c, {.out_dir = "", .quiet = true, .write_files = false});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "variance.ulam");
  }
  CHECK_THROWS_AS(run("scenario", "no-such-scenario", AnalysisConfig(), {.out_dir = "", .quiet = true, .write_files = false}), ConfigError);
  CHECK_THROWS_AS(run("plot", "", AnalysisConfig(), {.out_dir = "", .quiet = true, .write_files = false}), ConfigError);
}

TEST_CASE("scenario runs are deterministic") {
  for (const auto& name : scenarios()) {
    const fs::path a = scratch(name + "-a"), b = scratch(name + "-b");
    const json ra = run("scenario", name, AnalysisConfig(), {.out_dir = a.string()});
    const json rb = run("scenario", name, AnalysisConfig(), {.out_dir = b.string()});
    CHECK_MESSAGE(dump_report(strip_volatile(ra)) == dump_report(strip_volatile(rb)), name);
    CHECK(ra.contains("timings"));
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto fname = entry.path().filename();
      if (fname == "report.json") continue;
      ++files;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / fname), name, "/", fname.string());
    }
    if (name == "corollary-1" || name == "theorem-2-regularity") CHECK(files >= 1);
    const json disk = json::parse(slurp(a / "report.json"));
    CHECK(dump_report(strip_volatile(disk)) == dump_report(strip_volatile(ra)));
  }
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("exit");
  std::ofstream(dir / "ok.conf") << "map.name = doubling\nobservable.spec = coboundary-of:g1\n";
  std::ofstream(dir / "bad.conf") << "map.nmae = doubling\n";
  const std::string out = " --out " + (dir / "out").string();
  CHECK(run_binary("--quiet --config " + (dir / "ok.conf").string() + out + " livsic") == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(run_binary("--config " + (dir / "bad.conf").string() + out + " livsic") == 2);
  CHECK(run_binary("scenario nonsense") == 2);
  CHECK(run_binary("frobnicate") == 2);
  CHECK(run_binary("--version") == 0);
}

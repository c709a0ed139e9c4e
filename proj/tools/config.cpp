#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "livsic/errors.hpp"
#include "livsic/interval.hpp"

namespace livsic::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const KeyDef* find_key(const std::string& name) {
  for (const auto& k : schema()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  // allow 1e7 style for counts
  if (s.find_first_of("eE.") != std::string::npos) {
    double d = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), d);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
      return false;
    }
    out = static_cast<std::uint64_t>(d);
    return true;
  }
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_real(const std::string& s, double& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

void validate(const KeyDef& k, const std::string& v) {
  auto bad = [&](const std::string& what) {
    throw ConfigError("key '" + k.name + "': '" + v + "' is not " + what);
  };
  switch (k.type) {
    case KeyType::u64: {
      std::uint64_t u = 0;
      if (!parse_u64(v, u)) bad("a nonnegative integer");
      break;
    }
    case KeyType::real: {
      double d = 0.0;
      if (!parse_real(v, d)) bad("a real number");
      break;
    }
    case KeyType::real_or_random: {
      double d = 0.0;
      if (v != "random" && !parse_real(v, d)) bad("a real number or 'random'");
      break;
    }
    case KeyType::boolean:
      if (v != "true" && v != "false") bad("true or false");
      break;
    case KeyType::choice: {
      bool ok = false;
      for (const auto& c : k.choices) ok = ok || c == v;
      if (!ok) {
        std::string list;
        for (const auto& c : k.choices) list += (list.empty() ? "" : ", ") + c;
        bad("one of: " + list);
      }
      break;
    }
    case KeyType::interval:
      if (v != "none") {
        try {
          parse_interval(v);
        } catch (const livsic::Error&) {
          bad("an interval such as (0.5,1] or 'none'");
        }
      }
      break;
    case KeyType::text:
      if (v.empty()) bad("a non-empty string");
      break;
  }
}

}  // namespace

const std::vector<KeyDef>& schema() {
  using T = KeyType;
  static const std::vector<KeyDef> keys = {
      {"seed", T::u64, "1", {}, "master seed; every stochastic stage derives its stream from it"},
      {"output.dir", T::text, "livsic-out", {}, "directory for report.json and CSV files"},
      {"map.name", T::choice, "lsv", {"lsv", "doubling"}, "builtin map"},
      {"map.alpha", T::real, "0.5", {}, "LSV exponent in (0,1)"},
      {"observable.spec", T::text, "log-derivative", {},
       "log-derivative | coboundary-of:<g1|g2|g3> | affine:<a,b> | indicator:<interval> | table:<csv path>"},
      {"observable.center", T::boolean, "false", {}, "subtract the invariant mean (computed two ways)"},
      {"centering.steps", T::u64, "10000000", {}, "orbit length of the Birkhoff average"},
      {"centering.burn_in", T::u64, "10000", {}, "discarded initial steps"},
      {"centering.n_bins", T::u64, "16384", {}, "Ulam bins of the quadrature route"},
      {"centering.tol", T::real, "1e-3", {}, "required agreement of the two routes"},
      {"induce.y", T::interval, "(0.5,1]", {}, "inducing set"},
      {"induce.n_max", T::u64, "10000", {}, "return-time cap"},
      {"induce.cells", T::u64, "40", {}, "cells written to return_partition.csv"},
      {"axioms.system", T::choice, "auto", {"auto", "map", "induced"},
       "system checked; auto checks the induced system of lsv and the map itself otherwise"},
      {"axioms.samples", T::u64, "100", {}, "samples per element"},
      {"axioms.cells", T::u64, "40", {}, "induced cells checked"},
      {"axioms.k_max", T::u64, "4", {}, "longest cylinder word for iterate distortion"},
      {"axioms.symbol_limit", T::u64, "4", {}, "cells used as symbols for iterate distortion"},
      {"axioms.z_samples", T::u64, "100", {}, "random sets Z per cylinder length"},
      {"transfer.n_bins", T::u64, "4096", {}, "grid points of the Doeblin-Fortet estimate"},
      {"transfer.p_max", T::u64, "10", {}, "largest power of the transfer operator fitted"},
      {"transfer.test_functions", T::u64, "32", {}, "random test functions"},
      {"livsic.max_period", T::u64, "10", {}, "longest periodic orbit (at most 20)"},
      {"livsic.tol", T::real, "1e-6", {}, "obstruction tolerance"},
      {"solve.orbit_length", T::u64, "10000", {}, "orbit points of the reconstruction"},
      {"solve.x0", T::real_or_random, "random", {}, "starting point or 'random'"},
      {"solve.gamma", T::real, "1", {}, "Hölder exponent of the estimate"},
      {"solve.metric", T::choice, "euclidean", {"euclidean", "symbolic"}, "metric of the estimate"},
      {"solve.restrict", T::interval, "(0.5,1]", {}, "domain restriction of the estimate, or none"},
      {"aperiodicity.max_period", T::u64, "10", {}, "longest periodic orbit used"},
      {"aperiodicity.k_max", T::u64, "50", {}, "lattice candidates |r*|/k for k <= k_max"},
      {"aperiodicity.tol", T::real, "1e-4", {}, "lattice tolerance"},
      {"variance.mode", T::choice, "both", {"ulam", "monte-carlo", "both"}, "estimators run"},
      {"variance.n_bins", T::u64, "4096", {}, "Ulam bins"},
      {"variance.max_lag", T::u64, "1000", {}, "largest Green-Kubo lag"},
      {"variance.steps", T::u64, "10000000", {}, "Monte-Carlo steps over all streams"},
      {"variance.burn_in", T::u64, "10000", {}, "discarded steps per stream"},
      {"variance.batch_length", T::u64, "1000", {}, "batch length"},
      {"variance.streams", T::u64, "8", {}, "independent orbit streams"},
      {"variance.bootstrap", T::u64, "1000", {}, "bootstrap resamples"},
  };
  return keys;
}

AnalysisConfig::AnalysisConfig() {
  for (const auto& k : schema()) values_[k.name] = k.default_value;
}

void AnalysisConfig::set(const std::string& key, const std::string& value) {
  const KeyDef* k = find_key(key);
  if (k == nullptr) throw ConfigError("unknown configuration key '" + key + "'");
  validate(*k, value);
  values_[key] = value;
  explicit_[key] = true;
}

void AnalysisConfig::apply_default(const std::string& key, const std::string& value) {
  const KeyDef* k = find_key(key);
  if (k == nullptr) throw ConfigError("unknown configuration key '" + key + "'");
  validate(*k, value);
  if (!explicitly_set(key)) values_[key] = value;
}

AnalysisConfig AnalysisConfig::parse(const std::string& text, const std::string& origin) {
  AnalysisConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::map<std::string, int> seen;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    if (seen.count(key)) {
      throw ConfigError(where + ": key '" + key + "' repeats line " + std::to_string(seen[key]));
    }
    seen[key] = lineno;
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return cfg;
}

AnalysisConfig AnalysisConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path);
}

const std::string& AnalysisConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

std::uint64_t AnalysisConfig::u64(const std::string& key) const {
  std::uint64_t u = 0;
  if (!parse_u64(text(key), u)) throw ConfigError("key '" + key + "' is not an integer");
  return u;
}

double AnalysisConfig::real(const std::string& key) const {
  double d = 0.0;
  if (!parse_real(text(key), d)) throw ConfigError("key '" + key + "' is not a real number");
  return d;
}

bool AnalysisConfig::boolean(const std::string& key) const { return text(key) == "true"; }

std::optional<double> AnalysisConfig::real_or_random(const std::string& key) const {
  if (text(key) == "random") return std::nullopt;
  return real(key);
}

}  // namespace livsic::cli

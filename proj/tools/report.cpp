#include "report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace livsic::cli {

namespace {

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

json to_json(const Interval& i) { return i.to_string(); }

json to_json(const AxiomReport& r) {
  json j;
  j["axiom"] = r.axiom;
  j["verdict"] = to_string(r.verdict);
  j["constant"] = number(r.constant);
  j["samples"] = r.samples;
  j["note"] = r.note;
  j["per_element"] = numbers(r.per_element);
  if (!r.witness_set.empty()) j["witness_set"] = r.witness_set;
  if (r.witness) {
    j["witness"] = {{"points", numbers(r.witness->points)},
                    {"element", r.witness->element},
                    {"value", number(r.witness->value)},
                    {"detail", r.witness->detail}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json to_json(const PiecewiseMap& map, const PeriodicOrbit& o) {
  return {{"word", word_string(map, o.word)},
          {"period", o.period()},
          {"points", numbers(o.points)},
          {"residual", number(o.residual)},
          {"flags", o.flags}};
}

json to_json(const PiecewiseMap& map, const ObstructionReport& r) {
  json j;
  j["verdict"] = r.verdict(map);
  j["obstructed"] = r.obstructed();
  j["tolerance"] = r.tol;
  j["max_period"] = r.max_period;
  j["rejected"] = r.rejected;
  json orbits = json::array();
  double worst = 0.0;
  for (const auto& e : r.entries) {
    json o = to_json(map, e.orbit);
    o["sum"] = number(e.sum);
    orbits.push_back(std::move(o));
    worst = std::max(worst, std::abs(e.sum));
  }
  j["orbits"] = std::move(orbits);
  j["orbit_count"] = r.entries.size();
  j["max_abs_sum"] = number(worst);
  return j;
}

json to_json(const SampledFunction& u) {
  json growth = json::array();
  for (const auto& g : u.range_growth) growth.push_back({{"length", g.length}, {"range", number(g.range)}});
  double lo = 0.0, hi = 0.0;
  if (!u.values.empty()) {
    lo = *std::min_element(u.values.begin(), u.values.end());
    hi = *std::max_element(u.values.begin(), u.values.end());
  }
  return {{"points", u.size()},
          {"orbit_length", u.orbit_length},
          {"base_point", number(u.base_point)},
          {"merged_duplicates", u.merged},
          {"range", number(hi - lo)},
          {"range_growth", std::move(growth)},
          {"range_growing", u.range_growing}};
}

json to_json(const HolderEstimate& h) {
  json bands = json::array();
  for (const auto& b : h.bands) {
    if (b.pairs == 0) continue;
    bands.push_back({{"k", b.k},
                     {"pairs", b.pairs},
                     {"evaluated", b.evaluated},
                     {"constant", number(b.constant)},
                     {"reliable", b.reliable}});
  }
  return {{"gamma", h.gamma},
          {"metric", h.metric == Metric::euclidean ? "euclidean" : "symbolic"},
          {"restriction", h.restriction ? json(h.restriction->to_string()) : json(nullptr)},
          {"points", h.points},
          {"bands", std::move(bands)},
          {"max_constant", number(h.max_constant())},
          {"stability_ratio", number(h.stability_ratio)},
          {"stability_band_limit", h.stability_band_limit}};
}

json to_json(const LatticeVerdict& v) {
  json res = json::array();
  for (const auto& r : v.residuals) {
    res.push_back({{"word", r.word}, {"period", r.period}, {"sum", number(r.sum)}, {"residual", number(r.residual)}});
  }
  return {{"verdict", v.summary()},
          {"outcome", to_string(v.outcome)},
          {"mu", number(v.mu)},
          {"lambda", v.lambda ? number(*v.lambda) : json(nullptr)},
          {"candidates_examined", v.candidates.size()},
          {"tolerance", v.tol},
          {"residuals", std::move(res)}};
}

json to_json(const InvariantMean& m) {
  return {{"birkhoff", number(m.birkhoff)},
          {"ulam", number(m.ulam)},
          {"value", number(m.value)},
          {"difference", number(std::abs(m.birkhoff - m.ulam))},
          {"tolerance", m.tolerance},
          {"steps", m.steps},
          {"burn_in", m.burn_in},
          {"n_bins", m.n_bins}};
}

json to_json(const DoeblinFortetEstimate& d) {
  return {{"M", number(d.M)},
          {"eta", number(d.eta)},
          {"M0", number(d.M0)},
          {"r", numbers(d.r)},
          {"grid_points", d.grid_points},
          {"elements", d.elements},
          {"tail_length", number(d.tail_length)},
          {"verdict", d.passed ? "pass" : "fail"},
          {"note", d.note}};
}

json to_json(const VarianceEstimate& v) {
  json j = {{"sigma2", number(v.sigma2)},
            {"method", v.method},
            {"centering", number(v.centering)},
            {"ci95", {number(v.ci_low), number(v.ci_high)}},
            {"flags", v.flags}};
  if (v.method == "green-kubo-ulam") {
    j["truncation"] = v.truncation;
    j["partial_sums"] = numbers(v.partial_sums);
  } else {
    j["batches"] = v.batches;
    j["batch_length"] = v.batch_length;
    j["steps"] = v.steps;
  }
  return j;
}

json strip_volatile(json report) {
  report.erase("timings");
  report.erase("timestamp");
  return report;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path) {
  for (std::size_t i = 0; i < header.size(); ++i) buffer_ += (i ? "," : "") + header[i];
  buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buffer_ += ',';
    const auto r = std::to_chars(buf, buf + sizeof buf, values[i]);
    buffer_.append(buf, r.ptr);
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path_);
  out << buffer_;
}

}  // namespace livsic::cli

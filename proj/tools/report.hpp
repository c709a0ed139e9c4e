#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "livsic/cohomology.hpp"
#include "livsic/gibbs_markov.hpp"
#include "livsic/inducing.hpp"
#include "livsic/transfer.hpp"

namespace livsic::cli {

using json = nlohmann::json;

inline constexpr const char* kReportSchema = "livsic-report/1";
inline constexpr const char* kToolVersion = "0.1.0";

json to_json(const Interval& i);
json to_json(const AxiomReport& r);
json to_json(const PiecewiseMap& map, const PeriodicOrbit& o);
json to_json(const PiecewiseMap& map, const ObstructionReport& r);
json to_json(const SampledFunction& u);
json to_json(const HolderEstimate& h);
json to_json(const LatticeVerdict& v);
json to_json(const InvariantMean& m);
json to_json(const DoeblinFortetEstimate& d);
json to_json(const VarianceEstimate& v);

/// Report with the wall-clock fields ("timings", "timestamp") removed, for
/// run-to-run comparison.
json strip_volatile(json report);

/// Sorted keys, two-space indent, trailing newline.
std::string dump_report(const json& report);

/// Minimal CSV writer: header row, then rows of numbers at round-trip precision.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void close();

 private:
  std::string path_;
  std::string buffer_;
};

}  // namespace livsic::cli

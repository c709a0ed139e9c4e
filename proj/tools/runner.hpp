#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "livsic/interval_maps.hpp"
#include "livsic/observable.hpp"
#include "report.hpp"

namespace livsic::cli {

/// A library error raised inside a named pipeline stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

const std::vector<std::string>& commands();
const std::vector<std::string>& scenarios();

struct RunOptions {
  std::string out_dir;  ///< overrides output.dir when non-empty
  bool quiet = true;
  bool write_files = true;
};

PiecewiseMap build_map(const AnalysisConfig& config);

/// log-derivative | coboundary-of:<g> | affine:<a,b> | indicator:<interval> | table:<path>.
/// ConfigError on a malformed spec.
Observable build_observable(const PiecewiseMap& map, const std::string& spec);

/// Executes a subcommand (or the named scenario when command == "scenario")
/// and returns the report. With write_files, report.json and the CSV side
/// files go to the output directory. Throws ConfigError or StageError.
json run(const std::string& command, const std::string& scenario, AnalysisConfig config,
         const RunOptions& options = {});

}  // namespace livsic::cli

#pragma once

// End-to-end runs driven by one INI-style config:
//
//   [run]
//   ; snapshot store, required
//   store = synth/snapshots
//   ; enables the trace stage by default
//   trace_store = synth/traces
//   out = results
//   seed = 7
//
//   [steer]
//   alpha = auto
//
// Stages run in the fixed order curate, probe, geometry, dims, steer, trace.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "actgeo/curation.hpp"
#include "actgeo/probes.hpp"
#include "actgeo/steering.hpp"
#include "actgeo/store.hpp"

namespace actgeo::pipeline {

enum class Format { json, csv };

inline constexpr const char* kStageNames[] = {"curate", "probe", "geometry", "dims", "steer", "trace"};

struct PipelineConfig {
  std::filesystem::path store;
  std::optional<std::filesystem::path> trace_store;
  std::filesystem::path out = "actgeo-out";
  std::uint64_t seed = 0;
  Format format = Format::json;
  unsigned threads = 1;
  // Layer for the steering probe, projections and PR groups; defaults to the
  // peak linear-probe layer, or the last snapshot layer without a probe stage.
  std::optional<int> layer;

  bool curate = true, probe = true, geometry = true, dims = true, steer = true, trace = false;

  curation::CurationConfig curation;

  PositionTag position = PositionTag::last_input();
  std::vector<probes::Family> families{std::begin(probes::kAllFamilies), std::end(probes::kAllFamilies)};
  int k = 5;
  bool grid_search = false;  // tune the logistic probe instead of using the defaults
  bool position_sweep = true;

  int cka_subsample = 200;
  int cka_repeats = 10;

  int resamples = 100;
  double variance_threshold = 0.9;
  std::vector<std::string> dims_groups = {"solved", "unsolved"};

  std::optional<std::filesystem::path> probe_file;
  std::optional<double> alpha;  // nullopt = auto
  steering::Sign sign = steering::Sign::to_solved;
  double belief_target = 0.95;
  std::optional<std::filesystem::path> baseline_outcomes;
  std::optional<std::filesystem::path> steered_outcomes;
  int permutations = 10000;

  std::optional<int> trace_layer;
  double trace_threshold = 0.9;
  std::string assess_group = "prompt";
  std::string exec_group = "cot";

  std::string config_hash;  // SHA-256 of the config text (line endings normalized)
};

// Every violation found; empty when the config is valid.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Parses and checks the config. Relative paths resolve against base_dir.
// Throws ConfigError listing every problem.
PipelineConfig validate_config(std::string_view text, const std::filesystem::path& base_dir = ".");

std::string sha256_hex(std::string_view data);

struct StageResult {
  std::string name;
  std::string status = "skipped";  // ok | failed | skipped | disabled
  std::string error;
  bool numeric_failure = false;  // error came from a NumericError; not serialized
  std::vector<std::string> artifacts;  // relative to the output directory
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<StageResult> stages;

  bool ok() const;
  // Deterministic: wall times are written to timings.json instead.
  std::string to_json() const;
  std::string timings_json() const;
};

// Writes artifacts, run_report.json and timings.json into config.out. A stage
// failure marks every later enabled stage "skipped" and is reported, not thrown.
RunReport run_pipeline(const PipelineConfig& config);

}  // namespace actgeo::pipeline

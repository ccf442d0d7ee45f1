#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cxr/analytics.hpp"
#include "cxr/augment.hpp"
#include "cxr/dataset.hpp"
#include "cxr/trainer.hpp"

namespace cxr {

inline constexpr int kFullScaleSide = 2048;

struct PipelineConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> run_dir;  // analyze input; defaults to <out>/runs
  int resize_side = 128;
  AugPolicy aug;
  std::uint64_t split_seed = 42;
  std::size_t split_min_records = 10;
  ModelConfig model;  // input_side always follows resize_side
  TrainConfig train;
  int runs = 1;
  LoessConfig loess;
  OverfitThresholds overfit;

  /// Applies one `key = value` setting. Throws InvalidConfig on unknown
  /// keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Throws InvalidConfig.
  void validate() const;
  /// Points every seed (split, model, train) at the same base value.
  void set_seed(std::uint64_t seed);

  std::filesystem::path runs_path() const;
};

/// Reads a flat `key = value` file; `#` starts a comment. Relative paths in
/// the file resolve against the file's directory.
void load_config_file(const std::filesystem::path& path, PipelineConfig& cfg);

/// Row of prepared/manifest.csv.
struct PreparedRecord {
  std::string id;
  std::string source_id;
  std::string variant;
  bool original = false;
  std::filesystem::path image_path;
  int label = 0;
  Gender gender = Gender::Unknown;
  std::optional<int> age;
};

std::vector<PreparedRecord> load_prepared_manifest(const std::filesystem::path& path);

/// Seeds of run k (1-based) are the configured seeds offset by k - 1.
PipelineConfig config_for_run(const PipelineConfig& cfg, int run);

/// Exit codes: 0 success, 1 domain error. Diagnostics go to `err`.
int cmd_eda(const PipelineConfig& cfg, std::ostream& err);
int cmd_prepare(const PipelineConfig& cfg, std::ostream& err);
int cmd_split(const PipelineConfig& cfg, std::ostream& err);
int cmd_train(const PipelineConfig& cfg, std::ostream& err);
int cmd_analyze(const PipelineConfig& cfg, std::ostream& err);

/// Two panels (accuracy, loss): mean lines with +-std whiskers and smoothed
/// overlays for every metric given.
std::string render_curves_svg(const std::vector<CurveStats>& stats);

}  // namespace cxr

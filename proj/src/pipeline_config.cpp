#include <charconv>
#include <fstream>

#include <fmt/core.h>

#include "cxr/error.hpp"
#include "cxr/pipeline.hpp"

namespace cxr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::InvalidConfig, fmt::format("bad value '{}' for '{}'", value, key));
}

template <typename T>
T parse_as(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad_value(key, value);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  for (;;) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "manifest") {
    manifest_path = std::string(value);
  } else if (key == "output_dir") {
    output_dir = std::string(value);
  } else if (key == "run_dir") {
    run_dir = std::filesystem::path(std::string(value));
  } else if (key == "resize_side") {
    resize_side = parse_as<int>(key, value);
  } else if (key == "aug.lossless") {
    aug.lossless = parse_bool(key, value);
  } else if (key == "aug.lossy_angles") {
    aug.lossy_angles.clear();
    for (auto item : split_list(value)) {
      // from_chars rejects a leading '+'.
      if (!item.empty() && item.front() == '+') item.remove_prefix(1);
      aug.lossy_angles.push_back(parse_as<double>(key, item));
    }
  } else if (key == "aug.include_original") {
    aug.include_original = parse_bool(key, value);
  } else if (key == "split.seed") {
    split_seed = parse_as<std::uint64_t>(key, value);
  } else if (key == "split.min_records") {
    split_min_records = parse_as<std::size_t>(key, value);
  } else if (key == "model.conv_blocks") {
    model.conv_blocks.clear();
    for (auto item : split_list(value)) {
      const auto x = item.find('x');
      if (x == std::string_view::npos) bad_value(key, value);
      model.conv_blocks.push_back(
          {parse_as<int>(key, item.substr(0, x)), parse_as<int>(key, item.substr(x + 1))});
    }
  } else if (key == "model.dense_units") {
    model.dense_units = parse_as<int>(key, value);
  } else if (key == "model.dropout_rate") {
    model.dropout_rate = parse_as<double>(key, value);
  } else if (key == "model.seed") {
    model.seed = parse_as<std::uint64_t>(key, value);
  } else if (key == "train.epochs") {
    train.epochs = parse_as<int>(key, value);
  } else if (key == "train.batch_size") {
    train.batch_size = parse_as<int>(key, value);
  } else if (key == "train.learning_rate") {
    train.learning_rate = parse_as<double>(key, value);
  } else if (key == "train.eval_every") {
    train.eval_every = parse_as<int>(key, value);
  } else if (key == "train.seed") {
    train.seed = parse_as<std::uint64_t>(key, value);
  } else if (key == "train.runs") {
    runs = parse_as<int>(key, value);
  } else if (key == "loess.span") {
    loess.span = parse_as<double>(key, value);
  } else if (key == "loess.degree") {
    loess.degree = parse_as<int>(key, value);
  } else if (key == "analysis.rise_threshold") {
    overfit.rise = parse_as<double>(key, value);
  } else if (key == "analysis.gap_slope_threshold") {
    overfit.gap_slope = parse_as<double>(key, value);
  } else {
    throw Error(ErrorKind::InvalidConfig, fmt::format("unknown config key '{}'", key));
  }
}

void PipelineConfig::validate() const {
  if (resize_side < 8) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("resize_side {} must be >= 8", resize_side));
  }
  if (runs < 1) throw Error(ErrorKind::InvalidConfig, "train.runs must be >= 1");
  aug.validate();
  ModelConfig m = model;
  m.input_side = resize_side;
  m.validate();
  train.validate();
  loess.validate();
}

void PipelineConfig::set_seed(std::uint64_t seed) {
  split_seed = seed;
  model.seed = seed;
  train.seed = seed;
}

std::filesystem::path PipelineConfig::runs_path() const {
  return run_dir ? *run_dir : output_dir / "runs";
}

void load_config_file(const std::filesystem::path& path, PipelineConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  const std::filesystem::path base = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidConfig,
                  fmt::format("{}:{}: expected 'key = value'", path.string(), line_no));
    }
    const auto key = trim(text.substr(0, eq));
    cfg.set(key, text.substr(eq + 1));
    if (key == "manifest") cfg.manifest_path = base / cfg.manifest_path;
    if (key == "output_dir") cfg.output_dir = base / cfg.output_dir;
    if (key == "run_dir") cfg.run_dir = base / *cfg.run_dir;
  }
}

PipelineConfig config_for_run(const PipelineConfig& cfg, int run) {
  PipelineConfig out = cfg;
  const auto offset = static_cast<std::uint64_t>(run - 1);
  out.split_seed += offset;
  out.model.seed += offset;
  out.train.seed += offset;
  out.model.input_side = cfg.resize_side;
  return out;
}

}  // namespace cxr

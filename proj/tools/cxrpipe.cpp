// Command-line driver: eda, prepare, split, train, analyze.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cxr/error.hpp"
#include "cxr/pipeline.hpp"

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chest X-ray segmentation, augmentation, training and curve analysis pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool full_scale = false;
  std::string manifest;
  std::optional<int> runs;
  std::string run_dir;

  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "base seed for splitting, initialization and shuffling");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--full-scale", full_scale, "resize to 2048x2048 instead of the configured side");
  app.add_option("--manifest", manifest, "manifest CSV (id,image,mask,label,gender,age)");

  auto* eda = app.add_subcommand("eda", "label, demographic, area and mask-similarity report");
  auto* prepare = app.add_subcommand("prepare", "segment, rescale, resize and augment every record");
  auto* split = app.add_subcommand("split", "write a stratified 8:1:1 split of the manifest");
  auto* train = app.add_subcommand("train", "train one model per run on the prepared data");
  train->add_option("--runs", runs, "number of independent runs")->check(CLI::PositiveNumber);
  auto* analyze = app.add_subcommand("analyze", "aggregate, smooth and diagnose run logs");
  analyze->add_option("--run-dir", run_dir, "directory with run-*.csv (default <out>/runs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  cxr::PipelineConfig cfg;
  try {
    if (!config_path.empty()) cxr::load_config_file(config_path, cfg);
    if (seed) cfg.set_seed(*seed);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (full_scale) cfg.resize_side = cxr::kFullScaleSide;
    if (!manifest.empty()) cfg.manifest_path = manifest;
    if (runs) cfg.runs = *runs;
    if (!run_dir.empty()) cfg.run_dir = std::filesystem::path(run_dir);
  } catch (const cxr::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  }

  const bool needs_manifest = eda->parsed() || prepare->parsed() || split->parsed();
  if (needs_manifest && cfg.manifest_path.empty()) {
    std::cerr << "a manifest is required (--manifest or `manifest = ...` in --config)\n";
    return kExitUsage;
  }

  try {
    if (eda->parsed()) return cxr::cmd_eda(cfg, std::cerr);
    if (prepare->parsed()) return cxr::cmd_prepare(cfg, std::cerr);
    if (split->parsed()) return cxr::cmd_split(cfg, std::cerr);
    if (train->parsed()) return cxr::cmd_train(cfg, std::cerr);
    if (analyze->parsed()) return cxr::cmd_analyze(cfg, std::cerr);
  } catch (const cxr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <thread>

#include <fmt/core.h>

#include "cxr/error.hpp"
#include "cxr/pipeline.hpp"

namespace cxr {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPreparedHeader = "id,source_id,variant,original,image,label,gender,age";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(ErrorKind::Io, fmt::format("failed writing {}", path.string()));
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

std::string gender_field(Gender g) {
  switch (g) {
    case Gender::Male: return "M";
    case Gender::Female: return "F";
    case Gender::Unknown: return "";
  }
  return "";
}

std::string age_field(const std::optional<int>& age) {
  return age ? std::to_string(*age) : std::string();
}

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1U, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::string format_hist_rows(std::string_view metric, const std::vector<HistogramBin>& hist) {
  std::string out;
  for (const auto& b : hist) {
    out += fmt::format("{},{:g}..{:g},{}\n", metric, b.lower, b.upper, b.count);
  }
  return out;
}

std::string format_stats(std::string_view name, const SummaryStats& s) {
  return fmt::format("{}: n={} mean={:.6g} median={:.6g} std={:.6g}\n", name, s.n, s.mean,
                     s.median, s.std);
}

// Image cache for training: every prepared image is decoded once and shared
// read-only by all runs.
struct PreparedImages {
  std::vector<PreparedRecord> rows;
  std::vector<NormImage> images;
};

PreparedImages load_prepared(const fs::path& manifest, int side) {
  PreparedImages out;
  out.rows = load_prepared_manifest(manifest);
  out.images.resize(out.rows.size());
  std::vector<std::string> errors(out.rows.size());
  parallel_for(out.rows.size(), [&](std::size_t i) {
    try {
      out.images[i] = rescale_intensity(load_image(out.rows[i].image_path));
      if (out.images[i].width() != side || out.images[i].height() != side) {
        throw Error(ErrorKind::ShapeMismatch,
                    fmt::format("{} is {}x{}, model expects {}x{}", out.rows[i].image_path.string(),
                                out.images[i].width(), out.images[i].height(), side, side));
      }
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorKind::MalformedImage, e);
  }
  return out;
}

}  // namespace

std::vector<PreparedRecord> load_prepared_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  const fs::path base = path.parent_path();
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kPreparedHeader) {
    throw Error(ErrorKind::MalformedRow, fmt::format("{}: expected header '{}'", path.string(), kPreparedHeader));
  }
  std::vector<PreparedRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 8 || (f[5] != "0" && f[5] != "1") || (f[3] != "0" && f[3] != "1")) {
      throw Error(ErrorKind::MalformedRow, fmt::format("{}:{}", path.string(), line_no));
    }
    PreparedRecord r;
    r.id = f[0];
    r.source_id = f[1];
    r.variant = f[2];
    r.original = f[3] == "1";
    r.image_path = base / f[4];
    r.label = f[5] == "1" ? 1 : 0;
    r.gender = f[6] == "M" ? Gender::Male : f[6] == "F" ? Gender::Female : Gender::Unknown;
    if (!f[7].empty()) r.age = std::stoi(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

int cmd_eda(const PipelineConfig& cfg, std::ostream& err) {
  const auto records = load_manifest(cfg.manifest_path);
  const EdaReport report = eda_report(records);

  std::string labels = "label,count\n";
  for (const auto& [label, count] : report.label_counts) labels += fmt::format("{},{}\n", label, count);

  std::string gender_age = "label,gender,age_bucket,count\n";
  for (const auto& [key, count] : report.gender_age_hist) {
    const auto& [label, gender, bucket] = key;
    gender_age += fmt::format("{},{},{},{}\n", label, gender, bucket, count);
  }

  std::string areas = "metric,bucket,count\n";
  areas += format_hist_rows("image_area", report.image_area_hist);
  areas += format_hist_rows("mask_area", report.mask_area_hist);

  std::string summary;
  summary += fmt::format("records: {}\n", records.size());
  for (const auto& [label, count] : report.label_counts) summary += fmt::format("label {}: {}\n", label, count);
  summary += format_stats("image_area", report.image_area_stats);
  summary += format_stats("mask_area", report.mask_area_stats);

  std::vector<ManifestRecord> usable;
  for (const auto& r : records) {
    if (std::find(report.skipped_ids.begin(), report.skipped_ids.end(), r.id) == report.skipped_ids.end()) {
      usable.push_back(r);
    }
  }
  if (usable.size() >= 2) {
    const ExtremePairs pairs = extreme_mask_pairs(usable);
    summary += fmt::format("most similar masks: {} {} dice={:.6f}\n", pairs.most_similar.first,
                           pairs.most_similar.second, pairs.most_similar.score);
    summary += fmt::format("most dissimilar masks: {} {} dice={:.6f}\n", pairs.most_dissimilar.first,
                           pairs.most_dissimilar.second, pairs.most_dissimilar.score);
  }
  if (!usable.empty()) {
    const Mask avg = average_mask(usable);
    summary += fmt::format("average mask area at {}x{}: {}\n", kComparisonSide, kComparisonSide,
                           mask_area(avg));
  }
  summary += fmt::format("skipped: {}\n", report.skipped_ids.size());
  for (std::size_t i = 0; i < report.skipped_ids.size(); ++i) {
    summary += fmt::format("  {}: {}\n", report.skipped_ids[i], report.skip_reasons[i]);
    err << fmt::format("skipped {}: {}\n", report.skipped_ids[i], report.skip_reasons[i]);
  }

  const fs::path dir = cfg.output_dir / "eda";
  make_dirs(dir);
  write_text(dir / "labels.csv", labels);
  write_text(dir / "gender_age.csv", gender_age);
  write_text(dir / "areas.csv", areas);
  write_text(dir / "summary.txt", summary);
  return 0;
}

int cmd_prepare(const PipelineConfig& cfg, std::ostream& err) {
  cfg.validate();
  const auto records = load_manifest(cfg.manifest_path);

  // Every variant is written, the untransformed one included, because
  // validation and test sets are drawn from it; include_original is applied
  // when the training set is assembled.
  AugPolicy policy = cfg.aug;
  policy.include_original = true;
  const std::vector<Variant> plan = expansion_plan(policy);

  const fs::path dir = cfg.output_dir / "prepared";
  const fs::path image_dir = dir / "images";
  make_dirs(image_dir);

  std::vector<std::string> rows(records.size());
  std::vector<std::string> failures(records.size());
  parallel_for(records.size(), [&](std::size_t i) {
    const ManifestRecord& rec = records[i];
    std::vector<fs::path> written;
    try {
      const GrayImage raw = load_image(rec.image_path);
      const Mask mask = load_mask(rec.mask_path);
      const NormImage segmented = apply_mask(rescale_intensity(raw), mask);
      const NormImage base = resize_bilinear(segmented, cfg.resize_side, cfg.resize_side);

      std::vector<std::pair<std::string, GrayImage>> outputs;
      outputs.reserve(plan.size());
      for (const Variant& v : plan) {
        outputs.emplace_back(rec.id + variant_suffix(v, policy.lossless), quantize(apply_variant(base, v)));
      }
      std::string out_rows;
      for (std::size_t k = 0; k < plan.size(); ++k) {
        const auto& [id, img] = outputs[k];
        const fs::path file = image_dir / (id + ".png");
        save_image(file, img);
        written.push_back(file);
        const std::string suffix = variant_suffix(plan[k], policy.lossless);
        out_rows += fmt::format("{},{},{},{},images/{}.png,{},{},{}\n", id, rec.id,
                                suffix.empty() ? "original" : suffix.substr(1),
                                plan[k].is_original() ? 1 : 0, id, rec.label,
                                gender_field(rec.gender), age_field(rec.age));
      }
      rows[i] = std::move(out_rows);
    } catch (const Error& e) {
      std::error_code ec;
      for (const auto& f : written) fs::remove(f, ec);
      failures[i] = e.what();
    }
  });

  std::string manifest = std::string(kPreparedHeader) + "\n";
  int failed = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!failures[i].empty()) {
      ++failed;
      err << fmt::format("record {} failed: {}\n", records[i].id, failures[i]);
      continue;
    }
    manifest += rows[i];
  }
  write_text(dir / "manifest.csv", manifest);
  if (failed > 0) {
    err << fmt::format("{} of {} records failed\n", failed, records.size());
    return 1;
  }
  return 0;
}

int cmd_split(const PipelineConfig& cfg, std::ostream&) {
  const auto records = load_manifest(cfg.manifest_path);
  const Split split = stratified_split(records, cfg.split_seed, {cfg.split_min_records});
  std::string text = "id,part\n";
  for (const auto& id : split.train) text += fmt::format("{},train\n", id);
  for (const auto& id : split.val) text += fmt::format("{},val\n", id);
  for (const auto& id : split.test) text += fmt::format("{},test\n", id);
  make_dirs(cfg.output_dir);
  write_text(cfg.output_dir / "split.csv", text);
  return 0;
}

int cmd_train(const PipelineConfig& cfg, std::ostream& err) {
  cfg.validate();
  const PreparedImages data = load_prepared(cfg.output_dir / "prepared" / "manifest.csv", cfg.resize_side);

  // One ManifestRecord per source image, in first-appearance order.
  std::vector<ManifestRecord> sources;
  std::map<std::string, std::vector<std::size_t>> variants_of;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& r = data.rows[i];
    auto [it, inserted] = variants_of.try_emplace(r.source_id);
    if (inserted) sources.push_back({r.source_id, {}, {}, r.label, r.gender, r.age});
    it->second.push_back(i);
  }

  const fs::path dir = cfg.runs_path();
  make_dirs(dir);

  auto run_one = [&](int run) -> std::string {
    const PipelineConfig rc = config_for_run(cfg, run);
    const Split split = stratified_split(sources, rc.split_seed, {rc.split_min_records});
    TrainData train_set;
    TrainData val_set;
    for (const auto& id : split.train) {
      for (std::size_t i : variants_of.at(id)) {
        if (data.rows[i].original && !cfg.aug.include_original) continue;
        train_set.images.push_back(data.images[i]);
        train_set.labels.push_back(data.rows[i].label);
      }
    }
    for (const auto& id : split.val) {
      for (std::size_t i : variants_of.at(id)) {
        if (!data.rows[i].original) continue;
        val_set.images.push_back(data.images[i]);
        val_set.labels.push_back(data.rows[i].label);
      }
    }
    const std::string run_id = std::to_string(run);
    const RunLog log = train(rc.model, rc.train, train_set, val_set, run_id);
    write_run_log_csv(dir / fmt::format("run-{}.csv", run_id), log);

    std::string config_text = describe_config(rc.model, rc.train);
    config_text += fmt::format("split.seed = {}\n", rc.split_seed);
    config_text += fmt::format("split.sizes = {}/{}/{}\n", split.train.size(), split.val.size(), split.test.size());
    config_text += fmt::format("train.samples = {}\n", train_set.images.size());
    config_text += fmt::format("config_hash = {}\n", log.config_hash);
    write_text(dir / fmt::format("run-{}.config.txt", run_id), config_text);
    return {};
  };

  std::vector<std::future<std::string>> jobs;
  for (int run = 1; run <= cfg.runs; ++run) {
    jobs.push_back(std::async(std::launch::async, [&, run]() -> std::string {
      try {
        return run_one(run);
      } catch (const Error& e) {
        return fmt::format("run {}: {}", run, e.what());
      }
    }));
  }
  int status = 0;
  for (auto& job : jobs) {
    const std::string failure = job.get();
    if (!failure.empty()) {
      err << failure << '\n';
      status = 1;
    }
  }
  return status;
}

int cmd_analyze(const PipelineConfig& cfg, std::ostream& err) {
  const fs::path run_dir = cfg.runs_path();
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(run_dir, ec)) {
    for (const auto& entry : fs::directory_iterator(run_dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("run-", 0) == 0 && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
  }
  if (files.empty()) {
    err << fmt::format("no run-*.csv files in {}\n", run_dir.string());
    return 1;
  }
  std::sort(files.begin(), files.end());

  std::vector<RunLog> logs;
  for (const auto& f : files) logs.push_back(read_run_log_csv(f));

  std::vector<CurveStats> stats;
  for (Metric m : kMetrics) stats.push_back(curve_stats(logs, m, cfg.loess));
  const CurveStats& train_loss = stats[0];
  const CurveStats& val_loss = stats[2];
  const CurveStats& val_acc = stats[3];

  const SeriesMin loss_min = find_global_min(val_loss, true);
  const AccuracyReadout readout = accuracy_at_min_loss(val_acc, val_loss);
  const OverfitDiagnostic diag = overfit_diagnostic(train_loss, val_loss, cfg.overfit);

  const fs::path dir = cfg.output_dir / "analysis";
  make_dirs(dir);
  for (const auto& s : stats) write_curve_stats_csv(dir / fmt::format("{}.csv", to_string(s.metric)), s);

  std::string report;
  report += fmt::format("runs: {}\n", logs.size());
  report += fmt::format("grid points: {} (steps {}..{})\n", val_loss.grid.size(), val_loss.grid.front(),
                        val_loss.grid.back());
  report += fmt::format("loess: span={} degree={}\n", cfg.loess.span, cfg.loess.degree);
  report += fmt::format("val_loss global minimum (smoothed): step {} value {:.6f}\n", loss_min.step,
                        loss_min.value);
  report += fmt::format("val_acc at val_loss minimum: {:.4f} +- {:.4f} (step {})\n", readout.mean,
                        readout.std, readout.step);
  report += fmt::format("verdict: {}\n", diag.overfitted ? "overfitted" : "not_overfitted");
  report += fmt::format("  val_loss end {:.6f} vs minimum {:.6f}: rise {:.2f}% (threshold {:.2f}%) -> {}\n",
                        diag.val_end, diag.val_min, 100.0 * diag.rise_ratio, 100.0 * cfg.overfit.rise,
                        diag.rise_clause ? "yes" : "no");
  report += fmt::format("  val-train gap slope over steps {}..{}: {:.6g} per step (threshold {:g}) -> {}\n",
                        val_loss.grid[diag.window_start], val_loss.grid.back(), diag.gap_slope,
                        cfg.overfit.gap_slope, diag.slope_clause ? "yes" : "no");
  report += fmt::format("  final smoothed gap: {:.6f}\n", diag.final_gap);
  write_text(dir / "report.txt", report);
  write_text(dir / "curves.svg", render_curves_svg(stats));
  return 0;
}

}  // namespace cxr

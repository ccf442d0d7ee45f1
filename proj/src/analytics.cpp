#include "cxr/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include <fmt/core.h>

#include "cxr/error.hpp"

namespace cxr {

namespace {

// Solves the (n <= 3) system a * x = b in place by partial pivoting.
// Returns false when a pivot vanishes relative to the matrix scale.
bool solve_small(std::array<std::array<double, 3>, 3>& a, std::array<double, 3>& b, int n) {
  double scale = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(a[r][c]));
  if (scale == 0.0) return false;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= 1e-13 * scale) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * b[c];
    b[r] = s / a[r][r];
  }
  return true;
}

double tricube(double u) {
  const double t = 1.0 - u * u * u;
  return t * t * t;
}

void require_same_grid(const CurveStats& a, const CurveStats& b) {
  if (a.grid != b.grid) {
    throw Error(ErrorKind::GridMismatch,
                fmt::format("{} and {} are on different step grids", to_string(a.metric),
                            to_string(b.metric)));
  }
}

const std::vector<double>& smoothed_or_throw(const CurveStats& s) {
  if (s.smoothed.empty()) {
    throw Error(ErrorKind::EmptySeries, fmt::format("{} has no smoothed series", to_string(s.metric)));
  }
  return s.smoothed;
}

}  // namespace

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::TrainLoss: return "train_loss";
    case Metric::TrainAcc: return "train_acc";
    case Metric::ValLoss: return "val_loss";
    case Metric::ValAcc: return "val_acc";
  }
  return "unknown";
}

double metric_value(const RunPoint& p, Metric m) noexcept {
  switch (m) {
    case Metric::TrainLoss: return p.train_loss;
    case Metric::TrainAcc: return p.train_acc;
    case Metric::ValLoss: return p.val_loss;
    case Metric::ValAcc: return p.val_acc;
  }
  return 0.0;
}

void LoessConfig::validate() const {
  if (!(span > 0.0 && span <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("loess span {} not in (0, 1]", span));
  }
  if (degree != 1 && degree != 2) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("loess degree {} not in {{1, 2}}", degree));
  }
}

std::size_t LoessConfig::window(std::size_t n) const {
  const auto by_span = static_cast<std::size_t>(std::ceil(span * static_cast<double>(n)));
  return std::max(static_cast<std::size_t>(degree) + 2, by_span);
}

std::vector<double> CurveStats::grid_as_double() const {
  return {grid.begin(), grid.end()};
}

CurveStats aggregate_runs(std::span<const RunLog> logs, Metric metric) {
  if (logs.empty()) throw Error(ErrorKind::NoRuns, "no run logs to aggregate");

  std::vector<std::int64_t> grid;
  for (const auto& p : logs[0].points) grid.push_back(p.step);
  for (std::size_t r = 1; r < logs.size(); ++r) {
    std::vector<std::int64_t> steps;
    for (const auto& p : logs[r].points) steps.push_back(p.step);
    std::vector<std::int64_t> common;
    std::set_intersection(grid.begin(), grid.end(), steps.begin(), steps.end(),
                          std::back_inserter(common));
    grid = std::move(common);
  }
  if (grid.empty()) throw Error(ErrorKind::EmptyIntersection, "runs share no logged step");

  // values[g][r]
  std::vector<std::vector<double>> values(grid.size());
  for (const auto& log : logs) {
    std::size_t g = 0;
    for (const auto& p : log.points) {
      if (g < grid.size() && p.step == grid[g]) values[g++].push_back(metric_value(p, metric));
    }
  }

  CurveStats out;
  out.metric = metric;
  out.grid = grid;
  out.mean.resize(grid.size());
  out.std.resize(grid.size());
  const auto n = static_cast<double>(logs.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (double v : values[g]) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values[g]) ss += (v - mean) * (v - mean);
    out.mean[g] = mean;
    out.std[g] = logs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return out;
}

std::vector<double> loess_smooth(std::span<const double> xs, std::span<const double> ys,
                                 const LoessConfig& cfg) {
  cfg.validate();
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::LengthMismatch, fmt::format("{} xs vs {} ys", xs.size(), ys.size()));
  }
  const std::size_t n = xs.size();
  if (n < static_cast<std::size_t>(cfg.degree) + 2) {
    throw Error(ErrorKind::TooFewPoints,
                fmt::format("{} points, degree {} needs at least {}", n, cfg.degree, cfg.degree + 2));
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw Error(ErrorKind::DegenerateWindow, "xs must be strictly increasing");
    }
  }

  const std::size_t k = std::min(n, cfg.window(n));
  const int terms = cfg.degree + 1;
  std::vector<double> out(n);
  std::size_t left = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = xs[i];
    // Slide while the next point on the right is strictly closer than the
    // leftmost one; equal distances keep the left point.
    while (left + k < n && xs[left + k] - x0 < x0 - xs[left]) ++left;
    const std::size_t right = left + k;  // exclusive
    const double reach = std::max(x0 - xs[left], xs[right - 1] - x0);
    if (!(reach > 0.0)) throw Error(ErrorKind::DegenerateWindow, fmt::format("window at x = {}", x0));

    // Normal equations in window-scaled coordinates u in [-1, 1].
    std::array<std::array<double, 3>, 3> a{};
    std::array<double, 3> b{};
    for (std::size_t j = left; j < right; ++j) {
      const double u = (xs[j] - x0) / reach;
      const double w = tricube(std::min(1.0, std::abs(u)));
      if (w == 0.0) continue;
      const std::array<double, 3> phi = {1.0, u, u * u};
      for (int r = 0; r < terms; ++r) {
        for (int c = 0; c < terms; ++c) a[r][c] += w * phi[r] * phi[c];
        b[r] += w * phi[r] * ys[j];
      }
    }
    if (!solve_small(a, b, terms)) {
      throw Error(ErrorKind::DegenerateWindow, fmt::format("singular local fit at x = {}", x0));
    }
    out[i] = b[0];
  }
  return out;
}

CurveStats curve_stats(std::span<const RunLog> logs, Metric metric, const LoessConfig& cfg) {
  CurveStats s = aggregate_runs(logs, metric);
  s.smoothed = loess_smooth(s.grid_as_double(), s.mean, cfg);
  return s;
}

SeriesMin find_global_min(const CurveStats& stats, bool use_smoothed) {
  const std::vector<double>& series = use_smoothed ? stats.smoothed : stats.mean;
  if (series.empty() || series.size() != stats.grid.size()) {
    throw Error(ErrorKind::EmptySeries,
                fmt::format("{} {} series is empty", to_string(stats.metric),
                            use_smoothed ? "smoothed" : "mean"));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i] < series[best]) best = i;
  }
  return {stats.grid[best], series[best], best};
}

AccuracyReadout accuracy_at_min_loss(const CurveStats& acc_stats, const CurveStats& loss_stats) {
  require_same_grid(acc_stats, loss_stats);
  const SeriesMin m = find_global_min(loss_stats, true);
  return {m.step, acc_stats.mean.at(m.index), acc_stats.std.at(m.index)};
}

OverfitDiagnostic overfit_diagnostic(const CurveStats& train_stats, const CurveStats& val_stats,
                                     const OverfitThresholds& thresholds) {
  require_same_grid(train_stats, val_stats);
  const auto& train = smoothed_or_throw(train_stats);
  const auto& val = smoothed_or_throw(val_stats);
  const std::size_t n = val.size();

  OverfitDiagnostic d;
  const SeriesMin m = find_global_min(val_stats, true);
  d.val_min = m.value;
  d.val_min_step = m.step;
  d.val_end = val.back();
  d.rise_ratio = d.val_min > 0.0 ? d.val_end / d.val_min - 1.0
                                 : (d.val_end > d.val_min ? std::numeric_limits<double>::infinity() : 0.0);
  d.rise_clause = d.val_end > d.val_min * (1.0 + thresholds.rise);

  const std::size_t tail = std::max<std::size_t>(2, (n + 2) / 3);
  d.window_start = n > tail ? n - tail : 0;
  double sx = 0.0, sy = 0.0;
  const auto count = static_cast<double>(n - d.window_start);
  for (std::size_t i = d.window_start; i < n; ++i) {
    sx += static_cast<double>(val_stats.grid[i]);
    sy += val[i] - train[i];
  }
  const double mx = sx / count;
  const double my = sy / count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = d.window_start; i < n; ++i) {
    const double dx = static_cast<double>(val_stats.grid[i]) - mx;
    sxy += dx * ((val[i] - train[i]) - my);
    sxx += dx * dx;
  }
  d.gap_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  d.slope_clause = d.gap_slope > thresholds.gap_slope;
  d.final_gap = val.back() - train.back();
  d.overfitted = d.rise_clause && d.slope_clause;
  return d;
}

void write_curve_stats_csv(const std::filesystem::path& path, const CurveStats& stats) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", path.string()));
  out << "step,mean,std,smoothed\n";
  for (std::size_t i = 0; i < stats.grid.size(); ++i) {
    const double smoothed = i < stats.smoothed.size() ? stats.smoothed[i] : stats.mean[i];
    out << fmt::format("{},{},{},{}\n", stats.grid[i], stats.mean[i], stats.std[i], smoothed);
  }
  if (!out) throw Error(ErrorKind::Io, fmt::format("failed writing {}", path.string()));
}

}  // namespace cxr

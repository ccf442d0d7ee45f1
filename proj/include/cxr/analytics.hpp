#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "cxr/trainer.hpp"

namespace cxr {

enum class Metric { TrainLoss, TrainAcc, ValLoss, ValAcc };

inline constexpr std::array<Metric, 4> kMetrics = {Metric::TrainLoss, Metric::TrainAcc,
                                                   Metric::ValLoss, Metric::ValAcc};

std::string_view to_string(Metric m) noexcept;
double metric_value(const RunPoint& p, Metric m) noexcept;

struct LoessConfig {
  double span = 0.3;  // fraction of points per local window, (0, 1]
  int degree = 1;     // 1 or 2

  /// Throws InvalidConfig.
  void validate() const;
  /// max(degree + 2, ceil(span * n))
  std::size_t window(std::size_t n) const;
};

/// Cross-run statistics for one metric on the steps every run logged.
struct CurveStats {
  Metric metric = Metric::ValLoss;
  std::vector<std::int64_t> grid;
  std::vector<double> mean;
  std::vector<double> std;       // sample deviation, n - 1 denominator
  std::vector<double> smoothed;  // empty until smoothed

  std::vector<double> grid_as_double() const;
};

/// Mean and sample standard deviation over runs (std = 0 for one run).
/// Throws NoRuns and EmptyIntersection.
CurveStats aggregate_runs(std::span<const RunLog> logs, Metric metric);

/// Local regression with tricube weights over the k nearest neighbours of
/// each x. Throws TooFewPoints and DegenerateWindow.
std::vector<double> loess_smooth(std::span<const double> xs, std::span<const double> ys,
                                 const LoessConfig& cfg);

/// aggregate_runs followed by loess_smooth of the mean series.
CurveStats curve_stats(std::span<const RunLog> logs, Metric metric, const LoessConfig& cfg);

struct SeriesMin {
  std::int64_t step = 0;
  double value = 0.0;
  std::size_t index = 0;
};

/// Earliest argmin of the mean or smoothed series. Throws EmptySeries.
SeriesMin find_global_min(const CurveStats& stats, bool use_smoothed);

struct AccuracyReadout {
  std::int64_t step = 0;
  double mean = 0.0;
  double std = 0.0;
};

/// Accuracy mean and std at the step where the smoothed loss is lowest.
/// Throws GridMismatch.
AccuracyReadout accuracy_at_min_loss(const CurveStats& acc_stats, const CurveStats& loss_stats);

struct OverfitThresholds {
  double rise = 0.10;       // relative rise of the end value over the minimum
  double gap_slope = 0.0;   // the val - train gap slope must exceed this
};

struct OverfitDiagnostic {
  bool overfitted = false;
  bool rise_clause = false;
  bool slope_clause = false;
  double val_end = 0.0;
  double val_min = 0.0;
  std::int64_t val_min_step = 0;
  double rise_ratio = 0.0;  // val_end / val_min - 1
  double gap_slope = 0.0;   // per step, least squares over the final third
  double final_gap = 0.0;   // smoothed val - train at the last grid point
  std::size_t window_start = 0;
};

/// Overfitted when, on the smoothed losses, the end value of val sits more
/// than `rise` above its global minimum and the val - train gap trends up
/// across the final third of the grid. Throws GridMismatch.
OverfitDiagnostic overfit_diagnostic(const CurveStats& train_stats, const CurveStats& val_stats,
                                     const OverfitThresholds& thresholds = {});

/// `step,mean,std,smoothed`
void write_curve_stats_csv(const std::filesystem::path& path, const CurveStats& stats);

}  // namespace cxr

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cxr/imaging.hpp"

namespace cxr {

enum class Gender { Male, Female, Unknown };

struct ManifestRecord {
  std::string id;
  std::filesystem::path image_path;
  std::filesystem::path mask_path;
  int label = 0;  // 1 = disease marks present
  Gender gender = Gender::Unknown;
  std::optional<int> age;

  bool operator==(const ManifestRecord&) const = default;
};

/// Parses a `id,image,mask,label,gender,age` CSV. Relative paths are
/// resolved against the manifest's directory.
std::vector<ManifestRecord> load_manifest(const std::filesystem::path& path);

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  bool operator==(const Split&) const = default;
};

struct SplitOptions {
  std::size_t min_records = 10;
};

/// 8:1:1 split stratified by label. Each label contributes floor(n/10)
/// records to val and to test; the rest go to train. If that leaves val or
/// test empty (small manifests), one record is moved there from the label
/// with the most training records.
Split stratified_split(const std::vector<ManifestRecord>& records, std::uint64_t seed,
                       const SplitOptions& options = {});

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // sample (n-1) deviation; 0 for n < 2
};

inline constexpr int kHistogramBins = 20;

/// 20 equal-width bins over [min, max] of the values; empty input gives no bins.
std::vector<HistogramBin> area_histogram(const std::vector<double>& values,
                                         int bins = kHistogramBins);
SummaryStats summarize(std::vector<double> values);

/// Decade bucket label such as "20-29", or "unknown".
std::string age_bucket(const std::optional<int>& age);
std::string_view to_string(Gender g) noexcept;

struct EdaReport {
  std::map<int, std::size_t> label_counts;
  /// (label, gender, age bucket) -> count
  std::map<std::tuple<int, std::string, std::string>, std::size_t> gender_age_hist;
  std::vector<HistogramBin> image_area_hist;
  std::vector<HistogramBin> mask_area_hist;
  SummaryStats image_area_stats;
  SummaryStats mask_area_stats;
  std::vector<std::string> skipped_ids;
  std::vector<std::string> skip_reasons;
};

/// Reads every image/mask pair to build the area distributions. Records
/// whose files fail to load are listed in skipped_ids and excluded from the
/// area histograms only.
EdaReport eda_report(const std::vector<ManifestRecord>& records);

/// Builds the area part of a report from already-measured values.
void fill_area_stats(EdaReport& report, const std::vector<double>& image_areas,
                     const std::vector<double>& mask_areas);

inline constexpr int kComparisonSide = 256;

/// 2|A and B| / (|A| + |B|); 1.0 for two empty masks.
double mask_dice(const Mask& a, const Mask& b);

struct NamedMask {
  std::string id;
  Mask mask;
};

struct MaskPair {
  std::string first;
  std::string second;
  double score = 0.0;
};

struct ExtremePairs {
  MaskPair most_similar;
  MaskPair most_dissimilar;
};

/// Exhaustive pairwise Dice. Masks must already share one resolution. Ties
/// resolve to the lexicographically smallest (first, second) id pair, each
/// pair ordered so that first < second.
ExtremePairs extreme_mask_pairs(const std::vector<NamedMask>& masks);
/// Loads and resizes each record's mask to side x side, then compares.
ExtremePairs extreme_mask_pairs(const std::vector<ManifestRecord>& records,
                                int side = kComparisonSide);

/// Pixelwise mean of the masks' 0/1 fields at side x side, true where >= 0.5.
Mask average_mask(const std::vector<Mask>& masks, int side = kComparisonSide);
Mask average_mask(const std::vector<ManifestRecord>& records, int side = kComparisonSide);

/// load_image + binarize_mask at the default threshold.
Mask load_mask(const std::filesystem::path& path);

}  // namespace cxr

#include "cxr/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <fmt/core.h>

#include "cxr/error.hpp"

namespace cxr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no,
                            const std::string& why) {
  throw Error(ErrorKind::MalformedRow, fmt::format("{}:{}: {}", path.string(), line_no, why));
}

// Bit-packed mask for fast pairwise intersection counts.
struct PackedMask {
  std::vector<std::uint64_t> words;
  std::size_t area = 0;
};

PackedMask pack(const Mask& m) {
  PackedMask p;
  p.words.assign((m.size() + 63) / 64, 0);
  const auto& bits = m.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) {
      p.words[i / 64] |= std::uint64_t{1} << (i % 64);
      ++p.area;
    }
  }
  return p;
}

double dice_from_counts(std::size_t inter, std::size_t a, std::size_t b) {
  if (a + b == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
}

std::vector<Mask> load_resized_masks(const std::vector<ManifestRecord>& records, int side) {
  std::vector<Mask> masks;
  masks.reserve(records.size());
  for (const auto& r : records) masks.push_back(resize_mask(load_mask(r.mask_path), side, side));
  return masks;
}

}  // namespace

std::vector<ManifestRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());

  const std::filesystem::path base = path.parent_path();
  std::string line;
  if (!std::getline(in, line)) malformed(path, 1, "missing header");
  const auto header = split_fields(line);
  const std::vector<std::string_view> expected = {"id", "image", "mask", "label", "gender", "age"};
  if (header != expected) {
    malformed(path, 1, "header must be id,image,mask,label,gender,age");
  }

  std::vector<ManifestRecord> records;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != expected.size()) {
      malformed(path, line_no, fmt::format("expected 6 columns, got {}", f.size()));
    }

    ManifestRecord rec;
    rec.id = std::string(f[0]);
    if (rec.id.empty()) malformed(path, line_no, "empty id");
    if (!seen.insert(rec.id).second) {
      throw Error(ErrorKind::DuplicateId, fmt::format("{}:{}: id '{}'", path.string(), line_no, rec.id));
    }

    rec.image_path = base / std::filesystem::path(std::string(f[1]));
    rec.mask_path = base / std::filesystem::path(std::string(f[2]));

    const auto label = parse_int(f[3]);
    if (!label || (*label != 0 && *label != 1)) {
      malformed(path, line_no, fmt::format("label '{}' is not 0 or 1", f[3]));
    }
    rec.label = *label;

    if (f[4].empty()) {
      rec.gender = Gender::Unknown;
    } else if (f[4] == "M" || f[4] == "m") {
      rec.gender = Gender::Male;
    } else if (f[4] == "F" || f[4] == "f") {
      rec.gender = Gender::Female;
    } else {
      malformed(path, line_no, fmt::format("gender '{}' is not M, F or empty", f[4]));
    }

    if (!f[5].empty()) {
      const auto age = parse_int(f[5]);
      if (!age || *age < 0 || *age > 120) malformed(path, line_no, fmt::format("age '{}'", f[5]));
      rec.age = *age;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Split stratified_split(const std::vector<ManifestRecord>& records, std::uint64_t seed,
                       const SplitOptions& options) {
  if (records.size() < options.min_records || records.size() < 3) {
    throw Error(ErrorKind::TooFewRecords,
                fmt::format("{} records, need at least {}", records.size(),
                            std::max<std::size_t>(options.min_records, 3)));
  }

  std::array<std::vector<std::string>, 2> by_label;
  for (const auto& r : records) by_label[static_cast<std::size_t>(r.label)].push_back(r.id);
  if (by_label[0].empty() || by_label[1].empty()) {
    throw Error(ErrorKind::SingleClassDataset, "both labels must be present");
  }

  std::mt19937_64 rng(seed);
  for (auto& ids : by_label) std::shuffle(ids.begin(), ids.end(), rng);

  // Per label: [0, n_val) -> val, [n_val, n_val + n_test) -> test, rest -> train.
  std::array<std::size_t, 2> n_val{};
  std::array<std::size_t, 2> n_test{};
  for (std::size_t l = 0; l < 2; ++l) n_val[l] = n_test[l] = by_label[l].size() / 10;

  auto train_left = [&](std::size_t l) { return by_label[l].size() - n_val[l] - n_test[l]; };
  auto donor = [&] { return train_left(1) > train_left(0) ? std::size_t{1} : std::size_t{0}; };
  if (n_val[0] + n_val[1] == 0) ++n_val[donor()];
  if (n_test[0] + n_test[1] == 0) ++n_test[donor()];

  Split split;
  split.seed = seed;
  for (std::size_t l = 0; l < 2; ++l) {
    const auto& ids = by_label[l];
    const auto val_end = ids.begin() + static_cast<std::ptrdiff_t>(n_val[l]);
    const auto test_end = val_end + static_cast<std::ptrdiff_t>(n_test[l]);
    split.val.insert(split.val.end(), ids.begin(), val_end);
    split.test.insert(split.test.end(), val_end, test_end);
    split.train.insert(split.train.end(), test_end, ids.end());
  }
  return split;
}

std::vector<HistogramBin> area_histogram(const std::vector<double>& values, int bins) {
  if (values.empty() || bins < 1) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = (hi - lo) / bins;

  std::vector<HistogramBin> hist(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    hist[b].lower = lo + width * b;
    hist[b].upper = (b == bins - 1) ? hi : lo + width * (b + 1);
  }
  for (double v : values) {
    int b = 0;
    if (hi > lo) b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
    ++hist[b].count;
  }
  return hist;
}

SummaryStats summarize(std::vector<double> values) {
  SummaryStats s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  std::sort(values.begin(), values.end());
  const std::size_t mid = s.n / 2;
  s.median = (s.n % 2 == 1) ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::string age_bucket(const std::optional<int>& age) {
  if (!age) return "unknown";
  const int lo = (*age / 10) * 10;
  return fmt::format("{}-{}", lo, lo + 9);
}

std::string_view to_string(Gender g) noexcept {
  switch (g) {
    case Gender::Male: return "M";
    case Gender::Female: return "F";
    case Gender::Unknown: return "unknown";
  }
  return "unknown";
}

void fill_area_stats(EdaReport& report, const std::vector<double>& image_areas,
                     const std::vector<double>& mask_areas) {
  report.image_area_hist = area_histogram(image_areas);
  report.mask_area_hist = area_histogram(mask_areas);
  report.image_area_stats = summarize(image_areas);
  report.mask_area_stats = summarize(mask_areas);
}

EdaReport eda_report(const std::vector<ManifestRecord>& records) {
  EdaReport report;
  std::vector<double> image_areas;
  std::vector<double> mask_areas;
  for (const auto& r : records) {
    ++report.label_counts[r.label];
    ++report.gender_age_hist[{r.label, std::string(to_string(r.gender)), age_bucket(r.age)}];
    try {
      const GrayImage img = load_image(r.image_path);
      const Mask mask = load_mask(r.mask_path);
      image_areas.push_back(static_cast<double>(img.size()));
      mask_areas.push_back(static_cast<double>(mask_area(mask)));
    } catch (const Error& e) {
      report.skipped_ids.push_back(r.id);
      report.skip_reasons.emplace_back(e.what());
    }
  }
  fill_area_stats(report, image_areas, mask_areas);
  return report;
}

double mask_dice(const Mask& a, const Mask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("{}x{} vs {}x{}", a.width(), a.height(), b.width(), b.height()));
  }
  std::size_t inter = 0;
  std::size_t na = 0;
  std::size_t nb = 0;
  const auto& ba = a.bits();
  const auto& bb = b.bits();
  for (std::size_t i = 0; i < ba.size(); ++i) {
    na += ba[i];
    nb += bb[i];
    inter += ba[i] && bb[i];
  }
  return dice_from_counts(inter, na, nb);
}

ExtremePairs extreme_mask_pairs(const std::vector<NamedMask>& masks) {
  if (masks.size() < 2) {
    throw Error(ErrorKind::TooFewMasks, fmt::format("{} masks, need at least 2", masks.size()));
  }
  std::vector<std::size_t> order(masks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return masks[i].id < masks[j].id; });

  std::vector<PackedMask> packed;
  packed.reserve(masks.size());
  for (std::size_t i : order) {
    const Mask& m = masks[i].mask;
    if (m.width() != masks[order[0]].mask.width() || m.height() != masks[order[0]].mask.height()) {
      throw Error(ErrorKind::DimensionMismatch, fmt::format("mask '{}'", masks[i].id));
    }
    packed.push_back(pack(m));
  }

  // Pairs are visited in lexicographic id order, so strict comparisons keep
  // the smallest pair among ties.
  ExtremePairs out;
  bool first = true;
  for (std::size_t i = 0; i < packed.size(); ++i) {
    for (std::size_t j = i + 1; j < packed.size(); ++j) {
      std::size_t inter = 0;
      for (std::size_t w = 0; w < packed[i].words.size(); ++w) {
        inter += static_cast<std::size_t>(std::popcount(packed[i].words[w] & packed[j].words[w]));
      }
      const double score = dice_from_counts(inter, packed[i].area, packed[j].area);
      const MaskPair pair{masks[order[i]].id, masks[order[j]].id, score};
      if (first || score > out.most_similar.score) out.most_similar = pair;
      if (first || score < out.most_dissimilar.score) out.most_dissimilar = pair;
      first = false;
    }
  }
  return out;
}

ExtremePairs extreme_mask_pairs(const std::vector<ManifestRecord>& records, int side) {
  if (records.size() < 2) {
    throw Error(ErrorKind::TooFewMasks, fmt::format("{} records, need at least 2", records.size()));
  }
  std::vector<Mask> masks = load_resized_masks(records, side);
  std::vector<NamedMask> named;
  named.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) named.push_back({records[i].id, std::move(masks[i])});
  return extreme_mask_pairs(named);
}

Mask average_mask(const std::vector<Mask>& masks, int side) {
  if (masks.empty()) throw Error(ErrorKind::TooFewMasks, "need at least 1 mask");
  const std::size_t area = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  std::vector<double> sum(area, 0.0);
  for (const Mask& m : masks) {
    const NormImage field = resize_bilinear(mask_to_field(m), side, side);
    const auto values = field.values();
    for (std::size_t i = 0; i < area; ++i) sum[i] += values[i];
  }
  std::vector<bool> bits(area);
  const double n = static_cast<double>(masks.size());
  for (std::size_t i = 0; i < area; ++i) bits[i] = sum[i] / n >= 0.5;
  return Mask(side, side, std::move(bits));
}

Mask average_mask(const std::vector<ManifestRecord>& records, int side) {
  if (records.empty()) throw Error(ErrorKind::TooFewMasks, "need at least 1 mask");
  std::vector<Mask> masks;
  masks.reserve(records.size());
  for (const auto& r : records) masks.push_back(load_mask(r.mask_path));
  return average_mask(masks, side);
}

Mask load_mask(const std::filesystem::path& path) { return binarize_mask(load_image(path)); }

}  // namespace cxr

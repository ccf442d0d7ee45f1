#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cxr {

/// 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);
  GrayImage(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Unit-interval raster stored as 32-bit floats, row-major.
class NormImage {
 public:
  NormImage() = default;
  /// Rejects a value count other than width*height (DimensionMismatch) and
  /// values outside [0,1] (MalformedImage).
  NormImage(int width, int height, std::vector<float> values);
  NormImage(int width, int height, float fill = 0.0F);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }

  float at(int x, int y) const { return values_[index(x, y)]; }
  float& at(int x, int y) { return values_[index(x, y)]; }

  bool operator==(const NormImage&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

/// Binary lung-field raster (true = lung).
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, std::vector<bool> bits);
  Mask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }
  const std::vector<bool>& bits() const noexcept { return bits_; }

  bool at(int x, int y) const { return bits_[index(x, y)]; }
  void set(int x, int y, bool v) { bits_[index(x, y)] = v; }

  bool operator==(const Mask&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<bool> bits_;
};

inline constexpr std::uint8_t kDefaultMaskThreshold = 128;

/// Reads an 8-bit PNG. Color inputs are averaged channel-wise, 16-bit
/// inputs are rejected with UnsupportedBitDepth.
GrayImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG.
void save_image(const std::filesystem::path& path, const GrayImage& img);

/// bit(x,y) = img(x,y) >= threshold. Throws EmptyMask when no bit is set.
Mask binarize_mask(const GrayImage& img, std::uint8_t threshold = kDefaultMaskThreshold);

/// Zeroes every pixel outside the mask.
NormImage apply_mask(const NormImage& img, const Mask& mask);

/// pixels / 255.0
NormImage rescale_intensity(const GrayImage& img);

/// Inverse of rescale_intensity: round(v * 255).
GrayImage quantize(const NormImage& img);

/// Bilinear resampling with pixel-center alignment and clamped edges.
/// Same-size requests return a bit-exact copy.
NormImage resize_bilinear(const NormImage& img, int out_w, int out_h);

std::size_t mask_area(const Mask& mask);

/// Lifts a mask to a 0/1 field, e.g. for bilinear resampling.
NormImage mask_to_field(const Mask& mask);

/// Resamples a mask through its 0/1 field and re-thresholds at >= 0.5.
Mask resize_mask(const Mask& mask, int out_w, int out_h);

}  // namespace cxr

#include "cxr/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fmt/core.h>

#include "cxr/error.hpp"

namespace cxr {

namespace {

std::size_t checked_area(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("raster dimensions must be positive, got {}x{}", width, height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

void require_same_shape(int w1, int h1, int w2, int h2) {
  if (w1 != w2 || h1 != h2) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("{}x{} vs {}x{}", w1, h1, w2, h2));
  }
}

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != checked_area(width, height)) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("{} pixels for a {}x{} image", pixels_.size(), width, height));
  }
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(checked_area(width, height), fill) {}

NormImage::NormImage(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != checked_area(width, height)) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("{} values for a {}x{} image", values_.size(), width, height));
  }
  for (float v : values_) {
    if (!(v >= 0.0F && v <= 1.0F)) {
      throw Error(ErrorKind::MalformedImage, fmt::format("value {} outside [0,1]", v));
    }
  }
}

NormImage::NormImage(int width, int height, float fill)
    : width_(width), height_(height), values_(checked_area(width, height), fill) {
  if (!(fill >= 0.0F && fill <= 1.0F)) {
    throw Error(ErrorKind::MalformedImage, fmt::format("fill {} outside [0,1]", fill));
  }
}

Mask::Mask(int width, int height, std::vector<bool> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != checked_area(width, height)) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("{} bits for a {}x{} mask", bits_.size(), width, height));
  }
}

Mask::Mask(int width, int height, bool fill)
    : width_(width), height_(height), bits_(checked_area(width, height), fill) {}

GrayImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::FileNotFound, path.string());
  }

  PngImage png;
  if (png_image_begin_read_from_file(&png.image, path.c_str()) == 0) {
    throw Error(ErrorKind::MalformedImage, fmt::format("{}: {}", path.string(), png.image.message));
  }
  if ((png.image.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
    throw Error(ErrorKind::UnsupportedBitDepth, fmt::format("{}: 16-bit PNG", path.string()));
  }

  const bool color = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const int width = static_cast<int>(png.image.width);
  const int height = static_cast<int>(png.image.height);
  const std::size_t area = checked_area(width, height);

  // Alpha is carried through and dropped so that no background compositing happens.
  const bool alpha = (png.image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  png.image.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                           : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
  const std::size_t channels = PNG_IMAGE_PIXEL_CHANNELS(png.image.format);
  std::vector<png_byte> buffer(area * channels);
  if (png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr) == 0) {
    throw Error(ErrorKind::MalformedImage, fmt::format("{}: {}", path.string(), png.image.message));
  }

  std::vector<std::uint8_t> pixels(area);
  for (std::size_t i = 0; i < area; ++i) {
    const png_byte* px = &buffer[i * channels];
    if (color) {
      const unsigned sum = unsigned{px[0]} + unsigned{px[1]} + unsigned{px[2]};
      pixels[i] = static_cast<std::uint8_t>((sum + 1) / 3);
    } else {
      pixels[i] = px[0];
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

void save_image(const std::filesystem::path& path, const GrayImage& img) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width());
  png.image.height = static_cast<png_uint_32>(img.height());
  png.image.format = PNG_FORMAT_GRAY;
  if (png_image_write_to_file(&png.image, path.c_str(), 0, img.pixels().data(), 0, nullptr) == 0) {
    throw Error(ErrorKind::Io, fmt::format("{}: {}", path.string(), png.image.message));
  }
}

Mask binarize_mask(const GrayImage& img, std::uint8_t threshold) {
  std::vector<bool> bits(img.size());
  bool any = false;
  const auto pixels = img.pixels();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    bits[i] = pixels[i] >= threshold;
    any = any || bits[i];
  }
  if (!any) {
    throw Error(ErrorKind::EmptyMask, fmt::format("no pixel >= {}", threshold));
  }
  return Mask(img.width(), img.height(), std::move(bits));
}

NormImage apply_mask(const NormImage& img, const Mask& mask) {
  require_same_shape(img.width(), img.height(), mask.width(), mask.height());
  NormImage out = img;
  auto values = out.values();
  const auto& bits = mask.bits();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!bits[i]) values[i] = 0.0F;
  }
  return out;
}

NormImage rescale_intensity(const GrayImage& img) {
  std::vector<float> values(img.size());
  const auto pixels = img.pixels();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    values[i] = static_cast<float>(static_cast<double>(pixels[i]) / 255.0);
  }
  return NormImage(img.width(), img.height(), std::move(values));
}

GrayImage quantize(const NormImage& img) {
  std::vector<std::uint8_t> pixels(img.size());
  const auto values = img.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double scaled = std::round(static_cast<double>(values[i]) * 255.0);
    pixels[i] = static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
  }
  return GrayImage(img.width(), img.height(), std::move(pixels));
}

NormImage resize_bilinear(const NormImage& img, int out_w, int out_h) {
  checked_area(out_w, out_h);
  if (out_w == img.width() && out_h == img.height()) return img;

  const int w = img.width();
  const int h = img.height();
  const double scale_x = static_cast<double>(w) / out_w;
  const double scale_y = static_cast<double>(h) / out_h;

  // Column sample positions are shared by every row.
  std::vector<int> x0s(static_cast<std::size_t>(out_w));
  std::vector<int> x1s(static_cast<std::size_t>(out_w));
  std::vector<double> fxs(static_cast<std::size_t>(out_w));
  for (int x = 0; x < out_w; ++x) {
    const double sx = std::clamp((x + 0.5) * scale_x - 0.5, 0.0, static_cast<double>(w - 1));
    const int x0 = static_cast<int>(sx);
    x0s[x] = x0;
    x1s[x] = std::min(x0 + 1, w - 1);
    fxs[x] = sx - x0;
  }

  std::vector<float> out(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h));
  for (int y = 0; y < out_h; ++y) {
    const double sy = std::clamp((y + 0.5) * scale_y - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double a = img.at(x0s[x], y0);
      const double b = img.at(x1s[x], y0);
      const double c = img.at(x0s[x], y1);
      const double d = img.at(x1s[x], y1);
      const double top = a + fxs[x] * (b - a);
      const double bottom = c + fxs[x] * (d - c);
      const double v = top + fy * (bottom - top);
      out[static_cast<std::size_t>(y) * out_w + x] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return NormImage(out_w, out_h, std::move(out));
}

std::size_t mask_area(const Mask& mask) {
  return static_cast<std::size_t>(std::count(mask.bits().begin(), mask.bits().end(), true));
}

NormImage mask_to_field(const Mask& mask) {
  std::vector<float> values(mask.size());
  const auto& bits = mask.bits();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = bits[i] ? 1.0F : 0.0F;
  return NormImage(mask.width(), mask.height(), std::move(values));
}

Mask resize_mask(const Mask& mask, int out_w, int out_h) {
  if (out_w == mask.width() && out_h == mask.height()) return mask;
  const NormImage field = resize_bilinear(mask_to_field(mask), out_w, out_h);
  std::vector<bool> bits(field.size());
  const auto values = field.values();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = values[i] >= 0.5F;
  return Mask(out_w, out_h, std::move(bits));
}

}  // namespace cxr

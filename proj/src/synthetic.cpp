#include "cxr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/core.h>

#include "cxr/error.hpp"

namespace cxr::synthetic {

namespace {

float unit(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

// Low-frequency texture: a coarse random grid upsampled bilinearly.
NormImage smooth_field(int side, int coarse, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<float> grid(static_cast<std::size_t>(coarse) * coarse);
  for (float& v : grid) v = static_cast<float>(u(rng));
  return resize_bilinear(NormImage(coarse, coarse, std::move(grid)), side, side);
}

bool in_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
  const double dx = (x - cx) / rx;
  const double dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

}  // namespace

TrainData separable_halves(int count, int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  TrainData data;
  for (int i = 0; i < count; ++i) {
    const int label = i % 2;
    std::vector<float> v(static_cast<std::size_t>(side) * side);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const bool left = x < side / 2;
        const double base = (left == (label == 1)) ? 0.7 : 0.3;
        v[static_cast<std::size_t>(y) * side + x] = unit(base + noise(rng));
      }
    }
    data.images.emplace_back(side, side, std::move(v));
    data.labels.push_back(label);
  }
  return data;
}

TrainData faint_blobs(int count, int side, std::uint64_t seed, double blob_amplitude, double noise) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> pixel_noise(0.0, noise);
  std::uniform_real_distribution<double> where(0.25 * side, 0.75 * side);
  const double sigma = side / 8.0;
  TrainData data;
  for (int i = 0; i < count; ++i) {
    const int label = i % 2;
    const NormImage texture = smooth_field(side, 4, rng);
    const double bx = where(rng);
    const double by = where(rng);
    std::vector<float> v(static_cast<std::size_t>(side) * side);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        double value = 0.3 + 0.3 * texture.at(x, y) + pixel_noise(rng);
        if (label == 1) {
          const double r2 = (x - bx) * (x - bx) + (y - by) * (y - by);
          value += blob_amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
        }
        v[static_cast<std::size_t>(y) * side + x] = unit(value);
      }
    }
    data.images.emplace_back(side, side, std::move(v));
    data.labels.push_back(label);
  }
  return data;
}

void write_mini_dataset(const std::filesystem::path& dir, int count, int width, int height,
                        std::uint64_t seed) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "masks");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.04, 0.04);
  std::normal_distribution<double> grain(0.0, 0.05);

  std::string manifest = "id,image,mask,label,gender,age\n";
  for (int i = 0; i < count; ++i) {
    const int label = i % 2;
    // Vary the frame size so area distributions are not degenerate.
    const int w = width + 4 * (i % 3);
    const int h = height + 2 * (i % 4);
    const double lx = (0.3 + jitter(rng)) * w;
    const double rx = (0.7 + jitter(rng)) * w;
    const double cy = (0.52 + jitter(rng)) * h;
    const double ax = (0.15 + jitter(rng) / 2) * w;
    const double ay = (0.33 + jitter(rng)) * h;

    GrayImage img(w, h);
    GrayImage mask(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool lung = in_ellipse(x, y, lx, cy, ax, ay) || in_ellipse(x, y, rx, cy, ax, ay);
        double v = lung ? 0.25 : 0.65;
        if (label == 1 && lung && in_ellipse(x, y, rx, cy - 0.1 * h, 0.06 * w, 0.08 * h)) v += 0.35;
        v += grain(rng);
        img.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        mask.at(x, y) = lung ? 255 : 0;
      }
    }
    const std::string id = fmt::format("case{:02d}", i + 1);
    save_image(dir / "images" / (id + ".png"), img);
    save_image(dir / "masks" / (id + "_mask.png"), mask);
    const char* gender = (i % 3 == 2) ? "" : (i % 2 == 0 ? "M" : "F");
    const std::string age = (i % 5 == 4) ? "" : std::to_string(8 + 9 * i);
    manifest += fmt::format("{},images/{}.png,masks/{}_mask.png,{},{},{}\n", id, id, id, label, gender, age);
  }
  std::ofstream out(dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", (dir / "manifest.csv").string()));
  out << manifest;
}

}  // namespace cxr::synthetic

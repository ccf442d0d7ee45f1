#include "cxr/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "cxr/error.hpp"

namespace cxr {

namespace {

// Each element acts on doubled, centred pixel coordinates (X = 2x - (w-1),
// Y = 2y - (h-1)) as an integer matrix mapping input position to output
// position.
struct Mat2 {
  int a, b, c, d;
  bool operator==(const Mat2&) const = default;
};

constexpr Mat2 matrix_of(D4Element e) noexcept {
  switch (e) {
    case D4Element::Identity: return {1, 0, 0, 1};
    case D4Element::Rot90: return {0, 1, -1, 0};
    case D4Element::Rot180: return {-1, 0, 0, -1};
    case D4Element::Rot270: return {0, -1, 1, 0};
    case D4Element::FlipLR: return {-1, 0, 0, 1};
    case D4Element::FlipUD: return {1, 0, 0, -1};
    case D4Element::Transpose: return {0, 1, 1, 0};
    case D4Element::AntiTranspose: return {0, -1, -1, 0};
  }
  return {1, 0, 0, 1};
}

constexpr Mat2 multiply(const Mat2& l, const Mat2& r) noexcept {
  return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
          l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

D4Element element_of(const Mat2& m) noexcept {
  for (D4Element e : kD4Elements) {
    if (matrix_of(e) == m) return e;
  }
  return D4Element::Identity;  // unreachable: the group is closed
}

// Calls sink(out_index, in_index) for every output pixel.
template <typename Sink>
void for_each_permuted(int w, int h, D4Element e, Sink&& sink) {
  const Mat2 fwd = matrix_of(e);
  // Orthogonal integer matrices: the inverse is the transpose.
  const Mat2 inv{fwd.a, fwd.c, fwd.b, fwd.d};
  const bool swap = swaps_axes(e);
  const int out_w = swap ? h : w;
  const int out_h = swap ? w : h;
  for (int y = 0; y < out_h; ++y) {
    const int oy = 2 * y - (out_h - 1);
    for (int x = 0; x < out_w; ++x) {
      const int ox = 2 * x - (out_w - 1);
      const int ix = inv.a * ox + inv.b * oy;
      const int iy = inv.c * ox + inv.d * oy;
      const int sx = (ix + (w - 1)) / 2;
      const int sy = (iy + (h - 1)) / 2;
      sink(static_cast<std::size_t>(y) * out_w + x, static_cast<std::size_t>(sy) * w + sx);
    }
  }
}

}  // namespace

std::string_view to_string(D4Element e) noexcept {
  switch (e) {
    case D4Element::Identity: return "identity";
    case D4Element::Rot90: return "rot90";
    case D4Element::Rot180: return "rot180";
    case D4Element::Rot270: return "rot270";
    case D4Element::FlipLR: return "fliplr";
    case D4Element::FlipUD: return "flipud";
    case D4Element::Transpose: return "transpose";
    case D4Element::AntiTranspose: return "antitranspose";
  }
  return "unknown";
}

bool swaps_axes(D4Element e) noexcept { return matrix_of(e).a == 0; }

NormImage d4_apply(const NormImage& img, D4Element e) {
  if (e == D4Element::Identity) return img;
  const bool swap = swaps_axes(e);
  std::vector<float> out(img.size());
  const auto in = img.values();
  for_each_permuted(img.width(), img.height(), e,
                    [&](std::size_t o, std::size_t i) { out[o] = in[i]; });
  return NormImage(swap ? img.height() : img.width(), swap ? img.width() : img.height(),
                   std::move(out));
}

Mask d4_apply(const Mask& mask, D4Element e) {
  if (e == D4Element::Identity) return mask;
  const bool swap = swaps_axes(e);
  std::vector<bool> out(mask.size());
  const auto& in = mask.bits();
  for_each_permuted(mask.width(), mask.height(), e,
                    [&](std::size_t o, std::size_t i) { out[o] = in[i]; });
  return Mask(swap ? mask.height() : mask.width(), swap ? mask.width() : mask.height(),
              std::move(out));
}

D4Element d4_compose(D4Element first, D4Element second) noexcept {
  return element_of(multiply(matrix_of(second), matrix_of(first)));
}

D4Element d4_inverse(D4Element e) noexcept {
  const Mat2 m = matrix_of(e);
  return element_of({m.a, m.c, m.b, m.d});
}

std::vector<NormImage> d4_expand(const NormImage& img) {
  std::vector<NormImage> out;
  out.reserve(kD4Elements.size());
  for (D4Element e : kD4Elements) out.push_back(d4_apply(img, e));
  return out;
}

NormImage rotate_lossy(const NormImage& img, double angle_deg) {
  if (angle_deg == 0.0) return img;
  if (!std::isfinite(angle_deg)) {
    throw Error(ErrorKind::InvalidPolicy, fmt::format("rotation angle {} is not finite", angle_deg));
  }

  const int w = img.width();
  const int h = img.height();
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  // Sample positions within this distance of the border count as inside, so
  // that quarter turns land exactly on pixel centres despite cos(90deg) != 0.
  constexpr double kEdgeSlack = 1e-9;

  std::vector<float> out(img.size(), 0.0F);
  for (int y = 0; y < h; ++y) {
    const double dy = y - cy;
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx;
      double sx = cx + dx * cos_t - dy * sin_t;
      double sy = cy + dx * sin_t + dy * cos_t;
      if (sx < -kEdgeSlack || sy < -kEdgeSlack || sx > (w - 1) + kEdgeSlack ||
          sy > (h - 1) + kEdgeSlack) {
        continue;
      }
      sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
      sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      const int x0 = static_cast<int>(sx);
      const int y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      const double a = img.at(x0, y0);
      const double b = img.at(x1, y0);
      const double c = img.at(x0, y1);
      const double d = img.at(x1, y1);
      const double top = a + fx * (b - a);
      const double bottom = c + fx * (d - c);
      out[static_cast<std::size_t>(y) * w + x] =
          static_cast<float>(std::clamp(top + fy * (bottom - top), 0.0, 1.0));
    }
  }
  return NormImage(w, h, std::move(out));
}

void AugPolicy::validate() const {
  for (double a : lossy_angles) {
    if (!std::isfinite(a) || a == 0.0 || a <= -45.0 || a >= 45.0) {
      throw Error(ErrorKind::InvalidPolicy,
                  fmt::format("lossy angle {} must be finite, nonzero and in (-45, 45)", a));
    }
  }
}

std::size_t AugPolicy::factor() const noexcept {
  const std::size_t full = (lossless ? 8U : 1U) * (1U + lossy_angles.size());
  return include_original ? full : full - 1;
}

std::string variant_suffix(const Variant& v, bool lossless) {
  std::string suffix;
  if (lossless) suffix += fmt::format("_d4-{}", to_string(v.element));
  if (v.rotated) suffix += fmt::format("_rot{:+g}", v.angle_deg);
  return suffix;
}

std::vector<Variant> expansion_plan(const AugPolicy& policy) {
  policy.validate();
  std::vector<Variant> plan;
  const std::size_t n_elements = policy.lossless ? kD4Elements.size() : 1;
  for (std::size_t i = 0; i < n_elements; ++i) {
    const D4Element e = kD4Elements[i];
    const Variant base{e, false, 0.0};
    if (!base.is_original() || policy.include_original) plan.push_back(base);
    for (double angle : policy.lossy_angles) plan.push_back({e, true, angle});
  }
  return plan;
}

NormImage apply_variant(const NormImage& img, const Variant& v) {
  NormImage out = d4_apply(img, v.element);
  return v.rotated ? rotate_lossy(out, v.angle_deg) : out;
}

std::vector<LabeledImage> expand_dataset(const std::vector<LabeledImage>& records,
                                         const AugPolicy& policy) {
  const std::vector<Variant> plan = expansion_plan(policy);
  std::vector<LabeledImage> out;
  out.reserve(records.size() * plan.size());
  for (const LabeledImage& rec : records) {
    for (const Variant& v : plan) out.push_back({apply_variant(rec.image, v), rec.label});
  }
  return out;
}

}  // namespace cxr

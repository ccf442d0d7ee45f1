#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cxr/imaging.hpp"

namespace cxr {

/// The eight symmetries of the square. Rotations are counter-clockwise as
/// seen on screen (y axis pointing down).
enum class D4Element {
  Identity,
  Rot90,
  Rot180,
  Rot270,
  FlipLR,
  FlipUD,
  Transpose,
  AntiTranspose,
};

/// Expansion order used by d4_expand and expand_dataset.
inline constexpr std::array<D4Element, 8> kD4Elements = {
    D4Element::Identity, D4Element::Rot90,  D4Element::Rot180,    D4Element::Rot270,
    D4Element::FlipLR,   D4Element::FlipUD, D4Element::Transpose, D4Element::AntiTranspose,
};

/// Lower-case name used in file suffixes, e.g. "rot90".
std::string_view to_string(D4Element e) noexcept;

/// True for the four elements that exchange width and height.
bool swaps_axes(D4Element e) noexcept;

/// Exact pixel permutation; no interpolation.
NormImage d4_apply(const NormImage& img, D4Element e);
Mask d4_apply(const Mask& mask, D4Element e);

/// The element equivalent to applying `first` and then `second`.
D4Element d4_compose(D4Element first, D4Element second) noexcept;

D4Element d4_inverse(D4Element e) noexcept;

/// d4_apply for every element of kD4Elements, in that order.
std::vector<NormImage> d4_expand(const NormImage& img);

/// Counter-clockwise rotation about ((w-1)/2, (h-1)/2) with bilinear sampling
/// and zero fill. A zero angle returns the input unchanged.
NormImage rotate_lossy(const NormImage& img, double angle_deg);

struct AugPolicy {
  bool lossless = true;
  std::vector<double> lossy_angles = {5.0, -5.0};
  /// When false the untransformed variant is left out of the expansion.
  bool include_original = true;

  /// Throws InvalidPolicy unless every angle is finite, nonzero and in (-45, 45).
  void validate() const;

  /// (8 if lossless else 1) * (1 + |lossy_angles|), less one without the original.
  std::size_t factor() const noexcept;
};

/// One augmented copy of an input: which transforms produced it.
struct Variant {
  D4Element element = D4Element::Identity;
  bool rotated = false;
  double angle_deg = 0.0;

  bool is_original() const noexcept { return element == D4Element::Identity && !rotated; }
};

/// Provenance suffix for file names: "_d4-<element>" when lossless is on,
/// followed by "_rot<+/-deg>" for lossy variants.
std::string variant_suffix(const Variant& v, bool lossless);

/// Transform schedule for one input image, in output order.
std::vector<Variant> expansion_plan(const AugPolicy& policy);

NormImage apply_variant(const NormImage& img, const Variant& v);

struct LabeledImage {
  NormImage image;
  int label = 0;
};

/// Every record expanded per policy; labels are copied onto each variant and
/// the output keeps input order, then plan order.
std::vector<LabeledImage> expand_dataset(const std::vector<LabeledImage>& records,
                                         const AugPolicy& policy);

}  // namespace cxr

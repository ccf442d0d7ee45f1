#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "cxr/augment.hpp"
#include "cxr/error.hpp"
#include "oracles.hpp"

using namespace cxr;
using E = D4Element;

namespace {

// 2x2 image [a b; c d] with a..d = 0.1..0.4, as row-major values.
const std::vector<float> kABCD = {0.1F, 0.2F, 0.3F, 0.4F};

std::vector<float> values(const NormImage& img) { return {img.values().begin(), img.values().end()}; }

std::vector<float> sorted(const NormImage& img) {
  auto v = values(img);
  std::sort(v.begin(), v.end());
  return v;
}

NormImage counter3x3() {
  std::vector<float> v(9);
  for (int i = 0; i < 9; ++i) v[i] = static_cast<float>(i) / 8.0F;
  return {3, 3, std::move(v)};
}

// Smooth gradient of the kind used to quantify rotation loss.
NormImage smooth_gradient(int side) {
  NormImage img(side, side);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      img.at(x, y) = static_cast<float>(0.25 + 0.5 * (x + y) / (2.0 * (side - 1)));
  return img;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("2x2 permutations enumerated by hand") {
  const float a = 0.1F, b = 0.2F, c = 0.3F, d = 0.4F;
  const std::map<E, std::vector<float>> expected = {
      {E::Identity, {a, b, c, d}},  {E::Rot90, {b, d, a, c}},     {E::Rot180, {d, c, b, a}},
      {E::Rot270, {c, a, d, b}},    {E::FlipLR, {b, a, d, c}},    {E::FlipUD, {c, d, a, b}},
      {E::Transpose, {a, c, b, d}}, {E::AntiTranspose, {d, b, c, a}},
  };
  const NormImage img(2, 2, kABCD);
  for (const auto& [e, want] : expected) {
    CAPTURE(to_string(e));
    CHECK(values(d4_apply(img, e)) == want);
  }
}

TEST_CASE("non-square shapes") {
  const NormImage row(2, 1, std::vector<float>{0.1F, 0.9F});
  CHECK(values(d4_apply(row, E::FlipLR)) == std::vector<float>{0.9F, 0.1F});
  const NormImage col = d4_apply(row, E::Rot90);
  CHECK(col.width() == 1);
  CHECK(col.height() == 2);
  // counter-clockwise: the right end moves to the top
  CHECK(values(col) == std::vector<float>{0.9F, 0.1F});
  for (E e : kD4Elements) {
    const NormImage out = d4_apply(NormImage(5, 3, 0.5F), e);
    CHECK(out.width() == (swaps_axes(e) ? 3 : 5));
  }
}

TEST_CASE("compose examples") {
  for (E e : kD4Elements) {
    CHECK(d4_compose(E::Identity, e) == e);
    CHECK(d4_compose(e, E::Identity) == e);
  }
  CHECK(d4_compose(E::Rot90, E::Rot90) == E::Rot180);
  CHECK(d4_compose(E::FlipLR, E::Rot90) == E::Transpose);
  const NormImage img(2, 2, kABCD);
  CHECK(d4_apply(d4_apply(img, E::FlipLR), E::Rot90) == d4_apply(img, E::Transpose));
}

TEST_CASE("group laws on random non-square images") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 10; ++t) {
    const NormImage img = oracle::random_image(3 + t % 4, 5 + t % 3, rng);
    for (E f : kD4Elements) {
      for (E s : kD4Elements) {
        CHECK(d4_apply(d4_apply(img, f), s) == d4_apply(img, d4_compose(f, s)));
      }
      CHECK(d4_apply(d4_apply(img, f), d4_inverse(f)) == img);
      CHECK(d4_compose(f, d4_inverse(f)) == E::Identity);
    }
  }
}

TEST_CASE("d4_apply preserves the pixel multiset and mask area") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 25; ++t) {
    const int w = 1 + static_cast<int>(rng() % 8);
    const int h = 1 + static_cast<int>(rng() % 8);
    const NormImage img = oracle::random_image(w, h, rng);
    const Mask m = oracle::random_mask(w, h, 0.4, rng);
    for (E e : kD4Elements) {
      CHECK(sorted(d4_apply(img, e)) == sorted(img));
      CHECK(mask_area(d4_apply(m, e)) == mask_area(m));
    }
  }
}

TEST_CASE("d4_expand") {
  const NormImage flat(4, 2, 0.3F);
  for (const NormImage& v : d4_expand(flat)) {
    for (float x : v.values()) CHECK(x == 0.3F);
  }
  for (const NormImage& v : d4_expand(NormImage(1, 1, 0.7F))) CHECK(v == NormImage(1, 1, 0.7F));

  const auto all = d4_expand(counter3x3());
  REQUIRE(all.size() == 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 1; j < 8; ++j) CHECK(all[i] != all[j]);
}

TEST_CASE("rotate_lossy") {
  const NormImage img = counter3x3();
  CHECK(rotate_lossy(img, 0.0) == img);

  const NormImage quarter = rotate_lossy(img, 90.0);
  const NormImage exact = d4_apply(img, E::Rot90);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) CHECK(std::abs(quarter.at(x, y) - exact.at(x, y)) <= 1e-6);

  // Constant input: interior stays constant, corners are zero-filled.
  const int side = 32;
  const NormImage c = rotate_lossy(NormImage(side, side, 0.6F), 5.0);
  CHECK(c.at(side / 2, side / 2) == doctest::Approx(0.6));
  CHECK(c.at(0, 0) == 0.0F);
  CHECK(c.at(side - 1, side - 1) == 0.0F);
  for (float v : c.values()) CHECK((v == 0.0F || std::abs(v - 0.6F) < 1e-6 || (v > 0.0F && v < 0.6F)));

  CHECK_THROWS_AS(rotate_lossy(img, std::nan("")), Error);
}

TEST_CASE("rotate_lossy output stays in range and round trips approximately") {
  std::mt19937_64 rng(8);
  for (double angle : {5.0, -5.0, 17.0, -33.0}) {
    const NormImage r = rotate_lossy(oracle::random_image(16, 12, rng), angle);
    for (float v : r.values()) {
      CHECK(v >= 0.0F);
      CHECK(v <= 1.0F);
    }
  }
  const NormImage g = smooth_gradient(128);
  const NormImage back = rotate_lossy(rotate_lossy(g, 5.0), -5.0);
  const double radius = 128 / 2.0 - 2.0;
  double se = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (std::hypot(x - 63.5, y - 63.5) > radius) continue;
      const double d = back.at(x, y) - g.at(x, y);
      se += d * d;
      ++n;
    }
  }
  CHECK(se / n <= 1e-3);
}

TEST_CASE("policy validation and factor") {
  AugPolicy p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.factor() == 24);
  for (double bad : {0.0, 45.0, -45.0, 90.0, std::nan(""), HUGE_VAL}) {
    p.lossy_angles = {bad};
    CHECK_THROWS_AS(p.validate(), Error);
  }
  AugPolicy off{false, {}, true};
  CHECK(off.factor() == 1);
  AugPolicy lossless_only{true, {}, true};
  CHECK(lossless_only.factor() == 8);
  lossless_only.include_original = false;
  CHECK(lossless_only.factor() == 7);
}

TEST_CASE("expand_dataset examples") {
  const std::vector<LabeledImage> one = {{NormImage(4, 4, 0.2F), 1}};
  CHECK(expand_dataset(one, AugPolicy{true, {5.0, -5.0}, true}).size() == 24);
  const auto same = expand_dataset(one, AugPolicy{false, {}, true});
  REQUIRE(same.size() == 1);
  CHECK(same[0].image == one[0].image);
  CHECK(same[0].label == 1);
}

TEST_CASE("expand_dataset count formula over random policies") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-44.0, 44.0);
  for (int t = 0; t < 30; ++t) {
    AugPolicy p;
    p.lossless = rng() % 2 == 0;
    p.include_original = rng() % 2 == 0;
    p.lossy_angles.clear();
    const auto n_angles = rng() % 3;
    for (std::size_t i = 0; i < n_angles; ++i) p.lossy_angles.push_back(angle(rng));
    if (!p.lossless && p.lossy_angles.empty()) p.include_original = true;

    std::vector<LabeledImage> recs;
    const auto n = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) recs.push_back({oracle::random_image(6, 6, rng), static_cast<int>(i % 2)});
    const auto out = expand_dataset(recs, p);
    const std::size_t per = (p.lossless ? 8 : 1) * (1 + p.lossy_angles.size()) - (p.include_original ? 0 : 1);
    CHECK(out.size() == n * per);
    CHECK(expansion_plan(p).size() == per);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].label == recs[i / per].label);
  }
}

TEST_CASE("variant suffixes") {
  CHECK(variant_suffix({E::Rot90, false, 0.0}, true) == "_d4-rot90");
  CHECK(variant_suffix({E::Identity, true, 5.0}, true) == "_d4-identity_rot+5");
  CHECK(variant_suffix({E::Identity, true, -5.0}, false) == "_rot-5");
  CHECK(variant_suffix({E::Identity, false, 0.0}, false).empty());
}

}  // TEST_SUITE

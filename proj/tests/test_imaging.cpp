#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "cxr/error.hpp"
#include "cxr/imaging.hpp"
#include "oracles.hpp"

using namespace cxr;

namespace {

const std::filesystem::path kFixtures = CXR_FIXTURE_DIR;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no cxr::Error thrown");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("imaging") {

TEST_CASE("load_image decodes independently encoded PNGs") {
  const GrayImage one = load_image(kFixtures / "gray1x1.png");
  CHECK(one == GrayImage(1, 1, std::vector<std::uint8_t>{255}));

  const GrayImage four = load_image(kFixtures / "gray2x2.png");
  CHECK(four == GrayImage(2, 2, std::vector<std::uint8_t>{0, 128, 255, 64}));

  // (30+60+90+1)/3 and (255+0+1+1)/3
  const GrayImage rgb = load_image(kFixtures / "rgb2x1.png");
  CHECK(rgb == GrayImage(2, 1, std::vector<std::uint8_t>{60, 85}));
}

TEST_CASE("load_image errors") {
  CHECK(kind_of([] { load_image(kFixtures / "missing.png"); }) == ErrorKind::FileNotFound);
  CHECK(kind_of([] { load_image(kFixtures / "truncated.png"); }) == ErrorKind::MalformedImage);
  CHECK(kind_of([] { load_image(kFixtures / "gray16.png"); }) == ErrorKind::UnsupportedBitDepth);

  const auto dir = oracle::scratch_dir("imaging-junk");
  std::ofstream(dir / "junk.png") << "definitely not a png";
  CHECK(kind_of([&] { load_image(dir / "junk.png"); }) == ErrorKind::MalformedImage);
}

TEST_CASE("save_image round trips") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> px(0, 255);
  GrayImage img(7, 5);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(px(rng));
  const auto dir = oracle::scratch_dir("imaging-save");
  save_image(dir / "a.png", img);
  CHECK(load_image(dir / "a.png") == img);
}

TEST_CASE("binarize_mask") {
  const Mask m = binarize_mask(GrayImage(4, 1, std::vector<std::uint8_t>{0, 255, 127, 128}));
  CHECK(m.bits() == std::vector<bool>{false, true, false, true});
  CHECK(mask_area(binarize_mask(GrayImage(3, 2, 255))) == 6);
  CHECK(kind_of([] { binarize_mask(GrayImage(3, 3, 0)); }) == ErrorKind::EmptyMask);
}

TEST_CASE("apply_mask examples") {
  const NormImage img(2, 2, std::vector<float>{0.1F, 0.2F, 0.3F, 0.4F});
  const NormImage out = apply_mask(img, Mask(2, 2, std::vector<bool>{true, false, false, true}));
  CHECK(out == NormImage(2, 2, std::vector<float>{0.1F, 0.0F, 0.0F, 0.4F}));
  CHECK(apply_mask(img, Mask(2, 2, true)) == img);

  Mask corner(2, 2, false);
  corner.set(0, 0, true);
  CHECK(apply_mask(img, corner) == NormImage(2, 2, std::vector<float>{0.1F, 0.0F, 0.0F, 0.0F}));

  CHECK(kind_of([&] { apply_mask(img, Mask(3, 2, true)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("apply_mask is an idempotent elementwise selection") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const int w = 1 + static_cast<int>(rng() % 9);
    const int h = 1 + static_cast<int>(rng() % 9);
    const NormImage img = oracle::random_image(w, h, rng);
    const Mask m = oracle::random_mask(w, h, 0.5, rng);
    const NormImage once = apply_mask(img, m);
    CHECK(apply_mask(once, m) == once);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (m.at(x, y)) {
          CHECK(once.at(x, y) == img.at(x, y));
        } else {
          CHECK(once.at(x, y) == 0.0F);
        }
      }
    }
  }
}

TEST_CASE("rescale_intensity") {
  const NormImage n = rescale_intensity(GrayImage(3, 1, std::vector<std::uint8_t>{0, 255, 51}));
  CHECK(n.at(0, 0) == 0.0F);
  CHECK(n.at(1, 0) == 1.0F);
  CHECK(n.at(2, 0) == doctest::Approx(0.2).epsilon(1e-7));
}

TEST_CASE("rescale then quantize recovers every 8-bit value") {
  GrayImage all(256, 1);
  for (int v = 0; v < 256; ++v) all.at(v, 0) = static_cast<std::uint8_t>(v);
  const NormImage n = rescale_intensity(all);
  GrayImage back(256, 1);
  for (int v = 0; v < 256; ++v) back.at(v, 0) = static_cast<std::uint8_t>(std::lround(n.at(v, 0) * 255.0));
  CHECK(back == all);
  CHECK(quantize(n) == all);
}

TEST_CASE("NormImage rejects bad construction") {
  CHECK(kind_of([] { NormImage(2, 2, std::vector<float>{0.1F}); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { NormImage(1, 1, std::vector<float>{1.5F}); }) == ErrorKind::MalformedImage);
}

TEST_CASE("resize_bilinear examples") {
  const NormImage ramp(2, 1, std::vector<float>{0.0F, 1.0F});
  const NormImage wide = resize_bilinear(ramp, 4, 1);
  REQUIRE(wide.width() == 4);
  CHECK(wide.at(0, 0) == doctest::Approx(0.0));
  CHECK(wide.at(1, 0) == doctest::Approx(0.25));
  CHECK(wide.at(2, 0) == doctest::Approx(0.75));
  CHECK(wide.at(3, 0) == doctest::Approx(1.0));

  const NormImage flat = resize_bilinear(NormImage(5, 3, 0.5F), 13, 8);
  for (float v : flat.values()) CHECK(v == 0.5F);
}

TEST_CASE("resize_bilinear identity and bounds") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const int w = 1 + static_cast<int>(rng() % 12);
    const int h = 1 + static_cast<int>(rng() % 12);
    const NormImage img = oracle::random_image(w, h, rng);
    CHECK(resize_bilinear(img, w, h) == img);

    const auto [lo, hi] = std::minmax_element(img.values().begin(), img.values().end());
    const int ow = 1 + static_cast<int>(rng() % 20);
    const int oh = 1 + static_cast<int>(rng() % 20);
    const NormImage out = resize_bilinear(img, ow, oh);
    CHECK(out.width() == ow);
    CHECK(out.height() == oh);
    for (float v : out.values()) {
      CHECK(v >= *lo - 1e-12);
      CHECK(v <= *hi + 1e-12);
    }
  }
}

TEST_CASE("mask_area matches a brute-force count") {
  CHECK(mask_area(Mask(3, 3, false)) == 0);
  CHECK(mask_area(Mask(3, 3, true)) == 9);
  CHECK(mask_area(Mask(2, 2, std::vector<bool>{true, false, true, true})) == 3);

  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const int w = 1 + static_cast<int>(rng() % 30);
    const int h = 1 + static_cast<int>(rng() % 30);
    const Mask m = oracle::random_mask(w, h, 0.3, rng);
    std::size_t count = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) count += m.at(x, y) ? 1 : 0;
    CHECK(mask_area(m) == count);
  }
}

TEST_CASE("resize_mask keeps full and empty masks") {
  CHECK(resize_mask(Mask(3, 5, true), 8, 8) == Mask(8, 8, true));
  CHECK(resize_mask(Mask(3, 5, false), 8, 8) == Mask(8, 8, false));
  const Mask m(2, 2, std::vector<bool>{true, false, false, true});
  CHECK(resize_mask(m, 2, 2) == m);
}

}  // TEST_SUITE

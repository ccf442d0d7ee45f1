#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "cxr/dataset.hpp"
#include "cxr/error.hpp"
#include "oracles.hpp"

using namespace cxr;

namespace {

std::vector<ManifestRecord> labelled(std::size_t zeros, std::size_t ones) {
  std::vector<ManifestRecord> recs;
  for (std::size_t i = 0; i < zeros + ones; ++i) {
    ManifestRecord r;
    r.id = "r" + std::to_string(i);
    r.label = i < zeros ? 0 : 1;
    recs.push_back(r);
  }
  return recs;
}

std::size_t count_label(const std::vector<std::string>& ids, const std::vector<ManifestRecord>& recs,
                        int label) {
  std::size_t n = 0;
  for (const auto& id : ids) {
    const auto it = std::find_if(recs.begin(), recs.end(), [&](const auto& r) { return r.id == id; });
    n += it->label == label ? 1 : 0;
  }
  return n;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

ErrorKind manifest_error(const std::string& body) {
  const auto dir = oracle::scratch_dir("manifest-error");
  write(dir / "m.csv", body);
  try {
    load_manifest(dir / "m.csv");
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("manifest accepted");
  return ErrorKind::Io;
}

Mask mask_with_area(int side, std::size_t area) {
  Mask m(side, side, false);
  for (std::size_t i = 0; i < area; ++i) m.set(static_cast<int>(i % side), static_cast<int>(i / side), true);
  return m;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("load_manifest") {
  const auto dir = oracle::scratch_dir("manifest");
  write(dir / "empty.csv", "id,image,mask,label,gender,age\n");
  CHECK(load_manifest(dir / "empty.csv").empty());

  write(dir / "three.csv",
        "id,image,mask,label,gender,age\n"
        "b,img/b.png,msk/b.png,1,M,34\n"
        "a,/abs/a.png,msk/a.png,0,F,\n"
        "c,img/c.png,msk/c.png,0,,120\n");
  const auto recs = load_manifest(dir / "three.csv");
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].id == "b");
  CHECK(recs[0].image_path == dir / "img/b.png");
  CHECK(recs[0].mask_path == dir / "msk/b.png");
  CHECK(recs[0].label == 1);
  CHECK(recs[0].gender == Gender::Male);
  CHECK(recs[0].age == 34);
  CHECK(recs[1].id == "a");
  CHECK(recs[1].image_path == "/abs/a.png");
  CHECK(recs[1].gender == Gender::Female);
  CHECK_FALSE(recs[1].age.has_value());
  CHECK(recs[2].gender == Gender::Unknown);
  CHECK(recs[2].age == 120);
}

TEST_CASE("load_manifest errors") {
  const std::string head = "id,image,mask,label,gender,age\n";
  CHECK(manifest_error(head + "a,i.png,m.png,2,M,30\n") == ErrorKind::MalformedRow);
  CHECK(manifest_error(head + "a,i.png,m.png,1,M\n") == ErrorKind::MalformedRow);
  CHECK(manifest_error(head + "a,i.png,m.png,1,X,30\n") == ErrorKind::MalformedRow);
  CHECK(manifest_error(head + "a,i.png,m.png,1,M,200\n") == ErrorKind::MalformedRow);
  CHECK(manifest_error(head + "a,i.png,m.png,1,M,30\na,j.png,n.png,0,F,31\n") == ErrorKind::DuplicateId);
  CHECK(manifest_error("name,path\n") == ErrorKind::MalformedRow);
  CHECK_THROWS_AS(load_manifest("/nonexistent/manifest.csv"), Error);
}

TEST_CASE("split arithmetic") {
  const auto sh = labelled(326, 336);
  const Split s = stratified_split(sh, 7);
  CHECK(s.val.size() == 65);
  CHECK(s.test.size() == 65);
  CHECK(s.train.size() == 532);
  CHECK(count_label(s.val, sh, 1) == 33);
  CHECK(count_label(s.val, sh, 0) == 32);
  CHECK(count_label(s.test, sh, 1) == 33);
  CHECK(count_label(s.test, sh, 0) == 32);

  const Split small = stratified_split(labelled(5, 5), 1);
  CHECK(small.train.size() == 8);
  CHECK(small.val.size() == 1);
  CHECK(small.test.size() == 1);

  CHECK(stratified_split(sh, 7) == s);
}

TEST_CASE("split errors") {
  CHECK_THROWS_AS(stratified_split(labelled(4, 5), 1), Error);
  CHECK_THROWS_AS(stratified_split(labelled(10, 0), 1), Error);
  CHECK_NOTHROW(stratified_split(labelled(4, 4), 1, SplitOptions{3}));
  CHECK_THROWS_AS(stratified_split(labelled(1, 1), 1, SplitOptions{0}), Error);
}

TEST_CASE("split properties over random manifests") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t zeros = 1 + rng() % 200;
    const std::size_t ones = (zeros < 10 ? 10 : 1) + rng() % 200;
    const auto recs = labelled(zeros, ones);
    const std::uint64_t seed = rng();
    const Split s = stratified_split(recs, seed);

    std::multiset<std::string> all;
    all.insert(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    std::multiset<std::string> want;
    for (const auto& r : recs) want.insert(r.id);
    CHECK(all == want);

    for (int label : {0, 1}) {
      const std::size_t n = label == 0 ? zeros : ones;
      CHECK(count_label(s.val, recs, label) == n / 10);
      CHECK(count_label(s.test, recs, label) == n / 10);
    }
    CHECK(stratified_split(recs, seed) == s);
  }
}

TEST_CASE("different seeds reshuffle membership") {
  const auto recs = labelled(20, 20);
  CHECK(stratified_split(recs, 1).train != stratified_split(recs, 2).train);
}

TEST_CASE("tiny manifests still get nonempty parts") {
  for (std::size_t z = 1; z <= 9; ++z) {
    for (std::size_t o = 1; o <= 9; ++o) {
      if (z + o < 3) continue;
      const Split s = stratified_split(labelled(z, o), 5, SplitOptions{3});
      CHECK(s.val.size() == 1);
      CHECK(s.test.size() == 1);
      CHECK(s.train.size() == z + o - 2);
    }
  }
}

TEST_CASE("summary statistics and histograms") {
  const SummaryStats two = summarize({1.0, 3.0});
  CHECK(two.mean == doctest::Approx(2.0));
  CHECK(two.std == doctest::Approx(std::sqrt(2.0)));

  const SummaryStats four = summarize({10, 10, 20, 40});
  CHECK(four.mean == doctest::Approx(20.0));
  CHECK(four.median == doctest::Approx(15.0));

  CHECK(area_histogram({}).empty());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1e4);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> vals(1 + rng() % 100);
    for (double& v : vals) v = u(rng);
    const auto hist = area_histogram(vals);
    CHECK(hist.size() == kHistogramBins);
    std::size_t total = 0;
    for (const auto& b : hist) total += b.count;
    CHECK(total == vals.size());
  }
  const auto same = area_histogram({5.0, 5.0, 5.0});
  CHECK(same.front().count == 3);
}

TEST_CASE("eda_report from measured areas") {
  EdaReport r;
  fill_area_stats(r, {100, 100, 100, 100}, {10, 10, 20, 40});
  std::size_t total = 0;
  for (const auto& b : r.mask_area_hist) total += b.count;
  CHECK(total == 4);
  CHECK(r.mask_area_stats.mean == doctest::Approx(20.0));
  CHECK(r.mask_area_stats.median == doctest::Approx(15.0));

  const EdaReport none = eda_report({});
  CHECK(none.label_counts.empty());
  CHECK(none.image_area_hist.empty());
  CHECK(none.mask_area_hist.empty());
}

TEST_CASE("eda_report counts labels and skips unreadable records") {
  const auto dir = oracle::scratch_dir("eda");
  save_image(dir / "i.png", GrayImage(6, 4, 100));
  save_image(dir / "m.png", GrayImage(6, 4, 255));
  std::vector<ManifestRecord> recs(3);
  recs[0] = {"a", dir / "i.png", dir / "m.png", 0, Gender::Male, 25};
  recs[1] = {"b", dir / "i.png", dir / "m.png", 1, Gender::Unknown, std::nullopt};
  recs[2] = {"c", dir / "gone.png", dir / "m.png", 1, Gender::Female, 61};
  const EdaReport r = eda_report(recs);
  CHECK(r.label_counts.at(0) == 1);
  CHECK(r.label_counts.at(1) == 2);
  CHECK(r.skipped_ids == std::vector<std::string>{"c"});
  std::size_t img_total = 0, mask_total = 0;
  for (const auto& b : r.image_area_hist) img_total += b.count;
  for (const auto& b : r.mask_area_hist) mask_total += b.count;
  CHECK(img_total == recs.size() - r.skipped_ids.size());
  CHECK(mask_total == recs.size() - r.skipped_ids.size());
  CHECK(r.gender_age_hist.at({0, "M", "20-29"}) == 1);
  CHECK(r.gender_age_hist.at({1, "unknown", "unknown"}) == 1);
}

TEST_CASE("age buckets") {
  CHECK(age_bucket(0) == "0-9");
  CHECK(age_bucket(29) == "20-29");
  CHECK(age_bucket(120) == "120-129");
  CHECK(age_bucket(std::nullopt) == "unknown");
}

TEST_CASE("mask_dice") {
  const Mask a(4, 1, std::vector<bool>{true, true, false, false});
  const Mask b(4, 1, std::vector<bool>{true, false, true, false});
  CHECK(mask_dice(a, b) == doctest::Approx(0.5));
  CHECK(mask_dice(a, a) == 1.0);
  CHECK(mask_dice(a, Mask(4, 1, std::vector<bool>{false, false, true, true})) == 0.0);
  CHECK_THROWS_AS(mask_dice(a, Mask(2, 2, true)), Error);

  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    const Mask x = oracle::random_mask(7, 5, 0.5, rng);
    const Mask y = oracle::random_mask(7, 5, 0.5, rng);
    const double d = mask_dice(x, y);
    CHECK(d == mask_dice(y, x));
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK(d == doctest::Approx(oracle::dice(x, y)).epsilon(1e-12));
    CHECK(mask_dice(x, x) == 1.0);
  }
}

TEST_CASE("extreme_mask_pairs examples") {
  const Mask full(4, 4, true);
  const Mask half = mask_with_area(4, 8);
  const auto two = extreme_mask_pairs(std::vector<NamedMask>{{"x", full}, {"y", half}});
  CHECK(two.most_similar.first == "x");
  CHECK(two.most_similar.second == "y");
  CHECK(two.most_dissimilar.first == "x");
  CHECK(two.most_dissimilar.second == "y");

  const auto three = extreme_mask_pairs(std::vector<NamedMask>{{"h", half}, {"f1", full}, {"f2", full}});
  CHECK(three.most_similar.first == "f1");
  CHECK(three.most_similar.second == "f2");
  CHECK(three.most_similar.score == 1.0);
  CHECK(three.most_dissimilar.first == "f1");
  CHECK(three.most_dissimilar.second == "h");

  CHECK_THROWS_AS(extreme_mask_pairs(std::vector<NamedMask>{{"x", full}}), Error);
}

TEST_CASE("extreme_mask_pairs matches a double-loop oracle") {
  std::mt19937_64 rng(40);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng() % 29;
    std::vector<NamedMask> masks;
    for (std::size_t i = 0; i < n; ++i) {
      masks.push_back({"m" + std::to_string(1000 + rng() % 9000) + "_" + std::to_string(i),
                       oracle::random_mask(9, 7, 0.2 + 0.6 * (t % 3) / 2.0, rng)});
    }
    double best = -1.0, worst = 2.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = oracle::dice(masks[i].mask, masks[j].mask);
        best = std::max(best, d);
        worst = std::min(worst, d);
      }
    }
    const auto got = extreme_mask_pairs(masks);
    CHECK(got.most_similar.score == doctest::Approx(best).epsilon(1e-12));
    CHECK(got.most_dissimilar.score == doctest::Approx(worst).epsilon(1e-12));
    CHECK(got.most_similar.first < got.most_similar.second);
    CHECK(got.most_dissimilar.first < got.most_dissimilar.second);
  }
}

TEST_CASE("average_mask") {
  const Mask one(3, 2, std::vector<bool>{true, false, true, false, false, true});
  CHECK(average_mask(std::vector<Mask>{one}, 3) == resize_mask(one, 3, 3));

  const Mask a(2, 2, std::vector<bool>{true, false, true, false});
  const Mask b(2, 2, std::vector<bool>{false, true, false, true});
  CHECK(average_mask(std::vector<Mask>{a, b}, 2) == Mask(2, 2, true));

  const Mask p(2, 2, std::vector<bool>{true, true, false, false});
  const Mask q(2, 2, std::vector<bool>{true, false, true, false});
  const Mask r(2, 2, std::vector<bool>{false, true, false, false});
  // means: 2/3, 2/3, 1/3, 0
  CHECK(average_mask(std::vector<Mask>{p, q, r}, 2) == Mask(2, 2, std::vector<bool>{true, true, false, false}));

  CHECK_THROWS_AS(average_mask(std::vector<Mask>{}, 2), Error);
}

}  // TEST_SUITE

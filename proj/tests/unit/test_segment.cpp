#include <doctest.h>

#include <random>
#include <set>

#include <Eigen/Dense>

#include "oasis/errors.hpp"
#include "oasis/segment.hpp"
#include "oasis/taxonomy.hpp"

using namespace oasis;

namespace {

constexpr auto kPole = to_id(ClassId::pole);
constexpr auto kRoad = to_id(ClassId::road);

std::set<int> columns_of(SegMask const& m, std::uint8_t id, int row) {
  std::set<int> cols;
  for (int u = 0; u < m.width(); ++u) {
    if (m(u, row) == id) cols.insert(u);
  }
  return cols;
}

SegMask random_mask(std::mt19937_64& rng, int w, int h, int classes) {
  std::uniform_int_distribution<int> cls(0, classes - 1);
  SegMask m(w, h);
  for (auto& v : m.data()) v = static_cast<std::uint8_t>(cls(rng));
  return m;
}

}  // namespace

TEST_SUITE("segment") {
  TEST_CASE("taxonomy ids and names") {
    CHECK(all_classes().size() == kClassCount);
    for (std::size_t i = 0; i < kClassCount; ++i) {
      CHECK(to_id(all_classes()[i]) == i);
      CHECK(class_from_name(class_name(all_classes()[i])) == all_classes()[i]);
    }
    for (auto c : kStaticInfrastructure) CHECK(is_static_infrastructure(c));
    CHECK_FALSE(is_static_infrastructure(ClassId::car));
    CHECK_FALSE(class_from_name("lamppost"));
    SegMask bad(3, 3, 0);
    bad(2, 1) = 250;
    CHECK_THROWS_AS(validate_mask(bad), ValidationError);
  }

  TEST_CASE("union of identical masks under identity is the mask") {
    std::mt19937_64 rng{1};
    auto const m = random_mask(rng, 16, 9, static_cast<int>(kClassCount));
    std::vector<WindowFrame> window(3, WindowFrame{std::cref(m), Homography::identity()});
    window.back().to_last.reset();
    CHECK(temporal_union(window) == m);
  }

  TEST_CASE("pole pixels of two frames are united") {
    SegMask a(6, 4, kRoad);
    SegMask b(6, 4, kRoad);
    a(1, 1) = kPole;
    a(2, 2) = kPole;
    b(4, 3) = kPole;
    std::array<ClassId, 1> const classes{ClassId::pole};
    std::vector<WindowFrame> const window{{std::cref(a), Homography::identity()}, {std::cref(b), std::nullopt}};
    auto const fused = temporal_union(window, classes);
    int count = 0;
    for (int v = 0; v < 4; ++v) {
      for (int u = 0; u < 6; ++u) {
        bool const expect = a(u, v) == kPole || b(u, v) == kPole;
        CHECK((fused(u, v) == kPole) == expect);
        count += expect;
      }
    }
    CHECK(count == 3);
  }

  TEST_CASE("translated pole lands where the warp puts it") {
    // 5x5 toy: frame 1 has a pole in column 1, frame 2 in column 3; frame 1
    // maps onto frame 2 by +2 columns.
    SegMask f1(5, 5, kRoad);
    SegMask f2(5, 5, kRoad);
    for (int v = 0; v < 5; ++v) {
      f1(1, v) = kPole;
      f2(4, v) = kPole;
    }
    std::array<ClassId, 1> const classes{ClassId::pole};
    std::vector<WindowFrame> const window{{std::cref(f1), Homography::translation(2, 0)},
                                          {std::cref(f2), std::nullopt}};
    auto const fused = temporal_union(window, classes);
    for (int v = 0; v < 5; ++v) {
      CHECK(columns_of(fused, kPole, v) == std::set<int>{3, 4});
    }
  }

  TEST_CASE("ten pixel translation on a wide raster") {
    SegMask f1(200, 3, kRoad);
    SegMask f2(200, 3, kRoad);
    f1(100, 1) = kPole;
    f2(150, 1) = kPole;
    std::array<ClassId, 1> const classes{ClassId::pole};
    std::vector<WindowFrame> const window{{std::cref(f1), Homography::translation(10, 0)},
                                          {std::cref(f2), std::nullopt}};
    auto const fused = temporal_union(window, classes);
    CHECK(columns_of(fused, kPole, 1) == std::set<int>{110, 150});
    CHECK(columns_of(fused, kPole, 0).empty());
  }

  TEST_CASE("brute-force forward warp agrees for projective maps") {
    // Reference: forward-map every output pixel through the inverse and
    // look up by hand, pixel by pixel, using Eigen directly.
    std::mt19937_64 rng{4};
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    for (int trial = 0; trial < 20; ++trial) {
      SegMask src = random_mask(rng, 23, 17, 8);
      SegMask last(23, 17, kRoad);
      Eigen::Matrix3d hm;
      hm << 1 + jitter(rng), jitter(rng), 3 * trial % 5 - 2.0, jitter(rng), 1 + jitter(rng), 1.0, jitter(rng) / 20,
          jitter(rng) / 20, 1.0;
      Homography const h{hm};
      std::array<ClassId, 2> const classes{ClassId::sidewalk, ClassId::pole};
      std::vector<WindowFrame> const window{{std::cref(src), h}, {std::cref(last), std::nullopt}};
      auto const fused = temporal_union(window, classes);
      Eigen::Matrix3d const inv = hm.inverse();
      for (int v = 0; v < 17; ++v) {
        for (int u = 0; u < 23; ++u) {
          Eigen::Vector3d const p = inv * Eigen::Vector3d{double(u), double(v), 1.0};
          int const su = static_cast<int>(std::floor(p.x() / p.z() + 0.5));
          int const sv = static_cast<int>(std::floor(p.y() / p.z() + 0.5));
          std::uint8_t expect = kRoad;
          if (su >= 0 && sv >= 0 && su < 23 && sv < 17) {
            auto const s = src(su, sv);
            if (s == kPole || s == to_id(ClassId::sidewalk)) expect = s;
          }
          CHECK(fused(u, v) == expect);
        }
      }
    }
  }

  TEST_CASE("window length one is the identity") {
    std::mt19937_64 rng{8};
    TemporalFuser fuser{1};
    for (int i = 0; i < 5; ++i) {
      auto const m = random_mask(rng, 12, 7, static_cast<int>(kClassCount));
      CHECK(fuser.push(m, Homography::translation(1, 0)) == m);
    }
  }

  TEST_CASE("fused classes are supersets under identity and contain only taxonomy ids") {
    std::mt19937_64 rng{12};
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<SegMask> masks;
      for (int i = 0; i < 3; ++i) masks.push_back(random_mask(rng, 10, 8, static_cast<int>(kClassCount)));
      std::vector<WindowFrame> window;
      for (auto const& m : masks) window.push_back({std::cref(m), Homography::identity()});
      window.back().to_last.reset();
      auto const fused = temporal_union(window);
      CHECK_NOTHROW(validate_mask(fused));
      for (auto const c : kDefaultFusedClasses) {
        auto const id = to_id(c);
        for (auto const& m : masks) {
          for (std::size_t i = 0; i < m.size(); ++i) {
            if (m.data()[i] == id) {
              // A later-priority fused class may claim the pixel instead.
              auto const got = fused.data()[i];
              bool const ok = got == id || (is_valid_class_id(got) && got > id &&
                                            std::find(kDefaultFusedClasses.begin(), kDefaultFusedClasses.end(),
                                                      static_cast<ClassId>(got)) != kDefaultFusedClasses.end());
              CHECK(ok);
            }
          }
        }
      }
    }
  }

  TEST_CASE("single fused class yields exact superset") {
    std::mt19937_64 rng{13};
    std::array<ClassId, 1> const classes{ClassId::pole};
    for (int trial = 0; trial < 50; ++trial) {
      auto const a = random_mask(rng, 10, 8, 8);
      auto const b = random_mask(rng, 10, 8, 8);
      std::vector<WindowFrame> const window{{std::cref(a), Homography::identity()}, {std::cref(b), std::nullopt}};
      auto const fused = temporal_union(window, classes);
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.data()[i] == kPole || b.data()[i] == kPole) CHECK(fused.data()[i] == kPole);
      }
    }
  }

  TEST_CASE("fuser composes homographies across the window") {
    TemporalFuser fuser{3, {ClassId::pole}};
    SegMask m0(40, 2, kRoad);
    m0(5, 0) = kPole;
    SegMask blank(40, 2, kRoad);
    fuser.push(m0, std::nullopt);
    fuser.push(blank, Homography::translation(3, 0));
    auto const fused = fuser.push(blank, Homography::translation(4, 0));
    CHECK(columns_of(fused, kPole, 0) == std::set<int>{12});
    // The first frame leaves the window after one more push.
    auto const later = fuser.push(blank, Homography::translation(1, 0));
    CHECK(columns_of(later, kPole, 0).empty());
  }

  TEST_CASE("window validation") {
    CHECK_THROWS_AS(temporal_union({}), ValidationError);
    SegMask a(3, 3);
    SegMask b(4, 3);
    std::vector<WindowFrame> const window{{std::cref(a), std::nullopt}, {std::cref(b), std::nullopt}};
    CHECK_THROWS_AS(temporal_union(window), ValidationError);
    CHECK_THROWS_AS(TemporalFuser{0}, ValidationError);
  }

  TEST_CASE("segmentation metrics on constructed masks") {
    std::array<ClassId, 1> const pole{ClassId::pole};
    SegMask truth(20, 10, kRoad);
    SegMask pred(20, 10, kRoad);
    for (int u = 0; u < 10; ++u) {
      for (int v = 0; v < 10; ++v) truth(u, v) = kPole;
    }
    auto perfect = seg_metrics(truth, truth, pole);
    CHECK(perfect[0].iou.value() == 1.0);
    CHECK(perfect[0].precision.value() == 1.0);
    CHECK(perfect[0].recall.value() == 1.0);

    for (int u = 5; u < 15; ++u) {
      for (int v = 0; v < 10; ++v) pred(u, v) = kPole;
    }
    auto const half = seg_metrics(pred, truth, pole)[0];
    CHECK(half.tp == 50);
    CHECK(half.fp == 50);
    CHECK(half.fn == 50);
    CHECK(half.iou.value() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(half.precision.value() == 0.5);
    CHECK(half.recall.value() == 0.5);

    SegMask empty(20, 10, kRoad);
    auto const missed = seg_metrics(empty, truth, pole)[0];
    CHECK(missed.iou.value() == 0.0);
    CHECK(missed.recall.value() == 0.0);
    CHECK_FALSE(missed.precision);

    std::array<ClassId, 1> const bus{ClassId::bus};
    auto const absent = seg_metrics(empty, truth, bus)[0];
    CHECK_FALSE(absent.iou);
  }

  TEST_CASE("iou never exceeds precision or recall") {
    std::mt19937_64 rng{21};
    auto const classes = all_classes();
    for (int trial = 0; trial < 200; ++trial) {
      auto const a = random_mask(rng, 16, 12, 6);
      auto const b = random_mask(rng, 16, 12, 6);
      for (auto const& m : seg_metrics(a, b, classes)) {
        if (m.iou && m.precision) CHECK(*m.iou <= *m.precision);
        if (m.iou && m.recall) CHECK(*m.iou <= *m.recall);
      }
    }
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oasis/errors.hpp"
#include "oasis/geo.hpp"
#include "oracles.hpp"

using namespace oasis;

TEST_SUITE("geo") {
  TEST_CASE("haversine distance of identical points is zero") {
    CHECK(haversine_distance({47.6, -122.3}, {47.6, -122.3}) == 0.0);
  }

  TEST_CASE("one degree of longitude on the equator") {
    // R * pi / 180 for the mean radius.
    double const arc = kEarthRadiusM * oracle::kDeg;
    CHECK(std::abs(arc - 111195.08) < 0.01);
    CHECK(oracle::sphere_distance({0, 0}, {0, 1}) == doctest::Approx(arc).epsilon(1e-12));
    CHECK(std::abs(haversine_distance({0, 0}, {0, 1}) - arc) < 0.01);
    CHECK(haversine_distance({0, 0}, {0, 1}) == doctest::Approx(arc).epsilon(1e-12));
  }

  TEST_CASE("haversine distance is symmetric and agrees with the vector oracle") {
    std::mt19937_64 rng{7};
    std::uniform_real_distribution<double> lat(-90, 90);
    std::uniform_real_distribution<double> lon(-180, 180);
    for (int i = 0; i < 1000; ++i) {
      GeoPoint const a{lat(rng), lon(rng)};
      GeoPoint const b{lat(rng), lon(rng)};
      CHECK(haversine_distance(a, b) == haversine_distance(b, a));
      CHECK(haversine_distance(a, b) == doctest::Approx(oracle::sphere_distance(a, b)).epsilon(1e-9));
    }
  }

  TEST_CASE("destination point") {
    CHECK(destination_point({12.5, 40.0}, 33.0, 0.0) == GeoPoint{12.5, 40.0});
    auto const p = destination_point({0, 0}, 0.0, kEarthRadiusM * oracle::kDeg);
    CHECK(std::abs(p.lat_deg - 1.0) < 1e-6);
    CHECK(std::abs(p.lon_deg) < 1e-6);

    std::mt19937_64 rng{11};
    std::uniform_real_distribution<double> lat(-80, 80);
    std::uniform_real_distribution<double> lon(-180, 180);
    std::uniform_real_distribution<double> brg(0, 360);
    std::uniform_real_distribution<double> dist(1.0, 10000.0);
    for (int i = 0; i < 1000; ++i) {
      GeoPoint const o{lat(rng), lon(rng)};
      double const b = brg(rng);
      double const d = dist(rng);
      auto const got = destination_point(o, b, d);
      auto const want = oracle::sphere_destination(o, b, d);
      CHECK(oracle::sphere_distance(got, want) < 1e-6);
    }
  }

  TEST_CASE("initial bearing is recovered for short distances") {
    std::mt19937_64 rng{3};
    std::uniform_real_distribution<double> lat(-80, 80);
    std::uniform_real_distribution<double> lon(-180, 180);
    std::uniform_real_distribution<double> brg(0, 360);
    std::uniform_real_distribution<double> dist(10.0, 10000.0);
    for (int i = 0; i < 1000; ++i) {
      GeoPoint const o{lat(rng), lon(rng)};
      double const b = brg(rng);
      auto const p = destination_point(o, b, dist(rng));
      double diff = std::abs(initial_bearing(o, p) - b);
      diff = std::min(diff, 360.0 - diff);
      CHECK(diff < 1e-6);
    }
  }

  TEST_CASE("local tangent offsets invert exactly") {
    GeoPoint const origin{47.6097, -122.3331};
    for (LocalOffset off : {LocalOffset{0, 0}, LocalOffset{3, 4}, LocalOffset{-250, 80}, LocalOffset{0, -500}}) {
      auto const back = to_local(origin, from_local(origin, off));
      CHECK(back.east_m == doctest::Approx(off.east_m).epsilon(1e-9).scale(1.0));
      CHECK(back.north_m == doctest::Approx(off.north_m).epsilon(1e-9).scale(1.0));
    }
  }

  TEST_CASE("normalization") {
    CHECK(normalize_heading(-90) == 270);
    CHECK(normalize_heading(720) == 0);
    CHECK(normalize_heading(359.5) == 359.5);
    CHECK(normalize_lon(190) == -170);
    CHECK(normalize_lon(180) == -180);
    CHECK(is_valid({90, 0}));
    CHECK_FALSE(is_valid({95, 0}));
    CHECK_FALSE(is_valid({0, std::nan("")}));
  }

  TEST_CASE("pixel bearing") {
    auto const cam = CameraModel::survey_default();
    CHECK(cam.fx_px == doctest::Approx(640.0).epsilon(1e-12));
    CHECK(pixel_bearing(640, cam) == 0.0);
    CHECK(pixel_bearing(0, cam) == doctest::Approx(-45.0).epsilon(1e-12));
    CHECK(pixel_bearing(320, cam) == doctest::Approx(std::atan2(-320.0, 640.0) / oracle::kDeg).epsilon(1e-12));
    CHECK(pixel_bearing(320, cam) == doctest::Approx(-26.565).epsilon(1e-4));
    CHECK(pixel_bearing(1280, cam) == doctest::Approx(45.0).epsilon(1e-12));
    double prev = -90;
    for (int u = 0; u <= 1280; ++u) {
      double const b = pixel_bearing(u, cam);
      CHECK(b > prev);
      prev = b;
    }
  }

  TEST_CASE("mean depth") {
    DepthMap depth(3, 1);
    depth(0, 0) = 2.0f;
    depth(1, 0) = 4.0f;
    depth(2, 0) = 6.0f;
    std::vector<std::size_t> idx{0, 1, 2};
    CHECK(mean_depth(idx, depth) == doctest::Approx(4.0));
    std::vector<std::size_t> rev{2, 0, 1};
    CHECK(mean_depth(rev, depth) == mean_depth(idx, depth));

    depth(1, 0) = std::numeric_limits<float>::quiet_NaN();
    CHECK(mean_depth(idx, depth) == doctest::Approx(4.0));

    DepthMap uniform(8, 8, 4.0f);
    std::vector<std::size_t> region{3, 9, 17, 60};
    CHECK(mean_depth(region, uniform) == 4.0);

    DepthMap invalid(2, 1, std::numeric_limits<float>::quiet_NaN());
    std::vector<std::size_t> both{0, 1};
    CHECK_THROWS_AS(mean_depth(both, invalid), InsufficientDepthError);
    CHECK_THROWS_AS(mean_depth({}, uniform), InsufficientDepthError);
  }

  TEST_CASE("locate object ahead, east and at the image edge") {
    auto const cam = CameraModel::survey_default();
    auto const ahead = locate_object({{0, 0}, 0.0, 0.0}, cam.cx_px, 10.0, cam);
    auto const north = oracle::sphere_destination({0, 0}, 0.0, 10.0);
    CHECK(ahead.lat_deg == doctest::Approx(0.00008993).epsilon(1e-3));
    CHECK(std::abs(ahead.lat_deg - north.lat_deg) < 1e-9);
    CHECK(std::abs(ahead.lon_deg) < 1e-12);

    auto const east = locate_object({{0, 0}, 90.0, 0.0}, cam.cx_px, 10.0, cam);
    CHECK(std::abs(east.lat_deg) < 1e-9);
    CHECK(std::abs(east.lon_deg - 0.00008993) < 1e-7);

    auto const edge = locate_object({{0, 0}, 0.0, 0.0}, 0.0, 10.0, cam);
    CHECK(haversine_distance({0, 0}, edge) == doctest::Approx(10.0 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(initial_bearing({0, 0}, edge) == doctest::Approx(315.0).epsilon(1e-9));
    CHECK(slant_range(10.0, -45.0) == doctest::Approx(14.142).epsilon(1e-4));
  }

  TEST_CASE("locate object distance equals the slant range") {
    auto const cam = CameraModel::survey_default();
    std::mt19937_64 rng{5};
    std::uniform_real_distribution<double> u(0, 1279);
    std::uniform_real_distribution<double> z(0.5, 60);
    std::uniform_real_distribution<double> hd(0, 360);
    for (int i = 0; i < 500; ++i) {
      Pose const pose{{47.6, -122.3}, hd(rng), 0.0};
      double const col = u(rng);
      double const depth = z(rng);
      auto const p = locate_object(pose, col, depth, cam);
      double const range = slant_range(depth, pixel_bearing(col, cam));
      CHECK(haversine_distance(pose.position, p) == doctest::Approx(range).epsilon(1e-9));
    }
  }

  TEST_CASE("degenerate geometry is rejected") {
    CHECK_THROWS_AS(slant_range(10.0, 89.5), GeometryError);
    auto const cam = CameraModel::survey_default();
    CHECK_THROWS_AS(locate_object({{0, 0}, 0.0, 0.0}, 640, 0.0, cam), ValidationError);
  }
}

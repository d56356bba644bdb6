#include <doctest.h>

#include <random>

#include "cswarn/convection.hpp"
#include "oracles.hpp"

using namespace cswarn;

namespace {

const Timestamp t0 = parse_time("2020-10-05T22:00:00Z");

GeoGrid mask_of(const Geometry& g, std::vector<double> v) { return GeoGrid(Variable::FLOOD_MASK, t0, g, std::move(v)); }

}  // namespace

TEST_CASE("convective_mask threshold is inclusive") {
  const Geometry g{0, 0, 1, 1, 1, 4};
  const auto mask = convective_mask(GeoGrid(Variable::BT, t0, g, {210, 225, 220, 220.1}));
  CHECK(mask[0] == 1.0);
  CHECK(mask[1] == 0.0);
  CHECK(mask[2] == 1.0);
  CHECK(mask[3] == 0.0);
  CHECK(mask.variable() == Variable::FLOOD_MASK);
}

TEST_CASE("convective_mask keeps nodata") {
  const auto bt = GeoGrid::filled(Variable::BT, t0, Geometry{0, 0, 1, 1, 3, 3}, kNodata);
  const auto mask = convective_mask(bt);
  for (std::size_t i = 0; i < 9; ++i) CHECK(mask[i] == kNodata);
}

TEST_CASE("convective_mask is monotone in t_deep") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(190, 260);
  const Geometry g{0, 0, 1, 1, 16, 16};
  std::vector<double> v(g.size());
  for (auto& x : v) x = u(rng);
  const GeoGrid bt(Variable::BT, t0, g, v);
  for (double t1 = 195; t1 < 255; t1 += 5) {
    const auto lo = convective_mask(bt, t1);
    const auto hi = convective_mask(bt, t1 + 5);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(lo[i] <= hi[i]);
  }
}

TEST_CASE("label_components basic shapes") {
  SUBCASE("two disjoint 3x3 blobs") {
    const Geometry g{0, 0, 1, 1, 3, 7};
    std::vector<double> v(21, 0.0);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c : {0, 1, 2, 4, 5, 6}) v[r * 7 + c] = 1.0;
    }
    const auto objs = label_components(mask_of(g, v), 1);
    REQUIRE(objs.size() == 2);
    CHECK(objs[0].pixel_count == 9);
    CHECK(objs[1].pixel_count == 9);
    CHECK(objs[0].id == 1);
    CHECK(objs[1].id == 2);
  }
  SUBCASE("isolated pixel filtered") {
    const Geometry g{0, 0, 1, 1, 3, 3};
    std::vector<double> v(9, 0.0);
    v[4] = 1.0;
    CHECK(label_components(mask_of(g, v), 4).empty());
    CHECK(label_components(mask_of(g, v), 1).size() == 1);
  }
  SUBCASE("diagonal touch joins") {
    const Geometry g{0, 0, 1, 1, 2, 2};
    const auto objs = label_components(mask_of(g, {1, 0, 0, 1}), 1);
    REQUIRE(objs.size() == 1);
    CHECK(objs[0].cells == std::vector<std::size_t>{0, 3});
  }
}

TEST_CASE("label_components centroid, area and bbox") {
  const Geometry g{16.0, 108.0, 0.05, 0.05, 4, 4};
  std::vector<double> v(16, 0.0);
  v[5] = v[6] = v[9] = v[10] = 1.0;  // rows 1-2, cols 1-2
  const auto objs = label_components(mask_of(g, v), 4);
  REQUIRE(objs.size() == 1);
  const auto& o = objs[0];
  CHECK(o.centroid_lat == doctest::Approx(16.075).epsilon(1e-12));
  CHECK(o.centroid_lon == doctest::Approx(108.075).epsilon(1e-12));
  CHECK(o.bbox.lat_min == doctest::Approx(16.025));
  CHECK(o.bbox.lat_max == doctest::Approx(16.125));
  CHECK(o.bbox.lon_min == doctest::Approx(108.025));
  CHECK(o.bbox.lon_max == doctest::Approx(108.125));
  double expected = 0.0;
  for (double lat : {16.05, 16.05, 16.1, 16.1}) {
    expected += 0.05 * kKmPerDegree * 0.05 * kKmPerDegree * std::cos(lat * 3.14159265358979323846 / 180.0);
  }
  CHECK(o.area_km2 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("label_components equals union-find oracle on random masks") {
  std::mt19937_64 rng(17);
  const Geometry g{0, 0, 1, 1, 24, 20};
  for (int k = 0; k < 60; ++k) {
    const double p = 0.2 + 0.05 * (k % 8);
    const auto mask = mask_of(g, oracle::random_mask(rng, g.size(), p, 0.05));
    const std::size_t min_area = static_cast<std::size_t>(k % 5) + 1;
    const auto got = label_components(mask, min_area);
    const auto want = oracle::label(mask, min_area);
    REQUIRE(got.size() == want.size());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < g.size(); ++i) ones += mask[i] == 1.0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].id == static_cast<int>(i) + 1);
      CHECK(got[i].cells == want[i].cells);
      CHECK(got[i].pixel_count == want[i].cells.size());
      total += got[i].pixel_count;
    }
    CHECK(total <= ones);
    // Partition before filtering.
    std::size_t all = 0;
    for (const auto& comp : label_components(mask, 1)) all += comp.pixel_count;
    CHECK(all == ones);
  }
}

TEST_CASE("summarize") {
  const Geometry g{0, 0, 1, 1, 3, 3};
  SUBCASE("uniform blob") {
    auto objs = detect_objects(GeoGrid::filled(Variable::BT, t0, g, 205.0), 220.0, 1);
    REQUIRE(objs.size() == 1);
    CHECK(*objs[0].min_bt == 205.0);
    CHECK(*objs[0].mean_bt == doctest::Approx(205.0));
  }
  SUBCASE("one cold cell") {
    std::vector<double> v(9, 210.0);
    v[4] = 200.0;
    auto objs = detect_objects(GeoGrid(Variable::BT, t0, g, v), 220.0, 1);
    REQUIRE(objs.size() == 1);
    CHECK(*objs[0].min_bt == 200.0);
  }
  SUBCASE("geometry mismatch throws") {
    auto objs = detect_objects(GeoGrid::filled(Variable::BT, t0, g, 205.0), 220.0, 1);
    CHECK_THROWS_AS(summarize(GeoGrid::filled(Variable::BT, t0, Geometry{0, 0, 1, 1, 2, 2}, 205.0), g, objs),
                    GridError);
  }
  SUBCASE("random blobs equal per-pixel oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(195, 250);
    const Geometry big{0, 0, 1, 1, 20, 20};
    for (int k = 0; k < 30; ++k) {
      std::vector<double> v(big.size());
      for (auto& x : v) x = u(rng);
      const GeoGrid bt(Variable::BT, t0, big, v);
      const auto got = detect_objects(bt, 220.0, 2);
      auto want = oracle::label(convective_mask(bt, 220.0), 2);
      oracle::fill_stats(bt, want);
      REQUIRE(got.size() == want.size());
      std::optional<double> global_min;
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(*got[i].min_bt == *want[i].min_bt);
        CHECK(*got[i].mean_bt == doctest::Approx(*want[i].mean_bt).epsilon(1e-12));
        CHECK(got[i].centroid_lat == doctest::Approx(want[i].centroid_lat).epsilon(1e-12));
        CHECK(got[i].centroid_lon == doctest::Approx(want[i].centroid_lon).epsilon(1e-12));
        for (std::size_t idx : want[i].cells) global_min = std::min(global_min.value_or(v[idx]), v[idx]);
        CHECK(got[i].time == t0);
      }
      if (!got.empty()) {
        double got_min = *got[0].min_bt;
        for (const auto& o : got) got_min = std::min(got_min, *o.min_bt);
        CHECK(got_min == *global_min);
      }
    }
  }
}

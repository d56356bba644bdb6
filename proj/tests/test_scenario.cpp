#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cswarn/floodmap.hpp"
#include "cswarn/scenario.hpp"
#include "cswarn/tracking.hpp"

using namespace cswarn;

namespace {

ScenarioSpec small_spec() {
  ScenarioSpec s;
  s.start = parse_time("2020-10-05T22:00:00Z");
  s.grid = Geometry{14.0, 107.0, 0.02, 0.02, 100, 100};  // 14-16 N, 107-109 E
  s.duration_s = 3600;
  s.regions = {{"W", 14.8, 15.2, 107.2, 107.6}, {"E", 14.8, 15.2, 108.6, 108.9}};
  return s;
}

SyntheticCell cell_at(double lat, double lon, double speed, double bearing) {
  SyntheticCell c;
  c.lat = lat;
  c.lon = lon;
  c.speed_mps = speed;
  c.bearing_deg = bearing;
  c.min_bt_k = 200.0;
  c.radius_km = 20.0;
  return c;
}

}  // namespace

TEST_CASE("zero-cell scenario is quiet") {
  auto spec = small_spec();
  spec.wind_sources = {{"lr", WindSourceKind::SPEED, 0, 1800}, {"sar", WindSourceKind::NRCS, 600, 3600}};
  const auto out = generate(spec, 1);
  CHECK(out.bt.size() == 6);
  CHECK(out.rain.size() == 2);
  for (const auto& f : out.bt) {
    for (double v : f.values()) CHECK(v == 280.0);
  }
  for (const auto& f : out.rain) {
    for (double v : f.values()) CHECK(v == 0.0);
  }
  REQUIRE(out.wind.size() == 1);
  CHECK(out.wind[0].stack.size() == 2);
  for (double v : out.wind[0].stack[0].values()) CHECK(v == 0.0);
  REQUIRE(out.nrcs.size() == 1);
  CHECK(out.nrcs[0].stack.size() == 1);
  CHECK(out.truth.samples.empty());
  CHECK(out.truth.intersections.empty());
}

TEST_CASE("stationary cell gives identical frames with a convective core") {
  auto spec = small_spec();
  spec.cells = {cell_at(15.0, 108.0, 0.0, 0.0)};
  const auto out = generate(spec, 1);
  for (const auto& f : out.bt) CHECK(f.values().size() == out.bt[0].values().size());
  for (std::size_t k = 1; k < out.bt.size(); ++k) {
    CHECK(std::equal(out.bt[k].values().begin(), out.bt[k].values().end(), out.bt[0].values().begin()));
  }
  CHECK_FALSE(detect_objects(out.bt[0]).empty());
}

TEST_CASE("moving cell: tracking estimate matches truth within 5 percent and 5 degrees") {
  auto spec = small_spec();
  spec.cells = {cell_at(15.0, 108.5, 10.0, 270.0)};
  const auto out = generate(spec, 1);
  Tracker tracker;
  for (const auto& f : out.bt) tracker.update(f.time(), detect_objects(f));
  REQUIRE(tracker.active().size() == 1);
  const auto& track = tracker.active()[0];
  REQUIRE(track.observations.size() == out.bt.size());
  const auto m = motion_vector(track);
  const auto& truth = out.truth.samples.back();
  CHECK(std::abs(m.speed_mps - truth.speed_mps) / truth.speed_mps <= 0.05);
  REQUIRE(m.bearing_deg);
  CHECK(std::abs(std::remainder(*m.bearing_deg - truth.bearing_deg, 360.0)) <= 5.0);
  // Detected centroid sits on the truth centre.
  CHECK(std::abs(track.last().centroid_lat - truth.lat) < 0.02);
  CHECK(std::abs(track.last().centroid_lon - truth.lon) < 0.02);
}

TEST_CASE("truth intersections equal a brute-force per-frame check") {
  auto spec = small_spec();
  spec.duration_s = 4 * 3600;
  spec.cells = {cell_at(15.0, 108.4, 12.0, 270.0), cell_at(15.0, 107.4, 6.0, 90.0)};
  const auto out = generate(spec, 3);
  for (std::size_t k = 0; k < spec.cells.size(); ++k) {
    for (const auto& region : spec.regions) {
      std::optional<Timestamp> first;
      for (std::int64_t s = 0; s < spec.duration_s && !first; s += spec.bt_cadence_s) {
        const auto t = spec.start + Seconds{s};
        const auto sample = cell_truth(spec, k, t);
        if (!sample || !sample->bbox) continue;
        const auto& b = *sample->bbox;
        if (b.lat_min <= region.lat_max && region.lat_min <= b.lat_max && b.lon_min <= region.lon_max &&
            region.lon_min <= b.lon_max) {
          first = t;
        }
      }
      CHECK(out.truth.first_intersection(static_cast<int>(k) + 1, region.name) == first);
    }
  }
  CHECK(out.truth.first_intersection(1, "W"));
}

TEST_CASE("truth bbox encloses the generated deep-cloud cells") {
  auto spec = small_spec();
  spec.cells = {cell_at(15.0, 108.0, 8.0, 300.0)};
  spec.cells[0].elongation = 3.0;
  const auto out = generate(spec, 1);
  for (const auto& f : out.bt) {
    const auto truth = cell_truth(spec, 0, f.time());
    REQUIRE(truth);
    REQUIRE(truth->bbox);
    const auto& b = *truth->bbox;
    const auto& g = f.geometry();
    double lat_lo = 99, lat_hi = -99, lon_lo = 999, lon_hi = -999;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (f[i] > spec.truth_t_deep) continue;
      const double lat = g.lat_of_row(i / g.ncols), lon = g.lon_of_col(i % g.ncols);
      CHECK(b.contains(lat, lon));
      lat_lo = std::min(lat_lo, lat);
      lat_hi = std::max(lat_hi, lat);
      lon_lo = std::min(lon_lo, lon);
      lon_hi = std::max(lon_hi, lon);
    }
    // Tight to within one cell on each side.
    CHECK(lat_lo - b.lat_min <= g.dlat);
    CHECK(b.lat_max - lat_hi <= g.dlat);
    CHECK(lon_lo - b.lon_min <= g.dlon);
    CHECK(b.lon_max - lon_hi <= g.dlon);
  }
}

TEST_CASE("NRCS stack is the synth1 forward model of the wind field") {
  auto spec = small_spec();
  spec.cells = {cell_at(15.0, 108.0, 8.0, 270.0)};
  spec.cells[0].wind_peak_mps = 22.0;
  spec.wind_sources = {{"sar", WindSourceKind::NRCS, 1200, 3600}};
  const auto out = generate(spec, 1);
  REQUIRE(out.nrcs.size() == 1);
  const auto& nrcs = out.nrcs[0].stack[0];
  const auto wind = scenario_wind(spec, nrcs.time());
  for (std::size_t i = 0; i < wind.geometry().size(); ++i) {
    CHECK(nrcs[i] == doctest::Approx(0.001 * std::pow(1.0 + wind[i], 1.5)).epsilon(1e-14));
  }
}

TEST_CASE("rain peaks after the wind onset") {
  auto spec = small_spec();
  spec.cells = {cell_at(15.0, 108.0, 0.0, 0.0)};
  spec.duration_s = 3 * 3600;
  double early = 0, late = 0;
  const auto g0 = scenario_rain(spec, spec.start);
  const auto g1 = scenario_rain(spec, spec.start + Seconds{spec.rain_lag_s});
  for (double v : g0.values()) early = std::max(early, v);
  for (double v : g1.values()) late = std::max(late, v);
  CHECK(early < late);
  CHECK(late == doctest::Approx(spec.cells[0].rain_peak_mmh).epsilon(0.02));
  double wind0 = 0;
  const auto w0 = scenario_wind(spec, spec.start);
  for (double v : w0.values()) wind0 = std::max(wind0, v);
  CHECK(wind0 > 0.9 * spec.cells[0].wind_peak_mps);
}

TEST_CASE("determinism and seeded noise") {
  auto spec = small_spec();
  spec.cells = {cell_at(15.0, 108.0, 8.0, 270.0)};
  spec.bt_noise_k = 1.0;
  spec.rain_noise_mmh = 0.2;
  const auto a = generate(spec, 5), b = generate(spec, 5), c = generate(spec, 6);
  CHECK(to_gsf_string(a.bt) == to_gsf_string(b.bt));
  CHECK(to_gsf_string(a.rain) == to_gsf_string(b.rain));
  CHECK(truth_csv(a.truth) == truth_csv(b.truth));
  CHECK(to_gsf_string(a.bt) != to_gsf_string(c.bt));
}

TEST_CASE("cells leaving the grid leave a notice") {
  auto spec = small_spec();
  spec.duration_s = 3 * 3600;
  spec.cells = {cell_at(15.0, 108.6, 20.0, 90.0)};
  const auto out = generate(spec, 1);
  REQUIRE(out.truth.notices.size() == 1);
  CHECK(out.truth.notices[0].cell == 1);
}

TEST_CASE("spec validation") {
  auto spec = small_spec();
  SUBCASE("zero duration") {
    spec.duration_s = 0;
    CHECK_THROWS_AS(spec.validate(), ScenarioError);
  }
  SUBCASE("too fast") {
    spec.cells = {cell_at(15, 108, 61, 0)};
    CHECK_THROWS_AS(spec.validate(), ScenarioError);
  }
  SUBCASE("too cold") {
    spec.cells = {cell_at(15, 108, 1, 0)};
    spec.cells[0].min_bt_k = 170;
    CHECK_THROWS_AS(spec.validate(), ScenarioError);
  }
  SUBCASE("negative peak") {
    spec.cells = {cell_at(15, 108, 1, 0)};
    spec.cells[0].rain_peak_mmh = -1;
    CHECK_THROWS_AS(spec.validate(), ScenarioError);
  }
  SUBCASE("flooded region must exist") {
    spec.flooded = {"NOPE"};
    CHECK_THROWS_AS(spec.validate(), ScenarioError);
  }
}

TEST_CASE("spec file round trip") {
  const auto spec = paper_replay_spec();
  std::ostringstream out;
  write_scenario_spec(spec, out);
  std::istringstream in(out.str());
  const auto back = read_scenario_spec(in);
  std::ostringstream again;
  write_scenario_spec(back, again);
  CHECK(again.str() == out.str());
  CHECK(back.cells.size() == 1);
  CHECK(back.regions == spec.regions);
  std::istringstream bad("[scenario]\nspeed_of_light = 3\n");
  CHECK_THROWS_AS(read_scenario_spec(bad), ScenarioError);
}

TEST_CASE("coastal squall-line replay scenario") {
  const auto spec = paper_replay_spec();
  CHECK(spec.grid.nrows * spec.grid.dlat == doctest::Approx(6.0));
  CHECK(spec.grid.ncols * spec.grid.dlon == doctest::Approx(7.0));
  CHECK(spec.duration_s == 86400);
  REQUIRE(spec.cells.size() == 1);
  CHECK(spec.cells[0].speed_mps == 8.0);
  CHECK(spec.cells[0].bearing_deg == 270.0);
  CHECK(spec.flooded == std::vector<std::string>{"TT", "DN", "QN1", "QN2"});
  // Born 150 km east of DN's eastern edge.
  const auto dn = std::find_if(spec.regions.begin(), spec.regions.end(), [](const RegionBox& r) { return r.name == "DN"; });
  const double km_east = (spec.cells[0].lon - dn->lon_max) * kKmPerDegree * std::cos(spec.cells[0].lat * 3.14159265358979323846 / 180.0);
  CHECK(km_east == doctest::Approx(150.0).epsilon(1e-9));

  const auto out = generate(spec, 1);
  double bt_min = 1e9, wind_max = 0;
  for (const auto& f : out.bt) {
    for (double v : f.values()) bt_min = std::min(bt_min, v);
  }
  for (const auto& src : out.wind) {
    for (const auto& f : src.stack) {
      for (double v : f.values()) wind_max = std::max(wind_max, v);
    }
  }
  // The cell centre falls between grid centres, so the sampled minimum sits just above 200 K.
  CHECK(bt_min >= 200.0);
  CHECK(bt_min <= 200.5);
  CHECK(categorize(wind_max) == WindCategory::SEVERE);
  const auto hit = out.truth.first_intersection(1, "DN");
  REQUIRE(hit);
  CHECK(*hit - spec.start > Seconds{7200});
  // The storm never reaches the northern provinces.
  for (const char* name : {"NA", "HT", "QB"}) CHECK_FALSE(out.truth.first_intersection(1, name));
}

TEST_CASE("SAR pair floods exactly the flooded regions") {
  const auto spec = paper_replay_spec();
  const auto pair = generate_sar_pair(spec, 1);
  CHECK(pair.reference.time() < pair.flood.time());
  const auto mask = flood_mask(log_ratio_db(pair.flood, pair.reference));
  for (const auto& region : spec.regions) {
    std::size_t flooded = 0, n = 0;
    for (std::size_t idx : cells_in_box(spec.grid, region)) {
      ++n;
      flooded += mask.mask[idx] == 1.0;
    }
    const bool expect = std::find(spec.flooded.begin(), spec.flooded.end(), region.name) != spec.flooded.end();
    CHECK_MESSAGE((static_cast<double>(flooded) >= 0.01 * static_cast<double>(n)) == expect, region.name);
  }
}

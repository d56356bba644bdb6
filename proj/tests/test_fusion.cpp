#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cswarn/fusion.hpp"

using namespace cswarn;

namespace {

const Timestamp t0 = parse_time("2020-10-05T22:00:00Z");
const Geometry kGeo{15.0, 107.0, 0.1, 0.1, 20, 20};  // 15.0-16.9 N, 107.0-108.9 E
const RegionBox kBox{"DN", 15.5, 16.0, 107.5, 108.0};

RegionIndicators quiet() {
  RegionIndicators i;
  i.region = "DN";
  i.epoch = t0;
  return i;
}

RegionIndicators observed() {
  auto i = quiet();
  i.bt_observed = true;
  i.rain_observed = true;
  i.wind_no_observation = false;
  return i;
}

CSObject blob(double lat, double lon, Timestamp t) {
  CSObject o;
  o.id = 1;
  o.time = t;
  o.centroid_lat = lat;
  o.centroid_lon = lon;
  o.pixel_count = 4;
  o.bbox = RegionBox{"", lat - 0.05, lat + 0.05, lon - 0.05, lon + 0.05};
  return o;
}

GridStack bt_stack(std::size_t frames, double value) {
  GridStack s;
  for (std::size_t k = 0; k < frames; ++k) {
    s.push_back(GeoGrid::filled(Variable::BT, t0 + Seconds{600 * static_cast<long>(k)}, kGeo, value));
  }
  return s;
}

}  // namespace

TEST_CASE("warning level names round trip") {
  for (auto l : {WarningLevel::NONE, WarningLevel::WATCH, WarningLevel::WARNING, WarningLevel::SEVERE}) {
    CHECK(parse_warning_level(to_string(l)) == l);
  }
  CHECK_THROWS_AS(parse_warning_level("ALERT"), FusionError);
}

TEST_CASE("decide examples") {
  const auto rules = RuleSet::standard();
  SUBCASE("all quiet") {
    const auto r = decide(quiet(), rules);
    CHECK(r.level == WarningLevel::NONE);
    CHECK(r.triggered_rules.empty());
    CHECK_FALSE(r.lead_time_s);
  }
  SUBCASE("collocated deep cloud, heavy persistent rain, severe wind") {
    auto i = observed();
    i.deep_cloud_fraction = 1.0;
    i.max_rain_mmh = 10.0;
    i.rain_persistence_h = 4.0;
    i.wind_cat = WindCategory::SEVERE;
    const auto r = decide(i, rules);
    CHECK(r.level == WarningLevel::SEVERE);
    CHECK(r.triggered_rules == std::vector<std::string>{"R1", "R2", "R3"});
  }
  SUBCASE("severe wind approaching, no rain") {
    auto i = observed();
    i.wind_cat = WindCategory::SEVERE;
    i.approach_s = 10000;
    const auto r = decide(i, rules);
    CHECK(r.level == WarningLevel::WARNING);
    CHECK(r.lead_time_s == 10000);
  }
  SUBCASE("lead time is clamped to one day") {
    auto i = observed();
    i.approach_s = 200000;
    CHECK(decide(i, rules).lead_time_s == kApproachHorizonS);
  }
  SUBCASE("flagged variables never satisfy a clause") {
    auto i = quiet();
    i.deep_cloud_fraction = 1.0;
    i.max_rain_mmh = 13.0;
    i.rain_persistence_h = 6.0;
    i.wind_cat = WindCategory::SEVERE;
    i.approach_s = 600;
    const auto r = decide(i, rules);
    CHECK(r.level == WarningLevel::NONE);
    CHECK(r.triggered_rules.empty());
  }
}

TEST_CASE("decide truth table over a quantized lattice") {
  // Independent restatement of the rule table.
  const auto rules = RuleSet::standard();
  for (double frac : {0.0, 0.19, 0.2, 1.0}) {
    for (int w = 0; w <= 3; ++w) {
      for (double rain : {0.0, 7.9, 8.0, 13.0}) {
        for (double pers : {0.0, 2.5, 3.0}) {
          for (bool approach : {false, true}) {
            auto i = observed();
            i.deep_cloud_fraction = frac;
            i.wind_cat = static_cast<WindCategory>(w);
            i.max_rain_mmh = rain;
            i.rain_persistence_h = pers;
            if (approach) i.approach_s = 3600;
            const bool deep = frac >= 0.2, heavy = rain >= 8.0, lasting = pers >= 3.0;
            WarningLevel want = WarningLevel::NONE;
            if (deep || w >= 2) want = WarningLevel::WATCH;
            if ((deep && heavy) || (w == 3 && approach)) want = WarningLevel::WARNING;
            if (deep && heavy && lasting && w == 3) want = WarningLevel::SEVERE;
            CHECK(decide(i, rules).level == want);
          }
        }
      }
    }
  }
}

TEST_CASE("removing a rule that did not fire changes nothing") {
  auto i = observed();
  i.deep_cloud_fraction = 0.5;
  const auto full = RuleSet::standard();
  const auto r = decide(i, full);
  REQUIRE(r.triggered_rules == std::vector<std::string>{"R1"});
  for (const char* id : {"R2", "R3"}) {
    const auto reduced = decide(i, full.without(id));
    CHECK(reduced.level == r.level);
    CHECK(reduced.triggered_rules == r.triggered_rules);
  }
  CHECK(decide(i, full.without("R1")).level == WarningLevel::NONE);
}

TEST_CASE("build_indicators") {
  const auto window_end = t0;
  SUBCASE("nothing observed") {
    const auto i = build_indicators(window_end, kBox, nullptr, {}, {}, RainEvidence{});
    CHECK(i.deep_cloud_fraction == 0.0);
    CHECK(i.wind_cat == WindCategory::NONE);
    CHECK(i.wind_no_observation);
    CHECK_FALSE(i.rain_observed);
    CHECK_FALSE(i.bt_observed);
    CHECK_FALSE(i.approach_s);
    CHECK(decide(i, RuleSet::standard()).level == WarningLevel::NONE);
  }
  SUBCASE("region covered by 205 K cloud") {
    const auto bt = GeoGrid::filled(Variable::BT, t0, kGeo, 205.0);
    const DetectionFrame det{bt, detect_objects(bt)};
    const auto i = build_indicators(window_end, kBox, &det, {}, {}, RainEvidence{});
    CHECK(i.deep_cloud_fraction == 1.0);
    CHECK(i.min_bt_k == 205.0);
    CHECK(i.bt_observed);
  }
  SUBCASE("closest of two approaching tracks wins") {
    const double cos16 = std::cos(15.75 * 3.14159265358979323846 / 180.0);
    auto west_track = [&](int id, double km_east, double speed) {
      const double lon = 108.0 + 0.05 + km_east / (kKmPerDegree * cos16);
      const double step = speed * 0.6 / (kKmPerDegree * cos16);
      return Track{id, {blob(15.75, lon + step, t0 - Seconds{600}), blob(15.75, lon, t0)}};
    };
    const std::vector<Track> tracks{west_track(1, 70.0, 10.0), west_track(2, 35.0, 10.0)};
    const auto i = build_indicators(window_end, kBox, nullptr, tracks, {}, RainEvidence{});
    REQUIRE(i.approach_s);
    CHECK(*i.approach_s == 3600);
  }
  SUBCASE("wind inside an approaching track's footprint counts for the region") {
    const double lon = 108.5;
    const Track t{1, {blob(15.75, lon + 0.05, t0 - Seconds{600}), blob(15.75, lon, t0)}};
    std::vector<double> v(kGeo.size(), 6.0);
    for (std::size_t idx : cells_in_box(kGeo, t.last().bbox)) v[idx] = 20.0;
    const auto cats = categorize_grid(GeoGrid(Variable::WIND_SPEED, t0, kGeo, v));
    const auto with = build_indicators(window_end, kBox, nullptr, {t}, {{cats}}, RainEvidence{});
    CHECK(with.wind_cat == WindCategory::SEVERE);
    CHECK(with.sources.wind == 1);
    const auto without = build_indicators(window_end, kBox, nullptr, {}, {{cats}}, RainEvidence{});
    CHECK(without.wind_cat == WindCategory::WEAK);
  }
}

TEST_CASE("FusionEngine configuration errors") {
  FusionInputs in{bt_stack(2, 280.0), {}, {}};
  SUBCASE("empty region list gives no reports") {
    FusionEngine e(in, {}, FusionSettings{});
    CHECK(e.run_epoch(t0).empty());
  }
  SUBCASE("duplicate names") {
    CHECK_THROWS_AS(FusionEngine(in, {kBox, kBox}, FusionSettings{}), FusionError);
  }
  SUBCASE("region off the grid") {
    CHECK_THROWS_AS(FusionEngine(in, {RegionBox{"X", 0, 1, 0, 1}}, FusionSettings{}), FusionError);
  }
  SUBCASE("epochs must increase") {
    FusionEngine e(in, {kBox}, FusionSettings{});
    e.run_epoch(t0);
    CHECK_THROWS_AS(e.run_epoch(t0), FusionError);
  }
}

TEST_CASE("FusionEngine on quiet data reports NONE everywhere") {
  GridStack rain;
  for (int k = 0; k < 4; ++k) rain.push_back(GeoGrid::filled(Variable::RAIN_RATE, t0 + Seconds{1800 * k}, kGeo, 0.0));
  GridStack wind;
  wind.push_back(GeoGrid::filled(Variable::WIND_SPEED, t0, kGeo, 3.0));
  FusionEngine e(FusionInputs{bt_stack(12, 280.0), {rain}, {{"lr", wind}}},
                 {kBox, RegionBox{"B", 16.0, 16.5, 108.0, 108.5}}, FusionSettings{});
  const auto reports = e.run_all();
  CHECK(reports.size() == 2 * 4);
  for (const auto& r : reports) {
    CHECK(r.level == WarningLevel::NONE);
    CHECK(r.indicators.bt_observed);
    CHECK(r.indicators.rain_observed);
    CHECK_FALSE(r.indicators.wind_no_observation);
  }
  CHECK(reports[0].region == "B");
}

TEST_CASE("FusionEngine warns a region under a cold rainy cloud") {
  GridStack rain;
  for (int k = 0; k < 4; ++k) rain.push_back(GeoGrid::filled(Variable::RAIN_RATE, t0 + Seconds{1800 * k}, kGeo, 10.0));
  FusionEngine e(FusionInputs{bt_stack(12, 205.0), {rain}, {}}, {kBox}, FusionSettings{});
  const auto reports = e.run_all();
  REQUIRE_FALSE(reports.empty());
  CHECK(reports.back().level == WarningLevel::WARNING);
  CHECK(reports.back().indicators.deep_cloud_fraction == 1.0);
}

TEST_CASE("warnings CSV round trip") {
  auto i = observed();
  i.deep_cloud_fraction = 0.25;
  i.min_bt_k = 203.5;
  i.wind_cat = WindCategory::SEVERE;
  i.max_rain_mmh = 9.5;
  i.rain_persistence_h = 1.5;
  i.approach_s = 4200;
  const auto r = decide(i, RuleSet::standard());
  const std::string csv = warnings_csv({r, decide(quiet(), RuleSet::standard())});
  std::istringstream in(csv);
  const auto back = read_warnings_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].level == r.level);
  CHECK(back[0].lead_time_s == 4200);
  CHECK(back[0].triggered_rules == r.triggered_rules);
  CHECK(back[0].indicators.min_bt_k == 203.5);
  CHECK(warnings_csv(back) == csv);
  std::istringstream bad("epoch,region\n");
  CHECK_THROWS_AS(read_warnings_csv(bad), FusionError);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cswarn/fusion.hpp"
#include "cswarn/geogrid.hpp"
#include "cswarn/wind.hpp"

namespace cswarn {

class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A translating Gaussian cloud with co-located rain and a wind-gust ring.
struct SyntheticCell {
  std::int64_t birth_s = 0;  ///< offset from scenario start
  double lat = 0.0;
  double lon = 0.0;
  double speed_mps = 0.0;
  double bearing_deg = 0.0;
  double min_bt_k = 200.0;
  double radius_km = 30.0;  ///< along-track e-folding radius
  double elongation = 1.0;  ///< cross-track radius / along-track radius
  double rain_peak_mmh = 10.0;
  double wind_peak_mps = 20.0;
};

enum class WindSourceKind { SPEED, NRCS };

/// A wind sensor sampling the scene at first_s, first_s + cadence_s, ...
struct WindSchedule {
  std::string name;
  WindSourceKind kind = WindSourceKind::SPEED;
  std::int64_t first_s = 0;
  std::int64_t cadence_s = 10800;
};

struct ScenarioSpec {
  Timestamp start{};
  Geometry grid;
  std::int64_t duration_s = 0;
  std::int64_t bt_cadence_s = 600;
  std::int64_t rain_cadence_s = 1800;
  double background_bt_k = 280.0;
  std::int64_t rain_lag_s = 1800;
  double bt_noise_k = 0.0;
  double rain_noise_mmh = 0.0;
  double wind_noise_mps = 0.0;
  /// Threshold defining the truth bbox of each cell.
  double truth_t_deep = kDefaultDeepConvectionK;
  GmfGeometry sar_geometry;
  std::vector<WindSchedule> wind_sources;
  std::vector<SyntheticCell> cells;
  std::vector<RegionBox> regions;
  std::vector<std::string> flooded;

  void validate() const;
};

struct TruthSample {
  int cell = 0;
  Timestamp time{};
  double lat = 0.0;
  double lon = 0.0;
  double speed_mps = 0.0;
  double bearing_deg = 0.0;
  /// Analytic extent of BT <= truth_t_deep; empty when the cell never gets that cold.
  std::optional<RegionBox> bbox;
};

struct TruthIntersection {
  int cell = 0;
  std::string region;
  Timestamp time{};
};

struct TruthNotice {
  int cell = 0;
  Timestamp time{};
  std::string text;
};

struct TruthRecord {
  std::vector<TruthSample> samples;  ///< per BT frame, per live cell
  std::vector<TruthIntersection> intersections;
  std::vector<std::string> flooded;
  std::vector<TruthNotice> notices;

  std::optional<Timestamp> first_intersection(int cell, std::string_view region) const;
};

struct NamedStack {
  std::string name;
  GridStack stack;
};

struct ScenarioOutput {
  GridStack bt;
  GridStack rain;
  std::vector<NamedStack> wind;  ///< WIND_SPEED sources
  std::vector<NamedStack> nrcs;  ///< SAR sources, SYNTH1 forward of the wind field
  TruthRecord truth;
};

ScenarioOutput generate(const ScenarioSpec& spec, std::uint64_t seed);

/// Noise-free fields at an absolute time (the generator samples these).
GeoGrid scenario_bt(const ScenarioSpec& spec, Timestamp t);
GeoGrid scenario_rain(const ScenarioSpec& spec, Timestamp t);
GeoGrid scenario_wind(const ScenarioSpec& spec, Timestamp t);

/// Truth centre and deep-cloud bbox of `cell` at `t`; empty before birth.
std::optional<TruthSample> cell_truth(const ScenarioSpec& spec, std::size_t cell, Timestamp t);

/// Reference and post-event NRCS images over land: the central half of every
/// flooded region is darkened by 10 dB; 0.5 dB seeded noise on both.
struct SarPair {
  GeoGrid reference;
  GeoGrid flood;
};
SarPair generate_sar_pair(const ScenarioSpec& spec, std::uint64_t seed);

/// Westward squall line onto the central Vietnam coast (TT, DN, QN1, QN2).
ScenarioSpec paper_replay_spec();

ScenarioSpec read_scenario_spec(std::istream& in, std::string_view source_name = "<stream>");
ScenarioSpec read_scenario_spec(const std::filesystem::path& path);
void write_scenario_spec(const ScenarioSpec& spec, std::ostream& out);

/// Truth CSV: `kind,cell,time,...` rows of kinds track, intersect, flooded, notice.
std::string truth_csv(const TruthRecord& truth);

/// Writes bt.gsf, rain.gsf, wind_<name>.gsf, nrcs_<name>.gsf and truth.csv.
/// Returns the written paths in that order.
std::vector<std::filesystem::path> write_scenario(const ScenarioOutput& out, const std::filesystem::path& dir);

}  // namespace cswarn

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cswarn/convection.hpp"
#include "cswarn/geogrid.hpp"
#include "cswarn/precip.hpp"
#include "cswarn/tracking.hpp"
#include "cswarn/wind.hpp"

namespace cswarn {

class FusionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class WarningLevel : std::uint8_t { NONE = 0, WATCH = 1, WARNING = 2, SEVERE = 3 };
std::string_view to_string(WarningLevel level);
WarningLevel parse_warning_level(std::string_view text);

struct SourceCount {
  int bt = 0;
  int rain = 0;
  int wind = 0;
};

struct RegionIndicators {
  std::string region;
  Timestamp epoch{};
  double deep_cloud_fraction = 0.0;
  std::optional<double> min_bt_k;
  bool bt_observed = false;
  WindCategory wind_cat = WindCategory::NONE;
  bool wind_no_observation = true;
  double max_rain_mmh = 0.0;
  double rain_persistence_h = 0.0;
  bool rain_observed = false;
  std::optional<std::int64_t> approach_s;
  SourceCount sources;
};

struct FusionThresholds {
  double deep_fraction = 0.2;
  double r_heavy_mmh = kDefaultHeavyRainMmh;
  double persistence_h = 3.0;
};

struct Rule {
  std::string id;
  WarningLevel level = WarningLevel::NONE;
  std::function<bool(const RegionIndicators&)> satisfied;
};

struct RuleSet {
  std::vector<Rule> rules;

  /// R1 WATCH, R2 WARNING, R3 SEVERE. Flagged (unobserved) variables never
  /// satisfy a clause.
  static RuleSet standard(const FusionThresholds& thresholds = {});
  RuleSet without(std::string_view id) const;
};

struct WarningReport {
  std::string region;
  Timestamp epoch{};
  WarningLevel level = WarningLevel::NONE;
  std::optional<std::int64_t> lead_time_s;
  std::vector<std::string> triggered_rules;
  RegionIndicators indicators;
};

WarningReport decide(const RegionIndicators& indicators, const RuleSet& rules);

/// Latest BT frame of an epoch window and the objects detected in it.
struct DetectionFrame {
  GeoGrid bt;
  std::vector<CSObject> objects;
};

struct RainEvidence {
  std::optional<RainStats> stats;  ///< over the merged rain sources
  int sources_observed = 0;
};

struct IndicatorParams {
  Seconds window{10800};
  std::size_t fit_window = kDefaultFitWindow;
  /// Largest gap between a wind frame and the track observation it is read against.
  Seconds track_match{1800};
};

/// Gathers per-region evidence for one epoch. `wind_sources` hold category
/// grids on the common geometry, one vector per sensor. Wind seen inside the
/// bbox of a track approaching the region (as observed nearest to the wind
/// frame's time) counts toward the region.
RegionIndicators build_indicators(Timestamp epoch, const RegionBox& region, const DetectionFrame* detections,
                                  const std::vector<Track>& tracks,
                                  const std::vector<std::vector<CategoryGrid>>& wind_sources,
                                  const RainEvidence& rain, const IndicatorParams& params = {});

struct WindSource {
  std::string name;
  GridStack speed;  ///< WIND_SPEED
};

struct FusionInputs {
  GridStack bt;
  std::vector<GridStack> rain_sources;
  std::vector<WindSource> wind_sources;
};

struct FusionSettings {
  double t_deep = kDefaultDeepConvectionK;
  std::size_t min_area_px = kDefaultMinAreaPx;
  WindBins bins;
  FusionThresholds thresholds;
  Seconds epoch_step{1800};
  Seconds window{10800};
  double max_gap_km = kDefaultMaxGapKm;
  std::size_t fit_window = kDefaultFitWindow;
};

/// Sequential epoch loop: feeds BT frames to a tracker and evaluates every
/// region at each epoch. Rain and wind are collocated onto the BT geometry.
class FusionEngine {
public:
  FusionEngine(FusionInputs inputs, std::vector<RegionBox> regions, FusionSettings settings);
  FusionEngine(FusionInputs inputs, std::vector<RegionBox> regions, FusionSettings settings, RuleSet rules);

  /// One report per region, ordered by region name. Epochs must increase.
  std::vector<WarningReport> run_epoch(Timestamp epoch);
  /// Epochs from the first BT frame every epoch_step up to the last BT frame.
  std::vector<WarningReport> run_all();

  const Tracker& tracker() const { return tracker_; }
  const std::vector<RegionBox>& regions() const { return regions_; }

private:
  FusionSettings settings_;
  RuleSet rules_;
  std::vector<RegionBox> regions_;
  GridStack bt_;
  std::optional<GridStack> rain_;
  int rain_source_total_ = 0;
  std::vector<GridStack> rain_sources_;
  std::vector<std::vector<CategoryGrid>> wind_;
  Tracker tracker_;
  std::size_t next_bt_ = 0;
  std::optional<DetectionFrame> latest_;
  std::optional<Timestamp> last_epoch_;
};

/// `epoch,region,level,lead_time_s,triggered_rules,deep_cloud_fraction,min_bt,wind_cat,max_rain_mmh,rain_persistence_h,approach_s`
std::string warning_csv_header();
std::string to_csv_line(const WarningReport& report);
std::string warnings_csv(const std::vector<WarningReport>& reports);
std::vector<WarningReport> read_warnings_csv(std::istream& in, std::string_view source_name = "<stream>");

}  // namespace cswarn

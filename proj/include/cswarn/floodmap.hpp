#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cswarn/fusion.hpp"
#include "cswarn/geogrid.hpp"

namespace cswarn {

constexpr double kDefaultFloodThresholdDb = -3.0;
constexpr std::size_t kDefaultFloodMinRegionPx = 8;
constexpr double kDefaultFloodedFraction = 0.01;

class FloodError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct LogRatio {
  GeoGrid ratio_db;  ///< LOG_RATIO_DB, stamped with the flood image time
  std::size_t nonpositive_cells = 0;
  Timestamp reference_time{};
};

/// 10 log10(flood / reference) per cell. Non-positive inputs become nodata
/// and are counted.
LogRatio log_ratio_db(const GeoGrid& flood, const GeoGrid& reference);

struct FloodMask {
  GeoGrid mask;  ///< FLOOD_MASK, time = flood acquisition
  std::optional<Timestamp> reference_time;
  double threshold_db = kDefaultFloodThresholdDb;
  std::size_t min_region_px = kDefaultFloodMinRegionPx;
};

/// Darkening change detection: ratio <= threshold_db, then 8-connected
/// regions smaller than min_region_px are cleared.
FloodMask flood_mask(const GeoGrid& ratio_db, double threshold_db = kDefaultFloodThresholdDb,
                     std::size_t min_region_px = kDefaultFloodMinRegionPx);
FloodMask flood_mask(const LogRatio& ratio, double threshold_db = kDefaultFloodThresholdDb,
                     std::size_t min_region_px = kDefaultFloodMinRegionPx);

enum class Outcome { HIT, MISS, FALSE_ALARM, CORRECT_NEGATIVE };
std::string_view to_string(Outcome o);

struct RegionOutcome {
  std::string region;
  bool flooded = false;
  bool warned = false;
  Outcome outcome = Outcome::CORRECT_NEGATIVE;
};

struct ValidationScore {
  std::vector<RegionOutcome> regions;
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
  std::size_t correct_negatives = 0;

  std::optional<double> pod() const;
  std::optional<double> far() const;
};

/// A region is flooded when at least `f_flood` of its valid mask cells are
/// flooded, and warned when any report for it inside
/// (reference_time, flood_time] reached WARNING.
ValidationScore validate(const std::vector<WarningReport>& warnings, const FloodMask& mask,
                         const std::vector<RegionBox>& regions, double f_flood = kDefaultFloodedFraction);

/// `region,flooded,warned,outcome`
std::string validation_csv(const ValidationScore& score);

}  // namespace cswarn

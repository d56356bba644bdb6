#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cswarn/geogrid.hpp"

namespace cswarn {

constexpr double kDefaultHeavyRainMmh = 8.0;

class PrecipError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Half-open interval [start, end) of UTC seconds.
struct TimeWindow {
  Timestamp start{};
  Timestamp end{};

  /// (epoch - length, epoch]
  static TimeWindow trailing(Timestamp epoch, Seconds length) {
    return TimeWindow{epoch - length + Seconds{1}, epoch + Seconds{1}};
  }
  bool contains(Timestamp t) const { return t >= start && t < end; }
  Seconds length() const { return end - start; }
};

/// Frame spacing of a rain stack: the smallest gap between frames. Every
/// other gap must be a whole multiple of it. Single-frame stacks need
/// `fallback`.
Seconds stack_cadence(const GridStack& stack, std::optional<Seconds> fallback = std::nullopt);

struct Accumulation {
  GeoGrid depth;                        ///< RAIN_ACCUM, mm
  std::vector<double> missing_fraction;  ///< per cell, over expected frame slots in the window
  std::size_t frames_used = 0;
};

/// Per-cell sum of rate * cadence over frames inside `window`. Nodata counts
/// as zero depth and is reported through missing_fraction.
Accumulation accumulate(const GridStack& rates, const TimeWindow& window,
                        std::optional<Seconds> cadence = std::nullopt);

/// 1 where rate >= r_heavy, nodata preserved.
GeoGrid heavy_mask(const GeoGrid& rate, double r_heavy = kDefaultHeavyRainMmh);

struct RainStats {
  std::string region;
  Timestamp window_start{};
  Timestamp window_end{};
  double max_rate_mmh = 0.0;
  /// Largest accumulated depth of any cell in the region.
  double accum_mm = 0.0;
  double persistence_h = 0.0;
  double missing_fraction = 0.0;
  /// False when no valid rain cell fell in the region during the window.
  bool observed = false;
};

RainStats region_rain_stats(const GridStack& rates, const RegionBox& region, const TimeWindow& window,
                            double r_heavy = kDefaultHeavyRainMmh, std::optional<Seconds> cadence = std::nullopt);

/// Cellwise maximum of two rain sources; frames at equal times are merged,
/// the rest are interleaved. Both stacks must share a geometry.
GridStack merge_rain_sources(const GridStack& a, const GridStack& b);

/// `region,window_start,window_end,max_rate_mmh,accum_mm,persistence_h,missing_fraction`
std::string rain_stats_csv_header();
std::string to_csv_line(const RainStats& stats);

}  // namespace cswarn

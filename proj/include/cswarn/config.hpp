#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cswarn/floodmap.hpp"
#include "cswarn/fusion.hpp"
#include "cswarn/wind.hpp"

namespace cswarn {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One `key = value` line of an INI-style file.
struct KeyValueEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// `[section]` headers, `key = value` lines, `#` comments. Keys outside any
/// section get an empty section name.
std::vector<KeyValueEntry> parse_key_value(std::istream& in, std::string_view source_name);

/// Every engine threshold, with the documented defaults.
struct Config {
  // [detection]
  double t_deep = kDefaultDeepConvectionK;
  std::size_t min_area_px = kDefaultMinAreaPx;
  // [wind]
  std::string gmf = "synth1";
  double v_max = kDefaultVmax;
  WindBins bins;
  GmfGeometry geometry;
  // [rain]
  double r_heavy = kDefaultHeavyRainMmh;
  double persistence_h = 3.0;
  // [fusion]
  double fraction = 0.2;
  std::int64_t epoch_s = 1800;
  std::int64_t window_s = 10800;
  // [floodmap]
  double threshold_db = kDefaultFloodThresholdDb;
  std::size_t min_region_px = kDefaultFloodMinRegionPx;
  double f_flood = kDefaultFloodedFraction;
  // [tracking]
  double max_gap_km = kDefaultMaxGapKm;
  std::size_t fit_window = kDefaultFitWindow;

  /// Throws ConfigError naming the first key that violates its precondition.
  void validate(const GmfRegistry& registry) const;
  FusionSettings fusion_settings() const;
};

Config parse_config(std::istream& in, std::string_view source_name, const GmfRegistry& registry);
Config read_config(const std::filesystem::path& path, const GmfRegistry& registry);
void write_config(const Config& config, std::ostream& out);

}  // namespace cswarn

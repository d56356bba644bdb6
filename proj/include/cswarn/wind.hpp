#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cswarn/geogrid.hpp"

namespace cswarn {

class WindError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class WindCategory : std::uint8_t { NONE = 0, WEAK = 1, MODERATE = 2, SEVERE = 3 };

std::string_view to_string(WindCategory c);
WindCategory parse_wind_category(std::string_view text);
constexpr int rank(WindCategory c) { return static_cast<int>(c); }

/// Lower bounds (m/s) of WEAK, MODERATE and SEVERE. Bins are half-open.
struct WindBins {
  std::array<double, 3> edges{5.0, 10.0, 15.0};
  void validate() const;
};

WindCategory categorize(double speed_mps, const WindBins& bins = {});

struct GmfGeometry {
  double incidence_deg = 35.0;
  double rel_azimuth_deg = 0.0;
  void validate() const;
};

/// Forward geophysical model: wind speed and viewing geometry to linear NRCS.
/// Implementations must be strictly increasing in speed on [0, 25] m/s.
class Gmf {
public:
  virtual ~Gmf() = default;
  virtual std::string_view name() const = 0;
  virtual double sigma0(double speed_mps, const GmfGeometry& geometry) const = 0;
};

/// sigma0 = 0.001 * (1 + v)^1.5, geometry-independent.
class Synth1Gmf final : public Gmf {
public:
  std::string_view name() const override { return "synth1"; }
  double sigma0(double speed_mps, const GmfGeometry& geometry) const override;
};

/// Geometry-dependent synthetic model with CMOD-like harmonic azimuth terms:
/// 0.001 * (1 + v)^(1.2 + 0.01 (inc - 30)) * (1 + 0.3 cos phi + 0.2 cos 2 phi).
class HarmonicGmf final : public Gmf {
public:
  std::string_view name() const override { return "harmonic"; }
  double sigma0(double speed_mps, const GmfGeometry& geometry) const override;
};

/// Name-keyed set of models. Build it up front, then share it as const.
class GmfRegistry {
public:
  /// Registry holding synth1 and harmonic.
  static GmfRegistry with_builtin();

  void add(std::shared_ptr<const Gmf> gmf);
  const Gmf& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

private:
  std::map<std::string, std::shared_ptr<const Gmf>, std::less<>> models_;
};

constexpr double kDefaultVmax = 25.0;
constexpr double kMaxForwardSpeed = 60.0;
constexpr double kInversionTolerance = 1e-4;

double gmf_forward(const Gmf& gmf, double speed_mps, const GmfGeometry& geometry);

enum class ClipFlag { NONE, LOW, HIGH };

struct Inversion {
  double speed_mps = 0.0;
  ClipFlag clip = ClipFlag::NONE;
};

/// Bisection on [0, v_max]. sigma0 outside [forward(0), forward(v_max)] is
/// clipped to the nearest end and flagged.
Inversion gmf_invert(const Gmf& gmf, double sigma0, const GmfGeometry& geometry, double v_max = kDefaultVmax);

/// Per-cell viewing geometry on the NRCS grid shape.
struct GeometryField {
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  std::vector<GmfGeometry> cells;

  static GeometryField uniform(const Geometry& grid, const GmfGeometry& geometry);
};

struct WindRetrieval {
  GeoGrid wind;
  std::size_t clipped_low = 0;
  std::size_t clipped_high = 0;
};

WindRetrieval retrieve_wind_grid(const GeoGrid& nrcs, const GeometryField& geometry, const Gmf& gmf,
                                 double v_max = kDefaultVmax);

/// Per-cell category; empty optional where the wind grid has no data.
struct CategoryGrid {
  Timestamp time{};
  Geometry geometry;
  std::vector<std::optional<WindCategory>> cells;
};

CategoryGrid categorize_grid(const GeoGrid& wind, const WindBins& bins = {});

struct RegionWind {
  WindCategory category = WindCategory::NONE;
  bool no_observation = true;
};

/// Maximum category over every source frame whose time falls in
/// [window_start, window_end) and every cell centred in `region`.
RegionWind region_max_category(const std::vector<std::vector<CategoryGrid>>& sources, const RegionBox& region,
                               Timestamp window_start, Timestamp window_end);

}  // namespace cswarn

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cswarn {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses `YYYY-MM-DDTHH:MM:SSZ`. Throws std::invalid_argument on anything else.
Timestamp parse_time(std::string_view text);
std::string format_time(Timestamp t);

/// Shortest decimal that reads back to the same double.
std::string format_real(double v);
/// Strict full-string parse; throws std::invalid_argument.
double parse_real(std::string_view text);

constexpr double kNodata = -9999.0;
constexpr double kEarthRadiusKm = 6371.0;
/// Great-circle kilometres per degree of arc (~111.195).
constexpr double kKmPerDegree = kEarthRadiusKm * 3.14159265358979323846 / 180.0;

enum class Variable { BT, RAIN_RATE, RAIN_ACCUM, WIND_SPEED, NRCS, FLOOD_MASK, LOG_RATIO_DB };

std::string_view to_string(Variable v);
Variable parse_variable(std::string_view text);
/// Canonical units string for each variable (K, mm/h, mm, m/s, linear, bool, dB).
std::string_view canonical_units(Variable v);

class GridError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Named lat/lon rectangle. Boundaries are inclusive.
struct RegionBox {
  std::string name;
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool valid() const { return lat_min < lat_max && lon_min < lon_max; }
  bool contains(double lat, double lon) const;
  bool intersects(const RegionBox& other) const;
  RegionBox translated(double dlat, double dlon) const;

  bool operator==(const RegionBox&) const = default;
};

/// Cell-centre registered plate carree geometry. lat_min/lon_min are the
/// centre of the south-west cell; row 0 is the northernmost row.
struct Geometry {
  double lat_min = 0.0;
  double lon_min = 0.0;
  double dlat = 1.0;
  double dlon = 1.0;
  std::size_t nrows = 1;
  std::size_t ncols = 1;

  std::size_t size() const { return nrows * ncols; }
  double lat_of_row(std::size_t row) const { return lat_min + static_cast<double>(nrows - 1 - row) * dlat; }
  double lon_of_col(std::size_t col) const { return lon_min + static_cast<double>(col) * dlon; }
  double lat_max() const { return lat_of_row(0); }
  double lon_max() const { return lon_of_col(ncols - 1); }
  /// Outer cell edges.
  RegionBox extent() const;
  void validate() const;

  bool operator==(const Geometry&) const = default;
};

class GeoGrid {
public:
  GeoGrid() = default;
  /// Validates geometry, value count and physical bounds of finite values.
  GeoGrid(Variable variable, Timestamp time, Geometry geometry, std::vector<double> values,
          double nodata = kNodata);
  /// Same, with explicit units (must equal canonical_units(variable)).
  GeoGrid(Variable variable, std::string units, Timestamp time, Geometry geometry,
          std::vector<double> values, double nodata);

  static GeoGrid filled(Variable variable, Timestamp time, const Geometry& geometry, double value,
                        double nodata = kNodata);

  Variable variable() const { return variable_; }
  const std::string& units() const { return units_; }
  Timestamp time() const { return time_; }
  const Geometry& geometry() const { return geometry_; }
  double nodata() const { return nodata_; }
  std::size_t nrows() const { return geometry_.nrows; }
  std::size_t ncols() const { return geometry_.ncols; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t row, std::size_t col) const { return values_[row * geometry_.ncols + col]; }
  double operator[](std::size_t index) const { return values_[index]; }
  /// True for finite values that are not the nodata sentinel.
  bool is_valid(double v) const;
  bool valid_at(std::size_t index) const { return is_valid(values_[index]); }

  bool operator==(const GeoGrid& other) const;

private:
  Variable variable_ = Variable::BT;
  std::string units_ = "K";
  Timestamp time_{};
  Geometry geometry_{};
  std::vector<double> values_{0.0};
  double nodata_ = kNodata;
};

/// Time-ordered frames of one variable on one shared geometry.
class GridStack {
public:
  GridStack() = default;
  explicit GridStack(std::vector<GeoGrid> frames);

  void push_back(GeoGrid frame);

  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }
  const GeoGrid& operator[](std::size_t i) const { return frames_[i]; }
  const GeoGrid& front() const { return frames_.front(); }
  const GeoGrid& back() const { return frames_.back(); }
  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }
  const std::vector<GeoGrid>& frames() const { return frames_; }
  const Geometry& geometry() const { return frames_.front().geometry(); }
  Variable variable() const { return frames_.front().variable(); }

  bool operator==(const GridStack&) const = default;

private:
  std::vector<GeoGrid> frames_;
};

class GsfParseError : public GridError {
public:
  using GridError::GridError;
};

GridStack read_gsf(std::istream& in, std::string_view source_name = "<stream>");
GridStack read_gsf(const std::filesystem::path& path);
void write_gsf(const GridStack& stack, std::ostream& out);
/// Writes to a temporary sibling and renames it into place.
void write_gsf(const GridStack& stack, const std::filesystem::path& path);
std::string to_gsf_string(const GridStack& stack);

/// `name lat_min lat_max lon_min lon_max` per line, `#` comments.
std::vector<RegionBox> read_regions(std::istream& in, std::string_view source_name = "<stream>");
std::vector<RegionBox> read_regions(const std::filesystem::path& path);
void write_regions(const std::vector<RegionBox>& regions, std::ostream& out);

/// Cells whose centres lie inside `box`. Throws GridError on an empty intersection.
GeoGrid subset(const GeoGrid& grid, const RegionBox& box);

/// Nearest-centre resampling onto `target`. Target cells farther than
/// max(dlat, dlon) of the source from every source centre become nodata.
GeoGrid resample_nn(const GeoGrid& src, const Geometry& target);

/// Row-major indices of cells whose centres lie in `box` (possibly empty).
std::vector<std::size_t> cells_in_box(const Geometry& geometry, const RegionBox& box);

/// Writes `content` to a temp file next to `path`, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace cswarn

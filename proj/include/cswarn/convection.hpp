#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cswarn/geogrid.hpp"

namespace cswarn {

constexpr double kDefaultDeepConvectionK = 220.0;
constexpr std::size_t kDefaultMinAreaPx = 4;

/// One labelled convective cell in a single frame.
struct CSObject {
  int id = 0;
  Timestamp time{};
  std::size_t pixel_count = 0;
  double area_km2 = 0.0;
  double centroid_lat = 0.0;
  double centroid_lon = 0.0;
  std::optional<double> min_bt;
  std::optional<double> mean_bt;
  /// Outer edges of the member cells.
  RegionBox bbox;
  /// Row-major member cell indices, ascending.
  std::vector<std::size_t> cells;
};

/// 1 where a finite BT is at or below `t_deep`, 0 elsewhere, nodata preserved.
GeoGrid convective_mask(const GeoGrid& bt, double t_deep = kDefaultDeepConvectionK);

/// 8-connected components of the 1-cells in a boolean mask. Components
/// smaller than `min_area_px` are dropped; survivors get ids 1..n in
/// raster-scan order of their first pixel.
std::vector<CSObject> label_components(const GeoGrid& mask, std::size_t min_area_px = kDefaultMinAreaPx);

/// Fills min_bt / mean_bt from member cells. `bt` must have the geometry the
/// objects were labelled on.
void summarize(const GeoGrid& bt, const Geometry& labelled_on, std::vector<CSObject>& objects);

/// Mask, label and summarize in one pass.
std::vector<CSObject> detect_objects(const GeoGrid& bt, double t_deep = kDefaultDeepConvectionK,
                                     std::size_t min_area_px = kDefaultMinAreaPx);

/// Area of one cell centred at `lat` (spherical-degree approximation).
double cell_area_km2(const Geometry& geometry, double lat);

}  // namespace cswarn

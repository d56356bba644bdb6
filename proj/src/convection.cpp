#include "cswarn/convection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cswarn {

double cell_area_km2(const Geometry& geometry, double lat) {
  return (geometry.dlat * kKmPerDegree) * (geometry.dlon * kKmPerDegree * std::cos(lat * std::numbers::pi / 180.0));
}

GeoGrid convective_mask(const GeoGrid& bt, double t_deep) {
  if (bt.variable() != Variable::BT) {
    throw GridError("convective_mask: expected BT grid, got " + std::string(to_string(bt.variable())));
  }
  const auto in = bt.values();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!bt.is_valid(in[i])) {
      out[i] = bt.nodata();
    } else {
      out[i] = in[i] <= t_deep ? 1.0 : 0.0;
    }
  }
  return GeoGrid(Variable::FLOOD_MASK, bt.time(), bt.geometry(), std::move(out), bt.nodata());
}

std::vector<CSObject> label_components(const GeoGrid& mask, std::size_t min_area_px) {
  const auto& g = mask.geometry();
  const auto rows = static_cast<long>(g.nrows);
  const auto cols = static_cast<long>(g.ncols);
  auto is_set = [&](std::size_t i) { return mask.valid_at(i) && mask[i] == 1.0; };

  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> stack;
  std::vector<CSObject> objects;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (seen[start] || !is_set(start)) continue;

    std::vector<std::size_t> members;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      members.push_back(idx);
      const long r = static_cast<long>(idx / g.ncols);
      const long c = static_cast<long>(idx % g.ncols);
      for (long dr = -1; dr <= 1; ++dr) {
        for (long dc = -1; dc <= 1; ++dc) {
          const long nr = r + dr, nc = c + dc;
          if ((dr == 0 && dc == 0) || nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
          const auto n = static_cast<std::size_t>(nr * cols + nc);
          if (!seen[n] && is_set(n)) {
            seen[n] = 1;
            stack.push_back(n);
          }
        }
      }
    }
    if (members.size() < min_area_px) continue;
    std::sort(members.begin(), members.end());

    CSObject obj;
    obj.id = static_cast<int>(objects.size()) + 1;
    obj.time = mask.time();
    obj.pixel_count = members.size();
    double lat_sum = 0.0, lon_sum = 0.0;
    double lat_lo = std::numeric_limits<double>::infinity(), lat_hi = -lat_lo;
    double lon_lo = lat_lo, lon_hi = -lat_lo;
    for (std::size_t idx : members) {
      const double lat = g.lat_of_row(idx / g.ncols);
      const double lon = g.lon_of_col(idx % g.ncols);
      lat_sum += lat;
      lon_sum += lon;
      lat_lo = std::min(lat_lo, lat);
      lat_hi = std::max(lat_hi, lat);
      lon_lo = std::min(lon_lo, lon);
      lon_hi = std::max(lon_hi, lon);
      obj.area_km2 += cell_area_km2(g, lat);
    }
    const auto n = static_cast<double>(members.size());
    obj.centroid_lat = lat_sum / n;
    obj.centroid_lon = lon_sum / n;
    obj.bbox = RegionBox{"", lat_lo - 0.5 * g.dlat, lat_hi + 0.5 * g.dlat, lon_lo - 0.5 * g.dlon,
                         lon_hi + 0.5 * g.dlon};
    obj.cells = std::move(members);
    objects.push_back(std::move(obj));
  }
  return objects;
}

void summarize(const GeoGrid& bt, const Geometry& labelled_on, std::vector<CSObject>& objects) {
  if (bt.variable() != Variable::BT) throw GridError("summarize: expected BT grid");
  if (!(bt.geometry() == labelled_on)) throw GridError("summarize: BT geometry differs from mask geometry");
  for (auto& obj : objects) {
    double lo = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t idx : obj.cells) {
      const double v = bt[idx];
      if (!bt.is_valid(v)) continue;
      lo = std::min(lo, v);
      sum += v;
      ++n;
    }
    if (n == 0) {
      obj.min_bt.reset();
      obj.mean_bt.reset();
    } else {
      obj.min_bt = lo;
      obj.mean_bt = sum / static_cast<double>(n);
    }
  }
}

std::vector<CSObject> detect_objects(const GeoGrid& bt, double t_deep, std::size_t min_area_px) {
  auto objects = label_components(convective_mask(bt, t_deep), min_area_px);
  summarize(bt, bt.geometry(), objects);
  return objects;
}

}  // namespace cswarn

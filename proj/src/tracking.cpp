#include "cswarn/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace cswarn {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// Below this a fitted speed is treated as stationary.
constexpr double kStationaryMps = 1e-9;

}  // namespace

double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDegToRad, p2 = lat2 * kDegToRad;
  const double dp = p2 - p1;
  const double dl = (lon2 - lon1) * kDegToRad;
  const double a = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<Association> associate(const std::vector<CSObject>& prev, const std::vector<CSObject>& next,
                                   double max_gap_km) {
  std::vector<Association> candidates;
  for (const auto& p : prev) {
    for (const auto& n : next) {
      const double d = great_circle_km(p.centroid_lat, p.centroid_lon, n.centroid_lat, n.centroid_lon);
      if (d <= max_gap_km) candidates.push_back({p.id, n.id, d});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Association& a, const Association& b) {
    return std::tie(a.distance_km, a.prev_id, a.next_id) < std::tie(b.distance_km, b.prev_id, b.next_id);
  });
  std::vector<Association> matches;
  std::vector<int> used_prev, used_next;
  for (const auto& c : candidates) {
    if (std::find(used_prev.begin(), used_prev.end(), c.prev_id) != used_prev.end()) continue;
    if (std::find(used_next.begin(), used_next.end(), c.next_id) != used_next.end()) continue;
    used_prev.push_back(c.prev_id);
    used_next.push_back(c.next_id);
    matches.push_back(c);
  }
  std::sort(matches.begin(), matches.end(),
            [](const Association& a, const Association& b) { return a.prev_id < b.prev_id; });
  return matches;
}

Motion motion_vector(const Track& track, std::size_t fit_window) {
  const auto& obs = track.observations;
  if (obs.size() < 2) throw TrackingError("track " + std::to_string(track.track_id) + ": undefined motion (<2 observations)");
  const std::size_t k = std::min(obs.size(), std::max<std::size_t>(fit_window, 2));
  const auto first = obs.end() - static_cast<std::ptrdiff_t>(k);

  // Times relative to the first fitted observation keep the normal equations well conditioned.
  const Timestamp t0 = first->time;
  double t_mean = 0.0, lat_mean = 0.0, lon_mean = 0.0;
  for (auto it = first; it != obs.end(); ++it) {
    t_mean += static_cast<double>((it->time - t0).count());
    lat_mean += it->centroid_lat;
    lon_mean += it->centroid_lon;
  }
  const auto n = static_cast<double>(k);
  t_mean /= n;
  lat_mean /= n;
  lon_mean /= n;
  double stt = 0.0, stlat = 0.0, stlon = 0.0;
  for (auto it = first; it != obs.end(); ++it) {
    const double dt = static_cast<double>((it->time - t0).count()) - t_mean;
    stt += dt * dt;
    stlat += dt * (it->centroid_lat - lat_mean);
    stlon += dt * (it->centroid_lon - lon_mean);
  }
  const double lat_rate = stlat / stt;  // deg/s
  const double lon_rate = stlon / stt;

  const double span = static_cast<double>((obs.back().time - t0).count());
  const double lat_start = lat_mean - lat_rate * t_mean;
  const double lon_start = lon_mean - lon_rate * t_mean;
  const double lat_end = lat_start + lat_rate * span;
  const double lon_end = lon_start + lon_rate * span;

  Motion m;
  m.speed_mps = great_circle_km(lat_start, lon_start, lat_end, lon_end) * 1000.0 / span;
  if (m.speed_mps > kStationaryMps) {
    const double north = lat_end - lat_start;
    const double east = (lon_end - lon_start) * std::cos(lat_mean * kDegToRad);
    double bearing = std::atan2(east, north) * kRadToDeg;
    if (bearing < 0.0) bearing += 360.0;
    if (bearing >= 360.0) bearing -= 360.0;
    m.bearing_deg = bearing;
  } else {
    m.speed_mps = 0.0;
  }
  return m;
}

RegionBox translate_bbox(const RegionBox& bbox, double ref_lat, const Motion& motion, double seconds) {
  if (!motion.bearing_deg || motion.speed_mps == 0.0) return bbox;
  const double dist_km = motion.speed_mps * seconds / 1000.0;
  const double b = *motion.bearing_deg * kDegToRad;
  const double dlat = dist_km * std::cos(b) / kKmPerDegree;
  const double dlon = dist_km * std::sin(b) / (kKmPerDegree * std::cos(ref_lat * kDegToRad));
  return bbox.translated(dlat, dlon);
}

ForecastExtent forecast_extent(const Track& track, std::int64_t horizon_s, std::size_t fit_window) {
  if (horizon_s <= 0) throw TrackingError("forecast horizon must be positive");
  const Motion m = motion_vector(track, fit_window);
  const auto& last = track.last();
  return ForecastExtent{track.track_id, horizon_s,
                        translate_bbox(last.bbox, last.centroid_lat, m, static_cast<double>(horizon_s))};
}

std::optional<std::int64_t> time_to_region(const Track& track, const RegionBox& region, std::size_t fit_window) {
  const Motion m = motion_vector(track, fit_window);
  const auto& last = track.last();
  for (std::int64_t h = kApproachStepS; h <= kApproachHorizonS; h += kApproachStepS) {
    if (translate_bbox(last.bbox, last.centroid_lat, m, static_cast<double>(h)).intersects(region)) return h;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Tracker::Tracker(double max_gap_km, std::size_t fit_window) : max_gap_km_(max_gap_km), fit_window_(fit_window) {
  if (!(max_gap_km > 0.0)) throw TrackingError("max_gap_km must be positive");
  if (fit_window < 2) throw TrackingError("fit_window must be at least 2");
}

void Tracker::update(Timestamp time, const std::vector<CSObject>& objects) {
  if (last_time_ && time <= *last_time_) throw TrackingError("tracker frames must be strictly increasing in time");
  last_time_ = time;

  // Relabel the tail objects by position in active_ so ids are unique.
  std::vector<CSObject> prev;
  prev.reserve(active_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) {
    CSObject tail = active_[i].last();
    tail.id = static_cast<int>(i);
    prev.push_back(std::move(tail));
  }
  std::vector<CSObject> next = objects;
  for (std::size_t i = 0; i < next.size(); ++i) next[i].id = static_cast<int>(i);

  const auto matches = associate(prev, next, max_gap_km_);
  std::vector<int> next_track(next.size(), -1);
  std::vector<char> continued(active_.size(), 0);
  for (const auto& m : matches) {
    next_track[static_cast<std::size_t>(m.next_id)] = m.prev_id;
    continued[static_cast<std::size_t>(m.prev_id)] = 1;
  }

  std::vector<Track> still_active;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (!continued[i]) finished_.push_back(std::move(active_[i]));
  }
  for (std::size_t j = 0; j < objects.size(); ++j) {
    if (next_track[j] >= 0) {
      Track t = std::move(active_[static_cast<std::size_t>(next_track[j])]);
      t.observations.push_back(objects[j]);
      still_active.push_back(std::move(t));
    } else {
      Track t;
      t.track_id = next_id_++;
      t.observations.push_back(objects[j]);
      still_active.push_back(std::move(t));
    }
  }
  std::sort(still_active.begin(), still_active.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  active_ = std::move(still_active);
}

std::vector<Track> Tracker::all_tracks() const {
  std::vector<Track> out = finished_;
  out.insert(out.end(), active_.begin(), active_.end());
  std::sort(out.begin(), out.end(), [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  return out;
}

}  // namespace cswarn

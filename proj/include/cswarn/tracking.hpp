#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "cswarn/convection.hpp"
#include "cswarn/geogrid.hpp"

namespace cswarn {

constexpr double kDefaultMaxGapKm = 50.0;
constexpr std::size_t kDefaultFitWindow = 6;
/// Search step and cap for time_to_region (10 min, one day).
constexpr std::int64_t kApproachStepS = 600;
constexpr std::int64_t kApproachHorizonS = 86400;

class TrackingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Haversine distance in km.
double great_circle_km(double lat1, double lon1, double lat2, double lon2);

struct Motion {
  double speed_mps = 0.0;
  /// Direction of motion, clockwise from north in [0, 360). Empty when stationary.
  std::optional<double> bearing_deg;
};

struct Track {
  int track_id = 0;
  std::vector<CSObject> observations;

  const CSObject& last() const { return observations.back(); }
};

struct ForecastExtent {
  int track_id = 0;
  std::int64_t horizon_s = 0;
  RegionBox bbox;
};

struct Association {
  int prev_id = 0;
  int next_id = 0;
  double distance_km = 0.0;

  bool operator==(const Association&) const = default;
};

/// Greedy one-to-one matching by ascending centroid distance (ties by lower
/// prev id, then lower next id). Pairs farther than `max_gap_km` are not
/// matched. Result is sorted by prev_id.
std::vector<Association> associate(const std::vector<CSObject>& prev, const std::vector<CSObject>& next,
                                   double max_gap_km = kDefaultMaxGapKm);

/// Least-squares centroid motion over the trailing `fit_window` observations.
/// Throws TrackingError with fewer than two observations.
Motion motion_vector(const Track& track, std::size_t fit_window = kDefaultFitWindow);

/// Last observed bbox rigidly translated by speed * horizon along the bearing.
ForecastExtent forecast_extent(const Track& track, std::int64_t horizon_s,
                               std::size_t fit_window = kDefaultFitWindow);
/// Same translation from an already-fitted motion.
RegionBox translate_bbox(const RegionBox& bbox, double ref_lat, const Motion& motion, double seconds);

/// Smallest multiple of 600 s up to one day at which the forecast bbox
/// intersects `region`; empty when the track never gets there.
std::optional<std::int64_t> time_to_region(const Track& track, const RegionBox& region,
                                           std::size_t fit_window = kDefaultFitWindow);

/// Frame-by-frame tracker. Owns all track state; feed frames in time order.
class Tracker {
public:
  explicit Tracker(double max_gap_km = kDefaultMaxGapKm, std::size_t fit_window = kDefaultFitWindow);

  void update(Timestamp time, const std::vector<CSObject>& objects);

  /// Tracks continued by the most recent frame.
  const std::vector<Track>& active() const { return active_; }
  /// Tracks that were not continued at some frame.
  const std::vector<Track>& finished() const { return finished_; }
  /// Finished plus active, ordered by track id.
  std::vector<Track> all_tracks() const;
  std::optional<Timestamp> last_time() const { return last_time_; }
  std::size_t fit_window() const { return fit_window_; }

private:
  double max_gap_km_;
  std::size_t fit_window_;
  int next_id_ = 1;
  std::optional<Timestamp> last_time_;
  std::vector<Track> active_;
  std::vector<Track> finished_;
};

}  // namespace cswarn

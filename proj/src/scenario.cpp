#include "cswarn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "cswarn/config.hpp"

namespace cswarn {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// Wind ring: radius and width in normalised cell units, centred this far behind the cell.
constexpr double kRingRadius = 0.5;
constexpr double kRingWidth = 0.35;
constexpr double kRingTrail = 0.25;
constexpr double kSarBaseNrcs = 0.05;
constexpr double kSarDarkeningDb = 10.0;
constexpr double kSarNoiseDb = 0.5;

Timestamp at(const ScenarioSpec& spec, std::int64_t offset_s) { return spec.start + Seconds{offset_s}; }

struct CellState {
  double lat;
  double lon;
  double sin_b;
  double cos_b;
  double age_s;
};

std::optional<CellState> cell_state(const ScenarioSpec& spec, const SyntheticCell& cell, Timestamp t) {
  const double age = static_cast<double>((t - at(spec, cell.birth_s)).count());
  if (age < 0.0) return std::nullopt;
  const double b = cell.bearing_deg * kDegToRad;
  const double dist_km = cell.speed_mps * age / 1000.0;
  return CellState{cell.lat + dist_km * std::cos(b) / kKmPerDegree,
                   cell.lon + dist_km * std::sin(b) / (kKmPerDegree * std::cos(cell.lat * kDegToRad)), std::sin(b),
                   std::cos(b), age};
}

/// Along-track and cross-track offsets (km) of a point from the cell centre.
std::pair<double, double> local_offsets(const CellState& s, double lat, double lon) {
  const double north = (lat - s.lat) * kKmPerDegree;
  const double east = (lon - s.lon) * kKmPerDegree * std::cos(s.lat * kDegToRad);
  return {east * s.sin_b + north * s.cos_b, east * s.cos_b - north * s.sin_b};
}

template <typename CellValue>
GeoGrid sample_field(const ScenarioSpec& spec, Timestamp t, Variable variable, double background, CellValue&& combine) {
  const auto& g = spec.grid;
  std::vector<double> values(g.size(), background);
  for (const auto& cell : spec.cells) {
    const auto state = cell_state(spec, cell, t);
    if (!state) continue;
    for (std::size_t r = 0; r < g.nrows; ++r) {
      const double lat = g.lat_of_row(r);
      for (std::size_t c = 0; c < g.ncols; ++c) {
        const auto [along, cross] = local_offsets(*state, lat, g.lon_of_col(c));
        double& v = values[r * g.ncols + c];
        v = combine(v, cell, *state, along, cross);
      }
    }
  }
  return GeoGrid(variable, t, g, std::move(values));
}

void add_noise(std::vector<double>& values, double sigma, double lo, double hi, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : values) v = std::clamp(v + noise(rng), lo, hi);
}

GeoGrid with_noise(const GeoGrid& g, double sigma, double lo, double hi, std::mt19937_64& rng) {
  if (sigma <= 0.0) return g;
  std::vector<double> v(g.values().begin(), g.values().end());
  add_noise(v, sigma, lo, hi, rng);
  return GeoGrid(g.variable(), g.time(), g.geometry(), std::move(v), g.nodata());
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::int64_t to_int(const std::string& s) {
  const double v = parse_real(s);
  if (v != std::floor(v) || std::abs(v) > 1e15) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return static_cast<std::int64_t>(v);
}

}  // namespace

void ScenarioSpec::validate() const {
  grid.validate();
  if (duration_s <= 0) throw ScenarioError("scenario duration_s must be positive");
  if (bt_cadence_s <= 0 || rain_cadence_s <= 0) throw ScenarioError("scenario cadences must be positive");
  if (rain_lag_s < 0) throw ScenarioError("rain_lag_s must be >= 0");
  if (!(background_bt_k > 220.0 && background_bt_k <= 400.0)) throw ScenarioError("background BT must be in (220, 400] K");
  if (bt_noise_k < 0.0 || rain_noise_mmh < 0.0 || wind_noise_mps < 0.0) throw ScenarioError("noise must be >= 0");
  sar_geometry.validate();
  std::set<std::string> names;
  for (const auto& w : wind_sources) {
    if (w.name.empty() || !names.insert(w.name).second) throw ScenarioError("wind source names must be unique");
    if (w.cadence_s <= 0 || w.first_s < 0) throw ScenarioError("wind source '" + w.name + "' has a bad schedule");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const std::string which = "cell " + std::to_string(i + 1);
    if (!(c.speed_mps >= 0.0 && c.speed_mps <= 60.0)) throw ScenarioError(which + ": speed must be in [0, 60] m/s");
    if (!(c.min_bt_k >= 180.0 && c.min_bt_k < background_bt_k)) {
      throw ScenarioError(which + ": min BT must be >= 180 K and below the background");
    }
    if (!(c.radius_km > 0.0) || !(c.elongation > 0.0)) throw ScenarioError(which + ": radius and elongation must be > 0");
    if (!(c.rain_peak_mmh >= 0.0) || !(c.wind_peak_mps >= 0.0) || c.wind_peak_mps > 100.0) {
      throw ScenarioError(which + ": peaks must be >= 0 (wind <= 100 m/s)");
    }
    if (!(c.bearing_deg >= 0.0 && c.bearing_deg < 360.0)) throw ScenarioError(which + ": bearing must be in [0, 360)");
  }
  std::set<std::string> region_names;
  for (const auto& r : regions) {
    if (!r.valid() || !region_names.insert(r.name).second) throw ScenarioError("bad or duplicate region '" + r.name + "'");
  }
  for (const auto& f : flooded) {
    if (!region_names.contains(f)) throw ScenarioError("flooded region '" + f + "' is not defined");
  }
}

GeoGrid scenario_bt(const ScenarioSpec& spec, Timestamp t) {
  const double bg = spec.background_bt_k;
  return sample_field(spec, t, Variable::BT, bg,
                      [bg](double v, const SyntheticCell& cell, const CellState&, double along, double cross) {
                        const double a = along / cell.radius_km;
                        const double c = cross / (cell.radius_km * cell.elongation);
                        return std::min(v, bg - (bg - cell.min_bt_k) * std::exp(-0.5 * (a * a + c * c)));
                      });
}

GeoGrid scenario_rain(const ScenarioSpec& spec, Timestamp t) {
  const double lag = static_cast<double>(spec.rain_lag_s);
  return sample_field(spec, t, Variable::RAIN_RATE, 0.0,
                      [lag](double v, const SyntheticCell& cell, const CellState& s, double along, double cross) {
                        const double ramp = lag > 0.0 ? std::min(1.0, s.age_s / lag) : 1.0;
                        const double a = along / cell.radius_km;
                        const double c = cross / (cell.radius_km * cell.elongation);
                        return std::max(v, cell.rain_peak_mmh * ramp * std::exp(-0.5 * (a * a + c * c)));
                      });
}

GeoGrid scenario_wind(const ScenarioSpec& spec, Timestamp t) {
  return sample_field(spec, t, Variable::WIND_SPEED, 0.0,
                      [](double v, const SyntheticCell& cell, const CellState&, double along, double cross) {
                        const double a = along / cell.radius_km + kRingTrail;
                        const double c = cross / (cell.radius_km * cell.elongation);
                        const double q = (std::sqrt(a * a + c * c) - kRingRadius) / kRingWidth;
                        return std::max(v, cell.wind_peak_mps * std::exp(-0.5 * q * q));
                      });
}

std::optional<TruthSample> cell_truth(const ScenarioSpec& spec, std::size_t index, Timestamp t) {
  const auto& cell = spec.cells.at(index);
  const auto state = cell_state(spec, cell, t);
  if (!state) return std::nullopt;
  TruthSample s;
  s.cell = static_cast<int>(index) + 1;
  s.time = t;
  s.lat = state->lat;
  s.lon = state->lon;
  s.speed_mps = cell.speed_mps;
  s.bearing_deg = cell.bearing_deg;
  const double bg = spec.background_bt_k;
  if (cell.min_bt_k <= spec.truth_t_deep && spec.truth_t_deep < bg) {
    // exp(-q^2/2) >= (bg - t_deep) / (bg - min_bt)
    const double q = std::sqrt(2.0 * std::log((bg - cell.min_bt_k) / (bg - spec.truth_t_deep)));
    const double along = q * cell.radius_km;
    const double cross = along * cell.elongation;
    // Half-extents of the rotated ellipse along east and north.
    const double east = std::hypot(along * state->sin_b, cross * state->cos_b);
    const double north = std::hypot(along * state->cos_b, cross * state->sin_b);
    const double dlat = north / kKmPerDegree;
    const double dlon = east / (kKmPerDegree * std::cos(state->lat * kDegToRad));
    s.bbox = RegionBox{"", state->lat - dlat, state->lat + dlat, state->lon - dlon, state->lon + dlon};
  }
  return s;
}

std::optional<Timestamp> TruthRecord::first_intersection(int cell, std::string_view region) const {
  for (const auto& i : intersections) {
    if (i.cell == cell && i.region == region) return i.time;
  }
  return std::nullopt;
}

ScenarioOutput generate(const ScenarioSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  ScenarioOutput out;

  const RegionBox grid_extent = spec.grid.extent();
  std::vector<char> noticed(spec.cells.size(), 0);
  for (std::int64_t s = 0; s < spec.duration_s; s += spec.bt_cadence_s) {
    const Timestamp t = at(spec, s);
    out.bt.push_back(with_noise(scenario_bt(spec, t), spec.bt_noise_k, 100.0, 400.0, rng));
    for (std::size_t k = 0; k < spec.cells.size(); ++k) {
      auto truth = cell_truth(spec, k, t);
      if (!truth) continue;
      if (truth->bbox) {
        const auto& b = *truth->bbox;
        const bool inside = b.lat_min >= grid_extent.lat_min && b.lat_max <= grid_extent.lat_max &&
                            b.lon_min >= grid_extent.lon_min && b.lon_max <= grid_extent.lon_max;
        if (!inside && !noticed[k]) {
          noticed[k] = 1;
          out.truth.notices.push_back({truth->cell, t, "deep-cloud extent leaves the grid; fields truncated"});
        }
        for (const auto& region : spec.regions) {
          if (b.intersects(region) && !out.truth.first_intersection(truth->cell, region.name)) {
            out.truth.intersections.push_back({truth->cell, region.name, t});
          }
        }
      }
      out.truth.samples.push_back(std::move(*truth));
    }
  }
  for (std::int64_t s = 0; s < spec.duration_s; s += spec.rain_cadence_s) {
    out.rain.push_back(with_noise(scenario_rain(spec, at(spec, s)), spec.rain_noise_mmh, 0.0, 1e6, rng));
  }
  static const Synth1Gmf synth1;
  for (const auto& source : spec.wind_sources) {
    GridStack stack;
    for (std::int64_t s = source.first_s; s < spec.duration_s; s += source.cadence_s) {
      GeoGrid wind = with_noise(scenario_wind(spec, at(spec, s)), spec.wind_noise_mps, 0.0, 100.0, rng);
      if (source.kind == WindSourceKind::SPEED) {
        stack.push_back(std::move(wind));
      } else {
        std::vector<double> sigma(wind.geometry().size());
        for (std::size_t i = 0; i < sigma.size(); ++i) {
          sigma[i] = gmf_forward(synth1, std::min(wind[i], kMaxForwardSpeed), spec.sar_geometry);
        }
        stack.push_back(GeoGrid(Variable::NRCS, wind.time(), wind.geometry(), std::move(sigma)));
      }
    }
    if (stack.empty()) continue;
    auto& dest = source.kind == WindSourceKind::SPEED ? out.wind : out.nrcs;
    dest.push_back({source.name, std::move(stack)});
  }
  out.truth.flooded = spec.flooded;
  return out;
}

SarPair generate_sar_pair(const ScenarioSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed ^ 0x5a5a5a5aULL);
  std::normal_distribution<double> noise_db(0.0, kSarNoiseDb);
  const auto& g = spec.grid;
  std::vector<double> ref(g.size()), flood(g.size());
  std::vector<char> darkened(g.size(), 0);
  for (const auto& name : spec.flooded) {
    const auto it = std::find_if(spec.regions.begin(), spec.regions.end(), [&](const RegionBox& r) { return r.name == name; });
    const double qlat = 0.25 * (it->lat_max - it->lat_min);
    const double qlon = 0.25 * (it->lon_max - it->lon_min);
    const RegionBox core{name, it->lat_min + qlat, it->lat_max - qlat, it->lon_min + qlon, it->lon_max - qlon};
    for (std::size_t idx : cells_in_box(g, core)) darkened[idx] = 1;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    ref[i] = kSarBaseNrcs * std::pow(10.0, noise_db(rng) / 10.0);
    const double change = darkened[i] ? -kSarDarkeningDb : 0.0;
    flood[i] = kSarBaseNrcs * std::pow(10.0, (change + noise_db(rng)) / 10.0);
  }
  const Timestamp flood_time = at(spec, spec.duration_s);
  const Timestamp ref_time = spec.start - Seconds{86400};
  return SarPair{GeoGrid(Variable::NRCS, ref_time, g, std::move(ref)),
                 GeoGrid(Variable::NRCS, flood_time, g, std::move(flood))};
}

ScenarioSpec paper_replay_spec() {
  ScenarioSpec s;
  s.start = parse_time("2020-10-05T12:00:00Z");
  // 14-20N, 103-110E at 0.05 deg, cell centres.
  s.grid = Geometry{14.025, 103.025, 0.05, 0.05, 120, 140};
  s.duration_s = 86400;
  s.bt_cadence_s = 600;
  s.rain_cadence_s = 1800;
  s.background_bt_k = 280.0;
  s.rain_lag_s = 1800;
  s.wind_sources = {{"lr", WindSourceKind::SPEED, 0, 10800}, {"sar", WindSourceKind::NRCS, 3600, 43200}};
  s.regions = {
      {"NA", 18.5, 19.8, 104.5, 105.8},  {"HT", 17.9, 18.5, 105.2, 106.5},   {"QB", 17.2, 17.9, 105.6, 106.9},
      {"QT", 16.7, 17.2, 106.5, 107.4},  {"TT", 16.2, 16.7, 107.0, 108.0},   {"DN", 15.9, 16.2, 107.8, 108.35},
      {"QN1", 15.3, 15.9, 107.2, 108.7}, {"QN2", 14.5, 15.3, 108.0, 109.0},
  };
  // Squall line centred 150 km east of DN's eastern edge, moving due west.
  SyntheticCell squall;
  squall.birth_s = 0;
  squall.lat = 15.6;
  squall.lon = 108.35 + 150.0 / (kKmPerDegree * std::cos(squall.lat * kDegToRad));
  squall.speed_mps = 8.0;
  squall.bearing_deg = 270.0;
  squall.min_bt_k = 200.0;
  squall.radius_km = 30.0;
  squall.elongation = 4.0;
  squall.rain_peak_mmh = 10.0;
  squall.wind_peak_mps = 20.0;
  s.cells = {squall};
  s.flooded = {"TT", "DN", "QN1", "QN2"};
  return s;
}

// ---------------------------------------------------------------------------
// Spec file

ScenarioSpec read_scenario_spec(std::istream& in, std::string_view source_name) {
  ScenarioSpec s;
  s.cells.clear();
  bool have_start = false;
  for (const auto& e : parse_key_value(in, source_name)) {
    const std::string where = std::string(source_name) + ":" + std::to_string(e.line) + ": ";
    if (e.section != "scenario") throw ScenarioError(where + "keys must be in the [scenario] section");
    try {
      const auto& k = e.key;
      const auto& v = e.value;
      if (k == "start") {
        s.start = parse_time(v);
        have_start = true;
      } else if (k == "duration_s") {
        s.duration_s = to_int(v);
      } else if (k == "lat_min") {
        s.grid.lat_min = parse_real(v);
      } else if (k == "lon_min") {
        s.grid.lon_min = parse_real(v);
      } else if (k == "dlat") {
        s.grid.dlat = parse_real(v);
      } else if (k == "dlon") {
        s.grid.dlon = parse_real(v);
      } else if (k == "nrows") {
        s.grid.nrows = static_cast<std::size_t>(to_int(v));
      } else if (k == "ncols") {
        s.grid.ncols = static_cast<std::size_t>(to_int(v));
      } else if (k == "bt_cadence_s") {
        s.bt_cadence_s = to_int(v);
      } else if (k == "rain_cadence_s") {
        s.rain_cadence_s = to_int(v);
      } else if (k == "background_bt") {
        s.background_bt_k = parse_real(v);
      } else if (k == "rain_lag_s") {
        s.rain_lag_s = to_int(v);
      } else if (k == "bt_noise_k") {
        s.bt_noise_k = parse_real(v);
      } else if (k == "rain_noise_mmh") {
        s.rain_noise_mmh = parse_real(v);
      } else if (k == "wind_noise_mps") {
        s.wind_noise_mps = parse_real(v);
      } else if (k == "truth_t_deep") {
        s.truth_t_deep = parse_real(v);
      } else if (k == "sar_incidence_deg") {
        s.sar_geometry.incidence_deg = parse_real(v);
      } else if (k == "sar_rel_azimuth_deg") {
        s.sar_geometry.rel_azimuth_deg = parse_real(v);
      } else if (k == "wind_source") {
        const auto f = split_ws(v);
        if (f.size() != 4 || (f[1] != "speed" && f[1] != "nrcs")) {
          throw std::invalid_argument("expected 'name speed|nrcs first_s cadence_s'");
        }
        s.wind_sources.push_back(
            {f[0], f[1] == "speed" ? WindSourceKind::SPEED : WindSourceKind::NRCS, to_int(f[2]), to_int(f[3])});
      } else if (k == "cell") {
        const auto f = split_ws(v);
        if (f.size() != 10) {
          throw std::invalid_argument(
              "expected 'birth_s lat lon speed_mps bearing_deg min_bt_k radius_km elongation rain_peak_mmh "
              "wind_peak_mps'");
        }
        s.cells.push_back({to_int(f[0]), parse_real(f[1]), parse_real(f[2]), parse_real(f[3]), parse_real(f[4]),
                           parse_real(f[5]), parse_real(f[6]), parse_real(f[7]), parse_real(f[8]), parse_real(f[9])});
      } else if (k == "region") {
        const auto f = split_ws(v);
        if (f.size() != 5) throw std::invalid_argument("expected 'name lat_min lat_max lon_min lon_max'");
        s.regions.push_back({f[0], parse_real(f[1]), parse_real(f[2]), parse_real(f[3]), parse_real(f[4])});
      } else if (k == "flooded") {
        std::stringstream ss(v);
        for (std::string tok; std::getline(ss, tok, ',');) {
          const auto t = split_ws(tok);
          if (t.size() != 1) throw std::invalid_argument("bad flooded list");
          s.flooded.push_back(t[0]);
        }
      } else {
        throw std::invalid_argument("unknown key '" + k + "'");
      }
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ScenarioError(where + ex.what());
    }
  }
  if (!have_start) throw ScenarioError(std::string(source_name) + ": missing 'start'");
  try {
    s.validate();
  } catch (const std::exception& ex) {
    throw ScenarioError(std::string(source_name) + ": " + ex.what());
  }
  return s;
}

ScenarioSpec read_scenario_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario spec '" + path.string() + "'");
  return read_scenario_spec(in, path.string());
}

void write_scenario_spec(const ScenarioSpec& s, std::ostream& out) {
  out << "[scenario]\n"
      << "start = " << format_time(s.start) << '\n'
      << "duration_s = " << s.duration_s << '\n'
      << "lat_min = " << format_real(s.grid.lat_min) << '\n'
      << "lon_min = " << format_real(s.grid.lon_min) << '\n'
      << "dlat = " << format_real(s.grid.dlat) << '\n'
      << "dlon = " << format_real(s.grid.dlon) << '\n'
      << "nrows = " << s.grid.nrows << '\n'
      << "ncols = " << s.grid.ncols << '\n'
      << "bt_cadence_s = " << s.bt_cadence_s << '\n'
      << "rain_cadence_s = " << s.rain_cadence_s << '\n'
      << "background_bt = " << format_real(s.background_bt_k) << '\n'
      << "rain_lag_s = " << s.rain_lag_s << '\n'
      << "bt_noise_k = " << format_real(s.bt_noise_k) << '\n'
      << "rain_noise_mmh = " << format_real(s.rain_noise_mmh) << '\n'
      << "wind_noise_mps = " << format_real(s.wind_noise_mps) << '\n'
      << "truth_t_deep = " << format_real(s.truth_t_deep) << '\n'
      << "sar_incidence_deg = " << format_real(s.sar_geometry.incidence_deg) << '\n'
      << "sar_rel_azimuth_deg = " << format_real(s.sar_geometry.rel_azimuth_deg) << '\n';
  for (const auto& w : s.wind_sources) {
    out << "wind_source = " << w.name << ' ' << (w.kind == WindSourceKind::SPEED ? "speed" : "nrcs") << ' '
        << w.first_s << ' ' << w.cadence_s << '\n';
  }
  for (const auto& c : s.cells) {
    out << "cell = " << c.birth_s << ' ' << format_real(c.lat) << ' ' << format_real(c.lon) << ' '
        << format_real(c.speed_mps) << ' ' << format_real(c.bearing_deg) << ' ' << format_real(c.min_bt_k) << ' '
        << format_real(c.radius_km) << ' ' << format_real(c.elongation) << ' ' << format_real(c.rain_peak_mmh) << ' '
        << format_real(c.wind_peak_mps) << '\n';
  }
  for (const auto& r : s.regions) {
    out << "region = " << r.name << ' ' << format_real(r.lat_min) << ' ' << format_real(r.lat_max) << ' '
        << format_real(r.lon_min) << ' ' << format_real(r.lon_max) << '\n';
  }
  if (!s.flooded.empty()) {
    out << "flooded = ";
    for (std::size_t i = 0; i < s.flooded.size(); ++i) out << (i ? "," : "") << s.flooded[i];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Outputs

std::string truth_csv(const TruthRecord& truth) {
  std::ostringstream out;
  out << "kind,cell,time,lat,lon,speed_mps,bearing_deg,bbox_lat_min,bbox_lat_max,bbox_lon_min,bbox_lon_max,region,note\n";
  for (const auto& s : truth.samples) {
    out << "track," << s.cell << ',' << format_time(s.time) << ',' << format_real(s.lat) << ',' << format_real(s.lon)
        << ',' << format_real(s.speed_mps) << ',' << format_real(s.bearing_deg) << ',';
    if (s.bbox) {
      out << format_real(s.bbox->lat_min) << ',' << format_real(s.bbox->lat_max) << ',' << format_real(s.bbox->lon_min)
          << ',' << format_real(s.bbox->lon_max);
    } else {
      out << ",,,";
    }
    out << ",,\n";
  }
  for (const auto& i : truth.intersections) {
    out << "intersect," << i.cell << ',' << format_time(i.time) << ",,,,,,,,," << i.region << ",\n";
  }
  for (const auto& f : truth.flooded) out << "flooded,,,,,,,,,,," << f << ",\n";
  for (const auto& n : truth.notices) {
    out << "notice," << n.cell << ',' << format_time(n.time) << ",,,,,,,,,," << n.text << '\n';
  }
  return std::move(out).str();
}

std::vector<std::filesystem::path> write_scenario(const ScenarioOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put_stack = [&](const GridStack& stack, const std::string& name) {
    const auto path = dir / name;
    write_gsf(stack, path);
    written.push_back(path);
  };
  put_stack(out.bt, "bt.gsf");
  put_stack(out.rain, "rain.gsf");
  for (const auto& w : out.wind) put_stack(w.stack, "wind_" + w.name + ".gsf");
  for (const auto& n : out.nrcs) put_stack(n.stack, "nrcs_" + n.name + ".gsf");
  const auto truth_path = dir / "truth.csv";
  write_file_atomic(truth_path, truth_csv(out.truth));
  written.push_back(truth_path);
  return written;
}

}  // namespace cswarn

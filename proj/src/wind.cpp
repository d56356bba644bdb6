#include "cswarn/wind.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cswarn {

namespace {
constexpr std::array<std::string_view, 4> kCategoryNames{"NONE", "WEAK", "MODERATE", "SEVERE"};
}

std::string_view to_string(WindCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

WindCategory parse_wind_category(std::string_view text) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == text) return static_cast<WindCategory>(i);
  }
  throw WindError("unknown wind category '" + std::string(text) + "'");
}

void WindBins::validate() const {
  if (!(edges[0] > 0.0 && edges[0] < edges[1] && edges[1] < edges[2]) || !std::isfinite(edges[2])) {
    throw WindError("wind bins must be positive and strictly increasing");
  }
}

WindCategory categorize(double speed_mps, const WindBins& bins) {
  if (!(speed_mps >= 0.0)) throw WindError("categorize: wind speed must be >= 0, got " + format_real(speed_mps));
  if (speed_mps >= bins.edges[2]) return WindCategory::SEVERE;
  if (speed_mps >= bins.edges[1]) return WindCategory::MODERATE;
  if (speed_mps >= bins.edges[0]) return WindCategory::WEAK;
  return WindCategory::NONE;
}

void GmfGeometry::validate() const {
  if (!(incidence_deg > 0.0 && incidence_deg < 90.0)) throw WindError("incidence angle must be in (0, 90) deg");
  if (!(rel_azimuth_deg >= 0.0 && rel_azimuth_deg < 360.0)) {
    throw WindError("relative azimuth must be in [0, 360) deg");
  }
}

double Synth1Gmf::sigma0(double speed_mps, const GmfGeometry&) const { return 0.001 * std::pow(1.0 + speed_mps, 1.5); }

double HarmonicGmf::sigma0(double speed_mps, const GmfGeometry& geometry) const {
  const double phi = geometry.rel_azimuth_deg * std::numbers::pi / 180.0;
  const double exponent = 1.2 + 0.01 * (geometry.incidence_deg - 30.0);
  return 0.001 * std::pow(1.0 + speed_mps, exponent) * (1.0 + 0.3 * std::cos(phi) + 0.2 * std::cos(2.0 * phi));
}

GmfRegistry GmfRegistry::with_builtin() {
  GmfRegistry r;
  r.add(std::make_shared<Synth1Gmf>());
  r.add(std::make_shared<HarmonicGmf>());
  return r;
}

void GmfRegistry::add(std::shared_ptr<const Gmf> gmf) {
  if (!gmf) throw WindError("null GMF");
  std::string key(gmf->name());
  if (models_.contains(key)) throw WindError("GMF '" + key + "' already registered");
  models_.emplace(std::move(key), std::move(gmf));
}

const Gmf& GmfRegistry::get(std::string_view name) const {
  auto it = models_.find(name);
  if (it == models_.end()) throw WindError("unknown GMF '" + std::string(name) + "'");
  return *it->second;
}

bool GmfRegistry::contains(std::string_view name) const { return models_.find(name) != models_.end(); }

std::vector<std::string> GmfRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : models_) out.push_back(k);
  return out;
}

double gmf_forward(const Gmf& gmf, double speed_mps, const GmfGeometry& geometry) {
  if (!(speed_mps >= 0.0 && speed_mps <= kMaxForwardSpeed)) {
    throw WindError("gmf_forward: speed " + format_real(speed_mps) + " outside [0, 60] m/s");
  }
  geometry.validate();
  const double s = gmf.sigma0(speed_mps, geometry);
  if (!(s > 0.0) || !std::isfinite(s)) throw WindError("GMF '" + std::string(gmf.name()) + "' returned non-positive sigma0");
  return s;
}

Inversion gmf_invert(const Gmf& gmf, double sigma0, const GmfGeometry& geometry, double v_max) {
  if (!(v_max > 0.0 && v_max <= kMaxForwardSpeed)) throw WindError("v_max must be in (0, 60] m/s");
  if (!std::isfinite(sigma0)) throw WindError("gmf_invert: non-finite sigma0");
  const double lo_sigma = gmf_forward(gmf, 0.0, geometry);
  const double hi_sigma = gmf_forward(gmf, v_max, geometry);
  if (sigma0 < lo_sigma) return {0.0, ClipFlag::LOW};
  if (sigma0 > hi_sigma) return {v_max, ClipFlag::HIGH};
  if (sigma0 == lo_sigma) return {0.0, ClipFlag::NONE};
  if (sigma0 == hi_sigma) return {v_max, ClipFlag::NONE};

  double lo = 0.0, hi = v_max;
  while (hi - lo > kInversionTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (gmf.sigma0(mid, geometry) < sigma0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), ClipFlag::NONE};
}

GeometryField GeometryField::uniform(const Geometry& grid, const GmfGeometry& geometry) {
  geometry.validate();
  return GeometryField{grid.nrows, grid.ncols, std::vector<GmfGeometry>(grid.size(), geometry)};
}

WindRetrieval retrieve_wind_grid(const GeoGrid& nrcs, const GeometryField& geometry, const Gmf& gmf, double v_max) {
  if (nrcs.variable() != Variable::NRCS) throw WindError("retrieve_wind_grid: expected NRCS grid");
  if (geometry.nrows != nrcs.nrows() || geometry.ncols != nrcs.ncols() ||
      geometry.cells.size() != nrcs.geometry().size()) {
    throw WindError("retrieve_wind_grid: geometry field shape " + std::to_string(geometry.nrows) + "x" +
                    std::to_string(geometry.ncols) + " does not match NRCS grid " + std::to_string(nrcs.nrows()) +
                    "x" + std::to_string(nrcs.ncols()));
  }
  WindRetrieval out;
  std::vector<double> values(nrcs.geometry().size(), nrcs.nodata());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!nrcs.valid_at(i)) continue;
    const auto inv = gmf_invert(gmf, nrcs[i], geometry.cells[i], v_max);
    values[i] = inv.speed_mps;
    if (inv.clip == ClipFlag::LOW) ++out.clipped_low;
    if (inv.clip == ClipFlag::HIGH) ++out.clipped_high;
  }
  out.wind = GeoGrid(Variable::WIND_SPEED, nrcs.time(), nrcs.geometry(), std::move(values), nrcs.nodata());
  return out;
}

CategoryGrid categorize_grid(const GeoGrid& wind, const WindBins& bins) {
  if (wind.variable() != Variable::WIND_SPEED) throw WindError("categorize_grid: expected WIND_SPEED grid");
  CategoryGrid out{wind.time(), wind.geometry(), {}};
  out.cells.reserve(wind.geometry().size());
  for (double v : wind.values()) {
    if (wind.is_valid(v)) {
      out.cells.emplace_back(categorize(v, bins));
    } else {
      out.cells.emplace_back(std::nullopt);
    }
  }
  return out;
}

RegionWind region_max_category(const std::vector<std::vector<CategoryGrid>>& sources, const RegionBox& region,
                               Timestamp window_start, Timestamp window_end) {
  RegionWind out;
  for (const auto& frames : sources) {
    for (const auto& frame : frames) {
      if (frame.time < window_start || frame.time >= window_end) continue;
      for (std::size_t idx : cells_in_box(frame.geometry, region)) {
        const auto& c = frame.cells[idx];
        if (!c) continue;
        out.no_observation = false;
        out.category = std::max(out.category, *c);
      }
    }
  }
  return out;
}

}  // namespace cswarn

#include "cswarn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace cswarn {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::int64_t parse_int(const std::string& text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("bad integer '" + text + "'");
  }
  return v;
}

std::size_t parse_size(const std::string& text) {
  const auto v = parse_int(text);
  if (v < 0) throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<KeyValueEntry> parse_key_value(std::istream& in, std::string_view source_name) {
  std::vector<KeyValueEntry> out;
  std::string section;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(std::string(source_name) + ":" + std::to_string(number) + ": malformed section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(source_name) + ":" + std::to_string(number) + ": expected key = value");
    }
    KeyValueEntry e{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                    number};
    if (e.key.empty()) throw ConfigError(std::string(source_name) + ":" + std::to_string(number) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

void Config::validate(const GmfRegistry& registry) const {
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(std::string(key) + ": " + what);
  };
  require(t_deep >= 100.0 && t_deep <= 400.0, "detection.t_deep", "must be within [100, 400] K");
  require(min_area_px >= 1, "detection.min_area_px", "must be >= 1");
  require(registry.contains(gmf), "wind.gmf", "unknown model '" + gmf + "'");
  require(v_max > 0.0 && v_max <= kMaxForwardSpeed, "wind.v_max", "must be in (0, 60] m/s");
  try {
    bins.validate();
  } catch (const std::exception& e) {
    require(false, "wind.bins", e.what());
  }
  require(geometry.incidence_deg > 0.0 && geometry.incidence_deg < 90.0, "wind.incidence_deg", "must be in (0, 90)");
  require(geometry.rel_azimuth_deg >= 0.0 && geometry.rel_azimuth_deg < 360.0, "wind.rel_azimuth_deg",
          "must be in [0, 360)");
  require(r_heavy > 0.0, "rain.r_heavy", "must be > 0");
  require(persistence_h > 0.0, "rain.persistence_h", "must be > 0");
  require(fraction > 0.0 && fraction <= 1.0, "fusion.fraction", "must be in (0, 1]");
  require(epoch_s > 0, "fusion.epoch_s", "must be > 0");
  require(window_s > 0, "fusion.window_s", "must be > 0");
  require(std::isfinite(threshold_db), "floodmap.threshold_db", "must be finite");
  require(min_region_px >= 1, "floodmap.min_region_px", "must be >= 1");
  require(f_flood > 0.0 && f_flood <= 1.0, "floodmap.f_flood", "must be in (0, 1]");
  require(max_gap_km > 0.0, "tracking.max_gap_km", "must be > 0");
  require(fit_window >= 2, "tracking.fit_window", "must be >= 2");
}

FusionSettings Config::fusion_settings() const {
  FusionSettings s;
  s.t_deep = t_deep;
  s.min_area_px = min_area_px;
  s.bins = bins;
  s.thresholds = FusionThresholds{fraction, r_heavy, persistence_h};
  s.epoch_step = Seconds{epoch_s};
  s.window = Seconds{window_s};
  s.max_gap_km = max_gap_km;
  s.fit_window = fit_window;
  return s;
}

Config parse_config(std::istream& in, std::string_view source_name, const GmfRegistry& registry) {
  Config c;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"detection.t_deep", [&](const std::string& v) { c.t_deep = parse_real(v); }},
      {"detection.min_area_px", [&](const std::string& v) { c.min_area_px = parse_size(v); }},
      {"wind.gmf", [&](const std::string& v) { c.gmf = v; }},
      {"wind.v_max", [&](const std::string& v) { c.v_max = parse_real(v); }},
      {"wind.bins",
       [&](const std::string& v) {
         std::vector<double> edges;
         std::stringstream ss(v);
         for (std::string tok; std::getline(ss, tok, ',');) edges.push_back(parse_real(trim(tok)));
         if (edges.size() != 3) throw std::invalid_argument("expected three comma-separated edges");
         c.bins.edges = {edges[0], edges[1], edges[2]};
       }},
      {"wind.incidence_deg", [&](const std::string& v) { c.geometry.incidence_deg = parse_real(v); }},
      {"wind.rel_azimuth_deg", [&](const std::string& v) { c.geometry.rel_azimuth_deg = parse_real(v); }},
      {"rain.r_heavy", [&](const std::string& v) { c.r_heavy = parse_real(v); }},
      {"rain.persistence_h", [&](const std::string& v) { c.persistence_h = parse_real(v); }},
      {"fusion.fraction", [&](const std::string& v) { c.fraction = parse_real(v); }},
      {"fusion.epoch_s", [&](const std::string& v) { c.epoch_s = parse_int(v); }},
      {"fusion.window_s", [&](const std::string& v) { c.window_s = parse_int(v); }},
      {"floodmap.threshold_db", [&](const std::string& v) { c.threshold_db = parse_real(v); }},
      {"floodmap.min_region_px", [&](const std::string& v) { c.min_region_px = parse_size(v); }},
      {"floodmap.f_flood", [&](const std::string& v) { c.f_flood = parse_real(v); }},
      {"tracking.max_gap_km", [&](const std::string& v) { c.max_gap_km = parse_real(v); }},
      {"tracking.fit_window", [&](const std::string& v) { c.fit_window = parse_size(v); }},
  };
  std::set<std::string> seen;
  for (const auto& e : parse_key_value(in, source_name)) {
    const std::string full = e.section + "." + e.key;
    const std::string where = std::string(source_name) + ":" + std::to_string(e.line) + ": ";
    auto it = setters.find(full);
    if (it == setters.end()) throw ConfigError(where + "unknown key '" + full + "'");
    if (!seen.insert(full).second) throw ConfigError(where + "duplicate key '" + full + "'");
    try {
      it->second(e.value);
    } catch (const std::exception& ex) {
      throw ConfigError(where + full + ": " + ex.what());
    }
  }
  try {
    c.validate(registry);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source_name) + ": " + e.what());
  }
  return c;
}

Config read_config(const std::filesystem::path& path, const GmfRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.string(), registry);
}

void write_config(const Config& c, std::ostream& out) {
  out << "[detection]\n"
      << "t_deep = " << format_real(c.t_deep) << "\n"
      << "min_area_px = " << c.min_area_px << "\n\n"
      << "[wind]\n"
      << "gmf = " << c.gmf << "\n"
      << "v_max = " << format_real(c.v_max) << "\n"
      << "bins = " << format_real(c.bins.edges[0]) << ',' << format_real(c.bins.edges[1]) << ','
      << format_real(c.bins.edges[2]) << "\n"
      << "incidence_deg = " << format_real(c.geometry.incidence_deg) << "\n"
      << "rel_azimuth_deg = " << format_real(c.geometry.rel_azimuth_deg) << "\n\n"
      << "[rain]\n"
      << "r_heavy = " << format_real(c.r_heavy) << "\n"
      << "persistence_h = " << format_real(c.persistence_h) << "\n\n"
      << "[fusion]\n"
      << "fraction = " << format_real(c.fraction) << "\n"
      << "epoch_s = " << c.epoch_s << "\n"
      << "window_s = " << c.window_s << "\n\n"
      << "[floodmap]\n"
      << "threshold_db = " << format_real(c.threshold_db) << "\n"
      << "min_region_px = " << c.min_region_px << "\n"
      << "f_flood = " << format_real(c.f_flood) << "\n\n"
      << "[tracking]\n"
      << "max_gap_km = " << format_real(c.max_gap_km) << "\n"
      << "fit_window = " << c.fit_window << "\n";
}

}  // namespace cswarn

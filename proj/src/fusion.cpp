#include "cswarn/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <array>
#include <istream>
#include <set>
#include <sstream>

namespace cswarn {

namespace {

constexpr std::array<std::string_view, 4> kLevelNames{"NONE", "WATCH", "WARNING", "SEVERE"};

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw FusionError(context + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(WarningLevel level) { return kLevelNames[static_cast<std::size_t>(level)]; }

WarningLevel parse_warning_level(std::string_view text) {
  for (std::size_t i = 0; i < kLevelNames.size(); ++i) {
    if (kLevelNames[i] == text) return static_cast<WarningLevel>(i);
  }
  throw FusionError("unknown warning level '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Rules

RuleSet RuleSet::standard(const FusionThresholds& th) {
  auto deep = [th](const RegionIndicators& i) { return i.bt_observed && i.deep_cloud_fraction >= th.deep_fraction; };
  auto heavy = [th](const RegionIndicators& i) { return i.rain_observed && i.max_rain_mmh >= th.r_heavy_mmh; };
  auto persistent = [th](const RegionIndicators& i) {
    return i.rain_observed && i.rain_persistence_h >= th.persistence_h;
  };
  auto wind_at_least = [](WindCategory c) {
    return [c](const RegionIndicators& i) { return !i.wind_no_observation && i.wind_cat >= c; };
  };
  auto moderate = wind_at_least(WindCategory::MODERATE);
  auto severe = wind_at_least(WindCategory::SEVERE);

  RuleSet set;
  set.rules.push_back({"R1", WarningLevel::WATCH, [=](const RegionIndicators& i) { return deep(i) || moderate(i); }});
  set.rules.push_back({"R2", WarningLevel::WARNING, [=](const RegionIndicators& i) {
                         return (deep(i) && heavy(i)) || (severe(i) && i.approach_s.has_value());
                       }});
  set.rules.push_back({"R3", WarningLevel::SEVERE, [=](const RegionIndicators& i) {
                         return deep(i) && heavy(i) && persistent(i) && severe(i);
                       }});
  return set;
}

RuleSet RuleSet::without(std::string_view id) const {
  RuleSet out;
  for (const auto& r : rules) {
    if (r.id != id) out.rules.push_back(r);
  }
  return out;
}

WarningReport decide(const RegionIndicators& ind, const RuleSet& rules) {
  WarningReport report;
  report.region = ind.region;
  report.epoch = ind.epoch;
  report.indicators = ind;
  for (const auto& rule : rules.rules) {
    if (!rule.satisfied(ind)) continue;
    report.triggered_rules.push_back(rule.id);
    report.level = std::max(report.level, rule.level);
  }
  if (ind.approach_s) report.lead_time_s = std::clamp<std::int64_t>(*ind.approach_s, 0, kApproachHorizonS);
  return report;
}

// ---------------------------------------------------------------------------
// Indicators

RegionIndicators build_indicators(Timestamp epoch, const RegionBox& region, const DetectionFrame* detections,
                                  const std::vector<Track>& tracks,
                                  const std::vector<std::vector<CategoryGrid>>& wind_sources,
                                  const RainEvidence& rain, const IndicatorParams& params) {
  RegionIndicators ind;
  ind.region = region.name;
  ind.epoch = epoch;
  const auto window = TimeWindow::trailing(epoch, params.window);

  if (detections && window.contains(detections->bt.time())) {
    const auto& bt = detections->bt;
    const auto cells = cells_in_box(bt.geometry(), region);
    std::vector<char> member(bt.geometry().size(), 0);
    for (const auto& obj : detections->objects) {
      for (std::size_t idx : obj.cells) member[idx] = 1;
    }
    std::size_t valid = 0, deep = 0;
    for (std::size_t idx : cells) {
      if (!bt.valid_at(idx)) continue;
      ++valid;
      if (!member[idx]) continue;
      ++deep;
      ind.min_bt_k = std::min(ind.min_bt_k.value_or(bt[idx]), bt[idx]);
    }
    if (valid > 0) {
      ind.bt_observed = true;
      ind.sources.bt = 1;
      ind.deep_cloud_fraction = static_cast<double>(deep) / static_cast<double>(valid);
    }
  }

  // Approaching tracks carry their wind: each wind frame is read inside the
  // track's bbox observed nearest to that frame's time.
  std::vector<const Track*> approaching;
  for (const auto& track : tracks) {
    if (track.observations.size() < 2 || !window.contains(track.last().time)) continue;
    const auto eta = time_to_region(track, region, params.fit_window);
    if (!eta) continue;
    ind.approach_s = std::min(ind.approach_s.value_or(*eta), *eta);
    approaching.push_back(&track);
  }

  for (const auto& source : wind_sources) {
    bool seen = false;
    for (const auto& frame : source) {
      if (!window.contains(frame.time)) continue;
      std::vector<RegionBox> boxes{region};
      for (const Track* track : approaching) {
        const CSObject* nearest = nullptr;
        for (const auto& obs : track->observations) {
          if (!nearest || abs(obs.time - frame.time) < abs(nearest->time - frame.time)) nearest = &obs;
        }
        if (nearest && abs(nearest->time - frame.time) <= params.track_match) boxes.push_back(nearest->bbox);
      }
      for (const auto& box : boxes) {
        const auto w = region_max_category({{frame}}, box, window.start, window.end);
        if (w.no_observation) continue;
        seen = true;
        ind.wind_cat = std::max(ind.wind_cat, w.category);
      }
    }
    if (seen) {
      ind.wind_no_observation = false;
      ++ind.sources.wind;
    }
  }

  if (rain.stats && rain.stats->observed) {
    ind.rain_observed = true;
    ind.max_rain_mmh = rain.stats->max_rate_mmh;
    ind.rain_persistence_h = rain.stats->persistence_h;
  }
  ind.sources.rain = rain.sources_observed;
  return ind;
}

// ---------------------------------------------------------------------------
// Engine

FusionEngine::FusionEngine(FusionInputs inputs, std::vector<RegionBox> regions, FusionSettings settings)
    : FusionEngine(std::move(inputs), std::move(regions), settings, RuleSet::standard(settings.thresholds)) {}

FusionEngine::FusionEngine(FusionInputs inputs, std::vector<RegionBox> regions, FusionSettings settings,
                           RuleSet rules)
    : settings_(settings),
      rules_(std::move(rules)),
      regions_(std::move(regions)),
      bt_(std::move(inputs.bt)),
      tracker_(settings.max_gap_km, settings.fit_window) {
  if (settings_.epoch_step.count() <= 0 || settings_.window.count() <= 0) {
    throw FusionError("epoch step and window must be positive");
  }
  settings_.bins.validate();
  std::sort(regions_.begin(), regions_.end(), [](const RegionBox& a, const RegionBox& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < regions_.size(); ++i) {
    if (regions_[i].name == regions_[i - 1].name) throw FusionError("duplicate region name '" + regions_[i].name + "'");
  }
  if (regions_.empty()) return;

  if (bt_.empty() || bt_.variable() != Variable::BT) throw FusionError("fusion needs a non-empty BT stack");
  const Geometry& common = bt_.geometry();
  for (const auto& r : regions_) {
    if (!r.valid()) throw FusionError("region '" + r.name + "' has an invalid box");
    if (cells_in_box(common, r).empty()) throw FusionError("unknown region '" + r.name + "': no BT cells inside");
  }

  auto collocate = [&](const GridStack& stack) {
    GridStack out;
    for (const auto& frame : stack) out.push_back(resample_nn(frame, common));
    return out;
  };
  for (const auto& src : inputs.rain_sources) {
    if (src.empty()) continue;
    if (src.variable() != Variable::RAIN_RATE) throw FusionError("rain source is not RAIN_RATE");
    auto aligned = collocate(src);
    rain_ = rain_ ? merge_rain_sources(*rain_, aligned) : aligned;
    rain_sources_.push_back(std::move(aligned));
  }
  for (const auto& src : inputs.wind_sources) {
    if (src.speed.empty()) continue;
    if (src.speed.variable() != Variable::WIND_SPEED) {
      throw FusionError("wind source '" + src.name + "' is not WIND_SPEED");
    }
    std::vector<CategoryGrid> cats;
    for (const auto& frame : src.speed) cats.push_back(categorize_grid(resample_nn(frame, common), settings_.bins));
    wind_.push_back(std::move(cats));
  }
}

std::vector<WarningReport> FusionEngine::run_epoch(Timestamp epoch) {
  if (last_epoch_ && epoch <= *last_epoch_) throw FusionError("epochs must be strictly increasing");
  last_epoch_ = epoch;
  std::vector<WarningReport> reports;
  if (regions_.empty()) return reports;

  const std::string epoch_text = format_time(epoch);
  while (next_bt_ < bt_.size() && bt_[next_bt_].time() <= epoch) {
    const auto& frame = bt_[next_bt_++];
    with_context("BT frame " + format_time(frame.time()), [&] {
      auto objects = detect_objects(frame, settings_.t_deep, settings_.min_area_px);
      tracker_.update(frame.time(), objects);
      latest_ = DetectionFrame{frame, std::move(objects)};
    });
  }

  const auto window = TimeWindow::trailing(epoch, settings_.window);
  const IndicatorParams params{settings_.window, settings_.fit_window, settings_.epoch_step};
  const std::optional<Seconds> cadence_fallback = settings_.epoch_step;
  for (const auto& region : regions_) {
    with_context("region " + region.name + " at " + epoch_text, [&] {
      RainEvidence rain;
      if (rain_) {
        rain.stats = region_rain_stats(*rain_, region, window, settings_.thresholds.r_heavy_mmh,
                                       rain_->size() == 1 ? cadence_fallback : std::nullopt);
        const auto cells = cells_in_box(rain_->geometry(), region);
        for (const auto& src : rain_sources_) {
          const bool seen = std::any_of(src.begin(), src.end(), [&](const GeoGrid& f) {
            return window.contains(f.time()) &&
                   std::any_of(cells.begin(), cells.end(), [&](std::size_t i) { return f.valid_at(i); });
          });
          if (seen) ++rain.sources_observed;
        }
      }
      const auto ind = build_indicators(epoch, region, latest_ ? &*latest_ : nullptr, tracker_.active(), wind_, rain,
                                        params);
      reports.push_back(decide(ind, rules_));
    });
  }
  return reports;
}

std::vector<WarningReport> FusionEngine::run_all() {
  std::vector<WarningReport> all;
  if (regions_.empty() || bt_.empty()) return all;
  for (Timestamp t = bt_.front().time(); t <= bt_.back().time(); t += settings_.epoch_step) {
    auto reports = run_epoch(t);
    all.insert(all.end(), std::make_move_iterator(reports.begin()), std::make_move_iterator(reports.end()));
  }
  return all;
}

// ---------------------------------------------------------------------------
// CSV

std::string warning_csv_header() {
  return "epoch,region,level,lead_time_s,triggered_rules,deep_cloud_fraction,min_bt,wind_cat,max_rain_mmh,"
         "rain_persistence_h,approach_s";
}

std::string to_csv_line(const WarningReport& r) {
  const auto& i = r.indicators;
  std::string rules;
  for (std::size_t k = 0; k < r.triggered_rules.size(); ++k) {
    if (k) rules.push_back(';');
    rules += r.triggered_rules[k];
  }
  std::ostringstream out;
  out << format_time(r.epoch) << ',' << r.region << ',' << to_string(r.level) << ','
      << (r.lead_time_s ? std::to_string(*r.lead_time_s) : "") << ',' << rules << ','
      << format_real(i.deep_cloud_fraction) << ',' << (i.min_bt_k ? format_real(*i.min_bt_k) : "") << ','
      << to_string(i.wind_cat) << ',' << format_real(i.max_rain_mmh) << ',' << format_real(i.rain_persistence_h)
      << ',' << (i.approach_s ? std::to_string(*i.approach_s) : "");
  return std::move(out).str();
}

std::string warnings_csv(const std::vector<WarningReport>& reports) {
  std::string out = warning_csv_header() + '\n';
  for (const auto& r : reports) out += to_csv_line(r) + '\n';
  return out;
}

std::vector<WarningReport> read_warnings_csv(std::istream& in, std::string_view source_name) {
  std::vector<WarningReport> out;
  std::string line;
  std::size_t number = 0;
  auto fail = [&](const std::string& what) {
    throw FusionError(std::string(source_name) + ":" + std::to_string(number) + ": " + what);
  };
  if (!std::getline(in, line)) throw FusionError(std::string(source_name) + ": empty warnings file");
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != warning_csv_header()) fail("unexpected header");
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) fail("expected 11 fields, got " + std::to_string(f.size()));
    try {
      WarningReport r;
      r.epoch = parse_time(f[0]);
      r.region = f[1];
      r.level = parse_warning_level(f[2]);
      if (!f[3].empty()) r.lead_time_s = static_cast<std::int64_t>(parse_real(f[3]));
      if (!f[4].empty()) r.triggered_rules = split(f[4], ';');
      auto& i = r.indicators;
      i.region = r.region;
      i.epoch = r.epoch;
      i.deep_cloud_fraction = parse_real(f[5]);
      if (!f[6].empty()) i.min_bt_k = parse_real(f[6]);
      i.wind_cat = parse_wind_category(f[7]);
      i.max_rain_mmh = parse_real(f[8]);
      i.rain_persistence_h = parse_real(f[9]);
      if (!f[10].empty()) i.approach_s = static_cast<std::int64_t>(parse_real(f[10]));
      out.push_back(std::move(r));
    } catch (const FusionError&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return out;
}

}  // namespace cswarn

#include "cswarn/precip.hpp"

#include <algorithm>
#include <cmath>

namespace cswarn {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  // b > 0
  const std::int64_t q = a / b;
  return (a % b != 0 && a > 0) ? q + 1 : q;
}

void require_rain_rate(const GridStack& stack, const char* who) {
  if (stack.empty()) throw PrecipError(std::string(who) + ": empty stack");
  if (stack.variable() != Variable::RAIN_RATE) {
    throw PrecipError(std::string(who) + ": expected RAIN_RATE stack, got " + std::string(to_string(stack.variable())));
  }
}

std::int64_t expected_slots(const GridStack& stack, const TimeWindow& window, Seconds cadence) {
  const std::int64_t anchor = stack.front().time().time_since_epoch().count();
  const std::int64_t step = cadence.count();
  const std::int64_t k_min = ceil_div(window.start.time_since_epoch().count() - anchor, step);
  const std::int64_t k_max = ceil_div(window.end.time_since_epoch().count() - anchor, step) - 1;
  return std::max<std::int64_t>(0, k_max - k_min + 1);
}

}  // namespace

Seconds stack_cadence(const GridStack& stack, std::optional<Seconds> fallback) {
  if (stack.empty()) throw PrecipError("cadence of an empty stack");
  if (fallback && fallback->count() <= 0) throw PrecipError("cadence must be positive");
  if (stack.size() == 1) {
    if (!fallback) throw PrecipError("single-frame stack needs an explicit cadence");
    return *fallback;
  }
  Seconds step = fallback.value_or(Seconds::max());
  if (!fallback) {
    for (std::size_t i = 1; i < stack.size(); ++i) step = std::min(step, stack[i].time() - stack[i - 1].time());
  }
  for (std::size_t i = 1; i < stack.size(); ++i) {
    const auto gap = stack[i].time() - stack[i - 1].time();
    if (gap.count() % step.count() != 0) {
      throw PrecipError("non-uniform cadence: gap of " + std::to_string(gap.count()) + " s before " +
                        format_time(stack[i].time()) + " is not a multiple of " + std::to_string(step.count()) + " s");
    }
  }
  return step;
}

Accumulation accumulate(const GridStack& rates, const TimeWindow& window, std::optional<Seconds> cadence) {
  require_rain_rate(rates, "accumulate");
  if (window.end <= window.start) throw PrecipError("accumulate: empty window");
  const Seconds step = stack_cadence(rates, cadence);
  const double step_h = static_cast<double>(step.count()) / 3600.0;
  const auto& geom = rates.geometry();

  std::vector<double> depth(geom.size(), 0.0);
  std::vector<std::size_t> valid(geom.size(), 0);
  std::size_t used = 0;
  for (const auto& frame : rates) {
    if (!window.contains(frame.time())) continue;
    ++used;
    for (std::size_t i = 0; i < geom.size(); ++i) {
      if (!frame.valid_at(i)) continue;
      depth[i] += frame[i] * step_h;
      ++valid[i];
    }
  }
  const auto slots = expected_slots(rates, window, step);
  std::vector<double> missing(geom.size(), 1.0);
  if (slots > 0) {
    for (std::size_t i = 0; i < geom.size(); ++i) {
      missing[i] = 1.0 - static_cast<double>(valid[i]) / static_cast<double>(slots);
    }
  }
  return Accumulation{GeoGrid(Variable::RAIN_ACCUM, window.start, geom, std::move(depth), rates.front().nodata()),
                      std::move(missing), used};
}

GeoGrid heavy_mask(const GeoGrid& rate, double r_heavy) {
  if (rate.variable() != Variable::RAIN_RATE) throw PrecipError("heavy_mask: expected RAIN_RATE grid");
  std::vector<double> out(rate.geometry().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = rate.valid_at(i) ? (rate[i] >= r_heavy ? 1.0 : 0.0) : rate.nodata();
  }
  return GeoGrid(Variable::FLOOD_MASK, rate.time(), rate.geometry(), std::move(out), rate.nodata());
}

RainStats region_rain_stats(const GridStack& rates, const RegionBox& region, const TimeWindow& window, double r_heavy,
                            std::optional<Seconds> cadence) {
  require_rain_rate(rates, "region_rain_stats");
  const auto cells = cells_in_box(rates.geometry(), region);
  if (cells.empty()) throw PrecipError("region '" + region.name + "' lies outside the rain grid");

  RainStats stats;
  stats.region = region.name;
  stats.window_start = window.start;
  stats.window_end = window.end;

  const auto acc = accumulate(rates, window, cadence);
  const Seconds step = stack_cadence(rates, cadence);
  double missing_sum = 0.0;
  for (std::size_t idx : cells) {
    stats.accum_mm = std::max(stats.accum_mm, acc.depth[idx]);
    missing_sum += acc.missing_fraction[idx];
  }
  stats.missing_fraction = missing_sum / static_cast<double>(cells.size());

  std::size_t run = 0, longest = 0;
  std::optional<Timestamp> previous;
  for (const auto& frame : rates) {
    if (!window.contains(frame.time())) continue;
    if (previous && frame.time() - *previous != step) run = 0;
    previous = frame.time();

    bool any = false;
    double frame_max = 0.0;
    for (std::size_t idx : cells) {
      if (!frame.valid_at(idx)) continue;
      any = true;
      frame_max = std::max(frame_max, frame[idx]);
    }
    if (!any) {
      run = 0;
      continue;
    }
    stats.observed = true;
    stats.max_rate_mmh = std::max(stats.max_rate_mmh, frame_max);
    run = frame_max >= r_heavy ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  const double window_h = static_cast<double>(window.length().count()) / 3600.0;
  stats.persistence_h = std::min(window_h, static_cast<double>(longest) * static_cast<double>(step.count()) / 3600.0);
  return stats;
}

GridStack merge_rain_sources(const GridStack& a, const GridStack& b) {
  require_rain_rate(a, "merge_rain_sources");
  require_rain_rate(b, "merge_rain_sources");
  if (!(a.geometry() == b.geometry())) throw PrecipError("merge_rain_sources: sources not collocated");
  GridStack out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].time() < b[j].time())) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].time() < a[i].time()) {
      out.push_back(b[j++]);
    } else {
      const auto& fa = a[i++];
      const auto& fb = b[j++];
      std::vector<double> v(fa.geometry().size(), fa.nodata());
      for (std::size_t k = 0; k < v.size(); ++k) {
        const bool va = fa.valid_at(k), vb = fb.valid_at(k);
        if (va && vb) {
          v[k] = std::max(fa[k], fb[k]);
        } else if (va) {
          v[k] = fa[k];
        } else if (vb) {
          v[k] = fb[k];
        }
      }
      out.push_back(GeoGrid(Variable::RAIN_RATE, fa.time(), fa.geometry(), std::move(v), fa.nodata()));
    }
  }
  return out;
}

std::string rain_stats_csv_header() {
  return "region,window_start,window_end,max_rate_mmh,accum_mm,persistence_h,missing_fraction";
}

std::string to_csv_line(const RainStats& s) {
  return s.region + ',' + format_time(s.window_start) + ',' + format_time(s.window_end) + ',' +
         format_real(s.max_rate_mmh) + ',' + format_real(s.accum_mm) + ',' + format_real(s.persistence_h) + ',' +
         format_real(s.missing_fraction);
}

}  // namespace cswarn

#include "cswarn/floodmap.hpp"

#include <algorithm>
#include <cmath>

#include "cswarn/convection.hpp"

namespace cswarn {

LogRatio log_ratio_db(const GeoGrid& flood, const GeoGrid& reference) {
  if (flood.variable() != Variable::NRCS || reference.variable() != Variable::NRCS) {
    throw FloodError("log_ratio_db: both images must be NRCS");
  }
  if (!(flood.geometry() == reference.geometry())) throw FloodError("log_ratio_db: flood and reference geometry differ");
  LogRatio out;
  out.reference_time = reference.time();
  std::vector<double> values(flood.geometry().size(), flood.nodata());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!flood.valid_at(i) || !reference.valid_at(i)) continue;
    // Grid construction already rejects non-positive NRCS; guards raw inputs anyway.
    if (!(flood[i] > 0.0) || !(reference[i] > 0.0)) {
      ++out.nonpositive_cells;
      continue;
    }
    values[i] = 10.0 * std::log10(flood[i] / reference[i]);
  }
  out.ratio_db = GeoGrid(Variable::LOG_RATIO_DB, flood.time(), flood.geometry(), std::move(values), flood.nodata());
  return out;
}

FloodMask flood_mask(const GeoGrid& ratio_db, double threshold_db, std::size_t min_region_px) {
  if (ratio_db.variable() != Variable::LOG_RATIO_DB) throw FloodError("flood_mask: expected LOG_RATIO_DB grid");
  if (!std::isfinite(threshold_db)) throw FloodError("flood_mask: threshold must be finite");
  std::vector<double> raw(ratio_db.geometry().size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = ratio_db.valid_at(i) ? (ratio_db[i] <= threshold_db ? 1.0 : 0.0) : ratio_db.nodata();
  }
  GeoGrid candidate(Variable::FLOOD_MASK, ratio_db.time(), ratio_db.geometry(), raw, ratio_db.nodata());

  std::vector<double> kept(raw);
  for (double& v : kept) {
    if (v == 1.0) v = 0.0;
  }
  for (const auto& region : label_components(candidate, min_region_px)) {
    for (std::size_t idx : region.cells) kept[idx] = 1.0;
  }
  FloodMask out;
  out.mask = GeoGrid(Variable::FLOOD_MASK, ratio_db.time(), ratio_db.geometry(), std::move(kept), ratio_db.nodata());
  out.threshold_db = threshold_db;
  out.min_region_px = min_region_px;
  return out;
}

FloodMask flood_mask(const LogRatio& ratio, double threshold_db, std::size_t min_region_px) {
  auto out = flood_mask(ratio.ratio_db, threshold_db, min_region_px);
  out.reference_time = ratio.reference_time;
  return out;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::HIT: return "hit";
    case Outcome::MISS: return "miss";
    case Outcome::FALSE_ALARM: return "false_alarm";
    case Outcome::CORRECT_NEGATIVE: return "correct_negative";
  }
  return "?";
}

std::optional<double> ValidationScore::pod() const {
  if (hits + misses == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(hits + misses);
}

std::optional<double> ValidationScore::far() const {
  if (hits + false_alarms == 0) return std::nullopt;
  return static_cast<double>(false_alarms) / static_cast<double>(hits + false_alarms);
}

ValidationScore validate(const std::vector<WarningReport>& warnings, const FloodMask& mask,
                         const std::vector<RegionBox>& regions, double f_flood) {
  if (!(f_flood > 0.0 && f_flood <= 1.0)) throw FloodError("f_flood must be in (0, 1]");
  const Timestamp flood_time = mask.mask.time();
  auto in_window = [&](const WarningReport& r) {
    return r.epoch <= flood_time && (!mask.reference_time || r.epoch > *mask.reference_time);
  };
  if (std::none_of(warnings.begin(), warnings.end(), in_window)) {
    throw FloodError("validate: no warning reports inside the mask's epoch window");
  }

  ValidationScore score;
  for (const auto& region : regions) {
    RegionOutcome row;
    row.region = region.name;
    std::size_t valid = 0, flooded = 0;
    for (std::size_t idx : cells_in_box(mask.mask.geometry(), region)) {
      if (!mask.mask.valid_at(idx)) continue;
      ++valid;
      if (mask.mask[idx] == 1.0) ++flooded;
    }
    row.flooded = valid > 0 && static_cast<double>(flooded) >= f_flood * static_cast<double>(valid);
    row.warned = std::any_of(warnings.begin(), warnings.end(), [&](const WarningReport& r) {
      return r.region == region.name && in_window(r) && r.level >= WarningLevel::WARNING;
    });
    if (row.flooded && row.warned) {
      row.outcome = Outcome::HIT;
      ++score.hits;
    } else if (row.flooded) {
      row.outcome = Outcome::MISS;
      ++score.misses;
    } else if (row.warned) {
      row.outcome = Outcome::FALSE_ALARM;
      ++score.false_alarms;
    } else {
      ++score.correct_negatives;
    }
    score.regions.push_back(std::move(row));
  }
  return score;
}

std::string validation_csv(const ValidationScore& score) {
  std::string out = "region,flooded,warned,outcome\n";
  for (const auto& r : score.regions) {
    out += r.region + ',' + (r.flooded ? "1" : "0") + ',' + (r.warned ? "1" : "0") + ',' +
           std::string(to_string(r.outcome)) + '\n';
  }
  return out;
}

}  // namespace cswarn

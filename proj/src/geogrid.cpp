#include "cswarn/geogrid.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace cswarn {

namespace {

// Slack for centre-in-box tests, well below any realistic cell spacing.
constexpr double kCoordEps = 1e-9;

struct VariableInfo {
  Variable variable;
  std::string_view name;
  std::string_view units;
};

constexpr std::array<VariableInfo, 7> kVariables{{
    {Variable::BT, "BT", "K"},
    {Variable::RAIN_RATE, "RAIN_RATE", "mm/h"},
    {Variable::RAIN_ACCUM, "RAIN_ACCUM", "mm"},
    {Variable::WIND_SPEED, "WIND_SPEED", "m/s"},
    {Variable::NRCS, "NRCS", "linear"},
    {Variable::FLOOD_MASK, "FLOOD_MASK", "bool"},
    {Variable::LOG_RATIO_DB, "LOG_RATIO_DB", "dB"},
}};

const VariableInfo& info(Variable v) {
  for (const auto& entry : kVariables) {
    if (entry.variable == v) return entry;
  }
  throw GridError("unknown variable enum value");
}

bool within_bounds(Variable variable, double v) {
  switch (variable) {
    case Variable::BT: return v >= 100.0 && v <= 400.0;
    case Variable::RAIN_RATE:
    case Variable::RAIN_ACCUM: return v >= 0.0;
    case Variable::WIND_SPEED: return v >= 0.0 && v <= 100.0;
    case Variable::NRCS: return v > 0.0;
    case Variable::FLOOD_MASK: return v == 0.0 || v == 1.0;
    case Variable::LOG_RATIO_DB: return true;
  }
  return false;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

int parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len) {
  int value = 0;
  auto sub = s.substr(pos, len);
  auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), value);
  if (ec != std::errc{} || ptr != sub.data() + sub.size()) {
    throw std::invalid_argument("bad timestamp '" + std::string(s) + "'");
  }
  return value;
}

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("bad integer '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Timestamp parse_time(std::string_view text) {
  // 2020-10-05T22:40:00Z
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z') {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  using namespace std::chrono;
  const int y = parse_fixed_int(text, 0, 4);
  const int mo = parse_fixed_int(text, 5, 2);
  const int d = parse_fixed_int(text, 8, 2);
  const int h = parse_fixed_int(text, 11, 2);
  const int mi = parse_fixed_int(text, 14, 2);
  const int s = parse_fixed_int(text, 17, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw std::invalid_argument("bad timestamp '" + std::string(text) + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_time(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return std::string(buf, ptr);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw std::invalid_argument("bad number '" + std::string(text) + "'");
  }
  return value;
}

std::string_view to_string(Variable v) { return info(v).name; }

Variable parse_variable(std::string_view text) {
  for (const auto& entry : kVariables) {
    if (entry.name == text) return entry.variable;
  }
  throw std::invalid_argument("unknown variable '" + std::string(text) + "'");
}

std::string_view canonical_units(Variable v) { return info(v).units; }

// ---------------------------------------------------------------------------

bool RegionBox::contains(double lat, double lon) const {
  return lat >= lat_min - kCoordEps && lat <= lat_max + kCoordEps && lon >= lon_min - kCoordEps &&
         lon <= lon_max + kCoordEps;
}

bool RegionBox::intersects(const RegionBox& other) const {
  return lat_min <= other.lat_max && other.lat_min <= lat_max && lon_min <= other.lon_max &&
         other.lon_min <= lon_max;
}

RegionBox RegionBox::translated(double dlat, double dlon) const {
  return RegionBox{name, lat_min + dlat, lat_max + dlat, lon_min + dlon, lon_max + dlon};
}

RegionBox Geometry::extent() const {
  return RegionBox{"", lat_min - 0.5 * dlat, lat_max() + 0.5 * dlat, lon_min - 0.5 * dlon,
                   lon_max() + 0.5 * dlon};
}

void Geometry::validate() const {
  if (nrows < 1 || ncols < 1) throw GridError("grid must have at least one row and column");
  if (!(dlat > 0.0) || !(dlon > 0.0) || !std::isfinite(dlat) || !std::isfinite(dlon)) {
    throw GridError("grid spacing must be positive");
  }
  if (!std::isfinite(lat_min) || !std::isfinite(lon_min)) throw GridError("grid origin must be finite");
}

// ---------------------------------------------------------------------------

GeoGrid::GeoGrid(Variable variable, Timestamp time, Geometry geometry, std::vector<double> values,
                 double nodata)
    : GeoGrid(variable, std::string(canonical_units(variable)), time, geometry, std::move(values), nodata) {}

GeoGrid::GeoGrid(Variable variable, std::string units, Timestamp time, Geometry geometry,
                 std::vector<double> values, double nodata)
    : variable_(variable),
      units_(std::move(units)),
      time_(time),
      geometry_(geometry),
      values_(std::move(values)),
      nodata_(nodata) {
  geometry_.validate();
  if (units_ != canonical_units(variable_)) {
    throw GridError("units '" + units_ + "' do not match variable " + std::string(to_string(variable_)) +
                    " (expected '" + std::string(canonical_units(variable_)) + "')");
  }
  if (!std::isfinite(nodata_)) throw GridError("nodata sentinel must be finite");
  if (values_.size() != geometry_.size()) {
    throw GridError("value count " + std::to_string(values_.size()) + " != nrows*ncols " +
                    std::to_string(geometry_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) throw GridError("non-finite value at cell " + std::to_string(i));
    if (v == nodata_) continue;
    if (!within_bounds(variable_, v)) {
      throw GridError("value " + format_real(v) + " at cell " + std::to_string(i) +
                      " outside physical bounds of " + std::string(to_string(variable_)));
    }
  }
}

GeoGrid GeoGrid::filled(Variable variable, Timestamp time, const Geometry& geometry, double value,
                        double nodata) {
  return GeoGrid(variable, time, geometry, std::vector<double>(geometry.size(), value), nodata);
}

bool GeoGrid::is_valid(double v) const { return v != nodata_ && std::isfinite(v); }

bool GeoGrid::operator==(const GeoGrid& other) const {
  return variable_ == other.variable_ && units_ == other.units_ && time_ == other.time_ &&
         geometry_ == other.geometry_ && nodata_ == other.nodata_ && values_ == other.values_;
}

// ---------------------------------------------------------------------------

GridStack::GridStack(std::vector<GeoGrid> frames) {
  for (auto& f : frames) push_back(std::move(f));
}

void GridStack::push_back(GeoGrid frame) {
  if (!frames_.empty()) {
    const auto& last = frames_.back();
    if (frame.variable() != last.variable()) {
      throw GridError("frame variable " + std::string(to_string(frame.variable())) +
                      " differs from stack variable " + std::string(to_string(last.variable())));
    }
    if (!(frame.geometry() == last.geometry())) throw GridError("frame geometry differs from stack geometry");
    if (frame.time() <= last.time()) {
      throw GridError("frame time " + format_time(frame.time()) + " not after " + format_time(last.time()));
    }
  }
  frames_.push_back(std::move(frame));
}

// ---------------------------------------------------------------------------
// GSF

namespace {

constexpr std::array<std::string_view, 10> kHeaderKeys{"variable", "units", "time",    "nrows", "ncols",
                                                       "lat_min",  "lon_min", "dlat", "dlon",  "nodata"};

class LineReader {
public:
  LineReader(std::istream& in, std::string_view source) : in_(in), source_(source) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    auto trimmed = trim_cr(line);
    line.resize(trimmed.size());
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw GsfParseError(std::string(source_) + ":" + std::to_string(number_) + ": " + what);
  }

  std::size_t number() const { return number_; }

private:
  std::istream& in_;
  std::string_view source_;
  std::size_t number_ = 0;
};

GeoGrid read_frame(LineReader& reader) {
  std::string line;
  std::array<std::string, kHeaderKeys.size()> header;
  for (std::size_t k = 0; k < kHeaderKeys.size(); ++k) {
    if (!reader.next(line)) reader.fail("unexpected end of file, expected '" + std::string(kHeaderKeys[k]) + "='");
    const auto eq = line.find('=');
    if (eq == std::string::npos || std::string_view(line).substr(0, eq) != kHeaderKeys[k]) {
      reader.fail("expected '" + std::string(kHeaderKeys[k]) + "=', got '" + line + "'");
    }
    header[k] = line.substr(eq + 1);
  }

  Variable variable{};
  Timestamp time{};
  Geometry geometry;
  double nodata = kNodata;
  // Header line numbers: header key k sits at (current - 9 + k).
  const std::size_t first_key_line = reader.number() - kHeaderKeys.size() + 1;
  auto header_fail = [&](std::size_t k, const std::string& what) -> void {
    throw GsfParseError("line " + std::to_string(first_key_line + k) + ": " + what);
  };
  std::size_t k = 0;
  try {
    variable = parse_variable(header[k = 0]);
    time = parse_time(header[k = 2]);
    geometry.nrows = parse_count(header[k = 3]);
    geometry.ncols = parse_count(header[k = 4]);
    geometry.lat_min = parse_real(header[k = 5]);
    geometry.lon_min = parse_real(header[k = 6]);
    geometry.dlat = parse_real(header[k = 7]);
    geometry.dlon = parse_real(header[k = 8]);
    nodata = parse_real(header[k = 9]);
    geometry.validate();
  } catch (const std::exception& e) {
    header_fail(k, e.what());
  }

  std::vector<double> values;
  values.reserve(geometry.size());
  for (std::size_t row = 0; row < geometry.nrows; ++row) {
    if (!reader.next(line)) {
      throw GridError("payload error: expected " + std::to_string(geometry.nrows) + " data rows, got " +
                      std::to_string(row));
    }
    if (line == "---") {
      throw GridError("payload error at line " + std::to_string(reader.number()) + ": expected " +
                      std::to_string(geometry.nrows) + " data rows, got " + std::to_string(row));
    }
    std::size_t count = 0;
    std::string_view rest(line);
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      const auto token = rest.substr(0, sp);
      try {
        values.push_back(parse_real(token));
      } catch (const std::exception& e) {
        reader.fail(e.what());
      }
      ++count;
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
      if (rest.empty()) reader.fail("trailing separator");
    }
    if (count != geometry.ncols) {
      throw GridError("payload error at line " + std::to_string(reader.number()) + ": " +
                      std::to_string(count) + " values, expected ncols=" + std::to_string(geometry.ncols));
    }
  }
  try {
    return GeoGrid(variable, header[1], time, geometry, std::move(values), nodata);
  } catch (const GridError& e) {
    throw GridError("frame ending at line " + std::to_string(reader.number()) + ": " + e.what());
  }
}

}  // namespace

GridStack read_gsf(std::istream& in, std::string_view source_name) {
  LineReader reader(in, source_name);
  GridStack stack;
  std::string line;
  bool expect_frame = true;
  while (reader.next(line)) {
    if (expect_frame) {
      if (line != "GSF1") reader.fail("expected 'GSF1', got '" + line + "'");
      GeoGrid frame = read_frame(reader);
      if (!stack.empty()) {
        if (frame.time() <= stack.back().time()) {
          throw GridError(std::string(source_name) + ": ordering error: frame time " + format_time(frame.time()) +
                          " not after " + format_time(stack.back().time()));
        }
        if (!(frame.geometry() == stack.geometry()) || frame.variable() != stack.variable()) {
          throw GridError(std::string(source_name) + ": geometry mismatch between frames at line " +
                          std::to_string(reader.number()));
        }
      }
      stack.push_back(std::move(frame));
      expect_frame = false;
    } else {
      if (line != "---") reader.fail("expected '---' frame separator, got '" + line + "'");
      expect_frame = true;
    }
  }
  if (stack.empty()) throw GsfParseError(std::string(source_name) + ": empty stack");
  if (expect_frame) reader.fail("dangling frame separator");
  return stack;
}

GridStack read_gsf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GridError("cannot open '" + path.string() + "'");
  return read_gsf(in, path.string());
}

void write_gsf(const GridStack& stack, std::ostream& out) {
  if (stack.empty()) throw GridError("empty stack");
  bool first = true;
  for (const auto& frame : stack) {
    if (!first) out << "---\n";
    first = false;
    const auto& g = frame.geometry();
    out << "GSF1\n"
        << "variable=" << to_string(frame.variable()) << '\n'
        << "units=" << frame.units() << '\n'
        << "time=" << format_time(frame.time()) << '\n'
        << "nrows=" << g.nrows << '\n'
        << "ncols=" << g.ncols << '\n'
        << "lat_min=" << format_real(g.lat_min) << '\n'
        << "lon_min=" << format_real(g.lon_min) << '\n'
        << "dlat=" << format_real(g.dlat) << '\n'
        << "dlon=" << format_real(g.dlon) << '\n'
        << "nodata=" << format_real(frame.nodata()) << '\n';
    std::string row;
    for (std::size_t r = 0; r < g.nrows; ++r) {
      row.clear();
      for (std::size_t c = 0; c < g.ncols; ++c) {
        if (c) row.push_back(' ');
        row += format_real(frame.at(r, c));
      }
      row.push_back('\n');
      out << row;
    }
  }
  if (!out) throw GridError("write failed");
}

std::string to_gsf_string(const GridStack& stack) {
  std::ostringstream out;
  write_gsf(stack, out);
  return std::move(out).str();
}

void write_gsf(const GridStack& stack, const std::filesystem::path& path) {
  write_file_atomic(path, to_gsf_string(stack));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

// ---------------------------------------------------------------------------
// Regions

std::vector<RegionBox> read_regions(std::istream& in, std::string_view source_name) {
  std::vector<RegionBox> regions;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw GridError(std::string(source_name) + ":" + std::to_string(number) + ": " + what);
    };
    if (tokens.size() != 5) fail("expected 'name lat_min lat_max lon_min lon_max'");
    RegionBox box;
    box.name = tokens[0];
    try {
      box.lat_min = parse_real(tokens[1]);
      box.lat_max = parse_real(tokens[2]);
      box.lon_min = parse_real(tokens[3]);
      box.lon_max = parse_real(tokens[4]);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (!box.valid()) fail("region '" + box.name + "' needs lat_min < lat_max and lon_min < lon_max");
    regions.push_back(std::move(box));
  }
  return regions;
}

std::vector<RegionBox> read_regions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GridError("cannot open '" + path.string() + "'");
  return read_regions(in, path.string());
}

void write_regions(const std::vector<RegionBox>& regions, std::ostream& out) {
  for (const auto& r : regions) {
    out << r.name << ' ' << format_real(r.lat_min) << ' ' << format_real(r.lat_max) << ' '
        << format_real(r.lon_min) << ' ' << format_real(r.lon_max) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Subsetting and resampling

std::vector<std::size_t> cells_in_box(const Geometry& g, const RegionBox& box) {
  std::vector<std::size_t> cells;
  for (std::size_t r = 0; r < g.nrows; ++r) {
    const double lat = g.lat_of_row(r);
    if (lat < box.lat_min - kCoordEps || lat > box.lat_max + kCoordEps) continue;
    for (std::size_t c = 0; c < g.ncols; ++c) {
      if (box.contains(lat, g.lon_of_col(c))) cells.push_back(r * g.ncols + c);
    }
  }
  return cells;
}

GeoGrid subset(const GeoGrid& grid, const RegionBox& box) {
  const auto& g = grid.geometry();
  std::size_t row0 = g.nrows, row1 = 0, col0 = g.ncols, col1 = 0;
  for (std::size_t r = 0; r < g.nrows; ++r) {
    const double lat = g.lat_of_row(r);
    if (lat < box.lat_min - kCoordEps || lat > box.lat_max + kCoordEps) continue;
    row0 = std::min(row0, r);
    row1 = std::max(row1, r);
  }
  for (std::size_t c = 0; c < g.ncols; ++c) {
    const double lon = g.lon_of_col(c);
    if (lon < box.lon_min - kCoordEps || lon > box.lon_max + kCoordEps) continue;
    col0 = std::min(col0, c);
    col1 = std::max(col1, c);
  }
  if (row0 > row1 || col0 > col1) {
    throw GridError("empty subset: region '" + box.name + "' contains no cell centres");
  }
  Geometry out;
  out.nrows = row1 - row0 + 1;
  out.ncols = col1 - col0 + 1;
  out.dlat = g.dlat;
  out.dlon = g.dlon;
  out.lat_min = g.lat_of_row(row1);
  out.lon_min = g.lon_of_col(col0);
  std::vector<double> values;
  values.reserve(out.size());
  for (std::size_t r = row0; r <= row1; ++r) {
    for (std::size_t c = col0; c <= col1; ++c) values.push_back(grid.at(r, c));
  }
  return GeoGrid(grid.variable(), grid.units(), grid.time(), out, std::move(values), grid.nodata());
}

GeoGrid resample_nn(const GeoGrid& src, const Geometry& target) {
  target.validate();
  const auto& g = src.geometry();
  if (!g.extent().intersects(target.extent())) throw GridError("resample: geometries do not overlap");
  if (g == target) return src;

  const double reach = std::max(g.dlat, g.dlon);
  const auto last_row_j = static_cast<double>(g.nrows - 1);
  const auto last_col = static_cast<double>(g.ncols - 1);

  // Nearest source index per target column / row. The metric is separable,
  // so the per-axis nearest indices give the nearest cell overall.
  std::vector<std::size_t> col_of(target.ncols);
  std::vector<double> dlon_of(target.ncols);
  for (std::size_t c = 0; c < target.ncols; ++c) {
    const double lon = target.lon_of_col(c);
    const double x = (lon - g.lon_min) / g.dlon;
    // Ties go west.
    const double idx = std::clamp(std::ceil(x - 0.5), 0.0, last_col);
    col_of[c] = static_cast<std::size_t>(idx);
    dlon_of[c] = lon - g.lon_of_col(col_of[c]);
  }
  std::vector<double> values(target.size(), src.nodata());
  for (std::size_t r = 0; r < target.nrows; ++r) {
    const double lat = target.lat_of_row(r);
    const double y = (lat - g.lat_min) / g.dlat;
    // Ties go north (larger south-up index).
    const double j = std::clamp(std::floor(y + 0.5), 0.0, last_row_j);
    const std::size_t src_row = g.nrows - 1 - static_cast<std::size_t>(j);
    const double dlat = lat - g.lat_of_row(src_row);
    for (std::size_t c = 0; c < target.ncols; ++c) {
      if (std::hypot(dlat, dlon_of[c]) > reach) continue;
      values[r * target.ncols + c] = src.at(src_row, col_of[c]);
    }
  }
  return GeoGrid(src.variable(), src.units(), src.time(), target, std::move(values), src.nodata());
}

}  // namespace cswarn

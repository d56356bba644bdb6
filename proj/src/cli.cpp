#include "cswarn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cswarn/floodmap.hpp"
#include "cswarn/scenario.hpp"

namespace cswarn {

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    write_file_atomic(out_path, content);
  }
}

GeoGrid single_frame(const std::filesystem::path& path, Variable expected) {
  const auto stack = read_gsf(path);
  if (stack.size() != 1) throw UsageError(path.string() + ": expected exactly one frame, got " + std::to_string(stack.size()));
  if (stack.variable() != expected) {
    throw UsageError(path.string() + ": expected " + std::string(to_string(expected)) + ", got " +
                     std::string(to_string(stack.variable())));
  }
  return stack.front();
}

Config load_config(const std::string& path, const GmfRegistry& registry) {
  if (path.empty()) {
    Config c;
    c.validate(registry);
    return c;
  }
  return read_config(path, registry);
}

}  // namespace

std::string objects_csv(const std::vector<CSObject>& objects, bool header) {
  std::ostringstream out;
  if (header) out << "time,id,pixel_count,area_km2,centroid_lat,centroid_lon,min_bt,mean_bt\n";
  for (const auto& o : objects) {
    out << format_time(o.time) << ',' << o.id << ',' << o.pixel_count << ',' << format_real(o.area_km2) << ','
        << format_real(o.centroid_lat) << ',' << format_real(o.centroid_lon) << ',' << opt_real(o.min_bt) << ','
        << opt_real(o.mean_bt) << '\n';
  }
  return std::move(out).str();
}

std::string tracks_csv(const std::vector<Track>& tracks, std::size_t fit_window) {
  std::ostringstream out;
  out << "track_id,time,centroid_lat,centroid_lon,pixel_count,min_bt,speed_mps,bearing_deg\n";
  for (const auto& track : tracks) {
    Track prefix{track.track_id, {}};
    for (const auto& obs : track.observations) {
      prefix.observations.push_back(obs);
      std::string speed, bearing;
      if (prefix.observations.size() >= 2) {
        const auto m = motion_vector(prefix, fit_window);
        speed = format_real(m.speed_mps);
        bearing = opt_real(m.bearing_deg);
      }
      out << track.track_id << ',' << format_time(obs.time) << ',' << format_real(obs.centroid_lat) << ','
          << format_real(obs.centroid_lon) << ',' << obs.pixel_count << ',' << opt_real(obs.min_bt) << ',' << speed
          << ',' << bearing << '\n';
    }
  }
  return std::move(out).str();
}

FusionInputs load_fusion_inputs(const std::filesystem::path& dir, const Config& config, const GmfRegistry& registry) {
  if (!std::filesystem::is_directory(dir)) throw UsageError("data directory '" + dir.string() + "' not found");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".gsf") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  FusionInputs inputs;
  bool have_bt = false;
  const Gmf& gmf = registry.get(config.gmf);
  for (const auto& path : files) {
    auto stack = read_gsf(path);
    const std::string name = path.stem().string();
    switch (stack.variable()) {
      case Variable::BT:
        if (have_bt) throw UsageError(dir.string() + ": more than one BT stack");
        inputs.bt = std::move(stack);
        have_bt = true;
        break;
      case Variable::RAIN_RATE: inputs.rain_sources.push_back(std::move(stack)); break;
      case Variable::WIND_SPEED: inputs.wind_sources.push_back({name, std::move(stack)}); break;
      case Variable::NRCS: {
        GridStack speed;
        for (const auto& frame : stack) {
          const auto field = GeometryField::uniform(frame.geometry(), config.geometry);
          speed.push_back(retrieve_wind_grid(frame, field, gmf, config.v_max).wind);
        }
        inputs.wind_sources.push_back({name, std::move(speed)});
        break;
      }
      default: break;
    }
  }
  if (!have_bt) throw UsageError(dir.string() + ": no BT stack found");
  return inputs;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convective-system tracking and early flood warning engine", "cswarn"};
  app.require_subcommand(1);

  std::string config_path, out_path, regions_path;
  std::uint64_t seed = 1;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic multi-sensor scenario");
  std::string spec_path, out_dir;
  bool paper_replay = false, with_sar = false;
  synth->add_option("spec", spec_path, "Scenario spec file")->check(CLI::ExistingFile);
  synth->add_flag("--paper-replay", paper_replay, "Use the built-in coastal squall-line replay");
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--seed", seed, "Noise seed");
  synth->add_flag("--with-sar-pair", with_sar, "Also write sar/reference.gsf and sar/flood.gsf");

  auto* detect = app.add_subcommand("detect", "Detect convective objects in a BT stack");
  std::string bt_path;
  detect->add_option("bt", bt_path, "BT grid stack (GSF)")->required();
  detect->add_option("--config", config_path, "Config file");
  detect->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  auto* track = app.add_subcommand("track", "Track convective objects through a BT stack");
  track->add_option("bt", bt_path, "BT grid stack (GSF)")->required();
  track->add_option("--config", config_path, "Config file");
  track->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  auto* fuse = app.add_subcommand("fuse", "Fuse all sensors into per-region warnings");
  std::string data_dir;
  fuse->add_option("data_dir", data_dir, "Directory of GSF inputs")->required();
  fuse->add_option("--regions", regions_path, "Regions file")->required();
  fuse->add_option("--config", config_path, "Config file");
  fuse->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  auto* floodmap = app.add_subcommand("floodmap", "SAR change-detection flood mask");
  std::string flood_path, ref_path;
  floodmap->add_option("flood", flood_path, "Post-event NRCS (GSF)")->required();
  floodmap->add_option("ref", ref_path, "Reference NRCS (GSF)")->required();
  floodmap->add_option("--config", config_path, "Config file");
  floodmap->add_option("-o,--out", out_path, "Output mask GSF")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Score warnings against a flood mask");
  std::string warnings_path, mask_path;
  validate_cmd->add_option("warnings", warnings_path, "Warnings CSV")->required();
  validate_cmd->add_option("mask", mask_path, "Flood mask GSF")->required();
  validate_cmd->add_option("--regions", regions_path, "Regions file")->required();
  validate_cmd->add_option("--config", config_path, "Config file");
  validate_cmd->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const GmfRegistry registry = GmfRegistry::with_builtin();
    if (synth->parsed()) {
      if (paper_replay == !spec_path.empty()) throw UsageError("give exactly one of a spec file or --paper-replay");
      const ScenarioSpec spec = paper_replay ? paper_replay_spec() : read_scenario_spec(spec_path);
      const auto output = generate(spec, seed);
      auto written = write_scenario(output, out_dir);
      if (with_sar) {
        const auto pair = generate_sar_pair(spec, seed);
        const auto sar_dir = std::filesystem::path(out_dir) / "sar";
        std::filesystem::create_directories(sar_dir);
        write_gsf(GridStack({pair.reference}), sar_dir / "reference.gsf");
        write_gsf(GridStack({pair.flood}), sar_dir / "flood.gsf");
        written.push_back(sar_dir / "reference.gsf");
        written.push_back(sar_dir / "flood.gsf");
      }
      for (const auto& p : written) out << p.string() << '\n';
    } else if (detect->parsed()) {
      const Config config = load_config(config_path, registry);
      const auto stack = read_gsf(bt_path);
      std::string csv = objects_csv({}, true);
      for (const auto& frame : stack) {
        csv += objects_csv(detect_objects(frame, config.t_deep, config.min_area_px), false);
      }
      emit(csv, out_path, out);
    } else if (track->parsed()) {
      const Config config = load_config(config_path, registry);
      const auto stack = read_gsf(bt_path);
      Tracker tracker(config.max_gap_km, config.fit_window);
      for (const auto& frame : stack) tracker.update(frame.time(), detect_objects(frame, config.t_deep, config.min_area_px));
      emit(tracks_csv(tracker.all_tracks(), config.fit_window), out_path, out);
    } else if (fuse->parsed()) {
      const Config config = load_config(config_path, registry);
      auto regions = read_regions(regions_path);
      FusionEngine engine(load_fusion_inputs(data_dir, config, registry), std::move(regions), config.fusion_settings());
      emit(warnings_csv(engine.run_all()), out_path, out);
    } else if (floodmap->parsed()) {
      const Config config = load_config(config_path, registry);
      const auto ratio = log_ratio_db(single_frame(flood_path, Variable::NRCS), single_frame(ref_path, Variable::NRCS));
      if (ratio.nonpositive_cells > 0) err << "warning: " << ratio.nonpositive_cells << " non-positive NRCS cells set to nodata\n";
      const auto mask = flood_mask(ratio, config.threshold_db, config.min_region_px);
      write_gsf(GridStack({mask.mask}), std::filesystem::path(out_path));
    } else if (validate_cmd->parsed()) {
      const Config config = load_config(config_path, registry);
      const auto regions = read_regions(regions_path);
      std::ifstream in(warnings_path);
      if (!in) throw UsageError("cannot open '" + warnings_path + "'");
      const auto warnings = read_warnings_csv(in, warnings_path);
      FloodMask mask{single_frame(mask_path, Variable::FLOOD_MASK), std::nullopt, config.threshold_db,
                     config.min_region_px};
      const auto score = validate(warnings, mask, regions, config.f_flood);
      emit(validation_csv(score), out_path, out);
      auto show = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("undefined"); };
      (out_path.empty() ? err : out) << "POD=" << show(score.pod()) << " FAR=" << show(score.far()) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace cswarn

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cswarn/cli.hpp"
#include "cswarn/config.hpp"

using namespace cswarn;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = CSWARN_SOURCE_DIR;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "cswarn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Config parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg", GmfRegistry::with_builtin());
}

std::string written(const Config& c) {
  std::ostringstream out;
  write_config(c, out);
  return out.str();
}

}  // namespace

TEST_CASE("committed default config equals the built-in defaults") {
  const auto c = read_config(kSource / "config" / "paper_default.cfg", GmfRegistry::with_builtin());
  CHECK(written(c) == written(Config{}));
  CHECK(c.t_deep == 220.0);
  CHECK(c.bins.edges == std::array<double, 3>{5, 10, 15});
  CHECK(c.r_heavy == 8.0);
  CHECK(c.v_max == 25.0);
}

TEST_CASE("config write and parse round trip") {
  Config c;
  c.t_deep = 215.5;
  c.gmf = "harmonic";
  c.bins.edges = {4, 9, 16};
  c.window_s = 7200;
  CHECK(written(parse(written(c))) == written(c));
  CHECK(parse("").t_deep == 220.0);
  const auto s = parse("[fusion]\nepoch_s = 600\n").fusion_settings();
  CHECK(s.epoch_step == Seconds{600});
}

TEST_CASE("config rejection names the key") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  CHECK(message("[detection]\nt_deep = 50\n").find("detection.t_deep") != std::string::npos);
  CHECK(message("[detection]\ncolour = red\n").find("unknown key 'detection.colour'") != std::string::npos);
  CHECK(message("[rain]\nr_heavy = 8\nr_heavy = 9\n").find("duplicate key") != std::string::npos);
  CHECK(message("[wind]\nbins = 5,5,15\n").find("wind.bins") != std::string::npos);
  CHECK(message("[wind]\nbins = 5,10\n").find("wind.bins") != std::string::npos);
  CHECK(message("[wind]\ngmf = cmod7\n").find("wind.gmf") != std::string::npos);
  CHECK(message("[wind]\nv_max = 80\n").find("wind.v_max") != std::string::npos);
  CHECK(message("[fusion]\nfraction = 0\n").find("fusion.fraction") != std::string::npos);
  CHECK(message("[fusion]\nepoch_s = 1.5\n").find("fusion.epoch_s") != std::string::npos);
  CHECK(message("[floodmap]\nf_flood = 2\n").find("floodmap.f_flood") != std::string::npos);
  CHECK(message("[tracking]\nfit_window = 1\n").find("tracking.fit_window") != std::string::npos);
  CHECK(message("[tracking\n").find("test.cfg:1") != std::string::npos);
  CHECK(message("t_deep = 200\n").find("unknown key") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CHECK(run({}).code != 0);
  CHECK(run({"launch"}).code != 0);
  const auto r = run({"detect", "/nonexistent/bt.gsf"});
  CHECK(r.code == 1);
  CHECK(r.err.find("/nonexistent/bt.gsf") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK(run({"synth", "--out", "x"}).code == 1);
}

TEST_CASE("cli synth") {
  TempDir a("cswarn_cli_synth_a"), b("cswarn_cli_synth_b");
  const auto ra = run({"synth", "--paper-replay", "--out", a.path.string()});
  REQUIRE(ra.code == 0);
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(a.path)) names.insert(e.path().filename().string());
  CHECK(names == std::set<std::string>{"bt.gsf", "rain.gsf", "wind_lr.gsf", "nrcs_sar.gsf", "truth.csv"});
  REQUIRE(run({"synth", "--paper-replay", "--out", b.path.string()}).code == 0);
  for (const auto& n : names) CHECK(slurp(a.path / n) == slurp(b.path / n));

  SUBCASE("zero-duration spec is an error") {
    const auto spec = a.path / "zero.spec";
    std::ofstream(spec) << "[scenario]\nstart = 2020-10-05T00:00:00Z\nduration_s = 0\nlat_min = 15\nlon_min = 107\n"
                           "dlat = 0.1\ndlon = 0.1\nnrows = 10\nncols = 10\n";
    const auto r = run({"synth", spec.string(), "--out", (a.path / "z").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") == 0);
  }

  SUBCASE("detect finds the cell in every frame") {
    const auto r = run({"detect", (a.path / "bt.gsf").string()});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "time,id,pixel_count,area_km2,centroid_lat,centroid_lon,min_bt,mean_bt");
    std::set<std::string> times;
    while (std::getline(in, line)) times.insert(line.substr(0, line.find(',')));
    CHECK(times.size() == 144);
  }

  SUBCASE("track gives one westward track") {
    const auto out = a.path / "tracks.csv";
    REQUIRE(run({"track", (a.path / "bt.gsf").string(), "-o", out.string()}).code == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    std::set<std::string> ids;
    std::string last;
    while (std::getline(in, line)) {
      ids.insert(line.substr(0, line.find(',')));
      last = line;
    }
    CHECK(ids.size() == 1);
    const double bearing = std::stod(last.substr(last.rfind(',') + 1));
    CHECK(std::abs(bearing - 270.0) < 5.0);
  }
}

TEST_CASE("cli fuse on quiet data reports NONE") {
  TempDir d("cswarn_cli_quiet");
  const auto spec = d.path / "quiet.spec";
  std::ofstream(spec) << "[scenario]\nstart = 2020-10-05T00:00:00Z\nduration_s = 7200\nlat_min = 15\nlon_min = 107\n"
                         "dlat = 0.1\ndlon = 0.1\nnrows = 10\nncols = 10\nwind_source = lr speed 0 3600\n";
  REQUIRE(run({"synth", spec.string(), "--out", (d.path / "data").string()}).code == 0);
  const auto regions = d.path / "regions.txt";
  std::ofstream(regions) << "A 15 15.4 107 107.4\nB 15.5 15.9 107.5 107.9\n";
  const auto r = run({"fuse", (d.path / "data").string(), "--regions", regions.string()});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto reports = read_warnings_csv(in);
  CHECK(reports.size() == 2 * 4);
  for (const auto& rep : reports) CHECK(rep.level == WarningLevel::NONE);
}

TEST_CASE("cli config violations abort before writing output") {
  TempDir d("cswarn_cli_cfg");
  REQUIRE(run({"synth", "--paper-replay", "--with-sar-pair", "--out", d.path.string()}).code == 0);
  const auto cfg = d.path / "bad.cfg";
  std::ofstream(cfg) << "[floodmap]\nthreshold_db = nan\n";
  const auto mask = d.path / "mask.gsf";
  const auto r = run({"floodmap", (d.path / "sar" / "flood.gsf").string(), (d.path / "sar" / "reference.gsf").string(),
                      "--config", cfg.string(), "-o", mask.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("floodmap.threshold_db") != std::string::npos);
  CHECK_FALSE(fs::exists(mask));
}

TEST_CASE("cli full replay pipeline validates with POD 1 and FAR 0") {
  TempDir d("cswarn_cli_replay");
  REQUIRE(run({"synth", "--paper-replay", "--with-sar-pair", "--out", d.path.string()}).code == 0);
  const auto regions = (kSource / "config" / "regions_central_vietnam.txt").string();
  const auto warnings = d.path / "warnings.csv";
  const auto mask = d.path / "mask.gsf";
  REQUIRE(run({"fuse", d.path.string(), "--regions", regions, "-o", warnings.string()}).code == 0);
  REQUIRE(run({"floodmap", (d.path / "sar" / "flood.gsf").string(), (d.path / "sar" / "reference.gsf").string(), "-o",
               mask.string()})
              .code == 0);
  const auto r = run({"validate", warnings.string(), mask.string(), "--regions", regions});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("POD=1 FAR=0") != std::string::npos);
  CHECK(r.out.find("DN,1,1,hit") != std::string::npos);
  CHECK(r.out.find("false_alarm") == std::string::npos);
  CHECK(r.out.find("miss") == std::string::npos);
}

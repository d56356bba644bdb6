#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cswarn/config.hpp"
#include "cswarn/convection.hpp"
#include "cswarn/fusion.hpp"
#include "cswarn/tracking.hpp"

namespace cswarn {

/// `time,id,pixel_count,area_km2,centroid_lat,centroid_lon,min_bt,mean_bt`
std::string objects_csv(const std::vector<CSObject>& objects, bool header = true);

/// `track_id,time,centroid_lat,centroid_lon,pixel_count,min_bt,speed_mps,bearing_deg`.
/// Motion columns hold the fit over observations up to that row.
std::string tracks_csv(const std::vector<Track>& tracks, std::size_t fit_window);

/// Loads every top-level *.gsf in `dir`: one BT stack, any RAIN_RATE stacks,
/// WIND_SPEED stacks and NRCS stacks (retrieved with the configured GMF).
FusionInputs load_fusion_inputs(const std::filesystem::path& dir, const Config& config, const GmfRegistry& registry);

/// Command-line entry point. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cswarn

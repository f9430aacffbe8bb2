#pragma once

#include <filesystem>
#include <string>

#include "tracefeed/config.hpp"
#include "tracefeed/gtfs.hpp"
#include "tracefeed/model.hpp"

namespace tracefeed {

/// Emits one FeatureCollection per trip (trajectory line plus matched-event
/// points tagged with their scenario) and one route-level collection
/// (terminal and stop points plus 64-vertex circular buffer rings) under
/// out_dir. Returns the total feature count across all documents.
std::size_t export_geojson(const std::vector<TripTrajectory>& trips, const EventsByTrip& events,
                           const RouteDefinition& route, const PipelineConfig& config,
                           const std::filesystem::path& out_dir);

/// "device:123" -> "device_123"; trip ids double as file names.
std::string sanitize_filename(const std::string& id);

}  // namespace tracefeed

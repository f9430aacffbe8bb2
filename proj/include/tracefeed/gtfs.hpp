#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tracefeed/config.hpp"
#include "tracefeed/model.hpp"
#include "tracefeed/stop.hpp"
#include "tracefeed/trip.hpp"

namespace tracefeed {

using EventsByTrip = std::map<std::string, std::vector<StopEvent>>;

struct GtfsManifest {
    std::filesystem::path directory;
    std::vector<std::string> files;
    std::size_t trip_rows = 0;
    std::size_t stop_time_rows = 0;
};

/// Writes agency, routes, stops, trips, stop_times and calendar tables.
/// Times use the HH:MM:SS service-day clock (hours over 24 continue a
/// service day past midnight); unmatched stops get empty time fields with
/// timepoint=0. The bundle is re-read and integrity-checked after writing.
GtfsManifest emit_static(const RouteDefinition& route, const std::vector<TripTrajectory>& trips,
                         const EventsByTrip& events, const std::filesystem::path& out_dir,
                         const PipelineConfig& config);

/// One trip-update entity per line, field names mirroring GTFS-RT
/// (trip, vehicle, stop_time_update, arrival.time, departure.time).
/// Returns the entity count.
std::size_t emit_trip_updates(const RouteDefinition& route,
                              const std::vector<TripTrajectory>& trips,
                              const EventsByTrip& events, const std::filesystem::path& out_path,
                              const PipelineConfig& config);

/// Referential integrity and ordering checks over an emitted bundle,
/// performed on the files themselves. Throws IntegrityError on violation.
void validate_bundle(const std::filesystem::path& dir, const PipelineConfig& config);

struct StopTimeRow {
    std::string trip_id;
    std::optional<EpochSeconds> arrival;
    std::optional<EpochSeconds> departure;
    std::string stop_id;
    int stop_sequence = 0;
    int timepoint = 0;
};

/// Reads stop_times.txt back with times resolved to epoch seconds via each
/// trip's service date. The lossless counterpart of emit_static.
std::vector<StopTimeRow> read_stop_times(const std::filesystem::path& dir,
                                         const PipelineConfig& config);

struct TripUpdateEntity {
    std::string trip_id;
    std::string route_id;
    Direction direction = Direction::outbound;
    std::string start_date;
    std::string device_id;
    std::vector<StopEvent> events;
};

std::vector<TripUpdateEntity> parse_trip_updates(const std::filesystem::path& path);

}  // namespace tracefeed

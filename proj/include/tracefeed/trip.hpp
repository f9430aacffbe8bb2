#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tracefeed/config.hpp"
#include "tracefeed/model.hpp"
#include "tracefeed/preprocess.hpp"

namespace tracefeed {

/// One terminal-to-terminal vehicle run. start_time is the last observed
/// point inside the origin buffer before departure; end_time is the first
/// zero-speed point inside the destination buffer (or, flagged end_fallback,
/// the last point inside it when the vehicle never stopped there).
struct TripTrajectory {
    std::string trip_id;  // "device_id:start_epoch", deterministic
    std::string device_id;
    Direction direction = Direction::outbound;
    std::string origin_terminal_id;
    std::string destination_terminal_id;
    EpochSeconds start_time = 0;
    EpochSeconds end_time = 0;
    bool end_fallback = false;
    std::vector<GpsRecord> points;  // contiguous, time-ascending, spans [start, end]
};

struct ExtractionReport {
    std::size_t trips = 0;
    std::size_t no_departure = 0;        // series never opened a trip
    std::size_t incomplete = 0;          // returned to origin or went silent en route
    std::size_t spanned_gap = 0;         // trajectory crossed a continuity gap
    std::size_t too_few_points = 0;
    std::size_t too_short_duration = 0;
    std::size_t end_fallback = 0;        // kept trips without zero-speed evidence
};

/// Splits one device's series into terminal-to-terminal trips.
/// Pure; safe to run per device across workers.
std::pair<std::vector<TripTrajectory>, ExtractionReport> extract_trips(
    const DeviceSeries& series, const TerminalPoint& terminal_a, const TerminalPoint& terminal_b,
    const PipelineConfig& config);

std::pair<std::vector<TripTrajectory>, ExtractionReport> extract_trips(
    const DeviceSeries& series, const RouteDefinition& route, const PipelineConfig& config);

struct TripFeatureRow {
    std::string trip_id;
    EpochSeconds duration_s = 0;
    std::size_t point_count = 0;
    double path_length_m = 0.0;   // sum of consecutive great-circle legs
    double mean_speed_kmh = 0.0;  // 3.6 * path_length_m / duration_s
};

TripFeatureRow trip_features(const TripTrajectory& trip);

}  // namespace tracefeed

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracefeed/config.hpp"
#include "tracefeed/model.hpp"
#include "tracefeed/trip.hpp"

namespace tracefeed {

/// How a stop's arrival/departure were recovered from the trajectory:
/// a zero-speed dwell inside the buffer, a moving pass in close proximity
/// (dwell 0), a nearest point inside the enlarged buffer (dwell 0), or
/// nothing within reach at all.
enum class MatchScenario { zero_speed_in_buffer, proximity_no_stop, extended_buffer, unmatched };

const char* to_string(MatchScenario s);
std::optional<MatchScenario> scenario_from_string(const std::string& text);

struct StopEvent {
    std::string trip_id;
    std::string stop_id;
    int sequence_index = 0;
    std::optional<EpochSeconds> arrival_time;    // absent iff unmatched
    std::optional<EpochSeconds> departure_time;  // absent iff unmatched
    EpochSeconds dwell_s = 0;                    // departure - arrival, 0 when unmatched
    MatchScenario scenario = MatchScenario::unmatched;
    double match_distance_m = 0.0;               // distance of the matching point

    bool matched() const { return scenario != MatchScenario::unmatched; }
};

/// Walks the stop list in sequence order with a monotonic time cursor:
/// points before the previous stop's departure are invisible to later stops,
/// and an unmatched stop does not advance the cursor. Emits exactly one
/// event per stop. Pure; safe to run per trip across workers.
std::vector<StopEvent> match_stops(const TripTrajectory& trip,
                                   std::span<const StopPoint> stops,
                                   const PipelineConfig& config);

}  // namespace tracefeed

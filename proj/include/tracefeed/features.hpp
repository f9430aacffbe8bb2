#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tracefeed/model.hpp"
#include "tracefeed/stop.hpp"
#include "tracefeed/trip.hpp"

namespace tracefeed {

/// Travel between departure at one stop and arrival at the next.
struct SegmentRun {
    std::string trip_id;
    std::string from_stop_id;
    std::string to_stop_id;
    EpochSeconds run_time_s = 0;
    int segment_index = 0;  // sequence_index of the from stop
};

struct TripSummary {
    std::string trip_id;
    EpochSeconds duration_s = 0;
    EpochSeconds total_dwell_s = 0;
    EpochSeconds total_run_s = 0;
    std::size_t matched_stops = 0;
    std::size_t unmatched_stops = 0;
    std::size_t skipped_segments = 0;  // pairs touching an unmatched stop
};

/// One SegmentRun per consecutive matched pair; pairs touching an unmatched
/// stop are skipped and counted, never bridged across it.
std::pair<std::vector<SegmentRun>, TripSummary> derive(const TripTrajectory& trip,
                                                       const std::vector<StopEvent>& events);

}  // namespace tracefeed

#include "tracefeed/features.hpp"

namespace tracefeed {

std::pair<std::vector<SegmentRun>, TripSummary> derive(const TripTrajectory& trip,
                                                       const std::vector<StopEvent>& events) {
    std::vector<SegmentRun> runs;
    TripSummary summary;
    summary.trip_id = trip.trip_id;
    summary.duration_s = trip.end_time - trip.start_time;

    for (const StopEvent& e : events) {
        if (e.matched()) {
            ++summary.matched_stops;
            summary.total_dwell_s += e.dwell_s;
        } else {
            ++summary.unmatched_stops;
        }
    }

    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        const StopEvent& from = events[i];
        const StopEvent& to = events[i + 1];
        if (!from.matched() || !to.matched()) {
            ++summary.skipped_segments;
            continue;
        }
        const EpochSeconds run = *to.arrival_time - *from.departure_time;
        if (run < 0)
            throw IntegrityError("negative run time between stops " + from.stop_id + " and " +
                                 to.stop_id + " on trip " + trip.trip_id);
        runs.push_back(
            SegmentRun{trip.trip_id, from.stop_id, to.stop_id, run, from.sequence_index});
        summary.total_run_s += run;
    }
    return {std::move(runs), summary};
}

}  // namespace tracefeed

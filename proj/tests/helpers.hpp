#pragma once

// Shared fixture plumbing for the unit and acceptance suites: runs the
// in-memory stage chain on synthesizer output and pairs results with ground
// truth.

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "tracefeed/preprocess.hpp"
#include "tracefeed/stop.hpp"
#include "tracefeed/synth.hpp"
#include "tracefeed/trip.hpp"

namespace tracefeed::testing {

struct MatchedTrip {
    TripTrajectory trip;
    std::vector<StopEvent> events;
};

struct InMemoryRun {
    std::vector<MatchedTrip> trips;  // ordered by (device_id, start_time)
    CleaningReport cleaning;
    ExtractionReport extraction;
};

inline InMemoryRun run_stages(const std::vector<GpsRecord>& records,
                              const RouteDefinition& route, const PipelineConfig& config) {
    InMemoryRun run;
    auto [cleaned, report] = clean(records, config);
    run.cleaning = report;
    for (const DeviceSeries& series : partition(cleaned, config)) {
        auto [trips, extraction] = extract_trips(series, route, config);
        run.extraction.trips += extraction.trips;
        run.extraction.no_departure += extraction.no_departure;
        run.extraction.incomplete += extraction.incomplete;
        run.extraction.spanned_gap += extraction.spanned_gap;
        run.extraction.too_few_points += extraction.too_few_points;
        run.extraction.too_short_duration += extraction.too_short_duration;
        run.extraction.end_fallback += extraction.end_fallback;
        for (auto& trip : trips) {
            MatchedTrip m;
            m.events = match_stops(trip, route.stops_for(trip.direction), config);
            m.trip = std::move(trip);
            run.trips.push_back(std::move(m));
        }
    }
    return run;
}

/// Pairs recovered trips with ground truth rows; both sides are ordered by
/// (device_id, start time), so a 1:1 zip is enough once counts agree.
inline const StopTruth* truth_for(const TripTruth& truth, const std::string& stop_id) {
    for (const auto& s : truth.stops)
        if (s.stop_id == stop_id) return &s;
    return nullptr;
}

inline const StopEvent* event_for(const MatchedTrip& trip, const std::string& stop_id) {
    for (const auto& e : trip.events)
        if (e.stop_id == stop_id) return &e;
    return nullptr;
}

}  // namespace tracefeed::testing

#include "tracefeed/stop.hpp"

#include <algorithm>

#include "tracefeed/geo.hpp"

namespace tracefeed {

const char* to_string(MatchScenario s) {
    switch (s) {
        case MatchScenario::zero_speed_in_buffer: return "zero-speed-in-buffer";
        case MatchScenario::proximity_no_stop: return "proximity-no-stop";
        case MatchScenario::extended_buffer: return "extended-buffer";
        case MatchScenario::unmatched: return "unmatched";
    }
    return "unmatched";
}

std::optional<MatchScenario> scenario_from_string(const std::string& text) {
    if (text == "zero-speed-in-buffer") return MatchScenario::zero_speed_in_buffer;
    if (text == "proximity-no-stop") return MatchScenario::proximity_no_stop;
    if (text == "extended-buffer") return MatchScenario::extended_buffer;
    if (text == "unmatched") return MatchScenario::unmatched;
    return std::nullopt;
}

std::vector<StopEvent> match_stops(const TripTrajectory& trip,
                                   std::span<const StopPoint> stops,
                                   const PipelineConfig& config) {
    std::vector<StopEvent> events;
    events.reserve(stops.size());

    const auto& points = trip.points;
    // Index of the first point at or after the cursor time.
    std::size_t window_begin = 0;

    for (const StopPoint& stop : stops) {
        StopEvent event;
        event.trip_id = trip.trip_id;
        event.stop_id = stop.stop_id;
        event.sequence_index = stop.sequence_index;

        const GeoPoint center{stop.latitude, stop.longitude};

        // Points within the base buffer, in time order.
        std::size_t arrival_idx = SIZE_MAX;
        double arrival_dist = 0.0;
        std::size_t nearest_idx = SIZE_MAX;
        double nearest_dist = 0.0;
        for (std::size_t i = window_begin; i < points.size(); ++i) {
            const double d = haversine_m(GeoPoint{points[i].latitude, points[i].longitude}, center);
            if (d > config.stops_buffer_radius_m) continue;
            if (nearest_idx == SIZE_MAX || d < nearest_dist) {
                nearest_idx = i;
                nearest_dist = d;
            }
            if (points[i].speed_kmh <= config.zero_speed_threshold_kmh) {
                arrival_idx = i;
                arrival_dist = d;
                break;  // nearest only matters when no dwell exists
            }
        }

        if (arrival_idx != SIZE_MAX) {
            // Dwell inside the buffer. The departure is the first faster point
            // within the contiguous in-buffer run that contains the arrival;
            // when the run ends first, its last point stands in.
            event.scenario = MatchScenario::zero_speed_in_buffer;
            event.arrival_time = points[arrival_idx].timestamp;
            event.match_distance_m = arrival_dist;
            std::size_t last_in_run = arrival_idx;
            std::optional<EpochSeconds> departure;
            for (std::size_t i = arrival_idx + 1; i < points.size(); ++i) {
                const double d =
                    haversine_m(GeoPoint{points[i].latitude, points[i].longitude}, center);
                if (d > config.stops_buffer_radius_m) break;
                last_in_run = i;
                if (points[i].speed_kmh > config.zero_speed_threshold_kmh) {
                    departure = points[i].timestamp;
                    break;
                }
            }
            event.departure_time = departure ? *departure : points[last_in_run].timestamp;
            event.dwell_s = *event.departure_time - *event.arrival_time;
        } else if (nearest_idx != SIZE_MAX) {
            // Moving pass: the nearest point supplies both timestamps.
            event.scenario = MatchScenario::proximity_no_stop;
            event.arrival_time = points[nearest_idx].timestamp;
            event.departure_time = event.arrival_time;
            event.dwell_s = 0;
            event.match_distance_m = nearest_dist;
        } else {
            // Nothing in the base buffer: enlarge and take the closest point.
            std::size_t ext_idx = SIZE_MAX;
            double ext_dist = 0.0;
            for (std::size_t i = window_begin; i < points.size(); ++i) {
                const double d =
                    haversine_m(GeoPoint{points[i].latitude, points[i].longitude}, center);
                if (d > config.stops_extended_buffer_radius_m) continue;
                if (ext_idx == SIZE_MAX || d < ext_dist) {
                    ext_idx = i;
                    ext_dist = d;
                }
            }
            if (ext_idx != SIZE_MAX) {
                event.scenario = MatchScenario::extended_buffer;
                event.arrival_time = points[ext_idx].timestamp;
                event.departure_time = event.arrival_time;
                event.dwell_s = 0;
                event.match_distance_m = ext_dist;
            } else {
                event.scenario = MatchScenario::unmatched;
            }
        }

        if (event.matched()) {
            // Advance the cursor: later stops only see points at or after
            // this departure.
            const EpochSeconds cursor = *event.departure_time;
            while (window_begin < points.size() && points[window_begin].timestamp < cursor)
                ++window_begin;
        }
        events.push_back(std::move(event));
    }
    return events;
}

}  // namespace tracefeed

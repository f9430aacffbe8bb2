#include "tracefeed/trip.hpp"

#include <algorithm>

#include "tracefeed/geo.hpp"

namespace tracefeed {

std::pair<std::vector<TripTrajectory>, ExtractionReport> extract_trips(
    const DeviceSeries& series, const TerminalPoint& terminal_a, const TerminalPoint& terminal_b,
    const PipelineConfig& config) {
    std::vector<TripTrajectory> trips;
    ExtractionReport report;

    const GeoPoint center_a{terminal_a.latitude, terminal_a.longitude};
    const GeoPoint center_b{terminal_b.latitude, terminal_b.longitude};
    const double radius = config.terminals_buffer_radius_m;
    const auto& records = series.records;

    enum class State { searching, at_terminal, en_route };
    State state = State::searching;
    bool terminal_is_a = false;      // current terminal (at_terminal) or trip origin (en_route)
    std::size_t last_inside = 0;     // last index inside that terminal's buffer
    std::size_t trip_start = 0;      // opening index while en_route
    std::size_t last_inside_dest = SIZE_MAX;
    std::size_t opened = 0;

    auto finalize = [&](std::size_t start_idx, std::size_t end_idx, bool origin_is_a,
                        bool fallback) {
        // Discard precedence: continuity gap, then size, then duration.
        const auto gap = std::lower_bound(series.gap_indices.begin(), series.gap_indices.end(),
                                          start_idx + 1);
        if (gap != series.gap_indices.end() && *gap <= end_idx) {
            ++report.spanned_gap;
            return;
        }
        const std::size_t point_count = end_idx - start_idx + 1;
        if (point_count < config.min_trip_points) {
            ++report.too_few_points;
            return;
        }
        const EpochSeconds start_time = records[start_idx].timestamp;
        const EpochSeconds end_time = records[end_idx].timestamp;
        if (end_time - start_time < config.min_trip_duration_seconds) {
            ++report.too_short_duration;
            return;
        }

        TripTrajectory trip;
        trip.device_id = series.device_id;
        trip.direction = origin_is_a ? Direction::outbound : Direction::inbound;
        trip.origin_terminal_id =
            origin_is_a ? terminal_a.terminal_id : terminal_b.terminal_id;
        trip.destination_terminal_id =
            origin_is_a ? terminal_b.terminal_id : terminal_a.terminal_id;
        trip.start_time = start_time;
        trip.end_time = end_time;
        trip.end_fallback = fallback;
        trip.trip_id = series.device_id + ":" + std::to_string(start_time);
        trip.points.assign(records.begin() + static_cast<std::ptrdiff_t>(start_idx),
                           records.begin() + static_cast<std::ptrdiff_t>(end_idx) + 1);
        if (fallback) ++report.end_fallback;
        trips.push_back(std::move(trip));
    };

    for (std::size_t i = 0; i < records.size(); ++i) {
        const GeoPoint p{records[i].latitude, records[i].longitude};
        const bool in_a = within_buffer(p, center_a, radius);
        const bool in_b = within_buffer(p, center_b, radius);

        if (state == State::searching) {
            if (in_a || in_b) {
                state = State::at_terminal;
                terminal_is_a = in_a;
                last_inside = i;
            }
            continue;
        }

        if (state == State::at_terminal) {
            const bool in_current = terminal_is_a ? in_a : in_b;
            const bool in_other = terminal_is_a ? in_b : in_a;
            if (in_current) {
                last_inside = i;
                continue;
            }
            // Exit opens a trip from the last point seen inside the buffer.
            trip_start = last_inside;
            last_inside_dest = SIZE_MAX;
            state = State::en_route;
            ++opened;
            if (!in_other) continue;
            // Fall through: this record is already inside the destination.
        }

        // state == State::en_route; terminal_is_a names the origin.
        const bool in_origin = terminal_is_a ? in_a : in_b;
        const bool in_dest = terminal_is_a ? in_b : in_a;

        if (in_dest) {
            if (records[i].speed_kmh <= config.zero_speed_threshold_kmh) {
                finalize(trip_start, i, terminal_is_a, false);
                state = State::at_terminal;
                terminal_is_a = !terminal_is_a;
                last_inside = i;
            } else {
                last_inside_dest = i;
            }
            continue;
        }

        if (last_inside_dest != SIZE_MAX) {
            // Passed through the destination buffer without a stop: close with
            // the fallback rule, and this exit opens the return trip.
            finalize(trip_start, last_inside_dest, terminal_is_a, true);
            terminal_is_a = !terminal_is_a;
            trip_start = last_inside_dest;
            last_inside_dest = SIZE_MAX;
            ++opened;
            continue;
        }

        if (in_origin) {
            // Returned to the origin without reaching the other terminal.
            ++report.incomplete;
            state = State::at_terminal;
            last_inside = i;
            continue;
        }
    }

    if (state == State::en_route) {
        if (last_inside_dest != SIZE_MAX) {
            finalize(trip_start, last_inside_dest, terminal_is_a, true);
        } else {
            ++report.incomplete;
        }
    }
    if (opened == 0) report.no_departure = 1;

    report.trips = trips.size();
    return {std::move(trips), report};
}

std::pair<std::vector<TripTrajectory>, ExtractionReport> extract_trips(
    const DeviceSeries& series, const RouteDefinition& route, const PipelineConfig& config) {
    return extract_trips(series, route.terminal_a, route.terminal_b, config);
}

TripFeatureRow trip_features(const TripTrajectory& trip) {
    TripFeatureRow row;
    row.trip_id = trip.trip_id;
    row.duration_s = trip.end_time - trip.start_time;
    row.point_count = trip.points.size();
    for (std::size_t i = 1; i < trip.points.size(); ++i) {
        row.path_length_m +=
            haversine_m(GeoPoint{trip.points[i - 1].latitude, trip.points[i - 1].longitude},
                        GeoPoint{trip.points[i].latitude, trip.points[i].longitude});
    }
    row.mean_speed_kmh =
        row.duration_s > 0 ? 3.6 * row.path_length_m / static_cast<double>(row.duration_s) : 0.0;
    return row;
}

}  // namespace tracefeed

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tracefeed/model.hpp"

namespace tracefeed {

/// One planned terminal-to-terminal run: when it leaves, how long it dwells
/// at each stop, and how fast it cruises on each leg (origin->stop1, ...,
/// stopN->destination).
struct TripPlan {
    std::string device_id;
    Direction direction = Direction::outbound;
    EpochSeconds departure_time = 0;  // instant motion starts at the origin terminal
    std::vector<double> stop_dwell_s;
    std::vector<double> segment_speed_kmh;
};

/// Half-open time window with no emissions.
struct DropoutWindow {
    EpochSeconds from = 0;
    EpochSeconds to = 0;
};

struct SyntheticScenario {
    RouteDefinition route;
    std::vector<TripPlan> trips;
    std::int64_t sampling_interval_s = 5;
    std::int64_t terminal_idle_s = 60;  // stationary emissions beside each departure/arrival
    std::vector<DropoutWindow> dropouts;
    double jitter_std_m = 0.0;
    std::uint64_t seed = 1;
};

struct StopTruth {
    std::string stop_id;
    int sequence_index = 0;
    double arrival = 0.0;    // instant the vehicle reaches the stop
    double departure = 0.0;  // arrival + planned dwell
};

struct TripTruth {
    std::string device_id;
    Direction direction = Direction::outbound;
    double t_start = 0.0;  // instant the vehicle crosses out of the origin buffer
    double t_end = 0.0;    // first zero-speed instant inside the destination buffer
    double depart_origin = 0.0;
    double arrive_destination = 0.0;
    std::vector<StopTruth> stops;
};

struct GroundTruth {
    std::vector<TripTruth> trips;  // ordered by (device_id, t_start)
};

/// Straight-line interpolation along the stop polyline at planned speeds,
/// emitting every sampling_interval_s: speed 0 during dwells, seeded
/// positional jitter, dropout windows removed. Deterministic for a fixed
/// seed. Throws ScenarioError for infeasible plans.
std::pair<std::vector<GpsRecord>, GroundTruth> synthesize(const SyntheticScenario& scenario);

// Fixture writers in the exact ingestion file formats, so synthetic traces
// double as end-to-end CLI inputs.
void write_gps_csv(const std::vector<GpsRecord>& records, const std::filesystem::path& path);
void write_terminals_csv(const RouteDefinition& route, const std::filesystem::path& path);
void write_stops_csv(const RouteDefinition& route, const std::filesystem::path& path);

/// Straight west-to-east route: terminal A, evenly spaced stops, terminal B.
/// Inbound stops reuse the outbound positions in reverse order under their
/// own ids.
RouteDefinition make_line_route(int stops_per_direction, double stop_spacing_m,
                                double terminal_buffer_m, double base_latitude = 6.50,
                                double base_longitude = 80.00);

/// Alternating out-and-back plans for one device, first trip outbound.
/// layover_s separates each arrival from the next departure and must cover
/// two terminal idle periods.
std::vector<TripPlan> plan_shuttle(const RouteDefinition& route, const std::string& device_id,
                                   EpochSeconds first_departure, int trip_count, double dwell_s,
                                   double speed_kmh, EpochSeconds layover_s,
                                   EpochSeconds terminal_idle_s);

}  // namespace tracefeed

#include "tracefeed/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tracefeed/csv.hpp"
#include "tracefeed/geo.hpp"
#include "tracefeed/time_util.hpp"

namespace tracefeed {

namespace {

// Self-contained deterministic RNG so identical seeds give identical traces
// on every platform.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() {  // (0, 1]
        return (static_cast<double>(next() >> 11) + 1.0) / 9007199254740992.0;
    }
    // Box-Muller; one value per call keeps the stream layout simple.
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

struct Phase {
    double t0, t1;
    GeoPoint from, to;  // identical while idle or dwelling
    double speed_kmh;
};

GeoPoint lerp(const GeoPoint& a, const GeoPoint& b, double f) {
    return GeoPoint{a.latitude + (b.latitude - a.latitude) * f,
                    a.longitude + (b.longitude - a.longitude) * f};
}

struct Sample {
    GeoPoint position;
    double speed_kmh;
};

Sample evaluate(const std::vector<Phase>& phases, double t) {
    // Last phase whose start is at or before t; boundaries belong to the
    // later phase, so speed flips to zero exactly at each arrival instant.
    std::size_t idx = 0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (phases[i].t0 <= t) idx = i;
        else break;
    }
    const Phase& ph = phases[idx];
    if (ph.t1 <= ph.t0 || t >= ph.t1) return {ph.to, ph.speed_kmh};
    if (t <= ph.t0) return {ph.from, ph.speed_kmh};
    const double f = (t - ph.t0) / (ph.t1 - ph.t0);
    return {lerp(ph.from, ph.to, f), ph.speed_kmh};
}

bool in_dropout(const std::vector<DropoutWindow>& windows, EpochSeconds t) {
    for (const auto& w : windows)
        if (t >= w.from && t < w.to) return true;
    return false;
}

}  // namespace

std::pair<std::vector<GpsRecord>, GroundTruth> synthesize(const SyntheticScenario& scenario) {
    if (scenario.sampling_interval_s < 1)
        throw ScenarioError("sampling_interval_s must be >= 1");
    if (scenario.terminal_idle_s < scenario.sampling_interval_s)
        throw ScenarioError("terminal_idle_s must cover at least one sampling interval");
    if (scenario.jitter_std_m < 0.0) throw ScenarioError("jitter_std_m must be >= 0");

    const RouteDefinition& route = scenario.route;
    const GeoPoint terminal_a{route.terminal_a.latitude, route.terminal_a.longitude};
    const GeoPoint terminal_b{route.terminal_b.latitude, route.terminal_b.longitude};

    for (const auto* stops : {&route.stops_outbound, &route.stops_inbound}) {
        for (const StopPoint& s : *stops) {
            const GeoPoint p{s.latitude, s.longitude};
            if (haversine_m(p, terminal_a) <= route.terminal_a.buffer_radius_m ||
                haversine_m(p, terminal_b) <= route.terminal_b.buffer_radius_m)
                throw ScenarioError("stop '" + s.stop_id + "' lies inside a terminal buffer");
        }
    }

    struct BuiltTrip {
        const TripPlan* plan;
        std::vector<Phase> phases;
        EpochSeconds window_start;
        double window_end;
        TripTruth truth;
    };
    std::vector<BuiltTrip> built;
    built.reserve(scenario.trips.size());

    for (const TripPlan& plan : scenario.trips) {
        if (plan.device_id.empty()) throw ScenarioError("trip plan has empty device_id");
        const auto& stops = route.stops_for(plan.direction);
        if (plan.stop_dwell_s.size() != stops.size())
            throw ScenarioError("trip plan dwell count does not match stop count");
        if (plan.segment_speed_kmh.size() != stops.size() + 1)
            throw ScenarioError("trip plan speed count must be stop count + 1");
        for (const double d : plan.stop_dwell_s)
            if (d < 0.0) throw ScenarioError("dwell seconds must be >= 0");
        for (const double v : plan.segment_speed_kmh)
            if (v <= 0.0) throw ScenarioError("segment speeds must be > 0");

        const bool outbound = plan.direction == Direction::outbound;
        const GeoPoint origin = outbound ? terminal_a : terminal_b;
        const GeoPoint destination = outbound ? terminal_b : terminal_a;
        const double origin_radius = outbound ? route.terminal_a.buffer_radius_m
                                              : route.terminal_b.buffer_radius_m;

        std::vector<GeoPoint> waypoints;
        waypoints.push_back(origin);
        for (const StopPoint& s : stops) waypoints.push_back(GeoPoint{s.latitude, s.longitude});
        waypoints.push_back(destination);

        BuiltTrip bt;
        bt.plan = &plan;
        bt.truth.device_id = plan.device_id;
        bt.truth.direction = plan.direction;
        bt.truth.depart_origin = static_cast<double>(plan.departure_time);

        const double idle = static_cast<double>(scenario.terminal_idle_s);
        double t = static_cast<double>(plan.departure_time);
        bt.window_start = plan.departure_time - scenario.terminal_idle_s;
        bt.phases.push_back(Phase{t - idle, t, origin, origin, 0.0});

        const double first_leg_m = haversine_m(waypoints[0], waypoints[1]);
        if (first_leg_m <= origin_radius)
            throw ScenarioError("first leg must be longer than the origin terminal buffer");
        bt.truth.t_start = t + origin_radius / (plan.segment_speed_kmh[0] / 3.6);

        for (std::size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
            const double length_m = haversine_m(waypoints[leg], waypoints[leg + 1]);
            if (length_m <= 0.0) throw ScenarioError("zero-length leg in route polyline");
            const double speed_ms = plan.segment_speed_kmh[leg] / 3.6;
            const double t_arrive = t + length_m / speed_ms;
            bt.phases.push_back(
                Phase{t, t_arrive, waypoints[leg], waypoints[leg + 1],
                      plan.segment_speed_kmh[leg]});
            t = t_arrive;
            if (leg + 2 < waypoints.size()) {
                const std::size_t stop_idx = leg;
                const double dwell = plan.stop_dwell_s[stop_idx];
                bt.truth.stops.push_back(StopTruth{stops[stop_idx].stop_id,
                                                   stops[stop_idx].sequence_index, t, t + dwell});
                if (dwell > 0.0) {
                    bt.phases.push_back(
                        Phase{t, t + dwell, waypoints[leg + 1], waypoints[leg + 1], 0.0});
                    t += dwell;
                }
            }
        }
        bt.truth.arrive_destination = t;
        bt.truth.t_end = t;
        bt.phases.push_back(Phase{t, t + idle, destination, destination, 0.0});
        bt.window_end = t + idle;
        built.push_back(std::move(bt));
    }

    // Emissions of one device must not overlap in time.
    std::map<std::string, std::vector<std::pair<double, double>>> windows;
    for (const BuiltTrip& bt : built)
        windows[bt.plan->device_id].emplace_back(static_cast<double>(bt.window_start),
                                                 bt.window_end);
    for (auto& [device, spans] : windows) {
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].first < spans[i - 1].second)
                throw ScenarioError("overlapping trips on device '" + device + "'");
        }
    }

    SplitMix64 rng(scenario.seed);
    const double meters_per_deg_lat = kEarthRadiusM * kDegToRad;
    std::vector<GpsRecord> records;
    for (const BuiltTrip& bt : built) {
        for (EpochSeconds ts = bt.window_start; static_cast<double>(ts) <= bt.window_end;
             ts += scenario.sampling_interval_s) {
            // Jitter draws stay in lockstep with the sample grid, so a
            // dropout cannot shift every later position.
            double east = 0.0, north = 0.0;
            if (scenario.jitter_std_m > 0.0) {
                east = rng.gaussian() * scenario.jitter_std_m;
                north = rng.gaussian() * scenario.jitter_std_m;
            }
            if (in_dropout(scenario.dropouts, ts)) continue;
            Sample s = evaluate(bt.phases, static_cast<double>(ts));
            double lat = s.position.latitude + north / meters_per_deg_lat;
            double lon = s.position.longitude +
                         east / (meters_per_deg_lat *
                                 std::cos(s.position.latitude * kDegToRad));
            records.emplace_back(bt.plan->device_id, ts, lat, lon, s.speed_kmh, route.route_id);
        }
    }

    std::sort(records.begin(), records.end(), [](const GpsRecord& a, const GpsRecord& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.device_id < b.device_id;
    });

    GroundTruth truth;
    truth.trips.reserve(built.size());
    for (BuiltTrip& bt : built) truth.trips.push_back(std::move(bt.truth));
    std::sort(truth.trips.begin(), truth.trips.end(), [](const TripTruth& a, const TripTruth& b) {
        if (a.device_id != b.device_id) return a.device_id < b.device_id;
        return a.t_start < b.t_start;
    });
    return {std::move(records), std::move(truth)};
}

RouteDefinition make_line_route(int stops_per_direction, double stop_spacing_m,
                                double terminal_buffer_m, double base_latitude,
                                double base_longitude) {
    if (stops_per_direction < 1) throw ScenarioError("need at least one stop per direction");
    if (stop_spacing_m <= 0.0) throw ScenarioError("stop spacing must be > 0");

    const GeoPoint origin{base_latitude, base_longitude};
    auto east_of = [&](double meters) { return destination_point(origin, meters, 90.0); };

    TerminalPoint terminal_a("TA", "West Terminal", origin.latitude, origin.longitude,
                             terminal_buffer_m);
    const double route_length = stop_spacing_m * (stops_per_direction + 1);
    const GeoPoint b = east_of(route_length);
    TerminalPoint terminal_b("TB", "East Terminal", b.latitude, b.longitude, terminal_buffer_m);

    std::vector<StopPoint> outbound, inbound;
    for (int k = 1; k <= stops_per_direction; ++k) {
        const GeoPoint p = east_of(stop_spacing_m * k);
        char id[16];
        std::snprintf(id, sizeof id, "S%02d", k);
        outbound.emplace_back(std::string(id) + "-out", std::string("Stop ") + id + " out",
                              p.latitude, p.longitude, Direction::outbound, k);
    }
    for (int k = 1; k <= stops_per_direction; ++k) {
        // Inbound sequence 1 is the physical stop closest to terminal B.
        const int physical = stops_per_direction + 1 - k;
        const GeoPoint p = east_of(stop_spacing_m * physical);
        char id[16];
        std::snprintf(id, sizeof id, "S%02d", physical);
        inbound.emplace_back(std::string(id) + "-in", std::string("Stop ") + id + " in",
                             p.latitude, p.longitude, Direction::inbound, k);
    }
    return RouteDefinition("TA-TB", std::move(terminal_a), std::move(terminal_b),
                           std::move(outbound), std::move(inbound));
}

std::vector<TripPlan> plan_shuttle(const RouteDefinition& route, const std::string& device_id,
                                   EpochSeconds first_departure, int trip_count, double dwell_s,
                                   double speed_kmh, EpochSeconds layover_s,
                                   EpochSeconds terminal_idle_s) {
    if (layover_s < 2 * terminal_idle_s)
        throw ScenarioError("layover must cover the terminal idle on both sides");

    std::vector<TripPlan> plans;
    plans.reserve(static_cast<std::size_t>(trip_count));
    EpochSeconds departure = first_departure;
    Direction direction = Direction::outbound;
    for (int i = 0; i < trip_count; ++i) {
        const auto& stops = route.stops_for(direction);
        TripPlan plan;
        plan.device_id = device_id;
        plan.direction = direction;
        plan.departure_time = departure;
        plan.stop_dwell_s.assign(stops.size(), dwell_s);
        plan.segment_speed_kmh.assign(stops.size() + 1, speed_kmh);

        // Arrival estimate drives the next departure.
        const bool outbound = direction == Direction::outbound;
        GeoPoint cursor = outbound
                              ? GeoPoint{route.terminal_a.latitude, route.terminal_a.longitude}
                              : GeoPoint{route.terminal_b.latitude, route.terminal_b.longitude};
        const GeoPoint end = outbound
                                 ? GeoPoint{route.terminal_b.latitude, route.terminal_b.longitude}
                                 : GeoPoint{route.terminal_a.latitude, route.terminal_a.longitude};
        double t = static_cast<double>(departure);
        for (const StopPoint& s : stops) {
            const GeoPoint p{s.latitude, s.longitude};
            t += haversine_m(cursor, p) / (speed_kmh / 3.6) + dwell_s;
            cursor = p;
        }
        t += haversine_m(cursor, end) / (speed_kmh / 3.6);

        plans.push_back(std::move(plan));
        departure = static_cast<EpochSeconds>(std::ceil(t)) + layover_s;
        direction = outbound ? Direction::inbound : Direction::outbound;
    }
    return plans;
}

void write_gps_csv(const std::vector<GpsRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "device_id,timestamp,latitude,longitude,speed,route_id\n";
    for (const GpsRecord& r : records) {
        out << csv_escape(r.device_id, ',') << ',' << format_iso8601_utc(r.timestamp) << ','
            << format_double(r.latitude) << ',' << format_double(r.longitude) << ','
            << format_double(r.speed_kmh) << ',' << csv_escape(r.route_id, ',') << '\n';
    }
    if (!out) throw IoError("write failure on: " + path.string());
}

void write_terminals_csv(const RouteDefinition& route, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "terminal_id,name,latitude,longitude\n";
    for (const TerminalPoint* t : {&route.terminal_a, &route.terminal_b}) {
        out << csv_escape(t->terminal_id, ',') << ',' << csv_escape(t->name, ',') << ','
            << format_double(t->latitude) << ',' << format_double(t->longitude) << '\n';
    }
    if (!out) throw IoError("write failure on: " + path.string());
}

void write_stops_csv(const RouteDefinition& route, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "stop_id,name,latitude,longitude,direction_id,sequence_index\n";
    for (const auto* stops : {&route.stops_outbound, &route.stops_inbound}) {
        for (const StopPoint& s : *stops) {
            out << csv_escape(s.stop_id, ',') << ',' << csv_escape(s.name, ',') << ','
                << format_double(s.latitude) << ',' << format_double(s.longitude) << ','
                << to_string(s.direction) << ',' << s.sequence_index << '\n';
        }
    }
    if (!out) throw IoError("write failure on: " + path.string());
}

}  // namespace tracefeed

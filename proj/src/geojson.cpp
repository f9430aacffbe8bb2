#include "tracefeed/geojson.hpp"

#include <fstream>

#include <json.hpp>

#include "tracefeed/geo.hpp"
#include "tracefeed/parallel.hpp"
#include "tracefeed/stop.hpp"

namespace tracefeed {

namespace {

using Json = nlohmann::ordered_json;

Json coordinates(double latitude, double longitude) {
    // GeoJSON order: longitude first.
    return Json::array({longitude, latitude});
}

Json point_feature(double latitude, double longitude, Json properties) {
    Json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", coordinates(latitude, longitude)}};
    f["properties"] = std::move(properties);
    return f;
}

Json buffer_feature(double latitude, double longitude, double radius_m, Json properties) {
    // Counterclockwise 64-vertex ring, closed by repeating the first vertex.
    Json ring = Json::array();
    Json first;
    for (int k = 0; k < 64; ++k) {
        const double bearing = 90.0 - 360.0 * k / 64.0;
        const GeoPoint v = destination_point(GeoPoint{latitude, longitude}, radius_m, bearing);
        Json coord = coordinates(v.latitude, v.longitude);
        if (k == 0) first = coord;
        ring.push_back(std::move(coord));
    }
    ring.push_back(first);
    Json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Polygon"}, {"coordinates", Json::array({std::move(ring)})}};
    f["properties"] = std::move(properties);
    return f;
}

void write_collection(const std::filesystem::path& path, Json features) {
    Json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << doc.dump() << '\n';
    if (!out) throw IoError("write failure on: " + path.string());
}

}  // namespace

std::string sanitize_filename(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '.';
        if (!ok) c = '_';
    }
    return out;
}

std::size_t export_geojson(const std::vector<TripTrajectory>& trips, const EventsByTrip& events,
                           const RouteDefinition& route, const PipelineConfig& config,
                           const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::size_t feature_count = 0;

    // Route-level collection: terminals, stops, and their buffer rings.
    {
        Json features = Json::array();
        for (const TerminalPoint* t : {&route.terminal_a, &route.terminal_b}) {
            features.push_back(point_feature(
                t->latitude, t->longitude,
                {{"kind", "terminal"}, {"terminal_id", t->terminal_id}, {"name", t->name}}));
            features.push_back(buffer_feature(t->latitude, t->longitude, t->buffer_radius_m,
                                              {{"kind", "terminal-buffer"},
                                               {"terminal_id", t->terminal_id},
                                               {"radius_m", t->buffer_radius_m}}));
        }
        auto add_stops = [&](const std::vector<StopPoint>& stops) {
            for (const StopPoint& s : stops) {
                features.push_back(point_feature(s.latitude, s.longitude,
                                                 {{"kind", "stop"},
                                                  {"stop_id", s.stop_id},
                                                  {"name", s.name},
                                                  {"direction", to_string(s.direction)},
                                                  {"sequence_index", s.sequence_index}}));
                features.push_back(
                    buffer_feature(s.latitude, s.longitude, config.stops_buffer_radius_m,
                                   {{"kind", "stop-buffer"},
                                    {"stop_id", s.stop_id},
                                    {"radius_m", config.stops_buffer_radius_m}}));
            }
        };
        add_stops(route.stops_outbound);
        add_stops(route.stops_inbound);
        feature_count += features.size();
        write_collection(out_dir / "route.geojson", std::move(features));
    }

    // One collection per trip: the trajectory line plus matched event points.
    std::vector<std::pair<std::filesystem::path, Json>> documents(trips.size());
    std::vector<std::size_t> counts(trips.size(), 0);
    parallel_for(trips.size(), config.resolved_workers(), [&](std::size_t i) {
        const TripTrajectory& trip = trips[i];
        Json features = Json::array();

        Json line = Json::array();
        for (const GpsRecord& p : trip.points) line.push_back(coordinates(p.latitude, p.longitude));
        Json trajectory;
        trajectory["type"] = "Feature";
        trajectory["geometry"] = {{"type", "LineString"}, {"coordinates", std::move(line)}};
        trajectory["properties"] = {{"kind", "trajectory"},
                                    {"trip_id", trip.trip_id},
                                    {"device_id", trip.device_id},
                                    {"direction", to_string(trip.direction)}};
        features.push_back(std::move(trajectory));

        const auto it = events.find(trip.trip_id);
        if (it != events.end()) {
            for (const StopEvent& e : it->second) {
                if (!e.matched()) continue;
                // Event point = trajectory point at the arrival timestamp.
                const GpsRecord* at = nullptr;
                for (const GpsRecord& p : trip.points) {
                    if (p.timestamp == *e.arrival_time) {
                        at = &p;
                        break;
                    }
                }
                if (at == nullptr) continue;
                features.push_back(point_feature(at->latitude, at->longitude,
                                                 {{"kind", "stop-event"},
                                                  {"trip_id", trip.trip_id},
                                                  {"stop_id", e.stop_id},
                                                  {"scenario", to_string(e.scenario)},
                                                  {"dwell_s", e.dwell_s}}));
            }
        }
        counts[i] = features.size();
        documents[i] = {out_dir / ("trip_" + sanitize_filename(trip.trip_id) + ".geojson"),
                        std::move(features)};
    });

    for (auto& [path, features] : documents) write_collection(path, std::move(features));
    for (const std::size_t c : counts) feature_count += c;
    return feature_count;
}

}  // namespace tracefeed

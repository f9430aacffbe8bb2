#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracefeed {

using EpochSeconds = std::int64_t;

// Error classes map onto CLI exit codes: config 2, input 3, integrity 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Travel direction between the two route terminals. A->B is outbound.
enum class Direction { outbound, inbound };

inline const char* to_string(Direction d) {
    return d == Direction::outbound ? "outbound" : "inbound";
}

inline bool valid_latitude(double lat) { return lat >= -90.0 && lat <= 90.0; }
inline bool valid_longitude(double lon) { return lon >= -180.0 && lon <= 180.0; }

/// One timestamped vehicle position with speed; the atomic input unit.
/// Speed is always km/h at this boundary; ingestion converts source units.
struct GpsRecord {
    std::string device_id;
    EpochSeconds timestamp = 0;
    double latitude = 0.0;
    double longitude = 0.0;
    double speed_kmh = 0.0;
    std::string route_id;  // optional, empty when absent

    GpsRecord() = default;
    GpsRecord(std::string device, EpochSeconds ts, double lat, double lon, double speed,
              std::string route = {})
        : device_id(std::move(device)),
          timestamp(ts),
          latitude(lat),
          longitude(lon),
          speed_kmh(speed),
          route_id(std::move(route)) {
        if (device_id.empty()) throw ValidationError("GpsRecord: device_id must be non-empty");
        if (!valid_latitude(latitude))
            throw ValidationError("GpsRecord: latitude out of [-90, 90]");
        if (!valid_longitude(longitude))
            throw ValidationError("GpsRecord: longitude out of [-180, 180]");
        if (speed_kmh < 0.0) throw ValidationError("GpsRecord: speed must be >= 0");
    }
};

/// Route endpoint with its circular buffer radius.
struct TerminalPoint {
    std::string terminal_id;
    std::string name;
    double latitude = 0.0;
    double longitude = 0.0;
    double buffer_radius_m = 0.0;

    TerminalPoint() = default;
    TerminalPoint(std::string id, std::string display_name, double lat, double lon,
                  double radius_m)
        : terminal_id(std::move(id)),
          name(std::move(display_name)),
          latitude(lat),
          longitude(lon),
          buffer_radius_m(radius_m) {
        if (terminal_id.empty()) throw ValidationError("TerminalPoint: terminal_id must be non-empty");
        if (!valid_latitude(latitude) || !valid_longitude(longitude))
            throw ValidationError("TerminalPoint: coordinates out of range");
        if (buffer_radius_m <= 0.0)
            throw ValidationError("TerminalPoint: buffer_radius_m must be > 0");
    }
};

struct StopPoint {
    std::string stop_id;
    std::string name;
    double latitude = 0.0;
    double longitude = 0.0;
    Direction direction = Direction::outbound;
    int sequence_index = 0;  // 1-based order along the direction

    StopPoint() = default;
    StopPoint(std::string id, std::string display_name, double lat, double lon, Direction dir,
              int seq)
        : stop_id(std::move(id)),
          name(std::move(display_name)),
          latitude(lat),
          longitude(lon),
          direction(dir),
          sequence_index(seq) {
        if (stop_id.empty()) throw ValidationError("StopPoint: stop_id must be non-empty");
        if (!valid_latitude(latitude) || !valid_longitude(longitude))
            throw ValidationError("StopPoint: coordinates out of range");
        if (sequence_index < 1) throw ValidationError("StopPoint: sequence_index must be >= 1");
    }
};

/// Both terminals plus the ordered stop list for each travel direction.
struct RouteDefinition {
    std::string route_id;
    TerminalPoint terminal_a;
    TerminalPoint terminal_b;
    std::vector<StopPoint> stops_outbound;  // direction A -> B
    std::vector<StopPoint> stops_inbound;   // direction B -> A

    RouteDefinition() = default;
    RouteDefinition(std::string id, TerminalPoint a, TerminalPoint b,
                    std::vector<StopPoint> outbound, std::vector<StopPoint> inbound)
        : route_id(std::move(id)),
          terminal_a(std::move(a)),
          terminal_b(std::move(b)),
          stops_outbound(std::move(outbound)),
          stops_inbound(std::move(inbound)) {
        if (route_id.empty()) throw ValidationError("RouteDefinition: route_id must be non-empty");
        if (terminal_a.terminal_id == terminal_b.terminal_id)
            throw ValidationError("RouteDefinition: terminals must be distinct");
        if (stops_outbound.empty() || stops_inbound.empty())
            throw ValidationError("RouteDefinition: both stop lists must be non-empty");
        check_sequence(stops_outbound, Direction::outbound);
        check_sequence(stops_inbound, Direction::inbound);
    }

    const std::vector<StopPoint>& stops_for(Direction d) const {
        return d == Direction::outbound ? stops_outbound : stops_inbound;
    }

private:
    static void check_sequence(const std::vector<StopPoint>& stops, Direction dir) {
        for (std::size_t i = 0; i < stops.size(); ++i) {
            if (stops[i].direction != dir)
                throw ValidationError("RouteDefinition: stop direction does not match its list");
            if (stops[i].sequence_index != static_cast<int>(i) + 1)
                throw ValidationError(
                    "RouteDefinition: sequence_index values must be consecutive from 1");
        }
    }
};

}  // namespace tracefeed

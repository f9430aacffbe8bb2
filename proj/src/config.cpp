#include "tracefeed/config.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "tracefeed/time_util.hpp"

namespace tracefeed {

std::vector<std::string> FieldMapping::apply(const std::vector<std::string>& header) const {
    std::vector<std::string> out;
    out.reserve(header.size());
    for (const auto& name : header) {
        if (name == device_id) out.push_back("device_id");
        else if (name == timestamp) out.push_back("timestamp");
        else if (name == latitude) out.push_back("latitude");
        else if (name == longitude) out.push_back("longitude");
        else if (name == speed) out.push_back("speed");
        else if (!route_id.empty() && name == route_id) out.push_back("route_id");
        else out.push_back(name);
    }
    return out;
}

std::vector<std::string> FieldMapping::invert(const std::vector<std::string>& header) const {
    std::vector<std::string> out;
    out.reserve(header.size());
    for (const auto& name : header) {
        if (name == "device_id") out.push_back(device_id);
        else if (name == "timestamp") out.push_back(timestamp);
        else if (name == "latitude") out.push_back(latitude);
        else if (name == "longitude") out.push_back(longitude);
        else if (name == "speed") out.push_back(speed);
        else if (name == "route_id" && !route_id.empty()) out.push_back(route_id);
        else out.push_back(name);
    }
    return out;
}

const FieldMapping& validate_mapping(const FieldMapping& mapping) {
    const std::pair<const char*, const std::string*> mandatory[] = {
        {"device_id", &mapping.device_id}, {"timestamp", &mapping.timestamp},
        {"latitude", &mapping.latitude},   {"longitude", &mapping.longitude},
        {"speed", &mapping.speed},
    };
    for (const auto& [role, name] : mandatory) {
        if (name->empty())
            throw ConfigError(std::string("field mapping: mandatory role '") + role +
                              "' is unmapped");
    }
    std::set<std::string> seen;
    for (const auto& [role, name] : mandatory) {
        if (!seen.insert(*name).second)
            throw ConfigError("field mapping: source column '" + *name +
                              "' mapped to more than one role");
    }
    if (!mapping.route_id.empty() && !seen.insert(mapping.route_id).second)
        throw ConfigError("field mapping: source column '" + mapping.route_id +
                          "' mapped to more than one role");
    if (mapping.timestamp_format == TimestampFormat::pattern && mapping.timestamp_pattern.empty())
        throw ConfigError("field mapping: timestamp format 'pattern' needs a pattern string");
    if (!mapping.input_utc_offset.empty())
        parse_utc_offset(mapping.input_utc_offset);  // throws ConfigError when malformed
    return mapping;
}

unsigned PipelineConfig::resolved_workers() const {
    if (worker_count > 0) return worker_count;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

const PipelineConfig& validate_config(const PipelineConfig& config) {
    if (config.terminals_buffer_radius_m <= 0.0)
        throw ConfigError("terminals_buffer_radius_m must be > 0");
    if (config.stops_buffer_radius_m <= 0.0)
        throw ConfigError("stops_buffer_radius_m must be > 0");
    if (config.stops_extended_buffer_radius_m <= 0.0)
        throw ConfigError("stops_extended_buffer_radius_m must be > 0");
    if (config.stops_extended_buffer_radius_m < config.stops_buffer_radius_m)
        throw ConfigError("stops_extended_buffer_radius_m must be >= stops_buffer_radius_m");
    if (config.zero_speed_threshold_kmh < 0.0)
        throw ConfigError("zero_speed_threshold_kmh must be >= 0");
    if (config.max_gap_seconds <= 0) throw ConfigError("max_gap_seconds must be > 0");
    if (config.min_trip_points < 2) throw ConfigError("min_trip_points must be >= 2");
    if (config.min_trip_duration_seconds < 0)
        throw ConfigError("min_trip_duration_seconds must be >= 0");
    if (config.reject_ratio_ceiling < 0.0 || config.reject_ratio_ceiling > 1.0)
        throw ConfigError("reject_ratio_ceiling must be in [0, 1]");
    if (config.teleport_speed_kmh <= 0.0) throw ConfigError("teleport_speed_kmh must be > 0");
    parse_utc_offset(config.timezone);  // throws ConfigError when malformed
    return config;
}

}  // namespace tracefeed

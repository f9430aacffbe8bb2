#pragma once

#include <string>
#include <vector>

#include "tracefeed/model.hpp"

namespace tracefeed {

enum class TimestampFormat { iso8601, epoch_seconds, epoch_millis, pattern };

enum class SpeedUnit { kmh, ms, mph };

/// Maps canonical record fields onto the source file's column names.
/// route_id is the only optional role; an empty name means the column is absent.
struct FieldMapping {
    std::string device_id = "device_id";
    std::string timestamp = "timestamp";
    std::string latitude = "latitude";
    std::string longitude = "longitude";
    std::string speed = "speed";
    std::string route_id;  // optional

    TimestampFormat timestamp_format = TimestampFormat::iso8601;
    std::string timestamp_pattern;  // used when timestamp_format == pattern
    // Zoneless wall times are read as UTC unless this fixed offset is set
    // (e.g. "+05:30"). Explicit zone designators and epoch forms always win.
    std::string input_utc_offset;
    SpeedUnit speed_unit = SpeedUnit::kmh;

    /// Rename mapped source columns to their canonical role names.
    /// Unmapped columns pass through untouched.
    std::vector<std::string> apply(const std::vector<std::string>& header) const;

    /// Inverse of apply: canonical role names back to source names.
    std::vector<std::string> invert(const std::vector<std::string>& header) const;
};

/// Throws ConfigError naming the first violated invariant.
const FieldMapping& validate_mapping(const FieldMapping& mapping);

struct PipelineConfig {
    double terminals_buffer_radius_m = 100.0;
    double stops_buffer_radius_m = 50.0;
    double stops_extended_buffer_radius_m = 100.0;
    double zero_speed_threshold_kmh = 0.0;
    std::int64_t max_gap_seconds = 900;
    std::size_t min_trip_points = 10;
    std::int64_t min_trip_duration_seconds = 300;
    unsigned worker_count = 0;  // 0 = auto (hardware concurrency)

    // Ingestion knobs.
    char delimiter = ',';
    double reject_ratio_ceiling = 0.10;  // abort when rejected/total exceeds this
    std::string timezone = "+00:00";     // fixed UTC offset for the service-day clock

    // Cleaning knob: implied speed above this drops the later point.
    double teleport_speed_kmh = 150.0;

    // GTFS placeholder metadata.
    std::string agency_id = "agency";
    std::string agency_name = "Unknown Agency";
    std::string agency_url = "https://example.invalid";

    unsigned resolved_workers() const;
};

/// Returns the config unchanged if all invariants hold.
/// Throws ConfigError naming the first violated invariant.
const PipelineConfig& validate_config(const PipelineConfig& config);

}  // namespace tracefeed

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tracefeed/pipeline.hpp"
#include "tracefeed/time_util.hpp"

namespace {

using tracefeed::ConfigError;

tracefeed::TimestampFormat timestamp_format_from(const std::string& name) {
    if (name == "iso8601") return tracefeed::TimestampFormat::iso8601;
    if (name == "epoch-seconds") return tracefeed::TimestampFormat::epoch_seconds;
    if (name == "epoch-millis") return tracefeed::TimestampFormat::epoch_millis;
    if (name == "pattern") return tracefeed::TimestampFormat::pattern;
    throw ConfigError("unknown timestamp_format '" + name + "'");
}

tracefeed::SpeedUnit speed_unit_from(const std::string& name) {
    if (name == "kmh") return tracefeed::SpeedUnit::kmh;
    if (name == "ms") return tracefeed::SpeedUnit::ms;
    if (name == "mph") return tracefeed::SpeedUnit::mph;
    throw ConfigError("unknown speed_unit '" + name + "'");
}

unsigned parse_workers(const std::string& value) {
    if (value == "auto") return 0;
    try {
        const int n = std::stoi(value);
        if (n < 1) throw ConfigError("--workers must be positive or 'auto'");
        return static_cast<unsigned>(n);
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError("--workers must be positive or 'auto', got '" + value + "'");
    }
}

void apply_config_file(const std::string& path, tracefeed::PipelineConfig& config,
                       tracefeed::FieldMapping& mapping) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file root must be an object");

    for (const auto& [key, value] : doc.items()) {
        if (key == "terminals_buffer_radius_m") config.terminals_buffer_radius_m = value;
        else if (key == "stops_buffer_radius_m") config.stops_buffer_radius_m = value;
        else if (key == "stops_extended_buffer_radius_m")
            config.stops_extended_buffer_radius_m = value;
        else if (key == "zero_speed_threshold_kmh") config.zero_speed_threshold_kmh = value;
        else if (key == "max_gap_seconds") config.max_gap_seconds = value;
        else if (key == "min_trip_points") config.min_trip_points = value;
        else if (key == "min_trip_duration_seconds") config.min_trip_duration_seconds = value;
        else if (key == "worker_count") {
            if (value.is_string()) config.worker_count = parse_workers(value.get<std::string>());
            else config.worker_count = value;
        } else if (key == "delimiter") {
            const std::string d = value;
            if (d.size() != 1) throw ConfigError("delimiter must be a single character");
            config.delimiter = d[0];
        } else if (key == "reject_ratio_ceiling") config.reject_ratio_ceiling = value;
        else if (key == "timezone") config.timezone = value;
        else if (key == "teleport_speed_kmh") config.teleport_speed_kmh = value;
        else if (key == "agency_id") config.agency_id = value;
        else if (key == "agency_name") config.agency_name = value;
        else if (key == "agency_url") config.agency_url = value;
        else if (key == "field_mapping") {
            if (!value.is_object()) throw ConfigError("field_mapping must be an object");
            for (const auto& [mk, mv] : value.items()) {
                if (mk == "device_id") mapping.device_id = mv;
                else if (mk == "timestamp") mapping.timestamp = mv;
                else if (mk == "latitude") mapping.latitude = mv;
                else if (mk == "longitude") mapping.longitude = mv;
                else if (mk == "speed") mapping.speed = mv;
                else if (mk == "route_id") mapping.route_id = mv;
                else if (mk == "timestamp_format")
                    mapping.timestamp_format = timestamp_format_from(mv.get<std::string>());
                else if (mk == "timestamp_pattern") mapping.timestamp_pattern = mv;
                else if (mk == "input_utc_offset") mapping.input_utc_offset = mv;
                else if (mk == "speed_unit")
                    mapping.speed_unit = speed_unit_from(mv.get<std::string>());
                else throw ConfigError("unknown field_mapping key '" + mk + "'");
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "tracefeed: turns raw transit GPS streams into GTFS static tables,\n"
        "a trip-updates feed, and GeoJSON map layers"};

    std::string gps_path, terminals_path, stops_path, out_dir = "out";
    std::string config_path, workers = "auto", summary_path = "-";
    bool emit_geojson = false;
    tracefeed::PipelineConfig config;
    tracefeed::FieldMapping mapping;

    app.add_option("--gps", gps_path, "GPS records file (delimited text)")->required();
    app.add_option("--terminals", terminals_path, "terminals file (exactly 2 rows)")->required();
    app.add_option("--stops", stops_path,
                   "stops file; omit to run trip extraction only (no stop matching)");
    app.add_option("--out", out_dir, "output directory (replaced atomically)");
    app.add_option("--config", config_path, "JSON config file; explicit flags win");
    auto* terminal_radius =
        app.add_option("--terminal-radius", config.terminals_buffer_radius_m,
                       "terminal buffer radius, meters");
    auto* stop_radius =
        app.add_option("--stop-radius", config.stops_buffer_radius_m, "stop buffer radius, meters");
    auto* stop_ext = app.add_option("--stop-extended-radius",
                                    config.stops_extended_buffer_radius_m,
                                    "enlarged stop buffer radius, meters");
    auto* zero_speed = app.add_option("--zero-speed-threshold", config.zero_speed_threshold_kmh,
                                      "speed at or below this counts as stopped, km/h");
    auto* max_gap = app.add_option("--max-gap", config.max_gap_seconds,
                                   "continuity gap threshold, seconds");
    auto* min_points =
        app.add_option("--min-trip-points", config.min_trip_points, "minimum points per trip");
    auto* min_duration = app.add_option("--min-trip-duration", config.min_trip_duration_seconds,
                                        "minimum trip duration, seconds");
    auto* workers_opt = app.add_option("--workers", workers, "worker count or 'auto'");
    auto* timezone =
        app.add_option("--timezone", config.timezone, "fixed UTC offset, e.g. +05:30");
    app.add_flag("--emit-geojson", emit_geojson, "also write GeoJSON map layers");
    app.add_option("--summary", summary_path, "run summary destination; '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) {
            // Remember explicit flags, apply the file, then restore them.
            tracefeed::PipelineConfig from_flags = config;
            apply_config_file(config_path, config, mapping);
            if (terminal_radius->count())
                config.terminals_buffer_radius_m = from_flags.terminals_buffer_radius_m;
            if (stop_radius->count())
                config.stops_buffer_radius_m = from_flags.stops_buffer_radius_m;
            if (stop_ext->count())
                config.stops_extended_buffer_radius_m = from_flags.stops_extended_buffer_radius_m;
            if (zero_speed->count())
                config.zero_speed_threshold_kmh = from_flags.zero_speed_threshold_kmh;
            if (max_gap->count()) config.max_gap_seconds = from_flags.max_gap_seconds;
            if (min_points->count()) config.min_trip_points = from_flags.min_trip_points;
            if (min_duration->count())
                config.min_trip_duration_seconds = from_flags.min_trip_duration_seconds;
            if (timezone->count()) config.timezone = from_flags.timezone;
        }
        if (workers_opt->count() || config.worker_count == 0)
            config.worker_count = parse_workers(workers);

        tracefeed::RunSummary summary;
        if (stops_path.empty()) {
            summary = tracefeed::run_trip_pipeline(gps_path, terminals_path, out_dir, config,
                                                   mapping);
        } else {
            summary = tracefeed::run_full_pipeline(gps_path, terminals_path, stops_path, out_dir,
                                                   config, mapping, emit_geojson);
        }

        const std::string rendered = summary.to_json();
        if (summary_path == "-") {
            std::cout << rendered;
        } else {
            std::ofstream out(summary_path, std::ios::binary);
            if (!out) throw tracefeed::IoError("cannot write summary to " + summary_path);
            out << rendered;
        }
        return 0;
    } catch (const tracefeed::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tracefeed::IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 4;
    } catch (const tracefeed::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const tracefeed::SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const tracefeed::ValidationError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

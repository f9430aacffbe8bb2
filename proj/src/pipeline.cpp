#include "tracefeed/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "tracefeed/csv.hpp"
#include "tracefeed/features.hpp"
#include "tracefeed/geojson.hpp"
#include "tracefeed/gtfs.hpp"
#include "tracefeed/parallel.hpp"
#include "tracefeed/stop.hpp"
#include "tracefeed/time_util.hpp"

namespace tracefeed {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void log_stage(const std::string& stage, const std::string& fields) {
    std::cerr << "[" << stage << "] " << fields << "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failure on: " + path.string());
}

std::string trips_table(const std::vector<TripTrajectory>& trips) {
    std::ostringstream out;
    out << "trip_id,device_id,direction,origin_terminal_id,destination_terminal_id,start_time,"
           "end_time,end_fallback,point_count\n";
    for (const TripTrajectory& t : trips) {
        out << csv_escape(t.trip_id, ',') << ',' << csv_escape(t.device_id, ',') << ','
            << to_string(t.direction) << ',' << csv_escape(t.origin_terminal_id, ',') << ','
            << csv_escape(t.destination_terminal_id, ',') << ','
            << format_iso8601_utc(t.start_time) << ',' << format_iso8601_utc(t.end_time) << ','
            << (t.end_fallback ? 1 : 0) << ',' << t.points.size() << '\n';
    }
    return out.str();
}

std::string features_table(const std::vector<TripFeatureRow>& rows) {
    std::ostringstream out;
    out << "trip_id,duration_s,point_count,path_length_m,mean_speed_kmh\n";
    for (const TripFeatureRow& r : rows) {
        out << csv_escape(r.trip_id, ',') << ',' << r.duration_s << ',' << r.point_count << ','
            << format_double(r.path_length_m) << ',' << format_double(r.mean_speed_kmh) << '\n';
    }
    return out.str();
}

std::string segment_runs_table(const std::vector<SegmentRun>& runs) {
    std::ostringstream out;
    out << "trip_id,segment_index,from_stop_id,to_stop_id,run_time_s\n";
    for (const SegmentRun& r : runs) {
        out << csv_escape(r.trip_id, ',') << ',' << r.segment_index << ','
            << csv_escape(r.from_stop_id, ',') << ',' << csv_escape(r.to_stop_id, ',') << ','
            << r.run_time_s << '\n';
    }
    return out.str();
}

// "out/" and "out" must stage to the same sibling.
std::filesystem::path strip_trailing_separator(const std::filesystem::path& p) {
    std::string s = p.string();
    while (s.size() > 1 && (s.back() == '/' || s.back() == std::filesystem::path::preferred_separator))
        s.pop_back();
    return std::filesystem::path(s);
}

/// Builds everything under a temp sibling, then swaps it into place.
class StagedOutputDir {
public:
    explicit StagedOutputDir(const std::filesystem::path& final_dir)
        : final_(strip_trailing_separator(final_dir)),
          temp_(final_.parent_path().empty()
                    ? std::filesystem::path(final_.string() + ".tmp")
                    : final_.parent_path() / (final_.filename().string() + ".tmp")) {
        std::filesystem::remove_all(temp_);
        std::filesystem::create_directories(temp_);
    }
    ~StagedOutputDir() {
        if (!committed_) {
            std::error_code ec;
            std::filesystem::remove_all(temp_, ec);
        }
    }
    const std::filesystem::path& path() const { return temp_; }
    void commit() {
        std::filesystem::remove_all(final_);
        std::filesystem::rename(temp_, final_);
        committed_ = true;
    }

private:
    std::filesystem::path final_;
    std::filesystem::path temp_;
    bool committed_ = false;
};

struct CoreStages {
    std::vector<DeviceSeries> series;
    std::vector<TripTrajectory> trips;
    std::vector<TripFeatureRow> features;
};

// Ingest through extraction; shared by both pipeline entry points.
CoreStages run_core(const std::filesystem::path& gps_path, const TerminalPoint& terminal_a,
                    const TerminalPoint& terminal_b, const PipelineConfig& config,
                    const FieldMapping& mapping, RunSummary& summary) {
    auto t0 = Clock::now();
    GpsLoadResult load = load_gps(gps_path, mapping, config);
    summary.rows_total = load.total_rows;
    summary.rows_accepted = load.records.size();
    summary.rows_rejected = load.rejected.size();
    summary.ingest_ms = ms_since(t0);
    log_stage("ingest", "rows=" + std::to_string(summary.rows_total) +
                            " accepted=" + std::to_string(summary.rows_accepted) +
                            " rejected=" + std::to_string(summary.rows_rejected) +
                            " ms=" + format_double(summary.ingest_ms));

    t0 = Clock::now();
    auto [cleaned, cleaning] = clean(load.records, config);
    summary.cleaning = cleaning;
    summary.clean_ms = ms_since(t0);
    log_stage("clean", "kept=" + std::to_string(cleaning.kept) +
                           " duplicates=" + std::to_string(cleaning.duplicates) +
                           " out_of_range=" + std::to_string(cleaning.out_of_range) +
                           " teleports=" + std::to_string(cleaning.teleports) +
                           " ms=" + format_double(summary.clean_ms));

    t0 = Clock::now();
    CoreStages stages;
    stages.series = partition(cleaned, config);
    summary.devices = stages.series.size();
    summary.partition_ms = ms_since(t0);
    log_stage("partition", "devices=" + std::to_string(summary.devices) +
                               " ms=" + format_double(summary.partition_ms));

    t0 = Clock::now();
    std::vector<std::pair<std::vector<TripTrajectory>, ExtractionReport>> per_device(
        stages.series.size());
    parallel_for(stages.series.size(), config.resolved_workers(), [&](std::size_t i) {
        per_device[i] = extract_trips(stages.series[i], terminal_a, terminal_b, config);
    });
    for (auto& [trips, report] : per_device) {
        // Series are sorted by device and trips by start time, so appending
        // keeps the global (device_id, start_time) order.
        for (auto& trip : trips) stages.trips.push_back(std::move(trip));
        summary.extraction.trips += report.trips;
        summary.extraction.no_departure += report.no_departure;
        summary.extraction.incomplete += report.incomplete;
        summary.extraction.spanned_gap += report.spanned_gap;
        summary.extraction.too_few_points += report.too_few_points;
        summary.extraction.too_short_duration += report.too_short_duration;
        summary.extraction.end_fallback += report.end_fallback;
    }
    summary.extract_ms = ms_since(t0);
    log_stage("extract", "trips=" + std::to_string(stages.trips.size()) +
                             " incomplete=" + std::to_string(summary.extraction.incomplete) +
                             " ms=" + format_double(summary.extract_ms));

    stages.features.resize(stages.trips.size());
    parallel_for(stages.trips.size(), config.resolved_workers(),
                 [&](std::size_t i) { stages.features[i] = trip_features(stages.trips[i]); });
    return stages;
}

}  // namespace

std::string RunSummary::to_json() const {
    nlohmann::ordered_json j;
    j["ingest"] = {{"rows_total", rows_total},
                   {"rows_accepted", rows_accepted},
                   {"rows_rejected", rows_rejected}};
    j["clean"] = {{"input", cleaning.input_count},
                  {"kept", cleaning.kept},
                  {"duplicates", cleaning.duplicates},
                  {"out_of_range", cleaning.out_of_range},
                  {"teleports", cleaning.teleports}};
    j["partition"] = {{"devices", devices}};
    j["extract"] = {{"trips", extraction.trips},
                    {"no_departure", extraction.no_departure},
                    {"incomplete", extraction.incomplete},
                    {"spanned_gap", extraction.spanned_gap},
                    {"too_few_points", extraction.too_few_points},
                    {"too_short_duration", extraction.too_short_duration},
                    {"end_fallback", extraction.end_fallback}};
    j["match"] = {{"zero_speed_in_buffer", events_zero_speed},
                  {"proximity_no_stop", events_proximity},
                  {"extended_buffer", events_extended},
                  {"unmatched", events_unmatched}};
    j["derive"] = {{"segment_runs", segment_runs}, {"skipped_segments", skipped_segments}};
    j["report"] = {{"gtfs_trip_rows", gtfs_trip_rows},
                   {"gtfs_stop_time_rows", gtfs_stop_time_rows},
                   {"trip_update_entities", trip_update_entities},
                   {"geojson_features", geojson_features},
                   {"files_written", files_written}};
    j["timings_ms"] = {{"ingest", ingest_ms},     {"clean", clean_ms},
                       {"partition", partition_ms}, {"extract", extract_ms},
                       {"match", match_ms},       {"derive", derive_ms},
                       {"report", report_ms},     {"total", total_ms}};
    return j.dump(2) + "\n";
}

RunSummary run_trip_pipeline(const std::filesystem::path& gps_path,
                             const std::filesystem::path& terminals_path,
                             const std::filesystem::path& out_dir, const PipelineConfig& config,
                             const FieldMapping& mapping) {
    validate_config(config);
    validate_mapping(mapping);
    const auto start = Clock::now();

    RunSummary summary;
    auto [terminal_a, terminal_b] = load_terminals(terminals_path, config);
    CoreStages stages = run_core(gps_path, terminal_a, terminal_b, config, mapping, summary);

    const auto t0 = Clock::now();
    StagedOutputDir staged(out_dir);
    write_text_file(staged.path() / "trips.csv", trips_table(stages.trips));
    write_text_file(staged.path() / "trip_features.csv", features_table(stages.features));
    staged.commit();
    summary.files_written = {"trips.csv", "trip_features.csv"};
    summary.report_ms = ms_since(t0);
    summary.total_ms = ms_since(start);
    log_stage("report", "files=2 ms=" + format_double(summary.report_ms));
    return summary;
}

RunSummary run_full_pipeline(const std::filesystem::path& gps_path,
                             const std::filesystem::path& terminals_path,
                             const std::filesystem::path& stops_path,
                             const std::filesystem::path& out_dir, const PipelineConfig& config,
                             const FieldMapping& mapping, bool emit_geojson_layers) {
    validate_config(config);
    validate_mapping(mapping);
    const auto start = Clock::now();

    RunSummary summary;
    const RouteDefinition route = load_route(terminals_path, stops_path, config);
    CoreStages stages =
        run_core(gps_path, route.terminal_a, route.terminal_b, config, mapping, summary);

    auto t0 = Clock::now();
    std::vector<std::vector<StopEvent>> per_trip_events(stages.trips.size());
    parallel_for(stages.trips.size(), config.resolved_workers(), [&](std::size_t i) {
        const TripTrajectory& trip = stages.trips[i];
        per_trip_events[i] = match_stops(trip, route.stops_for(trip.direction), config);
    });
    EventsByTrip events;
    for (std::size_t i = 0; i < stages.trips.size(); ++i) {
        for (const StopEvent& e : per_trip_events[i]) {
            switch (e.scenario) {
                case MatchScenario::zero_speed_in_buffer: ++summary.events_zero_speed; break;
                case MatchScenario::proximity_no_stop: ++summary.events_proximity; break;
                case MatchScenario::extended_buffer: ++summary.events_extended; break;
                case MatchScenario::unmatched: ++summary.events_unmatched; break;
            }
        }
        events.emplace(stages.trips[i].trip_id, std::move(per_trip_events[i]));
    }
    summary.match_ms = ms_since(t0);
    log_stage("match",
              "zero_speed=" + std::to_string(summary.events_zero_speed) +
                  " proximity=" + std::to_string(summary.events_proximity) +
                  " extended=" + std::to_string(summary.events_extended) +
                  " unmatched=" + std::to_string(summary.events_unmatched) +
                  " ms=" + format_double(summary.match_ms));

    t0 = Clock::now();
    std::vector<std::pair<std::vector<SegmentRun>, TripSummary>> derived(stages.trips.size());
    parallel_for(stages.trips.size(), config.resolved_workers(), [&](std::size_t i) {
        derived[i] = derive(stages.trips[i], events.at(stages.trips[i].trip_id));
    });
    std::vector<SegmentRun> all_runs;
    for (auto& [runs, trip_summary] : derived) {
        summary.segment_runs += runs.size();
        summary.skipped_segments += trip_summary.skipped_segments;
        for (auto& r : runs) all_runs.push_back(std::move(r));
    }
    summary.derive_ms = ms_since(t0);
    log_stage("derive", "segment_runs=" + std::to_string(summary.segment_runs) +
                            " skipped=" + std::to_string(summary.skipped_segments) +
                            " ms=" + format_double(summary.derive_ms));

    t0 = Clock::now();
    StagedOutputDir staged(out_dir);
    write_text_file(staged.path() / "trips.csv", trips_table(stages.trips));
    write_text_file(staged.path() / "trip_features.csv", features_table(stages.features));
    write_text_file(staged.path() / "segment_runs.csv", segment_runs_table(all_runs));
    summary.files_written = {"trips.csv", "trip_features.csv", "segment_runs.csv"};

    const GtfsManifest manifest =
        emit_static(route, stages.trips, events, staged.path() / "gtfs", config);
    summary.gtfs_trip_rows = manifest.trip_rows;
    summary.gtfs_stop_time_rows = manifest.stop_time_rows;
    for (const auto& f : manifest.files) summary.files_written.push_back("gtfs/" + f);

    summary.trip_update_entities =
        emit_trip_updates(route, stages.trips, events, staged.path() / "trip_updates.jsonl",
                          config);
    summary.files_written.push_back("trip_updates.jsonl");

    if (emit_geojson_layers) {
        summary.geojson_features =
            export_geojson(stages.trips, events, route, config, staged.path() / "geojson");
        summary.files_written.push_back("geojson/");
    }

    // Counts must reconcile across stages before the output is committed.
    if (summary.gtfs_trip_rows != stages.trips.size())
        throw IntegrityError("GTFS trip rows do not match extracted trips");
    if (summary.trip_update_entities != stages.trips.size())
        throw IntegrityError("trip update entities do not match extracted trips");

    staged.commit();
    summary.report_ms = ms_since(t0);
    summary.total_ms = ms_since(start);
    log_stage("report", "gtfs_trips=" + std::to_string(summary.gtfs_trip_rows) +
                            " stop_times=" + std::to_string(summary.gtfs_stop_time_rows) +
                            " entities=" + std::to_string(summary.trip_update_entities) +
                            " ms=" + format_double(summary.report_ms));
    return summary;
}

}  // namespace tracefeed

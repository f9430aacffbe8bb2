#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tracefeed/config.hpp"
#include "tracefeed/ingest.hpp"
#include "tracefeed/preprocess.hpp"
#include "tracefeed/trip.hpp"

namespace tracefeed {

struct RunSummary {
    // ingestion
    std::size_t rows_total = 0;
    std::size_t rows_accepted = 0;
    std::size_t rows_rejected = 0;
    // preprocessing
    CleaningReport cleaning;
    std::size_t devices = 0;
    // trip extraction (aggregated over devices)
    ExtractionReport extraction;
    // stop matching
    std::size_t events_zero_speed = 0;
    std::size_t events_proximity = 0;
    std::size_t events_extended = 0;
    std::size_t events_unmatched = 0;
    // feature derivation
    std::size_t segment_runs = 0;
    std::size_t skipped_segments = 0;
    // reporting
    std::size_t gtfs_trip_rows = 0;
    std::size_t gtfs_stop_time_rows = 0;
    std::size_t trip_update_entities = 0;
    std::size_t geojson_features = 0;
    std::vector<std::string> files_written;
    // wall clock per stage
    double ingest_ms = 0.0;
    double clean_ms = 0.0;
    double partition_ms = 0.0;
    double extract_ms = 0.0;
    double match_ms = 0.0;
    double derive_ms = 0.0;
    double report_ms = 0.0;
    double total_ms = 0.0;

    std::string to_json() const;
};

/// Ingest -> clean -> partition -> extract, then trips and per-trip feature
/// tables. No stop matching. Output lands in out_dir through a temp
/// directory and an atomic rename, so a failed run leaves nothing behind.
RunSummary run_trip_pipeline(const std::filesystem::path& gps_path,
                             const std::filesystem::path& terminals_path,
                             const std::filesystem::path& out_dir, const PipelineConfig& config,
                             const FieldMapping& mapping = {});

/// The full chain through GTFS static tables, the trip-updates feed, and
/// (optionally) GeoJSON map layers. Per-device and per-trip work runs across
/// the configured workers; outputs are independent of the worker count.
RunSummary run_full_pipeline(const std::filesystem::path& gps_path,
                             const std::filesystem::path& terminals_path,
                             const std::filesystem::path& stops_path,
                             const std::filesystem::path& out_dir, const PipelineConfig& config,
                             const FieldMapping& mapping = {}, bool emit_geojson = false);

}  // namespace tracefeed

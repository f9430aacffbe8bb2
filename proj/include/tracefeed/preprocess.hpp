#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tracefeed/config.hpp"
#include "tracefeed/model.hpp"

namespace tracefeed {

struct CleaningReport {
    std::size_t input_count = 0;
    std::size_t duplicates = 0;    // same (device_id, timestamp), first kept
    std::size_t out_of_range = 0;  // coordinates outside valid ranges
    std::size_t teleports = 0;     // implied speed above the configured ceiling
    std::size_t kept = 0;
};

/// Per-device, time-ascending record sequence with continuity flags.
/// gap_indices holds positions whose time gap to the previous record
/// exceeds max_gap_seconds.
struct DeviceSeries {
    std::string device_id;
    std::vector<GpsRecord> records;
    std::vector<std::size_t> gap_indices;
};

/// Pure filter: drops exact duplicates, out-of-range coordinates, and
/// physically impossible jumps (later point dropped, chained against the
/// last kept point per device). Input order is preserved; idempotent.
std::pair<std::vector<GpsRecord>, CleaningReport> clean(const std::vector<GpsRecord>& records,
                                                        const PipelineConfig& config);

/// Groups cleaned records by device and sorts each group by time. Series are
/// ordered by device_id; output is invariant under input permutation.
std::vector<DeviceSeries> partition(const std::vector<GpsRecord>& records,
                                    const PipelineConfig& config);

}  // namespace tracefeed

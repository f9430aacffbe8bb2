#include "tracefeed/preprocess.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "tracefeed/geo.hpp"
#include "tracefeed/parallel.hpp"

namespace tracefeed {

namespace {

// Total order on records of one device so partition is permutation-invariant
// even when timestamps collide on uncleaned input.
bool record_less(const GpsRecord& a, const GpsRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.latitude != b.latitude) return a.latitude < b.latitude;
    if (a.longitude != b.longitude) return a.longitude < b.longitude;
    return a.speed_kmh < b.speed_kmh;
}

}  // namespace

std::pair<std::vector<GpsRecord>, CleaningReport> clean(const std::vector<GpsRecord>& records,
                                                        const PipelineConfig& config) {
    CleaningReport report;
    report.input_count = records.size();

    enum class Mark : unsigned char { keep, duplicate, out_of_range, teleport };
    std::vector<Mark> marks(records.size(), Mark::keep);

    // Group indices per device, preserving input order.
    std::unordered_map<std::string, std::vector<std::size_t>> by_device;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const GpsRecord& r = records[i];
        if (!valid_latitude(r.latitude) || !valid_longitude(r.longitude)) {
            marks[i] = Mark::out_of_range;
            continue;
        }
        by_device[r.device_id].push_back(i);
    }

    std::vector<std::vector<std::size_t>*> groups;
    groups.reserve(by_device.size());
    for (auto& [_, indices] : by_device) groups.push_back(&indices);

    parallel_for(groups.size(), config.resolved_workers(), [&](std::size_t g) {
        std::vector<std::size_t>& indices = *groups[g];

        // First occurrence in input order wins among duplicates.
        std::unordered_map<EpochSeconds, std::size_t> first_at;
        first_at.reserve(indices.size());
        for (const std::size_t i : indices) {
            const auto [it, inserted] = first_at.try_emplace(records[i].timestamp, i);
            if (!inserted) marks[i] = Mark::duplicate;
        }

        // Walk in time order, comparing each point against the last kept one.
        std::vector<std::size_t> survivors;
        survivors.reserve(first_at.size());
        for (const auto& [_, i] : first_at) survivors.push_back(i);
        std::sort(survivors.begin(), survivors.end(),
                  [&](std::size_t a, std::size_t b) { return record_less(records[a], records[b]); });

        std::size_t last_kept = SIZE_MAX;
        for (const std::size_t i : survivors) {
            if (last_kept != SIZE_MAX) {
                const GpsRecord& prev = records[last_kept];
                const GpsRecord& cur = records[i];
                const double dt = static_cast<double>(cur.timestamp - prev.timestamp);
                const double dist = haversine_m(GeoPoint{prev.latitude, prev.longitude},
                                                GeoPoint{cur.latitude, cur.longitude});
                if (dt > 0.0 && dist / dt * 3.6 > config.teleport_speed_kmh) {
                    marks[i] = Mark::teleport;
                    continue;
                }
            }
            last_kept = i;
        }
    });

    std::vector<GpsRecord> kept;
    kept.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        switch (marks[i]) {
            case Mark::keep: kept.push_back(records[i]); break;
            case Mark::duplicate: ++report.duplicates; break;
            case Mark::out_of_range: ++report.out_of_range; break;
            case Mark::teleport: ++report.teleports; break;
        }
    }
    report.kept = kept.size();
    return {std::move(kept), report};
}

std::vector<DeviceSeries> partition(const std::vector<GpsRecord>& records,
                                    const PipelineConfig& config) {
    std::map<std::string, std::vector<std::size_t>> by_device;
    for (std::size_t i = 0; i < records.size(); ++i)
        by_device[records[i].device_id].push_back(i);

    std::vector<DeviceSeries> series;
    series.reserve(by_device.size());
    for (auto& [device, _] : by_device) {
        series.push_back(DeviceSeries{device, {}, {}});
    }

    std::vector<std::vector<std::size_t>*> groups;
    groups.reserve(by_device.size());
    for (auto& [_, indices] : by_device) groups.push_back(&indices);

    parallel_for(series.size(), config.resolved_workers(), [&](std::size_t g) {
        std::vector<std::size_t>& indices = *groups[g];
        std::sort(indices.begin(), indices.end(),
                  [&](std::size_t a, std::size_t b) { return record_less(records[a], records[b]); });
        DeviceSeries& s = series[g];
        s.records.reserve(indices.size());
        for (const std::size_t i : indices) s.records.push_back(records[i]);
        for (std::size_t i = 1; i < s.records.size(); ++i) {
            if (s.records[i].timestamp - s.records[i - 1].timestamp > config.max_gap_seconds)
                s.gap_indices.push_back(i);
        }
    });
    return series;
}

}  // namespace tracefeed

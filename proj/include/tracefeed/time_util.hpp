#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tracefeed/config.hpp"
#include "tracefeed/model.hpp"

namespace tracefeed {

struct CivilDate {
    int year = 1970;
    int month = 1;  // 1-12
    int day = 1;    // 1-31
};

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, int month, int day);
CivilDate civil_from_days(std::int64_t days);

/// "YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|+HH:MM|-HH:MM|+HHMM]"; fractional seconds
/// are truncated, a missing zone designator means UTC. had_zone, when given,
/// reports whether the text carried an explicit designator.
std::optional<EpochSeconds> parse_iso8601(const std::string& text, bool* had_zone = nullptr);

/// Dispatches on the mapping's declared format. The pattern form supports the
/// tokens %Y %m %d %H %M %S with literal text between them. Zoneless wall
/// times (pattern, or ISO without a designator) are shifted by
/// assume_offset_s; explicit zones and epoch forms are absolute already.
std::optional<EpochSeconds> parse_timestamp(const std::string& text, TimestampFormat format,
                                            const std::string& pattern,
                                            std::int64_t assume_offset_s = 0);

std::string format_iso8601_utc(EpochSeconds t);

/// Fixed UTC offset in seconds from "+HH:MM", "-HH:MM", "+HHMM", "Z" or "UTC".
/// Throws ConfigError on malformed input.
std::int64_t parse_utc_offset(const std::string& text);

/// "YYYYMMDD" of the local civil date containing t under the given offset.
std::string service_date_of(EpochSeconds t, std::int64_t utc_offset_s);

/// Epoch second of local midnight opening the given "YYYYMMDD" service date.
EpochSeconds service_day_start(const std::string& yyyymmdd, std::int64_t utc_offset_s);

/// GTFS service-day clock rendering: HH:MM:SS with hours >= 24 for events
/// past midnight of the service day that opened the trip.
std::string format_service_time(EpochSeconds t, EpochSeconds service_day_start_epoch);

/// Inverse of format_service_time; empty optional on malformed text.
std::optional<EpochSeconds> parse_service_time(const std::string& text,
                                               EpochSeconds service_day_start_epoch);

}  // namespace tracefeed

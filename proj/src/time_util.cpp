#include "tracefeed/time_util.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace tracefeed {

namespace {

bool read_int(const std::string& s, std::size_t& pos, int digits, int& out) {
    if (pos + digits > s.size()) return false;
    int value = 0;
    for (int i = 0; i < digits; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    pos += digits;
    out = value;
    return true;
}

bool valid_civil(int year, int month, int day) {
    if (month < 1 || month > 12 || day < 1) return false;
    static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int max_day = lengths[month - 1];
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap) max_day = 29;
    return day <= max_day;
}

}  // namespace

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::optional<EpochSeconds> parse_iso8601(const std::string& text, bool* had_zone) {
    if (had_zone) *had_zone = false;
    std::size_t pos = 0;
    int year, month, day, hour, minute, second;
    if (!read_int(text, pos, 4, year)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, month)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, day)) return std::nullopt;
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, hour)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, minute)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, second)) return std::nullopt;

    if (!valid_civil(year, month, day) || hour > 23 || minute > 59 || second > 60)
        return std::nullopt;

    // Truncate fractional seconds.
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
    }

    std::int64_t zone_offset = 0;
    if (pos < text.size()) {
        const char c = text[pos];
        if (c == 'Z') {
            ++pos;
            if (had_zone) *had_zone = true;
        } else if (c == '+' || c == '-') {
            ++pos;
            int oh, om = 0;
            if (!read_int(text, pos, 2, oh)) return std::nullopt;
            if (pos < text.size() && text[pos] == ':') ++pos;
            if (pos < text.size()) {
                if (!read_int(text, pos, 2, om)) return std::nullopt;
            }
            if (oh > 14 || om > 59) return std::nullopt;
            zone_offset = (c == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
            if (had_zone) *had_zone = true;
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size()) return std::nullopt;

    const std::int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second - zone_offset;
}

std::optional<EpochSeconds> parse_timestamp(const std::string& text, TimestampFormat format,
                                            const std::string& pattern,
                                            std::int64_t assume_offset_s) {
    switch (format) {
        case TimestampFormat::iso8601: {
            bool had_zone = false;
            const auto t = parse_iso8601(text, &had_zone);
            if (!t) return std::nullopt;
            return had_zone ? *t : *t - assume_offset_s;
        }
        case TimestampFormat::epoch_seconds:
        case TimestampFormat::epoch_millis: {
            if (text.empty()) return std::nullopt;
            char* end = nullptr;
            errno = 0;
            const long long v = std::strtoll(text.c_str(), &end, 10);
            if (errno != 0 || end != text.c_str() + text.size()) return std::nullopt;
            if (format == TimestampFormat::epoch_millis) {
                // Floor toward negative infinity so pre-epoch times stay ordered.
                std::int64_t q = v / 1000;
                if (v % 1000 != 0 && v < 0) --q;
                return q;
            }
            return v;
        }
        case TimestampFormat::pattern: {
            int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
            std::size_t pos = 0;
            std::size_t pi = 0;
            while (pi < pattern.size()) {
                if (pattern[pi] == '%' && pi + 1 < pattern.size()) {
                    const char tok = pattern[pi + 1];
                    pi += 2;
                    bool ok = true;
                    switch (tok) {
                        case 'Y': ok = read_int(text, pos, 4, year); break;
                        case 'm': ok = read_int(text, pos, 2, month); break;
                        case 'd': ok = read_int(text, pos, 2, day); break;
                        case 'H': ok = read_int(text, pos, 2, hour); break;
                        case 'M': ok = read_int(text, pos, 2, minute); break;
                        case 'S': ok = read_int(text, pos, 2, second); break;
                        case '%':
                            ok = pos < text.size() && text[pos] == '%';
                            ++pos;
                            break;
                        default: return std::nullopt;
                    }
                    if (!ok) return std::nullopt;
                } else {
                    if (pos >= text.size() || text[pos] != pattern[pi]) return std::nullopt;
                    ++pos;
                    ++pi;
                }
            }
            if (pos != text.size()) return std::nullopt;
            if (!valid_civil(year, month, day) || hour > 23 || minute > 59 || second > 60)
                return std::nullopt;
            return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 +
                   second - assume_offset_s;
        }
    }
    return std::nullopt;
}

std::string format_iso8601_utc(EpochSeconds t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const CivilDate d = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::int64_t parse_utc_offset(const std::string& text) {
    if (text == "Z" || text == "UTC" || text == "utc") return 0;
    if (text.size() < 3 || (text[0] != '+' && text[0] != '-'))
        throw ConfigError("timezone must be a fixed UTC offset like +05:30, got '" + text + "'");
    std::size_t pos = 1;
    int hours = 0, minutes = 0;
    if (!read_int(text, pos, 2, hours))
        throw ConfigError("timezone offset hours malformed in '" + text + "'");
    if (pos < text.size() && text[pos] == ':') ++pos;
    if (pos < text.size()) {
        if (!read_int(text, pos, 2, minutes) || pos != text.size())
            throw ConfigError("timezone offset minutes malformed in '" + text + "'");
    }
    if (hours > 14 || minutes > 59)
        throw ConfigError("timezone offset out of range in '" + text + "'");
    const std::int64_t total = hours * 3600LL + minutes * 60LL;
    return text[0] == '+' ? total : -total;
}

std::string service_date_of(EpochSeconds t, std::int64_t utc_offset_s) {
    const std::int64_t local = t + utc_offset_s;
    std::int64_t days = local / 86400;
    if (local % 86400 < 0) --days;
    const CivilDate d = civil_from_days(days);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d%02d%02d", d.year, d.month, d.day);
    return buf;
}

EpochSeconds service_day_start(const std::string& yyyymmdd, std::int64_t utc_offset_s) {
    std::size_t pos = 0;
    int year, month, day;
    if (!read_int(yyyymmdd, pos, 4, year) || !read_int(yyyymmdd, pos, 2, month) ||
        !read_int(yyyymmdd, pos, 2, day) || pos != yyyymmdd.size() ||
        !valid_civil(year, month, day))
        throw ValidationError("malformed service date '" + yyyymmdd + "'");
    return days_from_civil(year, month, day) * 86400 - utc_offset_s;
}

std::string format_service_time(EpochSeconds t, EpochSeconds day_start) {
    const std::int64_t s = t - day_start;
    if (s < 0) throw IntegrityError("event precedes its service day start");
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(s / 3600),
                  static_cast<long long>(s / 60 % 60), static_cast<long long>(s % 60));
    return buf;
}

std::optional<EpochSeconds> parse_service_time(const std::string& text, EpochSeconds day_start) {
    // HH may exceed two digits for long post-midnight continuations.
    const std::size_t first_colon = text.find(':');
    if (first_colon == std::string::npos || first_colon == 0) return std::nullopt;
    for (std::size_t i = 0; i < first_colon; ++i)
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
    const long long hours = std::strtoll(text.substr(0, first_colon).c_str(), nullptr, 10);
    std::size_t pos = first_colon + 1;
    int minutes, seconds;
    if (!read_int(text, pos, 2, minutes)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, seconds)) return std::nullopt;
    if (pos != text.size() || minutes > 59 || seconds > 59) return std::nullopt;
    return day_start + hours * 3600 + minutes * 60 + seconds;
}

}  // namespace tracefeed

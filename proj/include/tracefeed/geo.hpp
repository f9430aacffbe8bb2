#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>

namespace tracefeed {

// Spherical earth model. Buffer radii are 50-100 m, far above any
// ellipsoidal correction at that scale.
inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;
};

/// Great-circle distance in meters between two coordinate pairs.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = a.latitude * kDegToRad;
    const double lat2 = b.latitude * kDegToRad;
    const double dlat = (b.latitude - a.latitude) * kDegToRad;
    const double dlon = (b.longitude - a.longitude) * kDegToRad;
    const double sin_dlat = std::sin(dlat / 2.0);
    const double sin_dlon = std::sin(dlon / 2.0);
    const double h = sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

/// Boundary inclusive: distance == radius counts as inside.
inline bool within_buffer(const GeoPoint& p, const GeoPoint& center, double radius_m) {
    return haversine_m(p, center) <= radius_m;
}

struct NearestHit {
    std::size_t index;
    double distance_m;
};

/// Minimum-distance point among those within radius_m of center.
/// Ties break toward the lowest index; empty optional when none qualify.
inline std::optional<NearestHit> nearest_in_window(std::span<const GeoPoint> points,
                                                   const GeoPoint& center, double radius_m) {
    std::optional<NearestHit> best;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = haversine_m(points[i], center);
        if (d > radius_m) continue;
        if (!best || d < best->distance_m) best = NearestHit{i, d};
    }
    return best;
}

/// Point at the given distance and initial bearing (degrees clockwise from
/// north) from start, on the same sphere as haversine_m.
inline GeoPoint destination_point(const GeoPoint& start, double distance_m, double bearing_deg) {
    const double ang = distance_m / kEarthRadiusM;
    const double brg = bearing_deg * kDegToRad;
    const double lat1 = start.latitude * kDegToRad;
    const double lon1 = start.longitude * kDegToRad;
    const double lat2 =
        std::asin(std::sin(lat1) * std::cos(ang) + std::cos(lat1) * std::sin(ang) * std::cos(brg));
    const double lon2 =
        lon1 + std::atan2(std::sin(brg) * std::sin(ang) * std::cos(lat1),
                          std::cos(ang) - std::sin(lat1) * std::sin(lat2));
    return GeoPoint{lat2 / kDegToRad, lon2 / kDegToRad};
}

}  // namespace tracefeed

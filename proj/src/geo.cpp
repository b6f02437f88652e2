#include "medchain/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "medchain/errors.hpp"

namespace medchain {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double to_rad(double deg) { return deg * kDegToRad; }
double to_deg(double rad) { return rad * kRadToDeg; }

}  // namespace

LengthM::LengthM(double meters) : meters_(meters) {
  if (!std::isfinite(meters) || meters < 0.0) {
    throw std::invalid_argument("LengthM must be finite and non-negative, got " +
                                std::to_string(meters));
  }
}

double normalize_longitude(double lon_deg) {
  double lon = std::fmod(lon_deg, 360.0);
  if (lon <= -180.0) lon += 360.0;
  if (lon > 180.0) lon -= 360.0;
  return lon;
}

GeoPoint::GeoPoint(double lat_deg, double lon_deg) {
  if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg)) {
    throw std::invalid_argument("GeoPoint coordinates must be finite");
  }
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    throw std::invalid_argument("GeoPoint latitude out of [-90, 90]: " + std::to_string(lat_deg));
  }
  lat_ = lat_deg;
  lon_ = normalize_longitude(lon_deg);
}

LengthM gc_distance(const GeoPoint& a, const GeoPoint& b) {
  // Canonical argument order makes the result bit-for-bit symmetric.
  const GeoPoint& p = a < b ? a : b;
  const GeoPoint& q = a < b ? b : a;
  const double lat1 = to_rad(p.lat());
  const double lat2 = to_rad(q.lat());
  const double dlat = lat2 - lat1;
  const double dlon = to_rad(q.lon() - p.lon());
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  const double c = 2.0 * std::asin(std::min(1.0, std::sqrt(std::clamp(h, 0.0, 1.0))));
  return LengthM(kEarthRadiusM * c);
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) throw UndefinedBearing("bearing undefined for coincident points");
  if (std::abs(a.lat()) == 90.0) throw UndefinedBearing("bearing undefined from a pole");
  const double lat1 = to_rad(a.lat());
  const double lat2 = to_rad(b.lat());
  const double dlon = to_rad(b.lon() - a.lon());
  const double y = std::sin(dlon) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  double deg = std::fmod(to_deg(std::atan2(y, x)) + 360.0, 360.0);
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

GeoPoint destination_point(const GeoPoint& a, double bearing_deg, LengthM distance) {
  if (distance.meters() == 0.0) return a;
  const double delta = distance.meters() / kEarthRadiusM;
  const double theta = to_rad(bearing_deg);
  const double lat1 = to_rad(a.lat());
  const double lon1 = to_rad(a.lon());
  const double sin_lat2 =
      std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(theta);
  const double lat2 = std::asin(std::clamp(sin_lat2, -1.0, 1.0));
  const double lon2 = lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                                        std::cos(delta) - std::sin(lat1) * std::sin(lat2));
  return GeoPoint(std::clamp(to_deg(lat2), -90.0, 90.0), to_deg(lon2));
}

GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction) {
  if (fraction <= 0.0) return a;
  if (fraction >= 1.0) return b;
  const double delta = gc_distance(a, b).meters() / kEarthRadiusM;
  if (delta < 1e-12) return a;
  const double sin_delta = std::sin(delta);
  if (std::abs(sin_delta) < 1e-12) return a;  // antipodal: path undefined
  const double ka = std::sin((1.0 - fraction) * delta) / sin_delta;
  const double kb = std::sin(fraction * delta) / sin_delta;
  const double lat1 = to_rad(a.lat()), lon1 = to_rad(a.lon());
  const double lat2 = to_rad(b.lat()), lon2 = to_rad(b.lon());
  const double x = ka * std::cos(lat1) * std::cos(lon1) + kb * std::cos(lat2) * std::cos(lon2);
  const double y = ka * std::cos(lat1) * std::sin(lon1) + kb * std::cos(lat2) * std::sin(lon2);
  const double z = ka * std::sin(lat1) + kb * std::sin(lat2);
  const double lat = std::atan2(z, std::sqrt(x * x + y * y));
  const double lon = std::atan2(y, x);
  return GeoPoint(std::clamp(to_deg(lat), -90.0, 90.0), to_deg(lon));
}

}  // namespace medchain

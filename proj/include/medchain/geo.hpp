#pragma once

// Spherical-Earth geodesy. Everything here works on a sphere of fixed radius;
// distances are meters, angles are degrees at the interface and radians inside.

#include <compare>

namespace medchain {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kStatuteMileM = 1609.344;
inline constexpr double kNauticalMileM = 1852.0;
inline constexpr double kKnotMps = kNauticalMileM / 3600.0;

// Non-negative length in meters.
class LengthM {
 public:
  constexpr LengthM() = default;
  explicit LengthM(double meters);

  static LengthM from_statute_miles(double miles) { return LengthM(miles * kStatuteMileM); }
  static LengthM from_nautical_miles(double nmi) { return LengthM(nmi * kNauticalMileM); }

  constexpr double meters() const { return meters_; }
  double statute_miles() const { return meters_ / kStatuteMileM; }
  double nautical_miles() const { return meters_ / kNauticalMileM; }

  friend constexpr auto operator<=>(const LengthM&, const LengthM&) = default;
  friend LengthM operator+(LengthM a, LengthM b) { return LengthM(a.meters_ + b.meters_); }

 private:
  double meters_ = 0.0;
};

// Latitude in [-90, 90], longitude normalized into (-180, 180].
class GeoPoint {
 public:
  constexpr GeoPoint() = default;
  GeoPoint(double lat_deg, double lon_deg);

  constexpr double lat() const { return lat_; }
  constexpr double lon() const { return lon_; }

  friend constexpr bool operator==(const GeoPoint&, const GeoPoint&) = default;
  friend constexpr auto operator<=>(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

double normalize_longitude(double lon_deg);

// Haversine great-circle distance. Exactly symmetric.
LengthM gc_distance(const GeoPoint& a, const GeoPoint& b);

// Forward azimuth in [0, 360). Throws UndefinedBearing when a == b or a is a pole.
// Near-antipodal pairs return whatever the formula yields; the value is unstable there.
double initial_bearing(const GeoPoint& a, const GeoPoint& b);

GeoPoint destination_point(const GeoPoint& a, double bearing_deg, LengthM distance);

// Point at `fraction` of the way along the great circle from a to b.
GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction);

}  // namespace medchain

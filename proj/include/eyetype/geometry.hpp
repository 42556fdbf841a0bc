#pragma once

#include <cmath>
#include <numbers>

namespace eyetype {

/// Screen-space point in pixels. y grows downward.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps any finite angle into [0, 360).
inline double normalize_deg(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  // fmod of a tiny negative value can round up to exactly 360
  if (a >= 360.0) a -= 360.0;
  return a;
}

/// Smallest absolute difference between two angles, in [0, 180].
inline double angular_distance_deg(double a, double b) {
  double d = normalize_deg(a - b);
  return d > 180.0 ? 360.0 - d : d;
}

/// Unit vector on screen for a mathematical angle (0 = right, 90 = up).
inline Point screen_direction(double angle_deg) {
  const double r = deg_to_rad(angle_deg);
  return {std::cos(r), -std::sin(r)};
}

/// Mathematical angle of a screen-space vector; the y axis is flipped so that
/// screen-up reads as 90 degrees.
inline double screen_angle_deg(Point v) {
  return normalize_deg(rad_to_deg(std::atan2(-v.y, v.x)));
}

}  // namespace eyetype

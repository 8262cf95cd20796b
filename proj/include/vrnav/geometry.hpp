#ifndef VRNAV_GEOMETRY_HPP
#define VRNAV_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace vrnav
{

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double bearing(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

/// Wraps an angle into [-pi, pi). Exact and idempotent: values already in range are returned unchanged.
inline double wrap_angle(double theta)
{
    double r = std::remainder(theta, two_pi);
    if (r >= pi)
        r = -pi;
    return r;
}

/// Closest point to `p` on the segment [a, b].
inline Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0)
        return a;
    double t = dot(p - a, ab) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return a + ab * t;
}

inline double distance_to_segment(Vec2 p, Vec2 a, Vec2 b)
{
    return distance(p, closest_point_on_segment(p, a, b));
}

} // namespace vrnav

#endif // VRNAV_GEOMETRY_HPP

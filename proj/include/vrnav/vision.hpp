#ifndef VRNAV_VISION_HPP
#define VRNAV_VISION_HPP

#include "vrnav/arena.hpp"

#include <array>
#include <cmath>
#include <random>
#include <span>
#include <vector>

namespace vrnav
{

struct RayHit
{
    int ray_index = 0;
    Wall wall = Wall::North;
    double distance = 0.0;
    double ray_offset = 0.0; ///< radians relative to heading, counterclockwise positive
};

/// Half-angle of the ray fan for a field of vision given as a fraction of the full circle.
inline double half_fov(double fov) { return fov * pi; }

/// Offsets are evenly spaced over [-theta, +theta], endpoints included. Ray 0 is the rightmost.
inline double ray_offset(int index, int rays, double fov)
{
    const double theta = half_fov(fov);
    return -theta + 2.0 * theta * static_cast<double>(index) / static_cast<double>(rays - 1);
}

/// Where a ray leaving `origin` along the unit vector `d` exits the convex arena.
/// A ray through a corner is assigned to the wall that starts at that corner (the clockwise neighbour).
inline std::pair<Wall, double> cast_single_ray(Vec2 origin, Vec2 d, const ArenaWalls& walls)
{
    std::array<double, wall_count> exit_t;
    int best = -1;
    for (int k = 0; k < wall_count; ++k)
    {
        const double denom = dot(d, walls.normal[k]);
        exit_t[k] = denom > 0.0 ? std::max(0.0, (walls.offset[k] - dot(origin, walls.normal[k])) / denom)
                                : std::numeric_limits<double>::infinity();
        if (best < 0 || exit_t[k] < exit_t[best])
            best = k;
    }
    const double t = exit_t[best];
    const double tie = 1e-12 * std::max(1.0, t);
    const int next = (best + 1) % wall_count;
    if (std::abs(exit_t[next] - t) <= tie)
        best = next;
    return {static_cast<Wall>(best), t};
}

inline std::pair<Wall, double> cast_single_ray(Vec2 origin, double direction_angle, const ArenaSpec& arena)
{
    return cast_single_ray(origin, unit_vector(direction_angle), ArenaWalls(arena));
}

/// Precomputed ray fan: offsets plus their cosines and sines, so a cast needs one sincos per pose.
struct RayFan
{
    std::vector<double> offset;
    std::vector<double> cos_offset;
    std::vector<double> sin_offset;

    RayFan(double fov, int rays)
    {
        for (int i = 0; i < rays; ++i)
        {
            const double o = ray_offset(i, rays, fov);
            offset.push_back(o);
            cos_offset.push_back(std::cos(o));
            sin_offset.push_back(std::sin(o));
        }
    }
    int size() const { return static_cast<int>(offset.size()); }
};

inline void cast_rays_into(const AgentState& state, const ArenaWalls& walls, const RayFan& fan, std::span<RayHit> out)
{
    const double ch = std::cos(state.heading);
    const double sh = std::sin(state.heading);
    for (int i = 0; i < fan.size(); ++i)
    {
        const Vec2 d{ch * fan.cos_offset[i] - sh * fan.sin_offset[i], sh * fan.cos_offset[i] + ch * fan.sin_offset[i]};
        const auto [wall, dist] = cast_single_ray(state.position, d, walls);
        out[i] = RayHit{i, wall, dist, fan.offset[i]};
    }
}

/// Fills `out` (one entry per ray) with the wall and distance seen by each ray.
inline void cast_rays_into(const AgentState& state, const ArenaSpec& arena, double fov, std::span<RayHit> out)
{
    cast_rays_into(state, ArenaWalls(arena), RayFan(fov, static_cast<int>(out.size())), out);
}

inline std::vector<RayHit> cast_rays(const AgentState& state, const ArenaSpec& arena, double fov, int rays)
{
    if (!(fov > 0.0 && fov < 1.0))
        throw ValidationError("vision.fov", "field of vision must lie in (0, 1)");
    if (rays < 2)
        throw ValidationError("vision.rays", "at least two rays are required");
    std::vector<RayHit> hits(static_cast<std::size_t>(rays));
    cast_rays_into(state, arena, fov, hits);
    return hits;
}

/// Weber-Fechner distance encoding, y(x) = -(1/k) ln x + m, calibrated so that
/// y(d_min) = 1 and y(d_max) = 1 - sigma.
struct EncodingCalibration
{
    double sigma = 0.0;
    double d_min = 1.0;
    double d_max = 1000.0 * std::numbers::sqrt2;

    double inv_k() const { return sigma / std::log(d_max / d_min); }
    double m() const { return 1.0 + inv_k() * std::log(d_min); }

    /// Evaluated in the algebraically equivalent form 1 - sigma ln(x/d_min) / ln(d_max/d_min),
    /// which hits both calibration endpoints exactly in floating point.
    double value(double x) const
    {
        if (sigma == 0.0)
            return 1.0;
        return 1.0 - sigma * std::log(x / d_min) / std::log(d_max / d_min);
    }

    double clamp_distance(double x) const { return std::clamp(x, d_min, d_max); }
};

inline void validate_calibration(const EncodingCalibration& cal)
{
    if (!(cal.sigma >= 0.0 && cal.sigma <= 1.0))
        throw ValidationError("vision.sigma", "distance scaling factor must lie in [0, 1]");
    if (!(cal.d_min > 0.0 && cal.d_max > cal.d_min))
        throw ValidationError("vision.d_max", "need 0 < d_min < d_max");
}

/// Rays x 4 matrix, row-major, columns in (N, E, S, W) order.
struct VisualFrame
{
    int rays = 0;
    double fov = 0.0;
    double sigma = 0.0;
    int clamped = 0; ///< rays whose distance fell outside [d_min, d_max] and was clamped
    std::vector<double> values;

    double at(int ray, int column) const { return values[static_cast<std::size_t>(ray * wall_count + column)]; }
};

/// Writes the encoded rows into `values` (size rays * 4). Returns the number of clamped distances.
inline int encode_into(std::span<const RayHit> hits, const EncodingCalibration& cal, std::span<double> values)
{
    int clamped = 0;
    std::fill(values.begin(), values.end(), 0.0);
    for (std::size_t i = 0; i < hits.size(); ++i)
    {
        double d = hits[i].distance;
        if (d < cal.d_min || d > cal.d_max)
        {
            ++clamped;
            d = cal.clamp_distance(d);
        }
        values[i * wall_count + static_cast<std::size_t>(hits[i].wall)] = cal.value(d);
    }
    return clamped;
}

inline VisualFrame encode_frame(std::span<const RayHit> hits, const EncodingCalibration& cal, double fov = 0.0)
{
    VisualFrame frame;
    frame.rays = static_cast<int>(hits.size());
    frame.fov = fov;
    frame.sigma = cal.sigma;
    frame.values.assign(hits.size() * wall_count, 0.0);
    frame.clamped = encode_into(hits, cal, frame.values);
    return frame;
}

/// Copy of `state` with the heading jittered by zero-mean Gaussian noise. Meant for the vision call only.
template <class Rng>
AgentState perturb_visual_angle(const AgentState& state, double noise_std, Rng& rng)
{
    if (noise_std <= 0.0)
        return state;
    std::normal_distribution<double> jitter(0.0, noise_std);
    AgentState seen = state;
    seen.heading = wrap_angle(state.heading + jitter(rng));
    return seen;
}

} // namespace vrnav

#endif // VRNAV_VISION_HPP

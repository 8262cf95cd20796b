#ifndef VRNAV_ARENA_HPP
#define VRNAV_ARENA_HPP

#include "vrnav/error.hpp"
#include "vrnav/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string_view>

namespace vrnav
{

/// Wall identities in the fixed column order used by the visual frame.
enum class Wall : int
{
    North = 0,
    East = 1,
    South = 2,
    West = 3,
};

inline constexpr int wall_count = 4;

constexpr std::string_view wall_name(Wall w)
{
    constexpr std::array<std::string_view, 4> names{"N", "E", "S", "W"};
    return names[static_cast<int>(w)];
}

/// Convex quadrilateral arena with a hidden circular patch.
///
/// Vertices are stored clockwise (y up) as NW, NE, SE, SW, so wall k runs from
/// vertex k to vertex k+1: N = NW->NE, E = NE->SE, S = SE->SW, W = SW->NW.
struct ArenaSpec
{
    std::array<Vec2, 4> vertices{Vec2{0.0, 1000.0}, Vec2{1000.0, 1000.0}, Vec2{1000.0, 0.0}, Vec2{0.0, 0.0}};
    Vec2 patch_center{400.0, 600.0};
    double patch_radius = 50.0;

    Vec2 wall_start(Wall w) const { return vertices[static_cast<int>(w)]; }
    Vec2 wall_end(Wall w) const { return vertices[(static_cast<int>(w) + 1) % 4]; }

    /// Outward unit normal of wall `w` (clockwise winding puts the outside on the left).
    Vec2 outward_normal(Wall w) const
    {
        const Vec2 d = wall_end(w) - wall_start(w);
        const double len = norm(d);
        return {-d.y / len, d.x / len};
    }

    /// Signed area, positive for the clockwise order used here.
    double area() const
    {
        double s = 0.0;
        for (int i = 0; i < 4; ++i)
            s += cross(vertices[i], vertices[(i + 1) % 4]);
        return -0.5 * s;
    }

    /// Signed distance from `p` to the boundary: positive inside, negative outside.
    double signed_boundary_distance(Vec2 p) const
    {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k)
        {
            const auto w = static_cast<Wall>(k);
            const double d = dot(wall_start(w) - p, outward_normal(w));
            best = std::min(best, d);
        }
        return best;
    }

    bool contains(Vec2 p, double tolerance = 1e-9) const { return signed_boundary_distance(p) >= -tolerance; }

    /// Distance from an interior point to the nearest wall segment.
    double boundary_distance(Vec2 p) const
    {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k)
        {
            const auto w = static_cast<Wall>(k);
            best = std::min(best, distance_to_segment(p, wall_start(w), wall_end(w)));
        }
        return best;
    }

    /// Nearest point on the boundary polygon.
    Vec2 project_to_boundary(Vec2 p) const
    {
        Vec2 best_point = vertices[0];
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k)
        {
            const auto w = static_cast<Wall>(k);
            const Vec2 q = closest_point_on_segment(p, wall_start(w), wall_end(w));
            const double d = distance(p, q);
            if (d < best)
            {
                best = d;
                best_point = q;
            }
        }
        return best_point;
    }

    std::array<double, 4> bounding_box() const
    {
        double x0 = vertices[0].x, x1 = x0, y0 = vertices[0].y, y1 = y0;
        for (const auto& v : vertices)
        {
            x0 = std::min(x0, v.x);
            x1 = std::max(x1, v.x);
            y0 = std::min(y0, v.y);
            y1 = std::max(y1, v.y);
        }
        return {x0, y0, x1, y1};
    }

    /// Longest distance between any two vertices.
    double diameter() const
    {
        double d = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                d = std::max(d, distance(vertices[i], vertices[j]));
        return d;
    }
};

/// Per-wall outward normals and support offsets (n . p <= offset inside), cached for repeated casts.
struct ArenaWalls
{
    std::array<Vec2, wall_count> normal;
    std::array<double, wall_count> offset;

    explicit ArenaWalls(const ArenaSpec& arena)
    {
        for (int k = 0; k < wall_count; ++k)
        {
            const auto w = static_cast<Wall>(k);
            normal[k] = arena.outward_normal(w);
            offset[k] = dot(arena.wall_start(w), normal[k]);
        }
    }

    bool contains(Vec2 p) const
    {
        for (int k = 0; k < wall_count; ++k)
            if (dot(p, normal[k]) > offset[k])
                return false;
        return true;
    }
};

/// Throws GeometryError unless the arena is a nondegenerate convex quadrilateral holding the patch strictly inside.
inline void validate_arena(const ArenaSpec& arena)
{
    for (int i = 0; i < 4; ++i)
    {
        const Vec2 a = arena.vertices[i];
        const Vec2 b = arena.vertices[(i + 1) % 4];
        const Vec2 c = arena.vertices[(i + 2) % 4];
        if (!(cross(b - a, c - b) < 0.0))
            throw GeometryError("arena vertices must form a clockwise convex quadrilateral (NW, NE, SE, SW)");
    }
    if (!(arena.area() > 0.0))
        throw GeometryError("arena has zero area");
    if (!(arena.patch_radius > 0.0))
        throw GeometryError("patch radius must be positive");
    if (!(arena.signed_boundary_distance(arena.patch_center) > arena.patch_radius))
        throw GeometryError("patch disc must lie strictly inside the arena");
}

struct AgentState
{
    Vec2 position;
    double heading = 0.0; ///< radians in [-pi, pi), 0 = +x, counterclockwise positive
    int t = 0;
};

/// Positive turn is counterclockwise (left).
struct MotionCommand
{
    double turn = 0.0;
    double speed = 0.0;
};

inline constexpr double max_turn = pi / 2.0;

/// Maps the network output r in [-1, 1] to a turn and a speed: full speed at r = 0, stopped at |r| = 1.
inline MotionCommand action_to_motion(double r, double v_max)
{
    if (!std::isfinite(r))
        throw InvalidActionError("action is not finite");
    if (!(v_max > 0.0))
        throw InvalidActionError("maximum speed must be positive");
    r = std::clamp(r, -1.0, 1.0);
    return {r * max_turn, v_max * (1.0 - std::abs(r))};
}

/// Turn first, then translate along the new heading. Leaving the arena projects the agent back onto the boundary.
inline AgentState step_agent(const AgentState& state, const MotionCommand& cmd, const ArenaSpec& arena)
{
    AgentState next;
    next.heading = wrap_angle(state.heading + cmd.turn);
    next.t = state.t + 1;
    if (cmd.speed == 0.0)
    {
        next.position = state.position;
        return next;
    }
    const Vec2 candidate = state.position + unit_vector(next.heading) * cmd.speed;
    next.position = arena.contains(candidate, 0.0) ? candidate : arena.project_to_boundary(candidate);
    return next;
}

/// Same as above with cached wall normals for the inside test.
inline AgentState step_agent(const AgentState& state, const MotionCommand& cmd, const ArenaSpec& arena,
                             const ArenaWalls& walls)
{
    AgentState next;
    next.heading = wrap_angle(state.heading + cmd.turn);
    next.t = state.t + 1;
    if (cmd.speed == 0.0)
    {
        next.position = state.position;
        return next;
    }
    const Vec2 candidate = state.position + unit_vector(next.heading) * cmd.speed;
    next.position = walls.contains(candidate) ? candidate : arena.project_to_boundary(candidate);
    return next;
}

/// Boundary inclusive.
inline bool patch_hit(const AgentState& state, const ArenaSpec& arena)
{
    return distance(state.position, arena.patch_center) <= arena.patch_radius;
}

inline double remaining_distance(const AgentState& state, const ArenaSpec& arena)
{
    return std::max(0.0, distance(state.position, arena.patch_center) - arena.patch_radius);
}

/// Uniform position over the arena minus the patch disc, uniform heading in [-pi, pi).
template <class Rng>
AgentState random_init(Rng& rng, const ArenaSpec& arena)
{
    const auto box = arena.bounding_box();
    std::uniform_real_distribution<double> ux(box[0], box[2]);
    std::uniform_real_distribution<double> uy(box[1], box[3]);
    std::uniform_real_distribution<double> uh(-pi, pi);
    AgentState s;
    do
    {
        s.position = {ux(rng), uy(rng)};
    } while (!arena.contains(s.position, 0.0) || patch_hit(s, arena));
    s.heading = wrap_angle(uh(rng));
    return s;
}

/// Fewest timesteps any policy needs to touch the patch from `state`.
inline int straight_line_lower_bound(const AgentState& state, const ArenaSpec& arena, double v_max)
{
    return static_cast<int>(std::ceil(remaining_distance(state, arena) / v_max));
}

} // namespace vrnav

#endif // VRNAV_ARENA_HPP

#ifndef VRNAV_MANIFOLD_HPP
#define VRNAV_MANIFOLD_HPP

#include "vrnav/arena.hpp"
#include "vrnav/vision.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cstdint>
#include <vector>

namespace vrnav
{

/// A pose at which ray `ray_i` passes exactly through corner `corner_a` while ray `ray_j`
/// passes through corner `corner_b`.
struct ManifoldPoint
{
    Vec2 position;
    double heading = 0.0;
    int ray_i = 0;
    int ray_j = 0;
    int corner_a = 0; ///< vertex index (0 = NW, 1 = NE, 2 = SE, 3 = SW)
    int corner_b = 0;
    double residual = 0.0; ///< |bearing(a) - bearing(b) - (offset_i - offset_j)|, wrapped, radians
};

/// Signed mismatch between the bearing difference of two corners and a target angle, wrapped to [-pi, pi).
inline double bearing_mismatch(Vec2 p, Vec2 a, Vec2 b, double target)
{
    return wrap_angle(bearing(p, a) - bearing(p, b) - target);
}

/// Poses where two rays of the fan simultaneously hit two adjacent corners.
///
/// For every adjacent corner pair (both assignments) and every ray pair i < j, the bearing-difference
/// field is sampled along the rows and columns of a grid with spacing `grid_step`; each sign change is
/// polished with a bracketing root finder.
inline std::vector<ManifoldPoint> dual_corner_manifold(const ArenaSpec& arena, double fov, int rays, double grid_step)
{
    if (rays < 2)
        throw ValidationError("vision.rays", "at least two rays are required");
    if (!(grid_step > 0.0))
        throw ValidationError("analysis.manifold_grid_step", "must be positive");
    const auto box = arena.bounding_box();
    const double inset = 1e-6;

    struct Segment
    {
        Vec2 from;
        Vec2 to;
    };
    std::vector<Segment> scan_lines;
    // Row and column scan lines; each is split into consecutive sample intervals below.
    for (double y = box[1] + grid_step; y < box[3]; y += grid_step)
        scan_lines.push_back({{box[0], y}, {box[2], y}});
    for (double x = box[0] + grid_step; x < box[2]; x += grid_step)
        scan_lines.push_back({{x, box[1]}, {x, box[3]}});

    std::vector<ManifoldPoint> out;
    for (int wall = 0; wall < wall_count; ++wall)
        for (int order = 0; order < 2; ++order)
        {
            const int ia = order == 0 ? wall : (wall + 1) % 4;
            const int ib = order == 0 ? (wall + 1) % 4 : wall;
            const Vec2 a = arena.vertices[ia];
            const Vec2 b = arena.vertices[ib];
            for (int i = 0; i < rays; ++i)
                for (int j = i + 1; j < rays; ++j)
                {
                    const double oi = ray_offset(i, rays, fov);
                    const double oj = ray_offset(j, rays, fov);
                    const double target = oi - oj;
                    for (const auto& line : scan_lines)
                    {
                        const Vec2 dir = line.to - line.from;
                        const double len = norm(dir);
                        const int n = std::max(1, static_cast<int>(std::ceil(len / grid_step)));
                        auto at = [&](double s) { return line.from + dir * s; };
                        auto f = [&](double s) { return bearing_mismatch(at(s), a, b, target); };
                        double s_prev = 0.0;
                        bool prev_inside = arena.signed_boundary_distance(at(s_prev)) > inset;
                        double f_prev = prev_inside ? f(s_prev) : 0.0;
                        for (int k = 1; k <= n; ++k)
                        {
                            const double s = static_cast<double>(k) / n;
                            const bool inside = arena.signed_boundary_distance(at(s)) > inset;
                            const double fs = inside ? f(s) : 0.0;
                            // sign change away from the +-pi branch cut
                            if (inside && prev_inside && (f_prev < 0.0) != (fs < 0.0) && std::abs(fs - f_prev) < pi)
                            {
                                double root = 0.0;
                                if (fs == 0.0)
                                    root = s;
                                else if (f_prev == 0.0)
                                    root = s_prev;
                                else
                                {
                                    std::uintmax_t iters = 200;
                                    const auto bracket = boost::math::tools::toms748_solve(
                                        f, s_prev, s, f_prev, fs, boost::math::tools::eps_tolerance<double>(52), iters);
                                    root = 0.5 * (bracket.first + bracket.second);
                                }
                                const Vec2 p = at(root);
                                const double residual = std::abs(bearing_mismatch(p, a, b, target));
                                if (residual < 1e-6 && !(f_prev == 0.0 && k > 1))
                                    out.push_back({p, wrap_angle(bearing(p, a) - oi), i, j, ia, ib, residual});
                            }
                            s_prev = s;
                            prev_inside = inside;
                            f_prev = fs;
                        }
                    }
                }
        }
    return out;
}

/// Center and radius of the circle on which segment ab subtends the inscribed angle `delta`
/// (0 < delta < pi), taking the arc on the side where b appears counterclockwise of a by `delta`.
inline std::pair<Vec2, double> inscribed_angle_circle(Vec2 a, Vec2 b, double delta)
{
    const double chord = distance(a, b);
    const double radius = chord / (2.0 * std::sin(delta));
    const Vec2 mid = (a + b) * 0.5;
    const Vec2 u = (b - a) * (1.0 / chord);
    const Vec2 left{-u.y, u.x};
    // center offset from the chord midpoint along the normal toward the arc side
    const double h = radius * std::cos(delta);
    return {mid + left * h, radius};
}

} // namespace vrnav

#endif // VRNAV_MANIFOLD_HPP

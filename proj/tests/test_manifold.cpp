#include "vrnav/manifold.hpp"
#include "vrnav/vision.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace vrnav;

namespace
{

double radial_deviation(const ArenaSpec& arena, const ManifoldPoint& p, double fov, int rays)
{
    const double delta = ray_offset(p.ray_j, rays, fov) - ray_offset(p.ray_i, rays, fov);
    const auto [center, radius] =
        inscribed_angle_circle(arena.vertices[p.corner_a], arena.vertices[p.corner_b], delta);
    return std::abs(distance(p.position, center) - radius);
}

} // namespace

TEST(InscribedCircle, RadiusFromChordAndAngle)
{
    const auto [c, r] = inscribed_angle_circle({0, 0}, {1000, 0}, pi / 6.0);
    EXPECT_NEAR(r, 1000.0, 1e-9); // |AB| / (2 sin 30deg)
    // a point on the arc sees b counterclockwise of a by exactly delta
    const Vec2 top = c + Vec2{0.0, r};
    EXPECT_NEAR(wrap_angle(bearing(top, {1000, 0}) - bearing(top, {0, 0})), pi / 6.0, 1e-12);
}

TEST(Manifold, PointsSatisfyTheBearingEquationAndLieOnCircles)
{
    const ArenaSpec a;
    const auto pts = dual_corner_manifold(a, 0.4, 8, 10.0);
    ASSERT_GT(pts.size(), 1000u);
    std::map<std::pair<int, int>, int> per_pair;
    for (const auto& p : pts)
    {
        const double target = ray_offset(p.ray_i, 8, 0.4) - ray_offset(p.ray_j, 8, 0.4);
        ASSERT_LT(std::abs(bearing_mismatch(p.position, a.vertices[p.corner_a], a.vertices[p.corner_b], target)), 1e-6);
        ASSERT_LT(radial_deviation(a, p, 0.4, 8), 1e-3);
        ASSERT_TRUE(a.contains(p.position));
        // the recovered heading puts corner a on ray i and corner b on ray j
        ASSERT_NEAR(wrap_angle(bearing(p.position, a.vertices[p.corner_a]) - p.heading - ray_offset(p.ray_i, 8, 0.4)), 0.0, 1e-12);
        ASSERT_NEAR(wrap_angle(bearing(p.position, a.vertices[p.corner_b]) - p.heading - ray_offset(p.ray_j, 8, 0.4)), 0.0, 1e-6);
        per_pair[{p.ray_i, p.ray_j}]++;
    }
    // a unit-square wall subtends at least 45 degrees from inside, so only pairs with a wider gap occur
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
        {
            const double gap = ray_offset(j, 8, 0.4) - ray_offset(i, 8, 0.4);
            EXPECT_EQ(per_pair.count({i, j}) > 0, gap > pi / 4.0) << i << "," << j;
        }
}

TEST(Manifold, RaysActuallyHitTheCorners)
{
    const ArenaSpec a;
    const ArenaWalls walls(a);
    for (const auto& p : dual_corner_manifold(a, 0.4, 8, 25.0))
    {
        for (auto [ray, corner] : {std::pair{p.ray_i, p.corner_a}, std::pair{p.ray_j, p.corner_b}})
        {
            const auto [wall, dist] = cast_single_ray(p.position, unit_vector(p.heading + ray_offset(ray, 8, 0.4)), walls);
            ASSERT_NEAR(dist, distance(p.position, a.vertices[corner]), 1e-3);
        }
    }
}

TEST(Manifold, WorksOnPerturbedQuadrilateral)
{
    ArenaSpec a;
    a.vertices[0] = {100.0, 900.0};
    validate_arena(a);
    const auto pts = dual_corner_manifold(a, 0.4, 8, 20.0);
    ASSERT_FALSE(pts.empty());
    for (const auto& p : pts)
        ASSERT_LT(radial_deviation(a, p, 0.4, 8), 1e-3);
}

TEST(Manifold, RejectsBadInput)
{
    EXPECT_THROW(dual_corner_manifold(ArenaSpec{}, 0.4, 1, 10.0), ValidationError);
    EXPECT_THROW(dual_corner_manifold(ArenaSpec{}, 0.4, 8, 0.0), ValidationError);
}

namespace
{

// Deepest manifold point below the north wall with NE on ray i and NW on ray j and the given ray pair.
double arc_depth(double fov, int rays, int ray_i, int ray_j)
{
    const ArenaSpec a;
    double depth = 0.0;
    for (const auto& p : dual_corner_manifold(a, fov, rays, 10.0))
        if (p.corner_a == 1 && p.corner_b == 0 && p.ray_i == ray_i && p.ray_j == ray_j)
            depth = std::max(depth, 1000.0 - p.position.y);
    return depth;
}

// Sagitta-side depth of the inscribed-angle arc: |AB| / (2 tan(delta / 2)).
double analytic_depth(double fov, int rays, int ray_i, int ray_j)
{
    const double delta = ray_offset(ray_j, rays, fov) - ray_offset(ray_i, rays, fov);
    return 1000.0 / (2.0 * std::tan(delta / 2.0));
}

} // namespace

TEST(Manifold, ArcsMoveTowardTheWallAsFovWidens)
{
    double last = 1e300;
    for (double fov : {0.35, 0.40, 0.45})
    {
        const double d = arc_depth(fov, 8, 0, 7);
        EXPECT_NEAR(d, analytic_depth(fov, 8, 0, 7), 5.0);
        EXPECT_LT(d, last);
        last = d;
    }
}

TEST(Manifold, ArcsMoveTowardTheWallAsResolutionGrows)
{
    double last = 1e300;
    for (int rays : {8, 12, 16})
    {
        const double d = arc_depth(0.4, rays, 0, rays - 2);
        EXPECT_NEAR(d, analytic_depth(0.4, rays, 0, rays - 2), 5.0);
        EXPECT_LT(d, last);
        last = d;
    }
}

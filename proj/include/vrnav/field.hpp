#ifndef VRNAV_FIELD_HPP
#define VRNAV_FIELD_HPP

#include "vrnav/parallel.hpp"
#include "vrnav/simulation.hpp"
#include "vrnav/trajectory.hpp"

#include <concepts>
#include <vector>

namespace vrnav
{

struct FieldPoint
{
    Vec2 position;
    Vec2 mean; ///< mean one-step displacement over all headings
    double magnitude = 0.0;
};

struct ActionField
{
    std::vector<FieldPoint> points;
    std::vector<Vec2> minima; ///< grid points attaining the global minimum magnitude
};

/// Mean displacement field: at every lattice point the policy is queried for `orientations` evenly
/// spaced headings, and each action becomes the displacement speed * unit(heading + turn).
template <class PolicyFactory>
    requires std::invocable<PolicyFactory&>
ActionField mean_action_field(PolicyFactory&& make_policy, const SimConfig& sim, double grid_step, int orientations = 64,
                              double minima_tol = 1e-9)
{
    validate_sim(sim);
    if (orientations < 1)
        throw ValidationError("analysis.field_orientations", "must be positive");
    ActionField field;
    for (const Vec2& p : lattice_positions(sim.arena, grid_step))
        field.points.push_back({p, {}, 0.0});
    parallel_for(field.points.size(), [&](std::size_t i) {
        auto policy = make_policy();
        Eye eye(sim);
        Vec2 sum{};
        for (int k = 0; k < orientations; ++k)
        {
            const AgentState pose{field.points[i].position, lattice_heading(k, orientations), 0};
            const MotionCommand cmd = action_to_motion(policy(eye.look(pose)), sim.v_max);
            sum = sum + unit_vector(pose.heading + cmd.turn) * cmd.speed;
        }
        field.points[i].mean = sum * (1.0 / orientations);
        field.points[i].magnitude = norm(field.points[i].mean);
    });
    if (field.points.empty())
        return field;
    double lowest = field.points.front().magnitude;
    for (const auto& fp : field.points)
        lowest = std::min(lowest, fp.magnitude);
    for (const auto& fp : field.points)
        if (fp.magnitude <= lowest + minima_tol)
            field.minima.push_back(fp.position);
    return field;
}

inline ActionField mean_action_field(const PolicyGenome& genome, const SimConfig& sim, double grid_step, int orientations = 64)
{
    const PolicyWeights weights = unpack(genome);
    return mean_action_field([&] { return NetworkPolicy(weights); }, sim, grid_step, orientations);
}

} // namespace vrnav

#endif // VRNAV_FIELD_HPP

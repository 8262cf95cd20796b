#ifndef VRNAV_SIMULATION_HPP
#define VRNAV_SIMULATION_HPP

#include "vrnav/arena.hpp"
#include "vrnav/policy.hpp"
#include "vrnav/vision.hpp"

#include <optional>
#include <random>
#include <vector>

namespace vrnav
{

/// Everything the perception-action loop needs besides the policy.
struct SimConfig
{
    ArenaSpec arena;
    double fov = 0.4;
    int rays = 8;
    EncodingCalibration calibration;
    double v_max = 2.0;
    double noise_std = 0.0; ///< visual-angle jitter, radians
    int horizon = 500;
};

inline void validate_sim(const SimConfig& sim)
{
    validate_arena(sim.arena);
    validate_calibration(sim.calibration);
    if (!(sim.fov > 0.0 && sim.fov < 1.0))
        throw ValidationError("vision.fov", "field of vision must lie in (0, 1)");
    if (sim.rays < 2)
        throw ValidationError("vision.rays", "at least two rays are required");
    if (!(sim.v_max > 0.0))
        throw ValidationError("environment.max_speed", "must be positive");
    if (!(sim.noise_std >= 0.0))
        throw ValidationError("vision.noise_std", "must be non-negative");
    if (sim.horizon < 1)
        throw ValidationError("evolution.episode_horizon", "must be positive");
}

/// Network policy with its own scratch space. Not shareable across threads; copy it instead.
class NetworkPolicy
{
public:
    explicit NetworkPolicy(const PolicyGenome& genome) : weights_(unpack(genome)) {}
    explicit NetworkPolicy(PolicyWeights weights) : weights_(std::move(weights)) {}

    double operator()(std::span<const double> frame) { return forward(weights_, frame, workspace_); }

    const PolicyWeights& weights() const { return weights_; }

private:
    PolicyWeights weights_;
    PolicyWorkspace workspace_;
};

/// Vision for one pose: raycast + encoding into a reusable buffer.
class Eye
{
public:
    explicit Eye(const SimConfig& sim)
        : walls_(sim.arena), fan_(sim.fov, sim.rays), calibration_(sim.calibration),
          hits_(static_cast<std::size_t>(sim.rays)), frame_(static_cast<std::size_t>(sim.rays * wall_count))
    {}

    /// Encoded frame for `pose` in the arena this eye was built for.
    std::span<const double> look(const AgentState& pose)
    {
        cast_rays_into(pose, walls_, fan_, hits_);
        clamped_ += encode_into(hits_, calibration_, frame_);
        return frame_;
    }

    long long clamped() const { return clamped_; }
    const ArenaWalls& walls() const { return walls_; }

private:
    ArenaWalls walls_;
    RayFan fan_;
    EncodingCalibration calibration_;
    std::vector<RayHit> hits_;
    std::vector<double> frame_;
    long long clamped_ = 0;
};

/// One perception-action cycle. Returns the new state and the action that produced it.
template <class Policy, class Rng>
std::pair<AgentState, double> sense_act_step(const AgentState& state, const SimConfig& sim, Eye& eye, Policy& policy,
                                             Rng& noise_rng)
{
    const AgentState seen = perturb_visual_angle(state, sim.noise_std, noise_rng);
    const double action = policy(eye.look(seen));
    const MotionCommand cmd = action_to_motion(action, sim.v_max);
    return {step_agent(state, cmd, sim.arena, eye.walls()), action};
}

struct EpisodeOutcome
{
    std::optional<int> reached_at; ///< number of steps taken when the patch was first touched
    double final_remaining = 0.0;
    AgentState final_state;
};

/// Training/validation episode: stops as soon as the patch is touched.
template <class Policy, class Rng>
EpisodeOutcome run_episode(Policy& policy, const SimConfig& sim, AgentState state, Rng& noise_rng)
{
    Eye eye(sim);
    state.t = 0;
    EpisodeOutcome outcome;
    for (int step = 0; step < sim.horizon; ++step)
    {
        state = sense_act_step(state, sim, eye, policy, noise_rng).first;
        if (patch_hit(state, sim.arena))
        {
            outcome.reached_at = state.t;
            break;
        }
    }
    outcome.final_state = state;
    outcome.final_remaining = remaining_distance(state, sim.arena);
    return outcome;
}

/// Training cost: time to the patch, or the horizon plus the distance still to go. Lower is better.
inline double episode_fitness(const EpisodeOutcome& outcome, int horizon)
{
    if (outcome.reached_at)
        return static_cast<double>(*outcome.reached_at);
    return static_cast<double>(horizon) + outcome.final_remaining;
}

/// Validation cost: time to the patch, or the horizon if never reached.
inline double validation_cost(const EpisodeOutcome& outcome, int horizon)
{
    return outcome.reached_at ? static_cast<double>(*outcome.reached_at) : static_cast<double>(horizon);
}

struct TrajectorySample
{
    int t = 0;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double action = 0.0;
};

/// Fixed-length trajectory. series[t] is the pose at time t and the action chosen from it.
struct TrajectoryRecord
{
    AgentState init;
    std::vector<TrajectorySample> series;
};

/// Test rollout: runs the full horizon regardless of patch contact.
template <class Policy, class Rng>
TrajectoryRecord rollout(Policy& policy, const SimConfig& sim, AgentState init, Rng& noise_rng)
{
    Eye eye(sim);
    init.t = 0;
    TrajectoryRecord record;
    record.init = init;
    record.series.reserve(static_cast<std::size_t>(sim.horizon));
    AgentState state = init;
    for (int step = 0; step < sim.horizon; ++step)
    {
        const auto [next, action] = sense_act_step(state, sim, eye, policy, noise_rng);
        record.series.push_back({state.t, state.position.x, state.position.y, state.heading, action});
        state = next;
    }
    return record;
}

} // namespace vrnav

#endif // VRNAV_SIMULATION_HPP

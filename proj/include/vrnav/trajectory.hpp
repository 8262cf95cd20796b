#ifndef VRNAV_TRAJECTORY_HPP
#define VRNAV_TRAJECTORY_HPP

#include "vrnav/parallel.hpp"
#include "vrnav/random.hpp"
#include "vrnav/simulation.hpp"

#include <string>
#include <concepts>
#include <vector>

namespace vrnav
{

/// Test initializations: a square lattice of positions crossed with evenly spaced headings.
struct LatticeSpec
{
    double spacing = 25.0;
    int orientations = 16;
    int horizon = 500;
    int mask_prefix = 25;

    bool operator==(const LatticeSpec&) const = default;
};

struct TrajectorySet
{
    std::string checkpoint_id;
    std::string config_hash;
    LatticeSpec lattice;
    std::vector<TrajectoryRecord> records;
    std::vector<AgentState> skipped; ///< lattice inits that started inside the patch
};

/// Lattice headings: -pi + 2 pi k / n.
inline double lattice_heading(int k, int n) { return wrap_angle(-pi + two_pi * k / n); }

/// Lattice positions strictly inside the arena, row by row from the bottom-left.
inline std::vector<Vec2> lattice_positions(const ArenaSpec& arena, double spacing)
{
    const auto box = arena.bounding_box();
    std::vector<Vec2> out;
    const int i0 = static_cast<int>(std::floor(box[0] / spacing)) + 1;
    const int i1 = static_cast<int>(std::ceil(box[2] / spacing)) - 1;
    const int j0 = static_cast<int>(std::floor(box[1] / spacing)) + 1;
    const int j1 = static_cast<int>(std::ceil(box[3] / spacing)) - 1;
    for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
        {
            const Vec2 p{i * spacing, j * spacing};
            if (arena.signed_boundary_distance(p) > 0.0)
                out.push_back(p);
        }
    return out;
}

/// Every (position, heading) test init; inits inside the patch go to `skipped`.
inline std::vector<AgentState> lattice_inits(const ArenaSpec& arena, const LatticeSpec& lattice,
                                             std::vector<AgentState>* skipped = nullptr)
{
    std::vector<AgentState> inits;
    for (const Vec2& p : lattice_positions(arena, lattice.spacing))
        for (int k = 0; k < lattice.orientations; ++k)
        {
            const AgentState s{p, lattice_heading(k, lattice.orientations), 0};
            if (patch_hit(s, arena))
            {
                if (skipped)
                    skipped->push_back(s);
                continue;
            }
            inits.push_back(s);
        }
    return inits;
}

/// Rolls the policy out from every lattice init for the full horizon; patch contact does not stop an episode.
/// `make_policy()` must return a fresh callable per worker.
template <class PolicyFactory>
    requires std::invocable<PolicyFactory&>
TrajectorySet run_test_grid(PolicyFactory&& make_policy, const SimConfig& sim_in, const LatticeSpec& lattice,
                            std::uint64_t noise_seed = 0)
{
    SimConfig sim = sim_in;
    sim.horizon = lattice.horizon;
    validate_sim(sim);
    TrajectorySet set;
    set.lattice = lattice;
    const auto inits = lattice_inits(sim.arena, lattice, &set.skipped);
    set.records.resize(inits.size());
    parallel_for(inits.size(), [&](std::size_t i) {
        auto policy = make_policy();
        auto noise = make_rng(noise_seed, {tag(Stream::Test), i});
        set.records[i] = rollout(policy, sim, inits[i], noise);
    });
    return set;
}

inline TrajectorySet run_test_grid(const PolicyGenome& genome, const SimConfig& sim, const LatticeSpec& lattice,
                                   std::uint64_t noise_seed = 0)
{
    const PolicyWeights weights = unpack(genome);
    return run_test_grid([&] { return NetworkPolicy(weights); }, sim, lattice, noise_seed);
}

enum class PerturbationKind
{
    Identity,
    FieldOfVision, ///< replaces the fov fraction
    Corner,        ///< displaces the NW corner
    Speed,         ///< scales the maximum speed
};

struct Perturbation
{
    PerturbationKind kind = PerturbationKind::Identity;
    double value = 0.0;   ///< new fov, or speed scale
    Vec2 displacement{};  ///< corner displacement
};

/// Applies one perturbation to the environment/perception/action parameters. Rejects non-convex arenas.
inline SimConfig perturbed(const SimConfig& base, const Perturbation& p)
{
    SimConfig sim = base;
    switch (p.kind)
    {
    case PerturbationKind::Identity: break;
    case PerturbationKind::FieldOfVision:
        if (!(p.value > 0.0 && p.value < 1.0))
            throw ValidationError("perturb.fov", "field of vision must lie in (0, 1)");
        sim.fov = p.value;
        break;
    case PerturbationKind::Corner:
        sim.arena.vertices[0] = sim.arena.vertices[0] + p.displacement;
        validate_arena(sim.arena);
        break;
    case PerturbationKind::Speed:
        if (!(p.value > 0.0))
            throw ValidationError("perturb.speed", "speed scale must be positive");
        sim.v_max *= p.value;
        break;
    }
    return sim;
}

/// Reruns the test grid under each perturbation.
inline std::vector<TrajectorySet> perturbation_suite(const PolicyGenome& genome, const SimConfig& sim,
                                                     const LatticeSpec& lattice, const std::vector<Perturbation>& variants,
                                                     std::uint64_t noise_seed = 0)
{
    std::vector<TrajectorySet> out;
    for (const auto& p : variants)
        out.push_back(run_test_grid(genome, perturbed(sim, p), lattice, noise_seed));
    return out;
}

/// Mean |turn| per step in degrees, over unmasked timesteps.
inline double mean_turning_speed(const TrajectorySet& set)
{
    double sum = 0.0;
    long long n = 0;
    for (const auto& r : set.records)
        for (std::size_t t = static_cast<std::size_t>(set.lattice.mask_prefix); t < r.series.size(); ++t)
        {
            sum += std::abs(r.series[t].action) * 90.0;
            ++n;
        }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

} // namespace vrnav

#endif // VRNAV_TRAJECTORY_HPP

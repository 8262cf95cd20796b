#ifndef VRNAV_TRAIN_HPP
#define VRNAV_TRAIN_HPP

#include "vrnav/parallel.hpp"
#include "vrnav/pgpe.hpp"
#include "vrnav/random.hpp"
#include "vrnav/simulation.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace vrnav
{

struct TrainSettings
{
    SimConfig sim;
    ArchSpec arch;
    EsConfig es;
    std::uint64_t seed = 1;
    double center_init_bound = 1e-5; ///< initial center drawn uniformly from [-b, b]
};

/// Per-generation summary of the population's mean episode costs (lower is better).
struct GenerationStats
{
    int generation = 0;
    double median = 0.0;
    double best = 0.0;
    double mean = 0.0;
};

inline double median_of(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1)
        return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

inline GenerationStats summarize(int generation, const std::vector<double>& costs)
{
    GenerationStats s;
    s.generation = generation;
    s.median = median_of(costs);
    s.best = *std::min_element(costs.begin(), costs.end());
    s.mean = std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(costs.size());
    return s;
}

inline std::vector<double> initial_center(const TrainSettings& settings)
{
    auto rng = make_rng(settings.seed, {tag(Stream::Init)});
    std::vector<double> center(param_count(settings.arch));
    if (settings.center_init_bound > 0.0)
    {
        std::uniform_real_distribution<double> u(-settings.center_init_bound, settings.center_init_bound);
        for (double& c : center)
            c = u(rng);
    }
    return center;
}

/// Episode starts for one training generation, shared by every candidate.
inline std::vector<AgentState> generation_inits(const TrainSettings& settings, int generation)
{
    auto rng = make_rng(settings.seed, {tag(Stream::Episodes), static_cast<std::uint64_t>(generation)});
    std::vector<AgentState> inits;
    for (int e = 0; e < settings.es.episodes_per_candidate; ++e)
        inits.push_back(random_init(rng, settings.sim.arena));
    return inits;
}

/// Mean training cost of every candidate over the shared episode starts.
inline std::vector<double> evaluate_candidates(const TrainSettings& settings, const std::vector<std::vector<double>>& candidates,
                                               const std::vector<AgentState>& inits, int generation)
{
    const std::size_t n_cand = candidates.size();
    const std::size_t n_ep = inits.size();
    std::vector<double> costs(n_cand * n_ep, 0.0);
    SimConfig sim = settings.sim;
    sim.horizon = settings.es.episode_horizon;
    parallel_for(n_cand, [&](std::size_t c) {
        NetworkPolicy policy(unpack(settings.arch, candidates[c]));
        for (std::size_t e = 0; e < n_ep; ++e)
        {
            auto noise = make_rng(settings.seed, {tag(Stream::VisionNoise), static_cast<std::uint64_t>(generation), c, e});
            const auto outcome = run_episode(policy, sim, inits[e], noise);
            costs[c * n_ep + e] = episode_fitness(outcome, sim.horizon);
        }
    });
    std::vector<double> mean(n_cand, 0.0);
    for (std::size_t c = 0; c < n_cand; ++c)
    {
        double s = 0.0;
        for (std::size_t e = 0; e < n_ep; ++e)
            s += costs[c * n_ep + e];
        mean[c] = s / static_cast<double>(n_ep);
    }
    return mean;
}

/// Runs one generation in place: sample around the current center, evaluate, update.
/// Returns the stats of the sampled population; the pre-update center is the generation's checkpoint.
inline GenerationStats train_generation(const TrainSettings& settings, EsState& state)
{
    const int g = state.generation;
    auto rng = make_rng(settings.seed, {tag(Stream::Population), static_cast<std::uint64_t>(g)});
    const auto inits = generation_inits(settings, g);
    std::vector<double> costs;
    pgpe_generation(state, settings.es, rng, [&](const std::vector<std::vector<double>>& candidates) {
        costs = evaluate_candidates(settings, candidates, inits, g);
        std::vector<double> fitness(costs.size());
        std::transform(costs.begin(), costs.end(), fitness.begin(), [](double c) { return -c; });
        return fitness;
    });
    return summarize(g, costs);
}

struct TrainResult
{
    std::vector<GenerationStats> history;
    std::vector<std::vector<double>> centers; ///< centers[g] produced generation g's population
    EsState final_state;
};

/// Called after each generation with (stats, center that generated it, state after the update).
using GenerationCallback = std::function<void(const GenerationStats&, const std::vector<double>&, const EsState&)>;

/// Trains from `resume` (or a fresh state) until settings.es.generations generations exist.
inline TrainResult train(const TrainSettings& settings, const GenerationCallback& on_generation = {},
                         std::optional<EsState> resume = std::nullopt)
{
    validate_sim(settings.sim);
    validate_arch(settings.arch);
    validate_es(settings.es);
    if (settings.arch.rays != settings.sim.rays)
        throw ValidationError("vision.rays", "architecture and vision disagree on the number of rays");
    TrainResult result;
    EsState state = resume ? std::move(*resume) : make_es_state(initial_center(settings), settings.es);
    if (state.center.size() != param_count(settings.arch))
        throw ShapeError("resumed state does not match the architecture");
    while (state.generation < settings.es.generations)
    {
        std::vector<double> center = state.center;
        const auto stats = train_generation(settings, state);
        if (on_generation)
            on_generation(stats, center, state);
        result.history.push_back(stats);
        result.centers.push_back(std::move(center));
    }
    result.final_state = std::move(state);
    return result;
}

/// Generations with the lowest training median cost, best first (ties by generation index).
inline std::vector<int> top_generations(const std::vector<GenerationStats>& history, int top_k)
{
    std::vector<int> idx(history.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return history[a].median < history[b].median; });
    idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(top_k, 0))));
    std::vector<int> gens;
    for (int i : idx)
        gens.push_back(history[i].generation);
    return gens;
}

struct ValidationResult
{
    std::vector<int> generations;
    std::vector<AgentState> inits;
    std::vector<int> lower_bounds;        ///< straight-line bound per init
    std::vector<std::vector<double>> costs; ///< [selected generation][init]

    std::vector<double> all_costs() const
    {
        std::vector<double> v;
        for (const auto& row : costs)
            v.insert(v.end(), row.begin(), row.end());
        return v;
    }
    double median() const { return median_of(all_costs()); }
    double mean_lower_bound() const
    {
        return std::accumulate(lower_bounds.begin(), lower_bounds.end(), 0.0) / static_cast<double>(lower_bounds.size());
    }
    double success_rate(int horizon) const { return hit_fraction(all_costs(), horizon); }

    /// Index into `generations` of the best validated center: lowest median cost, ties broken by mean cost.
    std::size_t best_index() const
    {
        std::size_t best = 0;
        std::pair<double, double> best_key{std::numeric_limits<double>::infinity(), 0.0};
        for (std::size_t k = 0; k < costs.size(); ++k)
        {
            const std::pair<double, double> key{median_of(costs[k]),
                                                std::accumulate(costs[k].begin(), costs[k].end(), 0.0)};
            if (key < best_key)
            {
                best_key = key;
                best = k;
            }
        }
        return best;
    }
    int best_generation() const { return generations.at(best_index()); }
    double best_success_rate(int horizon) const { return hit_fraction(costs.at(best_index()), horizon); }

private:
    static double hit_fraction(const std::vector<double>& v, int horizon)
    {
        const auto hits = std::count_if(v.begin(), v.end(), [&](double c) { return c < horizon; });
        return static_cast<double>(hits) / static_cast<double>(v.size());
    }
};

/// Validation starts: fresh random inits, identical for every evaluated center.
inline std::vector<AgentState> validation_inits(const ArenaSpec& arena, std::uint64_t seed, int count)
{
    auto rng = make_rng(seed, {tag(Stream::Validation)});
    std::vector<AgentState> inits;
    for (int i = 0; i < count; ++i)
        inits.push_back(random_init(rng, arena));
    return inits;
}

/// Validation cost of one genome per init (patch-terminating, no remaining-distance term).
inline std::vector<double> evaluate_validation(const PolicyGenome& genome, const SimConfig& sim,
                                               const std::vector<AgentState>& inits, std::uint64_t noise_seed)
{
    std::vector<double> costs(inits.size());
    const PolicyWeights weights = unpack(genome);
    parallel_for(inits.size(), [&](std::size_t i) {
        NetworkPolicy policy(weights);
        auto noise = make_rng(noise_seed, {tag(Stream::VisionNoise), i});
        costs[i] = validation_cost(run_episode(policy, sim, inits[i], noise), sim.horizon);
    });
    return costs;
}

inline ValidationResult validate(const TrainSettings& settings, const std::vector<GenerationStats>& history,
                                 const std::vector<std::vector<double>>& centers, int top_k = 20, int inits = 100)
{
    if (history.size() < static_cast<std::size_t>(top_k))
        throw ValidationError("validation.top_k", "run has fewer generations than top_k");
    ValidationResult out;
    out.generations = top_generations(history, top_k);
    out.inits = validation_inits(settings.sim.arena, settings.seed, inits);
    for (const auto& s : out.inits)
        out.lower_bounds.push_back(straight_line_lower_bound(s, settings.sim.arena, settings.sim.v_max));
    for (int g : out.generations)
    {
        const PolicyGenome genome{settings.arch, centers.at(static_cast<std::size_t>(g))};
        out.costs.push_back(evaluate_validation(genome, settings.sim, out.inits, settings.seed ^ 0x5eedULL));
    }
    return out;
}

} // namespace vrnav

#endif // VRNAV_TRAIN_HPP

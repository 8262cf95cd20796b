#ifndef VRNAV_PGPE_HPP
#define VRNAV_PGPE_HPP

#include "vrnav/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace vrnav
{

/// How the exploration stds follow their gradient.
enum class StdUpdate
{
    Plain,      ///< std_lr times the raw std gradient
    Normalized, ///< std_lr times the unit-length std gradient
};

/// PGPE + ClipUp hyperparameters. Defaults are the values used for the navigation experiments.
struct EsConfig
{
    int generations = 1000;
    int episodes_per_candidate = 20;
    int population = 50;
    double std_init = 0.1;
    double std_lr = 0.1;
    double std_max_change = 0.2;
    double mean_lr = 0.2;
    double clipup_momentum = 0.8;
    double clipup_max_speed = 0.4;
    int episode_horizon = 500;
    StdUpdate std_update = StdUpdate::Normalized;
};

inline void validate_es(const EsConfig& es)
{
    if (es.generations < 1)
        throw ValidationError("evolution.generations", "must be positive");
    if (es.episodes_per_candidate < 1)
        throw ValidationError("evolution.episodes", "must be positive");
    if (es.population < 2 || es.population % 2 != 0)
        throw ValidationError("evolution.population", "must be a positive even number (antithetic pairs)");
    if (!(es.std_init > 0.0))
        throw ValidationError("evolution.std_init", "must be positive");
    if (!(es.std_lr > 0.0))
        throw ValidationError("evolution.std_lr", "must be positive");
    if (!(es.std_max_change > 0.0 && es.std_max_change < 1.0))
        throw ValidationError("evolution.std_max_change", "must lie in (0, 1)");
    if (!(es.mean_lr > 0.0))
        throw ValidationError("evolution.mean_lr", "must be positive");
    if (!(es.clipup_momentum >= 0.0 && es.clipup_momentum < 1.0))
        throw ValidationError("evolution.clipup_momentum", "must lie in [0, 1)");
    if (!(es.clipup_max_speed > 0.0))
        throw ValidationError("evolution.clipup_max_speed", "must be positive");
    if (es.episode_horizon < 1)
        throw ValidationError("evolution.episode_horizon", "must be positive");
}

struct EsState
{
    std::vector<double> center;
    std::vector<double> stds;
    std::vector<double> velocity;
    int generation = 0;
};

inline EsState make_es_state(std::vector<double> center, const EsConfig& es)
{
    EsState s;
    s.stds.assign(center.size(), es.std_init);
    s.velocity.assign(center.size(), 0.0);
    s.center = std::move(center);
    return s;
}

/// Antithetic samples: candidate 2p = center + noise[p], candidate 2p+1 = center - noise[p].
struct Population
{
    std::vector<std::vector<double>> noise;
    std::vector<std::vector<double>> candidates;
};

template <class Rng>
Population sample_population(const EsState& state, int population, Rng& rng)
{
    if (population < 2 || population % 2 != 0)
        throw ValidationError("evolution.population", "must be a positive even number (antithetic pairs)");
    Population pop;
    const std::size_t n = state.center.size();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int p = 0; p < population / 2; ++p)
    {
        std::vector<double> eps(n);
        for (std::size_t i = 0; i < n; ++i)
            eps[i] = normal(rng) * state.stds[i];
        std::vector<double> plus(n), minus(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            plus[i] = state.center[i] + eps[i];
            minus[i] = state.center[i] - eps[i];
        }
        pop.candidates.push_back(std::move(plus));
        pop.candidates.push_back(std::move(minus));
        pop.noise.push_back(std::move(eps));
    }
    return pop;
}

/// Centered ranks in [-0.5, 0.5]; higher fitness gets the higher rank, ties share their mean rank.
inline std::vector<double> centered_ranks(std::span<const double> fitness)
{
    const std::size_t n = fitness.size();
    std::vector<double> out(n, 0.0);
    if (n < 2)
        return out;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
    std::size_t i = 0;
    while (i < n)
    {
        std::size_t j = i;
        while (j + 1 < n && fitness[order[j + 1]] == fitness[order[i]])
            ++j;
        const double rank = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k)
            out[order[k]] = rank / static_cast<double>(n - 1) - 0.5;
        i = j + 1;
    }
    return out;
}

struct PgpeGradient
{
    std::vector<double> center;
    std::vector<double> stds;
};

/// PGPE estimator on rank-normalized fitness (higher is better).
/// Center: mean over pairs of eps * (u+ - u-) / 2. Stds: mean over pairs of
/// ((u+ + u-) / 2 - baseline) * (eps^2 - std^2) / std, baseline = mean utility.
inline PgpeGradient pgpe_gradient(const Population& pop, std::span<const double> fitness, std::span<const double> stds)
{
    if (fitness.size() != pop.candidates.size())
        throw ShapeError("need one fitness value per candidate");
    const auto u = centered_ranks(fitness);
    const double baseline = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
    const std::size_t n = stds.size();
    const std::size_t pairs = pop.noise.size();
    PgpeGradient g{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t p = 0; p < pairs; ++p)
    {
        const double up = u[2 * p];
        const double um = u[2 * p + 1];
        const double diff = 0.5 * (up - um);
        const double mean = 0.5 * (up + um) - baseline;
        const auto& eps = pop.noise[p];
        for (std::size_t i = 0; i < n; ++i)
        {
            g.center[i] += diff * eps[i];
            g.stds[i] += mean * (eps[i] * eps[i] - stds[i] * stds[i]) / stds[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        g.center[i] /= static_cast<double>(pairs);
        g.stds[i] /= static_cast<double>(pairs);
    }
    return g;
}

inline double l2_norm(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

/// ClipUp on the center (ascent direction), then the bounded std step.
inline void clipup_step(EsState& state, const EsConfig& es, std::span<const double> center_gradient,
                        std::span<const double> std_gradient = {})
{
    const std::size_t n = state.center.size();
    if (center_gradient.size() != n)
        throw ShapeError("gradient length does not match the search space");
    for (double g : center_gradient)
        if (!std::isfinite(g))
            throw Error("non-finite gradient");

    const double gnorm = l2_norm(center_gradient);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double unit = gnorm > 0.0 ? center_gradient[i] / gnorm : 0.0;
        state.velocity[i] = es.clipup_momentum * state.velocity[i] + es.mean_lr * unit;
    }
    const double vnorm = l2_norm(state.velocity);
    if (vnorm > es.clipup_max_speed)
    {
        const double scale = es.clipup_max_speed / vnorm;
        for (double& v : state.velocity)
            v *= scale;
    }
    for (std::size_t i = 0; i < n; ++i)
        state.center[i] += state.velocity[i];

    if (!std_gradient.empty())
    {
        if (std_gradient.size() != n)
            throw ShapeError("std gradient length does not match the search space");
        const double snorm = es.std_update == StdUpdate::Normalized ? l2_norm(std_gradient) : 1.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double step = snorm > 0.0 ? es.std_lr * std_gradient[i] / snorm : 0.0;
            const double old = state.stds[i];
            const double bound = es.std_max_change * old;
            state.stds[i] = old + std::clamp(step, -bound, bound);
        }
    }
    ++state.generation;
}

/// One full PGPE generation: antithetic sampling around the center, fitness evaluation
/// (`evaluate(candidates)` returns one value per candidate, higher is better), then the update.
/// Returns the raw fitness values.
template <class Evaluate, class Rng>
std::vector<double> pgpe_generation(EsState& state, const EsConfig& es, Rng& rng, Evaluate&& evaluate)
{
    const Population pop = sample_population(state, es.population, rng);
    std::vector<double> fitness = evaluate(pop.candidates);
    const auto grad = pgpe_gradient(pop, fitness, state.stds);
    clipup_step(state, es, grad.center, grad.stds);
    return fitness;
}

} // namespace vrnav

#endif // VRNAV_PGPE_HPP

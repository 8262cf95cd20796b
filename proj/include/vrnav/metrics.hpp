#ifndef VRNAV_METRICS_HPP
#define VRNAV_METRICS_HPP

#include "vrnav/arena.hpp"
#include "vrnav/error.hpp"
#include "vrnav/simulation.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace vrnav
{

/// Timesteps at the start of every test trajectory excluded from movement statistics.
inline constexpr int default_mask_prefix = 25;
inline constexpr int default_orientations = 16;

/// Sector index of an angle for `sectors` equal sectors whose edges start at -pi.
/// Angles on an edge go to the upper sector.
inline int orientation_sector(double angle, int sectors)
{
    const double width = two_pi / sectors;
    const int s = static_cast<int>(std::floor((wrap_angle(angle) + pi) / width + 1e-9));
    return s >= sectors ? 0 : std::max(s, 0); // values just below pi sit on the -pi edge
}

/// C(t) = < cos(phi(t0 + t) - phi(t0)) > over records, for t = 0 .. horizon - t0 - 1.
inline std::vector<double> temporal_correlation(std::span<const TrajectoryRecord> records, int t0 = default_mask_prefix)
{
    if (records.empty())
        return {};
    const std::size_t horizon = records.front().series.size();
    if (horizon <= static_cast<std::size_t>(t0))
        throw ValidationError("analysis.mask_prefix", "trajectories must be longer than the masked prefix");
    const std::size_t len = horizon - static_cast<std::size_t>(t0);
    std::vector<double> c(len, 0.0);
    for (const auto& r : records)
    {
        if (r.series.size() != horizon)
            throw ShapeError("trajectories in a set must share one horizon");
        const double ref = r.series[static_cast<std::size_t>(t0)].heading;
        for (std::size_t t = 0; t < len; ++t)
            c[t] += std::cos(r.series[static_cast<std::size_t>(t0) + t].heading - ref);
    }
    for (double& v : c)
        v /= static_cast<double>(records.size());
    return c;
}

struct Decorrelation
{
    int time = 0;
    bool censored = false;
};

/// First t with C(t) < 0.5. If the curve never drops below, the curve length is reported and flagged as censored.
inline Decorrelation decorrelation_time(std::span<const double> curve, double threshold = 0.5)
{
    for (std::size_t t = 0; t < curve.size(); ++t)
        if (curve[t] < threshold)
            return {static_cast<int>(t), false};
    return {static_cast<int>(curve.size()), true};
}

/// Normalized inverted entropy of orientation counts: 1 for a single orientation, 0 for uniform.
/// The ratio does not depend on the logarithm base.
inline double directedness_from_counts(std::span<const long long> counts)
{
    long long total = 0;
    for (auto c : counts)
        total += c;
    if (total == 0)
        return std::numeric_limits<double>::quiet_NaN();
    double h = 0.0;
    for (auto c : counts)
        if (c > 0)
        {
            const double p = static_cast<double>(c) / static_cast<double>(total);
            h -= p * std::log(p);
        }
    const double h_max = std::log(static_cast<double>(counts.size()));
    return std::clamp((h_max - h) / h_max, 0.0, 1.0);
}

struct DirectednessSettings
{
    double bin_size = 25.0;
    int orientations = default_orientations;
    double boundary_mask = 100.0; ///< samples closer than this to a wall are dropped
    double patch_mask = 100.0;    ///< samples closer than this to the patch center are dropped
    int mask_prefix = default_mask_prefix;
};

struct DirectednessMap
{
    double origin_x = 0.0;
    double origin_y = 0.0;
    double bin_size = 25.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> value;     ///< [iy * nx + ix]; NaN where no sample survived the masks
    std::vector<long long> samples; ///< unmasked samples per bin
    double mean = std::numeric_limits<double>::quiet_NaN();
    int occupied_bins = 0;
};

inline DirectednessMap directedness(std::span<const TrajectoryRecord> records, const ArenaSpec& arena,
                                    const DirectednessSettings& cfg = {})
{
    const auto box = arena.bounding_box();
    DirectednessMap map;
    map.origin_x = box[0];
    map.origin_y = box[1];
    map.bin_size = cfg.bin_size;
    map.nx = std::max(1, static_cast<int>(std::ceil((box[2] - box[0]) / cfg.bin_size)));
    map.ny = std::max(1, static_cast<int>(std::ceil((box[3] - box[1]) / cfg.bin_size)));
    const std::size_t bins = static_cast<std::size_t>(map.nx * map.ny);
    const std::size_t k = static_cast<std::size_t>(cfg.orientations);
    std::vector<long long> counts(bins * k, 0);
    map.samples.assign(bins, 0);
    for (const auto& r : records)
        for (std::size_t t = static_cast<std::size_t>(cfg.mask_prefix); t < r.series.size(); ++t)
        {
            const auto& s = r.series[t];
            const Vec2 p{s.x, s.y};
            if (arena.boundary_distance(p) < cfg.boundary_mask || distance(p, arena.patch_center) < cfg.patch_mask)
                continue;
            const int ix = std::clamp(static_cast<int>((s.x - map.origin_x) / cfg.bin_size), 0, map.nx - 1);
            const int iy = std::clamp(static_cast<int>((s.y - map.origin_y) / cfg.bin_size), 0, map.ny - 1);
            const std::size_t b = static_cast<std::size_t>(iy * map.nx + ix);
            ++counts[b * k + static_cast<std::size_t>(orientation_sector(s.heading, cfg.orientations))];
            ++map.samples[b];
        }
    map.value.assign(bins, std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    for (std::size_t b = 0; b < bins; ++b)
    {
        if (map.samples[b] == 0)
            continue;
        map.value[b] = directedness_from_counts(std::span<const long long>(counts.data() + b * k, k));
        sum += map.value[b];
        ++map.occupied_bins;
    }
    if (map.occupied_bins > 0)
        map.mean = sum / map.occupied_bins;
    return map;
}

struct HeadingProfilePoint
{
    double distance = 0.0;        ///< to the patch center
    double relative_heading = 0.0; ///< heading minus the heading at the end of the masked prefix, wrapped
};

inline std::vector<HeadingProfilePoint> heading_profile(std::span<const TrajectoryRecord> records, const ArenaSpec& arena,
                                                        int t0 = default_mask_prefix)
{
    std::vector<HeadingProfilePoint> out;
    for (const auto& r : records)
    {
        if (r.series.size() <= static_cast<std::size_t>(t0))
            continue;
        const double ref = r.series[static_cast<std::size_t>(t0)].heading;
        for (std::size_t t = static_cast<std::size_t>(t0); t < r.series.size(); ++t)
        {
            const auto& s = r.series[t];
            out.push_back({distance(Vec2{s.x, s.y}, arena.patch_center), wrap_angle(s.heading - ref)});
        }
    }
    return out;
}

struct PolarHistogram
{
    std::vector<long long> counts;
    std::vector<double> frequency; ///< counts / total
    std::vector<double> radius;    ///< bar radius with area proportional to frequency, largest bar = 1
    long long total = 0;
};

/// Relative orientations (to the initial route heading) at timesteps farther than `min_distance` from the patch center.
inline PolarHistogram polar_histogram(std::span<const TrajectoryRecord> records, const ArenaSpec& arena,
                                      double min_distance = 100.0, int sectors = default_orientations,
                                      int t0 = default_mask_prefix)
{
    PolarHistogram h;
    h.counts.assign(static_cast<std::size_t>(sectors), 0);
    for (const auto& p : heading_profile(records, arena, t0))
        if (p.distance > min_distance)
        {
            ++h.counts[static_cast<std::size_t>(orientation_sector(p.relative_heading, sectors))];
            ++h.total;
        }
    h.frequency.assign(h.counts.size(), 0.0);
    h.radius.assign(h.counts.size(), 0.0);
    if (h.total == 0)
        return h;
    double max_f = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i)
    {
        h.frequency[i] = static_cast<double>(h.counts[i]) / static_cast<double>(h.total);
        max_f = std::max(max_f, h.frequency[i]);
    }
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        h.radius[i] = std::sqrt(h.frequency[i] / max_f);
    return h;
}

enum class ClassLabel
{
    IndirectSequential,
    BiasedDiffusive,
    DirectPathing,
    Hybrid,
};

constexpr std::string_view label_name(ClassLabel l)
{
    switch (l)
    {
    case ClassLabel::IndirectSequential: return "IndirectSequential";
    case ClassLabel::BiasedDiffusive: return "BiasedDiffusive";
    case ClassLabel::DirectPathing: return "DirectPathing";
    case ClassLabel::Hybrid: return "Hybrid";
    }
    return "Hybrid";
}

/// Threshold classifier in the (decorrelation time, mean directedness) plane; everything outside the
/// three class boxes is Hybrid.
constexpr ClassLabel classify(double decorrelation, double directedness_mean)
{
    if (decorrelation < 90.0 && directedness_mean < 0.6)
        return ClassLabel::BiasedDiffusive;
    if (decorrelation >= 105.0 && decorrelation <= 140.0 && directedness_mean > 0.65)
        return ClassLabel::IndirectSequential;
    if (decorrelation > 155.0 && directedness_mean > 0.65)
        return ClassLabel::DirectPathing;
    return ClassLabel::Hybrid;
}

struct BehaviorSummary
{
    std::vector<double> correlation;
    Decorrelation decorrelation;
    DirectednessMap directedness;
    ClassLabel label = ClassLabel::Hybrid;
};

inline BehaviorSummary summarize_behavior(std::span<const TrajectoryRecord> records, const ArenaSpec& arena,
                                          const DirectednessSettings& cfg = {})
{
    BehaviorSummary s;
    s.correlation = temporal_correlation(records, cfg.mask_prefix);
    s.decorrelation = decorrelation_time(s.correlation);
    s.directedness = directedness(records, arena, cfg);
    const double d = std::isnan(s.directedness.mean) ? 0.0 : s.directedness.mean;
    s.label = classify(static_cast<double>(s.decorrelation.time), d);
    return s;
}

} // namespace vrnav

#endif // VRNAV_METRICS_HPP

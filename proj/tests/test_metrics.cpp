#include "vrnav/metrics.hpp"
#include "vrnav/random.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace vrnav;

namespace
{

// Agent parked at `p` whose heading advances by `omega` per step.
TrajectoryRecord turning(Vec2 p, double h0, double omega, int horizon = 500)
{
    TrajectoryRecord r;
    r.init = {p, h0, 0};
    for (int t = 0; t < horizon; ++t)
        r.series.push_back({t, p.x, p.y, wrap_angle(h0 + omega * t), 0.0});
    return r;
}

TrajectoryRecord straight(Vec2 p, double h, double speed = 0.0, int horizon = 500)
{
    TrajectoryRecord r;
    r.init = {p, h, 0};
    for (int t = 0; t < horizon; ++t)
    {
        const Vec2 q = p + unit_vector(h) * (speed * t);
        r.series.push_back({t, q.x, q.y, h, 0.0});
    }
    return r;
}

} // namespace

TEST(TemporalCorrelation, ConstantTurnIsCosine)
{
    const double omega = pi / 300.0;
    std::vector<TrajectoryRecord> set;
    for (int k = 0; k < 16; ++k)
        set.push_back(turning({250, 250}, -pi + two_pi * k / 16, omega));
    const auto c = temporal_correlation(set);
    ASSERT_EQ(c.size(), 475u);
    EXPECT_EQ(c[0], 1.0);
    for (std::size_t t = 0; t < c.size(); ++t)
        ASSERT_NEAR(c[t], std::cos(omega * static_cast<double>(t)), 1e-12);
    const auto d = decorrelation_time(c);
    EXPECT_FALSE(d.censored);
    EXPECT_NEAR(d.time, 100, 1);
}

TEST(TemporalCorrelation, StraightRunsAreCensored)
{
    std::vector<TrajectoryRecord> set{straight({300, 300}, 0.3), straight({700, 200}, -2.0)};
    const auto c = temporal_correlation(set);
    for (double v : c)
        ASSERT_EQ(v, 1.0);
    const auto d = decorrelation_time(c);
    EXPECT_TRUE(d.censored);
    EXPECT_EQ(d.time, 475);
}

TEST(TemporalCorrelation, MixtureIsThePointwiseAverage)
{
    const double omega = 0.013;
    const std::vector<TrajectoryRecord> a{straight({300, 300}, 1.0)};
    const std::vector<TrajectoryRecord> b{turning({300, 300}, 1.0, omega)};
    const std::vector<TrajectoryRecord> both{a[0], b[0]};
    const auto ca = temporal_correlation(a), cb = temporal_correlation(b), cm = temporal_correlation(both);
    for (std::size_t t = 0; t < cm.size(); ++t)
        ASSERT_NEAR(cm[t], 0.5 * (ca[t] + cb[t]), 1e-15);
}

TEST(TemporalCorrelation, BoundedByOne)
{
    auto rng = make_rng(3);
    std::normal_distribution<double> g(0.0, 0.3);
    std::vector<TrajectoryRecord> set;
    for (int k = 0; k < 20; ++k)
    {
        TrajectoryRecord r = straight({500, 500}, 0.0);
        double h = 0.0;
        for (auto& s : r.series)
            s.heading = wrap_angle(h += g(rng));
        set.push_back(r);
    }
    const auto c = temporal_correlation(set);
    EXPECT_EQ(c[0], 1.0);
    for (double v : c)
        ASSERT_LE(std::abs(v), 1.0);
}

TEST(Decorrelation, FirstCrossingWithoutSmoothing)
{
    std::vector<double> c(475, 0.9);
    auto rng = make_rng(4);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    for (std::size_t t = 0; t < c.size(); ++t)
        c[t] = 0.8 - 0.002 * static_cast<double>(t) + (t < 80 ? noise(rng) : 0.0);
    c[87] = 0.49;
    c[88] = 0.51; // noisy bounce back above threshold is ignored
    EXPECT_EQ(decorrelation_time(c).time, 87);
}

TEST(Directedness, AnalyticCases)
{
    std::vector<long long> one(16, 0);
    one[5] = 40;
    EXPECT_EQ(directedness_from_counts(one), 1.0);
    std::vector<long long> uniform(16, 3);
    EXPECT_EQ(directedness_from_counts(uniform), 0.0);
    std::vector<long long> two(16, 0);
    two[0] = two[9] = 7;
    EXPECT_EQ(directedness_from_counts(two), 0.75);
}

TEST(Directedness, IndependentOfLogBase)
{
    const std::vector<long long> counts{5, 0, 3, 9, 1, 0, 0, 2, 4, 4, 0, 0, 1, 0, 0, 6};
    long long total = 0;
    for (auto c : counts)
        total += c;
    double h2 = 0.0;
    for (auto c : counts)
        if (c)
            h2 -= (double(c) / total) * std::log2(double(c) / total);
    EXPECT_NEAR(directedness_from_counts(counts), (4.0 - h2) / 4.0, 1e-14);
}

TEST(Directedness, MapMasksBoundaryAndPatchAndAveragesOccupiedBins)
{
    const ArenaSpec a;
    std::vector<TrajectoryRecord> set;
    set.push_back(straight({212.5, 212.5}, 0.0));      // one orientation -> 1
    set.push_back(turning({712.5, 212.5}, 0.0, pi / 8, 25 + 29 * 16)); // 29 full cycles over 16 sectors -> 0
    set.push_back(straight({50.0, 500.0}, 1.0));        // within 100 of the west wall: masked
    set.push_back(straight({420.0, 610.0}, 1.0));       // within 100 of the patch center: masked
    const auto m = directedness(set, a);
    EXPECT_EQ(m.nx, 40);
    EXPECT_EQ(m.ny, 40);
    EXPECT_EQ(m.occupied_bins, 2);
    EXPECT_EQ(m.value[static_cast<std::size_t>(8 * 40 + 8)], 1.0);
    EXPECT_NEAR(m.value[static_cast<std::size_t>(8 * 40 + 28)], 0.0, 1e-12);
    EXPECT_NEAR(m.mean, 0.5, 1e-12);
    EXPECT_TRUE(std::isnan(m.value[static_cast<std::size_t>(20 * 40 + 2)]));
    EXPECT_EQ(m.samples[static_cast<std::size_t>(8 * 40 + 8)], 475);
    for (double v : m.value)
        if (!std::isnan(v))
            ASSERT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(OrientationSector, EdgesStartAtMinusPi)
{
    EXPECT_EQ(orientation_sector(-pi, 16), 0);
    EXPECT_EQ(orientation_sector(-pi + two_pi / 16, 16), 1);
    EXPECT_EQ(orientation_sector(0.0, 16), 8);
    EXPECT_EQ(orientation_sector(pi - 1e-6, 16), 15);
    EXPECT_EQ(orientation_sector(pi, 16), 0);
}

TEST(HeadingProfile, StraightRunsStayAtZero)
{
    const ArenaSpec a;
    const std::vector<TrajectoryRecord> set{straight({200, 200}, 0.7, 1.0)};
    const auto pts = heading_profile(set, a);
    ASSERT_EQ(pts.size(), 475u);
    for (const auto& p : pts)
        ASSERT_EQ(p.relative_heading, 0.0);
    EXPECT_NEAR(pts.front().distance, distance(Vec2{200, 200} + unit_vector(0.7) * 25.0, a.patch_center), 1e-9);
}

TEST(HeadingProfile, TwoSegmentPathGivesTwoBands)
{
    const ArenaSpec a;
    TrajectoryRecord r = straight({200, 200}, 0.0);
    for (std::size_t t = 250; t < r.series.size(); ++t)
        r.series[t].heading = pi / 2.0;
    std::set<double> bands;
    for (const auto& p : heading_profile(std::vector<TrajectoryRecord>{r}, a))
        bands.insert(p.relative_heading);
    EXPECT_EQ(bands, (std::set<double>{0.0, pi / 2.0}));
}

TEST(PolarHistogram, StraightSetFillsOneSector)
{
    const ArenaSpec a;
    const std::vector<TrajectoryRecord> set{straight({150, 150}, 2.0), straight({850, 150}, -1.0)};
    const auto h = polar_histogram(set, a);
    EXPECT_EQ(h.total, 950);
    EXPECT_EQ(h.counts[8], 950);
    EXPECT_EQ(h.radius[8], 1.0);
}

TEST(PolarHistogram, UniformSpinIsFlatAndTotalIsConserved)
{
    const ArenaSpec a;
    // 16 steps per revolution; 475 unmasked steps cover 29 full turns plus 11 sectors.
    const std::vector<TrajectoryRecord> set{turning({150, 150}, 0.0, two_pi / 16.0, 25 + 29 * 16)};
    const auto h = polar_histogram(set, a);
    EXPECT_EQ(h.total, 29 * 16);
    for (auto c : h.counts)
        EXPECT_EQ(c, 29);
    for (double r : h.radius)
        EXPECT_DOUBLE_EQ(r, 1.0);

    // records near the patch do not count
    const std::vector<TrajectoryRecord> near{straight({420, 620}, 0.0)};
    EXPECT_EQ(polar_histogram(near, a).total, 0);
}

TEST(Classify, ThresholdTable)
{
    EXPECT_EQ(classify(80, 0.50), ClassLabel::BiasedDiffusive);
    EXPECT_EQ(classify(120, 0.70), ClassLabel::IndirectSequential);
    EXPECT_EQ(classify(200, 0.80), ClassLabel::DirectPathing);
    EXPECT_EQ(classify(100, 0.62), ClassLabel::Hybrid);
    EXPECT_EQ(classify(105, 0.66), ClassLabel::IndirectSequential);
    EXPECT_EQ(classify(140, 0.66), ClassLabel::IndirectSequential);
    EXPECT_EQ(classify(155, 0.9), ClassLabel::Hybrid);
    EXPECT_EQ(classify(89.999, 0.6), ClassLabel::Hybrid);
}

TEST(Classify, RegionsAreDisjointAndCoverThePlane)
{
    auto rng = make_rng(12);
    std::uniform_real_distribution<double> dt(0.0, 500.0), dd(0.0, 1.0);
    for (int i = 0; i < 100000; ++i)
    {
        const double t = dt(rng), d = dd(rng);
        const int bd = t < 90 && d < 0.6;
        const int is = t >= 105 && t <= 140 && d > 0.65;
        const int dp = t > 155 && d > 0.65;
        ASSERT_LE(bd + is + dp, 1);
        const auto expected = bd ? ClassLabel::BiasedDiffusive
                              : is ? ClassLabel::IndirectSequential
                              : dp ? ClassLabel::DirectPathing
                                   : ClassLabel::Hybrid;
        ASSERT_EQ(classify(t, d), expected);
    }
}

TEST(SummarizeBehavior, EmitsOneLabel)
{
    const ArenaSpec a;
    std::vector<TrajectoryRecord> set;
    for (int k = 0; k < 16; ++k)
        set.push_back(straight({212.5, 212.5}, -pi + two_pi * k / 16, 0.0));
    const auto s = summarize_behavior(set, a);
    EXPECT_TRUE(s.decorrelation.censored);
    EXPECT_NEAR(s.directedness.mean, 0.0, 1e-12);
    EXPECT_EQ(s.label, ClassLabel::Hybrid);
}

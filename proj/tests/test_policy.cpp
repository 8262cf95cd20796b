#include "vrnav/config.hpp"
#include "vrnav/policy.hpp"
#include "vrnav/random.hpp"

#include <gtest/gtest.h>

using namespace vrnav;

namespace
{

std::vector<double> random_vector(std::size_t n, Rng& rng, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v)
        x = g(rng);
    return v;
}

std::vector<double> random_frame(int rays, Rng& rng)
{
    std::uniform_int_distribution<int> wall(0, 3);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::vector<double> f(static_cast<std::size_t>(rays * 4), 0.0);
    for (int r = 0; r < rays; ++r)
        f[static_cast<std::size_t>(r * 4 + wall(rng))] = val(rng);
    return f;
}

// Straightforward gather-form reference of the whole network, written against the documented pack order.
double reference_forward(const ArchSpec& a, const std::vector<double>& p, const std::vector<double>& frame)
{
    const int R = a.rays, C = a.in_channels, K = a.kernel, O = a.conv_out, pad = (K - 1) / 2;
    std::size_t at = 0;
    auto next = [&] { return p[at++]; };
    std::vector<std::vector<double>> dw(static_cast<std::size_t>(C), std::vector<double>(static_cast<std::size_t>(K)));
    for (auto& row : dw)
        for (double& x : row)
            x = next();
    std::vector<double> dwb(static_cast<std::size_t>(C));
    for (double& x : dwb)
        x = next();
    std::vector<std::vector<double>> pw(static_cast<std::size_t>(O), std::vector<double>(static_cast<std::size_t>(C)));
    for (auto& row : pw)
        for (double& x : row)
            x = next();
    std::vector<double> pwb(static_cast<std::size_t>(O));
    for (double& x : pwb)
        x = next();

    std::vector<double> h;
    for (int r = 0; r < R; ++r)
    {
        std::vector<double> mid(static_cast<std::size_t>(C));
        for (int c = 0; c < C; ++c)
        {
            double s = dwb[static_cast<std::size_t>(c)];
            for (int j = 0; j < K; ++j)
            {
                const int src = r + j - pad;
                if (src >= 0 && src < R)
                    s += dw[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] * frame[static_cast<std::size_t>(src * C + c)];
            }
            mid[static_cast<std::size_t>(c)] = s;
        }
        for (int o = 0; o < O; ++o)
        {
            double s = pwb[static_cast<std::size_t>(o)];
            for (int c = 0; c < C; ++c)
                s += pw[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)] * mid[static_cast<std::size_t>(c)];
            h.push_back(std::max(0.0, s));
        }
    }
    std::vector<int> widths = a.mlp_layers;
    widths.push_back(1);
    for (std::size_t l = 0; l < widths.size(); ++l)
    {
        const std::size_t in = h.size();
        std::vector<double> out(static_cast<std::size_t>(widths[l]));
        std::vector<std::vector<double>> w(out.size(), std::vector<double>(in));
        for (auto& row : w)
            for (double& x : row)
                x = next();
        for (std::size_t o = 0; o < out.size(); ++o)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < in; ++i)
                s += w[o][i] * h[i];
            out[o] = s + next();
            if (l + 1 < widths.size())
                out[o] = std::max(0.0, out[o]);
        }
        h = out;
    }
    EXPECT_EQ(at, p.size());
    return std::tanh(h[0]);
}

} // namespace

TEST(ParamCount, SpecExamples)
{
    ArchSpec a;
    EXPECT_EQ(param_count(a), 105u);
    EXPECT_LT(param_count(a), 300u);
    ArchSpec flat = a;
    flat.mlp_layers.clear();
    EXPECT_EQ(param_count(flat), 69u);
    ArchSpec wide = a;
    wide.rays = 16;
    // only the flatten-to-dense term (rays * conv_out * 2) doubles: 64 -> 128
    EXPECT_EQ(param_count(wide) - param_count(a), 64u);
}

TEST(Forward, ZeroGenomeGivesZero)
{
    Rng rng = make_rng(1);
    EXPECT_EQ(forward(zero_genome(ArchSpec{}), random_frame(8, rng)), 0.0);
}

TEST(Forward, OutputBiasOnly)
{
    PolicyGenome g = zero_genome(ArchSpec{});
    g.params.back() = 0.37;
    Rng rng = make_rng(2);
    EXPECT_DOUBLE_EQ(forward(g, random_frame(8, rng)), std::tanh(0.37));
}

TEST(Forward, MatchesReferenceImplementation)
{
    Rng rng = make_rng(3);
    std::vector<ArchSpec> archs(4);
    archs[1].mlp_layers = {};
    archs[2].rays = 12;
    archs[2].kernel = 5;
    archs[2].conv_out = 3;
    archs[2].mlp_layers = {4, 3};
    archs[3].rays = 16;
    archs[3].kernel = 4;
    for (const auto& a : archs)
        for (int trial = 0; trial < 50; ++trial)
        {
            const PolicyGenome g{a, random_vector(param_count(a), rng, 0.7)};
            const auto frame = random_frame(a.rays, rng);
            ASSERT_NEAR(forward(g, frame), reference_forward(a, g.params, frame), 1e-12);
        }
}

TEST(Forward, StrictlyInsideOpenInterval)
{
    PolicyGenome g = zero_genome(ArchSpec{});
    Rng rng = make_rng(4);
    g.params.back() = 1e6;
    EXPECT_LT(forward(g, random_frame(8, rng)), 1.0);
    g.params.back() = -1e6;
    EXPECT_GT(forward(g, random_frame(8, rng)), -1.0);
    for (int i = 0; i < 1000; ++i)
    {
        const PolicyGenome r{ArchSpec{}, random_vector(105, rng, 50.0)};
        const double y = forward(r, random_frame(8, rng));
        ASSERT_GT(y, -1.0);
        ASSERT_LT(y, 1.0);
    }
}

TEST(Forward, PureAndDeterministic)
{
    Rng rng = make_rng(5);
    const PolicyGenome g{ArchSpec{}, random_vector(105, rng)};
    const auto frame = random_frame(8, rng);
    const double first = forward(g, frame);
    const PolicyWeights w = unpack(g);
    PolicyWorkspace ws;
    for (int i = 0; i < 10; ++i)
        ASSERT_EQ(forward(w, frame, ws), first);
}

TEST(Forward, RejectsWrongWidth)
{
    EXPECT_THROW(forward(zero_genome(ArchSpec{}), std::vector<double>(28, 0.0)), ShapeError);
}

TEST(Forward, MirroredFrameAndKernelsGiveMirroredResponse)
{
    Rng rng = make_rng(6);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ArchSpec a;
        PolicyWeights w = unpack(a, random_vector(param_count(a), rng));
        const auto frame = random_frame(a.rays, rng);

        // explicit index reversal: ray r -> rays-1-r, tap j -> kernel-1-j
        std::vector<double> mframe(frame.size());
        for (int r = 0; r < a.rays; ++r)
            for (int c = 0; c < 4; ++c)
                mframe[static_cast<std::size_t>((a.rays - 1 - r) * 4 + c)] = frame[static_cast<std::size_t>(r * 4 + c)];
        PolicyWeights m = w;
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < a.kernel; ++j)
                m.dw_weight[static_cast<std::size_t>(c * a.kernel + j)] = w.dw_weight[static_cast<std::size_t>(c * a.kernel + a.kernel - 1 - j)];
        auto& first = m.dense.front();
        for (int o = 0; o < first.out; ++o)
            for (int r = 0; r < a.rays; ++r)
                for (int ch = 0; ch < a.conv_out; ++ch)
                    first.weight[static_cast<std::size_t>(o * first.in + (a.rays - 1 - r) * a.conv_out + ch)] =
                        w.dense.front().weight[static_cast<std::size_t>(o * first.in + r * a.conv_out + ch)];

        const auto f = conv_features(w, frame);
        const auto mf = conv_features(m, mframe);
        for (int r = 0; r < a.rays; ++r)
            for (int ch = 0; ch < a.conv_out; ++ch)
                ASSERT_NEAR(mf[static_cast<std::size_t>((a.rays - 1 - r) * a.conv_out + ch)],
                            f[static_cast<std::size_t>(r * a.conv_out + ch)], 1e-12);
        PolicyWorkspace ws;
        ASSERT_NEAR(forward(m, mframe, ws), forward(w, frame, ws), 1e-12);
    }
}

TEST(Forward, DepthwiseStageIsTranslationEquivariantInTheInterior)
{
    Rng rng = make_rng(7);
    ArchSpec a;
    a.rays = 12;
    a.kernel = 3;
    const int pad = 1;
    for (int s = 1; s <= 3; ++s)
    {
        const PolicyWeights w = unpack(a, random_vector(param_count(a), rng));
        const auto frame = random_frame(a.rays, rng);
        std::vector<double> shifted(frame.size(), 0.0);
        for (int r = s; r < a.rays; ++r)
            for (int c = 0; c < 4; ++c)
                shifted[static_cast<std::size_t>(r * 4 + c)] = frame[static_cast<std::size_t>((r - s) * 4 + c)];
        const auto f = conv_features(w, frame);
        const auto g = conv_features(w, shifted);
        ASSERT_EQ(f.size(), static_cast<std::size_t>(a.rays * a.conv_out)); // same padding keeps the width
        for (int p = s + pad; p <= a.rays - 1 - pad; ++p)
            for (int o = 0; o < a.conv_out; ++o)
                ASSERT_NEAR(g[static_cast<std::size_t>(p * a.conv_out + o)], f[static_cast<std::size_t>((p - s) * a.conv_out + o)], 1e-12);
    }
}

TEST(PackUnpack, RoundTripIsExact)
{
    Rng rng = make_rng(8);
    ArchSpec a;
    a.mlp_layers = {3, 2};
    const auto flat = random_vector(param_count(a), rng);
    EXPECT_EQ(pack(unpack(a, flat)), flat);
    EXPECT_THROW(unpack(a, std::vector<double>(flat.size() - 1)), ShapeError);
}

TEST(PackUnpack, LayoutFollowsDocumentedOrder)
{
    const ArchSpec a;
    std::vector<double> flat(param_count(a));
    for (std::size_t i = 0; i < flat.size(); ++i)
        flat[i] = static_cast<double>(i);
    const auto w = unpack(a, flat);
    EXPECT_EQ(w.dw_weight.front(), 0.0);   // channel 0, tap 0
    EXPECT_EQ(w.dw_weight[3], 3.0);        // channel 1, tap 0
    EXPECT_EQ(w.dw_bias.front(), 12.0);
    EXPECT_EQ(w.pw_weight.front(), 16.0);  // out 0, in 0
    EXPECT_EQ(w.pw_weight[4], 20.0);       // out 1, in 0
    EXPECT_EQ(w.pw_bias.front(), 32.0);
    EXPECT_EQ(w.dense[0].weight.front(), 36.0);
    EXPECT_EQ(w.dense[0].weight[32], 68.0); // hidden unit 1, input 0
    EXPECT_EQ(w.dense[0].bias.front(), 100.0);
    EXPECT_EQ(w.dense[1].weight.front(), 102.0);
    EXPECT_EQ(w.dense[1].bias.front(), 104.0);
}

TEST(PackUnpack, CanonicalGenomeChecksumIsStable)
{
    // Canonical fixture: params[i] = (i % 7 - 3) / 8, exactly representable.
    const ArchSpec a;
    std::vector<double> flat(param_count(a));
    for (std::size_t i = 0; i < flat.size(); ++i)
        flat[i] = (static_cast<double>(i % 7) - 3.0) / 8.0;
    std::string bytes;
    for (double v : pack(unpack(a, flat)))
    {
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        for (int k = 0; k < 8; ++k)
            bytes.push_back(static_cast<char>((u >> (8 * k)) & 0xff));
    }
    EXPECT_EQ(sha256_hex(bytes), "9460c6913b2d26fc379b9e2f6df4d1da5d28cf45821adc899f975b44a1c615bd");
}

#ifndef VRNAV_POLICY_HPP
#define VRNAV_POLICY_HPP

#include "vrnav/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vrnav
{

/// Shape of the feedforward policy: depthwise conv -> pointwise conv -> ReLU -> flatten ->
/// hidden dense layers (ReLU) -> linear scalar -> tanh.
struct ArchSpec
{
    int rays = 8;
    int in_channels = 4;
    int kernel = 3;
    int conv_out = 4;
    std::vector<int> mlp_layers{2};

    bool operator==(const ArchSpec&) const = default;
};

inline void validate_arch(const ArchSpec& arch)
{
    if (arch.rays < 2)
        throw ValidationError("vision.rays", "at least two rays are required");
    if (arch.in_channels != 4)
        throw ValidationError("architecture.in_channels", "input has one channel per wall (4)");
    if (arch.kernel < 1 || arch.kernel > arch.rays)
        throw ValidationError("architecture.kernel", "kernel width must lie in [1, rays]");
    if (arch.conv_out < 1)
        throw ValidationError("architecture.conv_out", "must be positive");
    for (int w : arch.mlp_layers)
        if (w < 1)
            throw ValidationError("architecture.mlp_layers", "hidden widths must be positive");
}

/// Parameter count, including every bias.
inline std::size_t param_count(const ArchSpec& arch)
{
    const std::size_t c = static_cast<std::size_t>(arch.in_channels);
    const std::size_t k = static_cast<std::size_t>(arch.kernel);
    const std::size_t o = static_cast<std::size_t>(arch.conv_out);
    std::size_t n = c * k + c;                 // depthwise
    n += c * o + o;                            // pointwise
    std::size_t fan_in = static_cast<std::size_t>(arch.rays) * o;
    for (int w : arch.mlp_layers)
    {
        n += fan_in * static_cast<std::size_t>(w) + static_cast<std::size_t>(w);
        fan_in = static_cast<std::size_t>(w);
    }
    n += fan_in + 1;                           // output
    return n;
}

struct PolicyGenome
{
    ArchSpec arch;
    std::vector<double> params;
};

inline PolicyGenome zero_genome(const ArchSpec& arch) { return {arch, std::vector<double>(param_count(arch), 0.0)}; }

struct DenseLayer
{
    int in = 0;
    int out = 0;
    std::vector<double> weight; ///< [out][in]
    std::vector<double> bias;   ///< [out]
};

/// Structured view of a genome.
///
/// Flat parameter order (stable, part of the checkpoint format):
///   1. depthwise weights [channel][tap], then depthwise biases [channel]
///   2. pointwise weights [out][in], then pointwise biases [out]
///   3. each hidden dense layer: weights [out][in] then biases [out]; the first layer's input
///      index is ray * conv_out + channel
///   4. output layer: weights [hidden], then the single bias
struct PolicyWeights
{
    ArchSpec arch;
    std::vector<double> dw_weight;
    std::vector<double> dw_bias;
    std::vector<double> pw_weight;
    std::vector<double> pw_bias;
    std::vector<DenseLayer> dense; ///< hidden layers followed by the scalar output layer
};

inline PolicyWeights unpack(const ArchSpec& arch, std::span<const double> flat)
{
    if (flat.size() != param_count(arch))
        throw ShapeError("parameter vector has " + std::to_string(flat.size()) + " entries, architecture needs " +
                         std::to_string(param_count(arch)));
    PolicyWeights w;
    w.arch = arch;
    std::size_t at = 0;
    auto take = [&](std::size_t n) {
        std::vector<double> v(flat.begin() + static_cast<std::ptrdiff_t>(at),
                              flat.begin() + static_cast<std::ptrdiff_t>(at + n));
        at += n;
        return v;
    };
    const std::size_t c = static_cast<std::size_t>(arch.in_channels);
    const std::size_t o = static_cast<std::size_t>(arch.conv_out);
    w.dw_weight = take(c * static_cast<std::size_t>(arch.kernel));
    w.dw_bias = take(c);
    w.pw_weight = take(o * c);
    w.pw_bias = take(o);
    int fan_in = arch.rays * arch.conv_out;
    std::vector<int> widths = arch.mlp_layers;
    widths.push_back(1);
    for (int width : widths)
    {
        DenseLayer layer;
        layer.in = fan_in;
        layer.out = width;
        layer.weight = take(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(width));
        layer.bias = take(static_cast<std::size_t>(width));
        w.dense.push_back(std::move(layer));
        fan_in = width;
    }
    return w;
}

inline PolicyWeights unpack(const PolicyGenome& genome) { return unpack(genome.arch, genome.params); }

inline std::vector<double> pack(const PolicyWeights& w)
{
    std::vector<double> flat;
    flat.reserve(param_count(w.arch));
    auto put = [&](const std::vector<double>& v) { flat.insert(flat.end(), v.begin(), v.end()); };
    put(w.dw_weight);
    put(w.dw_bias);
    put(w.pw_weight);
    put(w.pw_bias);
    for (const auto& layer : w.dense)
    {
        put(layer.weight);
        put(layer.bias);
    }
    if (flat.size() != param_count(w.arch))
        throw ShapeError("structured weights do not match their architecture");
    return flat;
}

/// Scratch buffers reused across forward passes.
struct PolicyWorkspace
{
    std::vector<double> depthwise;
    std::vector<double> features;
    std::vector<double> a;
    std::vector<double> b;
};

/// Convolutional stage only: rays x conv_out activations after the pointwise ReLU, row-major by ray.
/// `frame` is rays x in_channels, row-major.
inline void conv_features_into(const PolicyWeights& w, std::span<const double> frame, PolicyWorkspace& ws)
{
    const int rays = w.arch.rays;
    const int ch = w.arch.in_channels;
    const int k = w.arch.kernel;
    const int out = w.arch.conv_out;
    if (frame.size() != static_cast<std::size_t>(rays * ch))
        throw ShapeError("frame has " + std::to_string(frame.size()) + " values, policy expects " +
                         std::to_string(rays * ch));
    const int pad = (k - 1) / 2;
    ws.depthwise.resize(static_cast<std::size_t>(rays * ch));
    ws.features.resize(static_cast<std::size_t>(rays * out));
    // Scatter form: frames are one-hot per ray, so only nonzero inputs contribute.
    const double* in = frame.data();
    const double* dw = w.dw_weight.data();
    double* mid = ws.depthwise.data();
    for (int pos = 0; pos < rays; ++pos)
        for (int c = 0; c < ch; ++c)
            mid[pos * ch + c] = w.dw_bias[c];
    for (int src = 0; src < rays; ++src)
        for (int c = 0; c < ch; ++c)
        {
            const double v = in[src * ch + c];
            if (v == 0.0)
                continue;
            // output pos receives tap j from src = pos + j - pad
            const int j0 = std::max(0, src + pad - (rays - 1));
            const int j1 = std::min(k - 1, src + pad);
            for (int j = j0; j <= j1; ++j)
                mid[(src + pad - j) * ch + c] += dw[c * k + j] * v;
        }
    const double* pw = w.pw_weight.data();
    double* feat = ws.features.data();
    for (int pos = 0; pos < rays; ++pos)
    {
        const double* m = mid + pos * ch;
        for (int o = 0; o < out; ++o)
        {
            double acc = w.pw_bias[o];
            for (int c = 0; c < ch; ++c)
                acc += pw[o * ch + c] * m[c];
            feat[pos * out + o] = acc > 0.0 ? acc : 0.0;
        }
    }
}

inline std::vector<double> conv_features(const PolicyWeights& w, std::span<const double> frame)
{
    PolicyWorkspace ws;
    conv_features_into(w, frame, ws);
    return ws.features;
}

/// Action scalar in (-1, 1).
inline double forward(const PolicyWeights& w, std::span<const double> frame, PolicyWorkspace& ws)
{
    conv_features_into(w, frame, ws);
    const std::vector<double>* input = &ws.features;
    std::vector<double>* buffers[2] = {&ws.a, &ws.b};
    double out = 0.0;
    for (std::size_t l = 0; l < w.dense.size(); ++l)
    {
        const auto& layer = w.dense[l];
        const bool last = l + 1 == w.dense.size();
        auto& dst = *buffers[l % 2];
        dst.resize(static_cast<std::size_t>(layer.out));
        for (int o = 0; o < layer.out; ++o)
        {
            double acc = layer.bias[o];
            const double* row = layer.weight.data() + static_cast<std::ptrdiff_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i)
                acc += row[i] * (*input)[i];
            dst[o] = last ? acc : std::max(0.0, acc);
        }
        if (last)
            out = dst[0];
        input = &dst;
    }
    // tanh saturates to exactly +-1 in double precision; keep the action strictly inside (-1, 1).
    constexpr double limit = 1.0 - 0x1p-53;
    return std::clamp(std::tanh(out), -limit, limit);
}

inline double forward(const PolicyGenome& genome, std::span<const double> frame)
{
    PolicyWorkspace ws;
    return forward(unpack(genome), frame, ws);
}

} // namespace vrnav

#endif // VRNAV_POLICY_HPP

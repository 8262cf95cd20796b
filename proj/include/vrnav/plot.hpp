#ifndef VRNAV_PLOT_HPP
#define VRNAV_PLOT_HPP

#include "vrnav/field.hpp"
#include "vrnav/manifold.hpp"
#include "vrnav/metrics.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <zlib.h>

#include <cstdio>
#include <string>
#include <vector>

namespace vrnav
{

// Raster figures. Everything is drawn with fixed sizes and fonts and no timestamps, so
// identical inputs give byte-identical PNG files.

/// Purple-to-yellow colour for u in [0, 1] (BGR).
inline cv::Scalar time_color(double u)
{
    static const cv::Mat lut = [] {
        cv::Mat ramp(1, 256, CV_8UC1);
        for (int i = 0; i < 256; ++i)
            ramp.at<unsigned char>(0, i) = static_cast<unsigned char>(i);
        cv::Mat out;
        cv::applyColorMap(ramp, out, cv::COLORMAP_VIRIDIS);
        return out;
    }();
    const int i = std::clamp(static_cast<int>(std::lround(u * 255.0)), 0, 255);
    const auto c = lut.at<cv::Vec3b>(0, i);
    return {static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])};
}

/// A blank figure with a framed plotting area, ticks and labels.
class Figure
{
public:
    Figure(double x0, double x1, double y0, double y1, const std::string& title, const std::string& xlabel,
           const std::string& ylabel, int width = 640, int height = 640)
        : image_(height, width, CV_8UC3, cv::Scalar(255, 255, 255)), x0_(x0), x1_(x1), y0_(y0), y1_(y1),
          area_(70, 40, width - 100, height - 100)
    {
        cv::rectangle(image_, area_, cv::Scalar(0, 0, 0), 1);
        text(title, {area_.x, 25}, 0.55);
        text(xlabel, {area_.x + area_.width / 2 - 20, height - 15}, 0.45);
        text(ylabel, {5, area_.y + area_.height / 2}, 0.45);
        for (int k = 0; k <= 4; ++k)
        {
            const double xv = x0 + (x1 - x0) * k / 4.0;
            const double yv = y0 + (y1 - y0) * k / 4.0;
            const cv::Point px = to_px(xv, y0);
            const cv::Point py = to_px(x0, yv);
            cv::line(image_, px, px + cv::Point(0, 5), cv::Scalar(0, 0, 0), 1);
            cv::line(image_, py, py - cv::Point(5, 0), cv::Scalar(0, 0, 0), 1);
            text(tick_label(xv), px + cv::Point(-15, 20), 0.35);
            text(tick_label(yv), py + cv::Point(-55, 4), 0.35);
        }
    }

    cv::Point to_px(double x, double y) const
    {
        const double u = (x - x0_) / (x1_ - x0_);
        const double v = (y - y0_) / (y1_ - y0_);
        return {area_.x + static_cast<int>(std::lround(u * area_.width)),
                area_.y + area_.height - static_cast<int>(std::lround(v * area_.height))};
    }

    double px_per_unit_x() const { return area_.width / (x1_ - x0_); }

    void line(double xa, double ya, double xb, double yb, const cv::Scalar& c, int thickness = 1)
    {
        cv::line(image_, to_px(xa, ya), to_px(xb, yb), c, thickness, cv::LINE_AA);
    }

    void text(const std::string& s, cv::Point at, double scale = 0.4)
    {
        cv::putText(image_, s, at, cv::FONT_HERSHEY_SIMPLEX, scale, cv::Scalar(0, 0, 0), 1, cv::LINE_AA);
    }

    cv::Mat& image() { return image_; }
    const cv::Rect& area() const { return area_; }

private:
    static std::string tick_label(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    cv::Mat image_;
    double x0_, x1_, y0_, y1_;
    cv::Rect area_;
};

inline Figure arena_figure(const ArenaSpec& arena, const std::string& title)
{
    const auto b = arena.bounding_box();
    const double pad = 0.02 * std::max(b[2] - b[0], b[3] - b[1]);
    Figure f(b[0] - pad, b[2] + pad, b[1] - pad, b[3] + pad, title, "x", "y");
    for (int k = 0; k < 4; ++k)
    {
        const Vec2 a = arena.vertices[k];
        const Vec2 e = arena.vertices[(k + 1) % 4];
        f.line(a.x, a.y, e.x, e.y, cv::Scalar(0, 0, 0), 2);
    }
    const int r = static_cast<int>(std::lround(arena.patch_radius * f.px_per_unit_x()));
    cv::circle(f.image(), f.to_px(arena.patch_center.x, arena.patch_center.y), r, cv::Scalar(60, 60, 200), 2, cv::LINE_AA);
    return f;
}

/// Up to `max_tracks` evenly spaced records, each coloured from purple (t = 0) to yellow (t = end).
inline cv::Mat plot_trajectories(std::span<const TrajectoryRecord> records, const ArenaSpec& arena, int max_tracks = 24)
{
    Figure f = arena_figure(arena, "trajectories");
    if (records.empty() || max_tracks < 1)
        return f.image();
    const std::size_t n = std::min(records.size(), static_cast<std::size_t>(max_tracks));
    for (std::size_t k = 0; k < n; ++k)
    {
        const auto& r = records[k * records.size() / n];
        const std::size_t len = r.series.size();
        for (std::size_t t = 1; t < len; ++t)
        {
            const auto& a = r.series[t - 1];
            const auto& b = r.series[t];
            f.line(a.x, a.y, b.x, b.y, time_color(static_cast<double>(t) / static_cast<double>(len - 1)));
        }
    }
    return f.image();
}

inline cv::Mat plot_heading_profile(std::span<const HeadingProfilePoint> points, double max_distance)
{
    Figure f(0.0, max_distance, -pi, pi, "relative heading vs distance to patch", "distance", "heading");
    for (const auto& p : points)
    {
        const cv::Point q = f.to_px(p.distance, p.relative_heading);
        if (f.area().contains(q))
            f.image().at<cv::Vec3b>(q) = cv::Vec3b(160, 60, 60);
    }
    return f.image();
}

inline cv::Mat plot_polar(const PolarHistogram& h)
{
    Figure f(-1.1, 1.1, -1.1, 1.1, "relative orientation", "", "");
    const int sectors = static_cast<int>(h.counts.size());
    for (int s = 0; s < sectors; ++s)
    {
        const double r = h.radius[static_cast<std::size_t>(s)];
        if (r <= 0.0)
            continue;
        const double a0 = -pi + two_pi * s / sectors;
        const double a1 = a0 + two_pi / sectors;
        std::vector<cv::Point> poly{f.to_px(0.0, 0.0)};
        for (int k = 0; k <= 8; ++k)
        {
            const double a = a0 + (a1 - a0) * k / 8.0;
            poly.push_back(f.to_px(r * std::cos(a), r * std::sin(a)));
        }
        cv::fillPoly(f.image(), std::vector<std::vector<cv::Point>>{poly}, cv::Scalar(180, 120, 60), cv::LINE_AA);
    }
    cv::circle(f.image(), f.to_px(0.0, 0.0), static_cast<int>(std::lround(f.px_per_unit_x())), cv::Scalar(0, 0, 0), 1,
               cv::LINE_AA);
    return f.image();
}

inline cv::Mat plot_decorrelation(std::span<const double> curve, const Decorrelation& d)
{
    const double tmax = std::max<double>(1.0, static_cast<double>(curve.size()));
    Figure f(0.0, tmax, -1.0, 1.0, "temporal correlation", "t", "C(t)");
    f.line(0.0, 0.5, tmax, 0.5, cv::Scalar(150, 150, 150));
    for (std::size_t t = 1; t < curve.size(); ++t)
        f.line(static_cast<double>(t - 1), curve[t - 1], static_cast<double>(t), curve[t], cv::Scalar(200, 80, 40), 2);
    if (!curve.empty() && !d.censored)
        f.line(d.time, -1.0, d.time, 1.0, cv::Scalar(40, 40, 200));
    return f.image();
}

/// Heat map of per-bin directedness; bins without unmasked samples stay blank.
inline cv::Mat plot_directedness(const DirectednessMap& map, const ArenaSpec& arena)
{
    Figure f = arena_figure(arena, "directedness");
    for (int iy = 0; iy < map.ny; ++iy)
        for (int ix = 0; ix < map.nx; ++ix)
        {
            const double v = map.value[static_cast<std::size_t>(iy * map.nx + ix)];
            if (std::isnan(v))
                continue;
            const double x = map.origin_x + ix * map.bin_size;
            const double y = map.origin_y + iy * map.bin_size;
            cv::rectangle(f.image(), f.to_px(x, y + map.bin_size), f.to_px(x + map.bin_size, y) - cv::Point(1, 1),
                          time_color(v), cv::FILLED);
        }
    return f.image();
}

inline cv::Mat plot_vector_field(const ActionField& field, const ArenaSpec& arena)
{
    Figure f = arena_figure(arena, "mean action field");
    double longest = 0.0;
    for (const auto& p : field.points)
        longest = std::max(longest, p.magnitude);
    double spacing = 50.0;
    if (field.points.size() > 1)
        spacing = distance(field.points[0].position, field.points[1].position);
    for (const auto& p : field.points)
    {
        const Vec2 tip = p.position + p.mean * (longest > 0.0 ? 0.9 * spacing / longest : 0.0);
        cv::arrowedLine(f.image(), f.to_px(p.position.x, p.position.y), f.to_px(tip.x, tip.y), cv::Scalar(120, 80, 20), 1,
                        cv::LINE_AA, 0, 0.3);
    }
    for (const auto& m : field.minima)
        cv::circle(f.image(), f.to_px(m.x, m.y), 4, cv::Scalar(0, 0, 0), cv::FILLED);
    return f.image();
}

inline cv::Mat plot_manifold(std::span<const ManifoldPoint> points, const ArenaSpec& arena, int rays)
{
    Figure f = arena_figure(arena, "dual-corner manifold");
    const int pairs = std::max(1, rays * (rays - 1) / 2);
    for (const auto& p : points)
    {
        const int pair = p.ray_i * rays - p.ray_i * (p.ray_i + 1) / 2 + (p.ray_j - p.ray_i - 1);
        cv::circle(f.image(), f.to_px(p.position.x, p.position.y), 1,
                   time_color(static_cast<double>(pair) / std::max(1, pairs - 1)), cv::FILLED);
    }
    return f.image();
}

/// PNG bytes with a tEXt chunk carrying the config hash.
inline std::vector<unsigned char> encode_png(const cv::Mat& image, const std::string& config_hash)
{
    std::vector<unsigned char> png;
    if (!cv::imencode(".png", image, png))
        throw Error("png encoding failed");
    const std::string body = std::string("config_hash") + '\0' + config_hash;
    std::vector<unsigned char> chunk;
    auto put_be32 = [&](std::uint32_t v) {
        for (int i = 3; i >= 0; --i)
            chunk.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    };
    put_be32(static_cast<std::uint32_t>(body.size()));
    const std::size_t type_at = chunk.size();
    chunk.insert(chunk.end(), {'t', 'E', 'X', 't'});
    chunk.insert(chunk.end(), body.begin(), body.end());
    const auto crc = crc32(0L, chunk.data() + type_at, static_cast<uInt>(chunk.size() - type_at));
    put_be32(static_cast<std::uint32_t>(crc));
    // signature (8) + IHDR chunk (4 + 4 + 13 + 4)
    constexpr std::size_t after_ihdr = 8 + 25;
    png.insert(png.begin() + after_ihdr, chunk.begin(), chunk.end());
    return png;
}

/// Reads back the config hash embedded by encode_png, or an empty string.
inline std::string png_config_hash(const std::vector<unsigned char>& png)
{
    std::size_t pos = 8;
    while (pos + 12 <= png.size())
    {
        const std::uint32_t len = (std::uint32_t(png[pos]) << 24) | (std::uint32_t(png[pos + 1]) << 16) |
                                  (std::uint32_t(png[pos + 2]) << 8) | std::uint32_t(png[pos + 3]);
        const std::string type(png.begin() + static_cast<std::ptrdiff_t>(pos + 4), png.begin() + static_cast<std::ptrdiff_t>(pos + 8));
        if (type == "tEXt" && pos + 8 + len <= png.size())
        {
            const std::string body(png.begin() + static_cast<std::ptrdiff_t>(pos + 8),
                                   png.begin() + static_cast<std::ptrdiff_t>(pos + 8 + len));
            const auto nul = body.find('\0');
            if (nul != std::string::npos && body.substr(0, nul) == "config_hash")
                return body.substr(nul + 1);
        }
        pos += 12 + len;
    }
    return {};
}

} // namespace vrnav

#endif // VRNAV_PLOT_HPP

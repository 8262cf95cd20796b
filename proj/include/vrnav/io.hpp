#ifndef VRNAV_IO_HPP
#define VRNAV_IO_HPP

#include "vrnav/config.hpp"
#include "vrnav/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace vrnav
{

namespace fs = std::filesystem;
using nlohmann::json;

// Binary artifacts: 8-byte magic, u32 LE header length, JSON header, then little-endian f64 payload.

namespace detail
{

inline void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64(const char* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

} // namespace detail

inline void append_f64(std::string& out, double v) { detail::put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MissingArtifactError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes through a temporary file and a rename, so readers never see a half-written artifact.
inline void write_file(const fs::path& path, const std::string& data)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out)
            throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string encode_container(std::string_view magic, const json& header, std::span<const double> payload)
{
    const std::string h = header.dump();
    std::string out(magic);
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((h.size() >> (8 * i)) & 0xff));
    out += h;
    out.reserve(out.size() + payload.size() * 8);
    for (double v : payload)
        append_f64(out, v);
    return out;
}

struct Container
{
    json header;
    std::vector<double> payload;
};

inline Container decode_container(std::string_view magic, const std::string& bytes, const std::string& what)
{
    if (bytes.size() < magic.size() + 4 || bytes.compare(0, magic.size(), magic) != 0)
        throw Error(what + ": not a " + std::string(magic.substr(0, 7)) + " file");
    std::size_t pos = magic.size();
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i)
        len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 4;
    if (bytes.size() < pos + len || (bytes.size() - pos - len) % 8 != 0)
        throw Error(what + ": truncated file");
    Container c;
    c.header = json::parse(bytes.substr(pos, len));
    pos += len;
    c.payload.resize((bytes.size() - pos) / 8);
    for (std::size_t i = 0; i < c.payload.size(); ++i)
        c.payload[i] = std::bit_cast<double>(detail::get_u64(bytes.data() + pos + 8 * i));
    return c;
}

inline constexpr std::string_view genome_magic = "VRNAVGN1";
inline constexpr std::string_view es_state_magic = "VRNAVES1";
inline constexpr std::string_view trajectory_magic = "VRNAVTR1";

inline json arch_to_json(const ArchSpec& a)
{
    return {{"rays", a.rays}, {"in_channels", a.in_channels}, {"kernel", a.kernel}, {"conv_out", a.conv_out},
            {"mlp_layers", a.mlp_layers}};
}

inline ArchSpec arch_from_json(const json& j)
{
    ArchSpec a;
    a.rays = j.at("rays").get<int>();
    a.in_channels = j.at("in_channels").get<int>();
    a.kernel = j.at("kernel").get<int>();
    a.conv_out = j.at("conv_out").get<int>();
    a.mlp_layers = j.at("mlp_layers").get<std::vector<int>>();
    return a;
}

struct Checkpoint
{
    PolicyGenome genome;
    double fov = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    int generation = 0;
    std::string config_hash;
};

inline std::string encode_checkpoint(const Checkpoint& c)
{
    const json header{{"arch", arch_to_json(c.genome.arch)}, {"rays", c.genome.arch.rays}, {"sigma", c.sigma},
                      {"fov", c.fov},   {"seed", c.seed},       {"generation", c.generation},
                      {"config_hash", c.config_hash}, {"param_count", c.genome.params.size()}};
    return encode_container(genome_magic, header, c.genome.params);
}

inline Checkpoint decode_checkpoint(const std::string& bytes, const std::string& what = "checkpoint")
{
    auto c = decode_container(genome_magic, bytes, what);
    Checkpoint out;
    out.genome.arch = arch_from_json(c.header.at("arch"));
    out.sigma = c.header.at("sigma").get<double>();
    out.fov = c.header.at("fov").get<double>();
    out.seed = c.header.at("seed").get<std::uint64_t>();
    out.generation = c.header.at("generation").get<int>();
    out.config_hash = c.header.at("config_hash").get<std::string>();
    if (c.payload.size() != param_count(out.genome.arch) || c.header.at("param_count").get<std::size_t>() != c.payload.size())
        throw ShapeError(what + ": parameter count does not match the architecture");
    out.genome.params = std::move(c.payload);
    return out;
}

inline std::string encode_es_state(const EsState& s, const std::string& hash)
{
    std::vector<double> payload;
    payload.insert(payload.end(), s.center.begin(), s.center.end());
    payload.insert(payload.end(), s.stds.begin(), s.stds.end());
    payload.insert(payload.end(), s.velocity.begin(), s.velocity.end());
    return encode_container(es_state_magic,
                            {{"generation", s.generation}, {"size", s.center.size()}, {"config_hash", hash}}, payload);
}

inline EsState decode_es_state(const std::string& bytes, const std::string& expected_hash)
{
    auto c = decode_container(es_state_magic, bytes, "es_state");
    if (c.header.at("config_hash").get<std::string>() != expected_hash)
        throw ValidationError("config_hash", "optimizer state belongs to a different config");
    const auto n = c.header.at("size").get<std::size_t>();
    if (c.payload.size() != 3 * n)
        throw ShapeError("es_state: payload size mismatch");
    EsState s;
    s.generation = c.header.at("generation").get<int>();
    s.center.assign(c.payload.begin(), c.payload.begin() + static_cast<std::ptrdiff_t>(n));
    s.stds.assign(c.payload.begin() + static_cast<std::ptrdiff_t>(n), c.payload.begin() + static_cast<std::ptrdiff_t>(2 * n));
    s.velocity.assign(c.payload.begin() + static_cast<std::ptrdiff_t>(2 * n), c.payload.end());
    return s;
}

inline constexpr int trajectory_fields = 5; // t, x, y, heading, action

inline json lattice_to_json(const LatticeSpec& l)
{
    return {{"spacing", l.spacing}, {"orientations", l.orientations}, {"horizon", l.horizon}, {"mask_prefix", l.mask_prefix}};
}

inline std::string encode_trajectories(const TrajectorySet& set)
{
    json skipped = json::array();
    for (const auto& s : set.skipped)
        skipped.push_back({s.position.x, s.position.y, s.heading});
    const json header{{"checkpoint_id", set.checkpoint_id}, {"config_hash", set.config_hash},
                      {"lattice", lattice_to_json(set.lattice)}, {"records", set.records.size()},
                      {"fields", {"t", "x", "y", "heading", "action"}}, {"skipped", skipped}};
    std::vector<double> payload;
    payload.reserve(set.records.size() * static_cast<std::size_t>(set.lattice.horizon * trajectory_fields));
    for (const auto& r : set.records)
    {
        if (r.series.size() != static_cast<std::size_t>(set.lattice.horizon))
            throw ShapeError("trajectory length differs from the lattice horizon");
        for (const auto& s : r.series)
            payload.insert(payload.end(), {static_cast<double>(s.t), s.x, s.y, s.heading, s.action});
    }
    return encode_container(trajectory_magic, header, payload);
}

inline TrajectorySet decode_trajectories(const std::string& bytes, const std::string& what = "trajectory store")
{
    auto c = decode_container(trajectory_magic, bytes, what);
    TrajectorySet set;
    set.checkpoint_id = c.header.at("checkpoint_id").get<std::string>();
    set.config_hash = c.header.at("config_hash").get<std::string>();
    const auto& l = c.header.at("lattice");
    set.lattice.spacing = l.at("spacing").get<double>();
    set.lattice.orientations = l.at("orientations").get<int>();
    set.lattice.horizon = l.at("horizon").get<int>();
    set.lattice.mask_prefix = l.at("mask_prefix").get<int>();
    for (const auto& s : c.header.at("skipped"))
        set.skipped.push_back({{s.at(0).get<double>(), s.at(1).get<double>()}, s.at(2).get<double>(), 0});
    const auto n = c.header.at("records").get<std::size_t>();
    const std::size_t stride = static_cast<std::size_t>(set.lattice.horizon * trajectory_fields);
    if (c.payload.size() != n * stride)
        throw ShapeError(what + ": payload does not match record count and horizon");
    set.records.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        auto& r = set.records[i];
        r.series.resize(static_cast<std::size_t>(set.lattice.horizon));
        for (std::size_t t = 0; t < r.series.size(); ++t)
        {
            const double* p = c.payload.data() + i * stride + t * trajectory_fields;
            r.series[t] = {static_cast<int>(p[0]), p[1], p[2], p[3], p[4]};
        }
        const auto& s0 = r.series.front();
        r.init = {{s0.x, s0.y}, s0.heading, 0};
    }
    return set;
}

/// Tabular output with a leading `# config_hash: ...` comment line.
class CsvWriter
{
public:
    CsvWriter(const std::string& hash, std::initializer_list<std::string_view> columns)
    {
        text_ = "# config_hash: " + hash + "\n";
        bool first = true;
        for (auto c : columns)
        {
            text_ += (first ? "" : ",") + std::string(c);
            first = false;
        }
        text_ += '\n';
    }

    template <class... Cells>
    void row(const Cells&... cells)
    {
        bool first = true;
        ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
        text_ += '\n';
    }

    const std::string& str() const { return text_; }
    void save(const fs::path& path) const { write_file(path, text_); }

private:
    static std::string cell(double v) { return std::isnan(v) ? "nan" : format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(long long v) { return std::to_string(v); }
    static std::string cell(unsigned long v) { return std::to_string(v); }
    static std::string cell(unsigned long long v) { return std::to_string(v); }
    static std::string cell(std::string_view v) { return std::string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    std::string text_;
};

/// Reads a CSV written by CsvWriter: returns the config hash and the data rows (header row dropped).
struct CsvTable
{
    std::string config_hash;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const fs::path& path)
{
    std::istringstream in(read_file(path));
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ','))
            out.push_back(cell);
        return out;
    };
    while (std::getline(in, line))
    {
        if (line.rfind("# config_hash: ", 0) == 0)
        {
            t.config_hash = line.substr(15);
            continue;
        }
        if (line.empty())
            continue;
        if (t.columns.empty())
            t.columns = split(line);
        else
            t.rows.push_back(split(line));
    }
    return t;
}

inline CsvWriter trajectories_csv(const TrajectorySet& set)
{
    CsvWriter w(set.config_hash, {"record", "t", "x", "y", "heading", "action"});
    for (std::size_t i = 0; i < set.records.size(); ++i)
        for (const auto& s : set.records[i].series)
            w.row(i, s.t, s.x, s.y, s.heading, s.action);
    return w;
}

} // namespace vrnav

#endif // VRNAV_IO_HPP

#ifndef VRNAV_CONFIG_HPP
#define VRNAV_CONFIG_HPP

#include "vrnav/error.hpp"
#include "vrnav/metrics.hpp"
#include "vrnav/train.hpp"
#include "vrnav/trajectory.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace vrnav
{

struct ValidationSettings
{
    int top_k = 20;
    int inits = 100;
};

/// Test-time analysis parameters.
struct AnalysisSettings
{
    LatticeSpec lattice;
    DirectednessSettings directedness;
    double polar_min_distance = 100.0;
    double field_grid_step = 50.0;
    int field_orientations = 64;
    double manifold_grid_step = 10.0;
};

/// Everything a run depends on. Serialized as a sectioned INI file in which every key is required.
struct RunConfig
{
    TrainSettings train;
    ValidationSettings validation;
    AnalysisSettings analysis;
    std::string output_name = "default";
};

// Shortest text that parses back to the same double.
inline std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_number(long long v) { return std::to_string(v); }

namespace detail
{

class IniReader
{
public:
    explicit IniReader(const boost::property_tree::ptree& tree) : tree_(tree) {}

    std::string text(const std::string& key)
    {
        seen_.insert(key);
        const auto node = tree_.get_child_optional(boost::property_tree::ptree::path_type(key, '.'));
        if (!node)
            throw ValidationError(key, "missing required field");
        return node->data();
    }

    double real(const std::string& key)
    {
        const std::string s = trim(text(key));
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw ValidationError(key, "expected a number, got '" + s + "'");
        return v;
    }

    long long integer(const std::string& key)
    {
        const std::string s = trim(text(key));
        long long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw ValidationError(key, "expected an integer, got '" + s + "'");
        return v;
    }

    int small_int(const std::string& key)
    {
        const long long v = integer(key);
        if (v < -(1LL << 30) || v > (1LL << 30))
            throw ValidationError(key, "integer out of range");
        return static_cast<int>(v);
    }

    std::vector<double> reals(const std::string& key)
    {
        std::istringstream in(text(key));
        std::vector<double> out;
        std::string tok;
        while (in >> tok)
        {
            double v = 0.0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
                throw ValidationError(key, "expected a list of numbers, got '" + tok + "'");
            out.push_back(v);
        }
        return out;
    }

    /// Rejects keys the schema does not know, so typos cannot silently fall back to defaults.
    void reject_unknown() const
    {
        for (const auto& [section, body] : tree_)
        {
            if (body.empty() && !body.data().empty())
                throw ValidationError(section, "key outside of any section");
            for (const auto& [key, value] : body)
                if (!seen_.count(section + "." + key))
                    throw ValidationError(section + "." + key, "unknown field");
        }
    }

    static std::string trim(const std::string& s)
    {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos)
            return {};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

private:
    const boost::property_tree::ptree& tree_;
    std::set<std::string> seen_;
};

} // namespace detail

inline void validate_config(const RunConfig& c)
{
    validate_sim(c.train.sim);
    validate_arch(c.train.arch);
    validate_es(c.train.es);
    if (c.train.arch.rays != c.train.sim.rays)
        throw ValidationError("vision.rays", "architecture and vision disagree on the number of rays");
    if (!(c.train.center_init_bound >= 0.0))
        throw ValidationError("evolution.center_init_bound", "must be non-negative");
    if (c.validation.top_k < 1 || c.validation.top_k > c.train.es.generations)
        throw ValidationError("validation.top_k", "must lie in [1, generations]");
    if (c.validation.inits < 1)
        throw ValidationError("validation.inits", "must be positive");
    const auto& a = c.analysis;
    if (!(a.lattice.spacing > 0.0))
        throw ValidationError("analysis.lattice_spacing", "must be positive");
    if (a.lattice.orientations < 1)
        throw ValidationError("analysis.orientations", "must be positive");
    if (a.lattice.mask_prefix < 0 || a.lattice.mask_prefix >= a.lattice.horizon)
        throw ValidationError("analysis.mask_prefix", "must lie in [0, test_horizon)");
    if (!(a.directedness.bin_size > 0.0))
        throw ValidationError("analysis.bin_size", "must be positive");
    if (!(a.directedness.boundary_mask >= 0.0))
        throw ValidationError("analysis.boundary_mask", "must be non-negative");
    if (!(a.directedness.patch_mask >= 0.0))
        throw ValidationError("analysis.patch_mask", "must be non-negative");
    if (!(a.polar_min_distance >= 0.0))
        throw ValidationError("analysis.polar_min_distance", "must be non-negative");
    if (!(a.field_grid_step > 0.0))
        throw ValidationError("analysis.field_grid_step", "must be positive");
    if (a.field_orientations < 1)
        throw ValidationError("analysis.field_orientations", "must be positive");
    if (!(a.manifold_grid_step > 0.0))
        throw ValidationError("analysis.manifold_grid_step", "must be positive");
    if (c.output_name.empty() || c.output_name.find_first_of("/\\") != std::string::npos)
        throw ValidationError("output.name", "must be a non-empty plain directory name");
}

inline RunConfig parse_config(std::istream& in)
{
    boost::property_tree::ptree tree;
    try
    {
        boost::property_tree::read_ini(in, tree);
    }
    catch (const boost::property_tree::ini_parser_error& e)
    {
        throw ValidationError("", std::string("malformed config: ") + e.what());
    }
    detail::IniReader r(tree);
    RunConfig c;
    auto& sim = c.train.sim;
    auto& es = c.train.es;

    c.train.seed = static_cast<std::uint64_t>(r.integer("run.seed"));

    const auto v = r.reals("environment.vertices");
    if (v.size() != 8)
        throw ValidationError("environment.vertices", "expected 8 numbers (x y for NW NE SE SW)");
    for (int k = 0; k < 4; ++k)
        sim.arena.vertices[k] = {v[2 * k], v[2 * k + 1]};
    sim.arena.patch_center = {r.real("environment.patch_x"), r.real("environment.patch_y")};
    sim.arena.patch_radius = r.real("environment.patch_radius");
    sim.v_max = r.real("environment.max_speed");

    sim.fov = r.real("vision.fov");
    sim.rays = r.small_int("vision.rays");
    sim.calibration.sigma = r.real("vision.sigma");
    sim.calibration.d_min = r.real("vision.d_min");
    sim.calibration.d_max = r.real("vision.d_max");
    sim.noise_std = r.real("vision.noise_std");

    c.train.arch.rays = sim.rays;
    c.train.arch.kernel = r.small_int("architecture.kernel");
    c.train.arch.conv_out = r.small_int("architecture.conv_channels");
    c.train.arch.mlp_layers.clear();
    for (double w : r.reals("architecture.hidden"))
    {
        if (w != std::floor(w) || w < 1 || w > 1e6)
            throw ValidationError("architecture.hidden", "expected positive integer layer widths");
        c.train.arch.mlp_layers.push_back(static_cast<int>(w));
    }

    es.generations = r.small_int("evolution.generations");
    es.population = r.small_int("evolution.population");
    es.episodes_per_candidate = r.small_int("evolution.episodes");
    es.episode_horizon = r.small_int("evolution.episode_horizon");
    es.std_init = r.real("evolution.std_init");
    es.std_lr = r.real("evolution.std_lr");
    es.std_max_change = r.real("evolution.std_max_change");
    es.mean_lr = r.real("evolution.mean_lr");
    es.clipup_momentum = r.real("evolution.clipup_momentum");
    es.clipup_max_speed = r.real("evolution.clipup_max_speed");
    c.train.center_init_bound = r.real("evolution.center_init_bound");
    const std::string std_update = detail::IniReader::trim(r.text("evolution.std_update"));
    if (std_update == "plain")
        es.std_update = StdUpdate::Plain;
    else if (std_update == "normalized")
        es.std_update = StdUpdate::Normalized;
    else
        throw ValidationError("evolution.std_update", "expected 'plain' or 'normalized'");
    sim.horizon = es.episode_horizon;

    c.validation.top_k = r.small_int("validation.top_k");
    c.validation.inits = r.small_int("validation.inits");

    auto& a = c.analysis;
    a.lattice.spacing = r.real("analysis.lattice_spacing");
    a.lattice.orientations = r.small_int("analysis.orientations");
    a.lattice.horizon = r.small_int("analysis.test_horizon");
    a.lattice.mask_prefix = r.small_int("analysis.mask_prefix");
    a.directedness.mask_prefix = a.lattice.mask_prefix;
    a.directedness.orientations = a.lattice.orientations;
    a.directedness.bin_size = r.real("analysis.bin_size");
    a.directedness.boundary_mask = r.real("analysis.boundary_mask");
    a.directedness.patch_mask = r.real("analysis.patch_mask");
    a.polar_min_distance = r.real("analysis.polar_min_distance");
    a.field_grid_step = r.real("analysis.field_grid_step");
    a.field_orientations = r.small_int("analysis.field_orientations");
    a.manifold_grid_step = r.real("analysis.manifold_grid_step");

    c.output_name = detail::IniReader::trim(r.text("output.name"));

    r.reject_unknown();
    validate_config(c);
    return c;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw MissingArtifactError("cannot read config file " + path);
    return parse_config(in);
}

/// Canonical text of a config: fixed key order, shortest round-trip numbers. This is the run snapshot.
inline std::string serialize_config(const RunConfig& c)
{
    const auto& sim = c.train.sim;
    const auto& es = c.train.es;
    const auto& a = c.analysis;
    std::ostringstream o;
    auto kv = [&](const char* key, const std::string& value) { o << key << " = " << value << '\n'; };
    auto num = [](auto x) { return format_number(x); };

    o << "[run]\n";
    kv("seed", std::to_string(c.train.seed));

    o << "\n[environment]\n";
    std::string verts;
    for (int k = 0; k < 4; ++k)
        verts += (k ? " " : "") + num(sim.arena.vertices[k].x) + " " + num(sim.arena.vertices[k].y);
    kv("vertices", verts);
    kv("patch_x", num(sim.arena.patch_center.x));
    kv("patch_y", num(sim.arena.patch_center.y));
    kv("patch_radius", num(sim.arena.patch_radius));
    kv("max_speed", num(sim.v_max));

    o << "\n[vision]\n";
    kv("fov", num(sim.fov));
    kv("rays", num(static_cast<long long>(sim.rays)));
    kv("sigma", num(sim.calibration.sigma));
    kv("d_min", num(sim.calibration.d_min));
    kv("d_max", num(sim.calibration.d_max));
    kv("noise_std", num(sim.noise_std));

    o << "\n[architecture]\n";
    kv("kernel", num(static_cast<long long>(c.train.arch.kernel)));
    kv("conv_channels", num(static_cast<long long>(c.train.arch.conv_out)));
    std::string hidden;
    for (std::size_t i = 0; i < c.train.arch.mlp_layers.size(); ++i)
        hidden += (i ? " " : "") + std::to_string(c.train.arch.mlp_layers[i]);
    kv("hidden", hidden);

    o << "\n[evolution]\n";
    kv("generations", num(static_cast<long long>(es.generations)));
    kv("population", num(static_cast<long long>(es.population)));
    kv("episodes", num(static_cast<long long>(es.episodes_per_candidate)));
    kv("episode_horizon", num(static_cast<long long>(es.episode_horizon)));
    kv("std_init", num(es.std_init));
    kv("std_lr", num(es.std_lr));
    kv("std_max_change", num(es.std_max_change));
    kv("mean_lr", num(es.mean_lr));
    kv("clipup_momentum", num(es.clipup_momentum));
    kv("clipup_max_speed", num(es.clipup_max_speed));
    kv("center_init_bound", num(c.train.center_init_bound));
    kv("std_update", es.std_update == StdUpdate::Plain ? "plain" : "normalized");

    o << "\n[validation]\n";
    kv("top_k", num(static_cast<long long>(c.validation.top_k)));
    kv("inits", num(static_cast<long long>(c.validation.inits)));

    o << "\n[analysis]\n";
    kv("lattice_spacing", num(a.lattice.spacing));
    kv("orientations", num(static_cast<long long>(a.lattice.orientations)));
    kv("test_horizon", num(static_cast<long long>(a.lattice.horizon)));
    kv("mask_prefix", num(static_cast<long long>(a.lattice.mask_prefix)));
    kv("bin_size", num(a.directedness.bin_size));
    kv("boundary_mask", num(a.directedness.boundary_mask));
    kv("patch_mask", num(a.directedness.patch_mask));
    kv("polar_min_distance", num(a.polar_min_distance));
    kv("field_grid_step", num(a.field_grid_step));
    kv("field_orientations", num(static_cast<long long>(a.field_orientations)));
    kv("manifold_grid_step", num(a.manifold_grid_step));

    o << "\n[output]\n";
    kv("name", c.output_name);
    return o.str();
}

inline std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i)
    {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

inline std::string config_hash(const RunConfig& c) { return sha256_hex(serialize_config(c)); }

} // namespace vrnav

#endif // VRNAV_CONFIG_HPP

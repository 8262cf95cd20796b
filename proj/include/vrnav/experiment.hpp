#ifndef VRNAV_EXPERIMENT_HPP
#define VRNAV_EXPERIMENT_HPP

#include "vrnav/config.hpp"
#include "vrnav/field.hpp"
#include "vrnav/io.hpp"
#include "vrnav/manifold.hpp"
#include "vrnav/metrics.hpp"
#include "vrnav/plot.hpp"
#include "vrnav/train.hpp"
#include "vrnav/trajectory.hpp"

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace vrnav
{

// Run directory layout:
//   config.ini                   canonical config snapshot; its SHA-256 is the run's config hash
//   fitness.csv                  generation, median, best, mean (population mean-episode costs)
//   es_state.bin                 optimizer state after the last finished generation (resume point)
//   checkpoints/gen_NNNNNN.ckpt  center that generated population NNNNNN
//   validation.csv, validation_summary.csv
//   test/trajectories.bin        lattice test set of the best validated checkpoint
//   analysis/*.csv               metrics, mean action field
//   perturb/<variant>/trajectories.bin, perturb/summary.csv
//   manifold.csv
//   figures/*.png

inline constexpr const char* output_root_env = "VRNAV_OUTPUT_ROOT";

inline fs::path output_root()
{
    const char* env = std::getenv(output_root_env);
    return env && *env ? fs::path(env) : fs::path("runs");
}

/// Default run directory for a config: <output root>/<output.name>-s<seed>.
inline fs::path default_run_dir(const RunConfig& c)
{
    return output_root() / (c.output_name + "-s" + std::to_string(c.train.seed));
}

inline std::string checkpoint_name(int generation)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "gen_%06d", generation);
    return buf;
}

inline fs::path checkpoint_path(const fs::path& run, int generation)
{
    return run / "checkpoints" / (checkpoint_name(generation) + ".ckpt");
}

/// A run directory bound to its config snapshot.
struct Run
{
    fs::path dir;
    RunConfig config;
    std::string hash;
};

inline Run open_run(const fs::path& dir)
{
    const fs::path snap = dir / "config.ini";
    if (!fs::exists(snap))
        throw MissingArtifactError("no run at " + dir.string() + " (config.ini missing; run `vrnav train` first)");
    std::istringstream in(read_file(snap));
    Run r{dir, parse_config(in), {}};
    r.hash = config_hash(r.config);
    return r;
}

inline void require_hash(const Run& run, const std::string& found, const std::string& artifact)
{
    if (found != run.hash)
        throw ValidationError("config_hash", artifact + " was produced under a different config (" + found.substr(0, 12) +
                                                 " vs " + run.hash.substr(0, 12) + "); refusing to mix artifacts");
}

inline void require_artifact(const fs::path& path, const std::string& producer)
{
    if (!fs::exists(path))
        throw MissingArtifactError(path.string() + " not found; produce it with `vrnav " + producer + "`");
}

inline CsvTable read_run_csv(const Run& run, const fs::path& path, const std::string& producer)
{
    require_artifact(path, producer);
    auto t = read_csv(path);
    require_hash(run, t.config_hash, path.filename().string());
    return t;
}

inline Checkpoint load_checkpoint(const Run& run, int generation)
{
    const fs::path p = checkpoint_path(run.dir, generation);
    require_artifact(p, "train");
    auto c = decode_checkpoint(read_file(p), p.string());
    require_hash(run, c.config_hash, p.filename().string());
    return c;
}

inline std::vector<GenerationStats> load_history(const Run& run)
{
    const auto t = read_run_csv(run, run.dir / "fitness.csv", "train");
    std::vector<GenerationStats> h;
    for (const auto& row : t.rows)
        h.push_back({std::stoi(row.at(0)), std::stod(row.at(1)), std::stod(row.at(2)), std::stod(row.at(3))});
    return h;
}

inline void save_history(const Run& run, const std::vector<GenerationStats>& history)
{
    CsvWriter w(run.hash, {"generation", "median", "best", "mean"});
    for (const auto& s : history)
        w.row(s.generation, s.median, s.best, s.mean);
    w.save(run.dir / "fitness.csv");
}

using Log = std::function<void(const std::string&)>;

inline void log_to_stderr(const std::string& s) { std::cerr << s << '\n'; }

/// Trains into `dir`, resuming from es_state.bin when a matching run already exists there.
inline Run cmd_train(const RunConfig& config, const fs::path& dir, const Log& log = log_to_stderr)
{
    validate_config(config);
    Run run{dir, config, config_hash(config)};
    const std::string snapshot = serialize_config(config);
    std::optional<EsState> resume;
    std::vector<GenerationStats> history;
    if (fs::exists(dir / "config.ini"))
    {
        const Run existing = open_run(dir);
        require_hash(run, existing.hash, "existing run directory " + dir.string());
        if (fs::exists(dir / "es_state.bin"))
        {
            resume = decode_es_state(read_file(dir / "es_state.bin"), run.hash);
            for (const auto& s : load_history(run))
                if (s.generation < resume->generation)
                    history.push_back(s);
            if (history.size() != static_cast<std::size_t>(resume->generation))
                throw ValidationError("fitness.csv", "history does not match the saved optimizer state");
            log("resuming at generation " + std::to_string(resume->generation));
        }
    }
    else
        write_file(dir / "config.ini", snapshot);

    const auto& s = config.train;
    train(
        s,
        [&](const GenerationStats& stats, const std::vector<double>& center, const EsState& state) {
            Checkpoint ck{{s.arch, center}, s.sim.fov, s.sim.calibration.sigma, s.seed, stats.generation, run.hash};
            write_file(checkpoint_path(dir, stats.generation), encode_checkpoint(ck));
            history.push_back(stats);
            save_history(run, history);
            write_file(dir / "es_state.bin", encode_es_state(state, run.hash));
            if (stats.generation % 10 == 0 || stats.generation + 1 == s.es.generations)
                log("generation " + std::to_string(stats.generation) + " median " + format_number(stats.median) +
                    " best " + format_number(stats.best));
        },
        std::move(resume));
    return run;
}

struct ValidationSummary
{
    double median = 0.0;
    double mean_lower_bound = 0.0;
    double success_rate = 0.0;
    int best_generation = 0;
    double best_success_rate = 0.0; ///< success of the best generation alone
};

inline ValidationSummary cmd_validate(const Run& run, const Log& log = log_to_stderr)
{
    const auto& cfg = run.config;
    const auto history = load_history(run);
    if (history.size() < static_cast<std::size_t>(cfg.validation.top_k))
        throw MissingArtifactError("run has " + std::to_string(history.size()) + " generations, validation needs " +
                                   std::to_string(cfg.validation.top_k) + "; finish `vrnav train` first");
    std::vector<std::vector<double>> centers(history.size());
    for (int g : top_generations(history, cfg.validation.top_k))
        centers[static_cast<std::size_t>(g)] = load_checkpoint(run, g).genome.params;
    const auto result = validate(cfg.train, history, centers, cfg.validation.top_k, cfg.validation.inits);

    CsvWriter rows(run.hash, {"generation", "init", "x", "y", "heading", "lower_bound", "cost"});
    for (std::size_t k = 0; k < result.generations.size(); ++k)
        for (std::size_t i = 0; i < result.inits.size(); ++i)
        {
            const auto& s = result.inits[i];
            rows.row(result.generations[k], i, s.position.x, s.position.y, s.heading, result.lower_bounds[i],
                     result.costs[k][i]);
        }
    rows.save(run.dir / "validation.csv");
    const int horizon = cfg.train.sim.horizon;
    ValidationSummary v{result.median(), result.mean_lower_bound(), result.success_rate(horizon),
                        result.best_generation(), result.best_success_rate(horizon)};
    CsvWriter summary(run.hash,
                      {"median", "mean_lower_bound", "ratio", "success_rate", "best_generation", "best_success_rate"});
    summary.row(v.median, v.mean_lower_bound, v.median / v.mean_lower_bound, v.success_rate, v.best_generation,
                v.best_success_rate);
    summary.save(run.dir / "validation_summary.csv");
    log("validation median " + format_number(v.median) + " (lower bound " + format_number(v.mean_lower_bound) +
        "), success " + format_number(v.success_rate) + ", best generation " + std::to_string(v.best_generation) +
        " success " + format_number(v.best_success_rate));
    return v;
}

inline ValidationSummary load_validation_summary(const Run& run)
{
    const auto t = read_run_csv(run, run.dir / "validation_summary.csv", "validate");
    const auto& row = t.rows.at(0);
    return {std::stod(row.at(0)), std::stod(row.at(1)), std::stod(row.at(3)), std::stoi(row.at(4)), std::stod(row.at(5))};
}

/// The checkpoint analysed by test/analyze/perturb: the best validated generation.
inline Checkpoint selected_checkpoint(const Run& run) { return load_checkpoint(run, load_validation_summary(run).best_generation); }

inline TrajectorySet load_trajectories(const Run& run, const fs::path& path, const std::string& producer)
{
    require_artifact(path, producer);
    auto set = decode_trajectories(read_file(path), path.string());
    require_hash(run, set.config_hash, path.string());
    return set;
}

inline TrajectorySet cmd_test(const Run& run, bool csv = false, const Log& log = log_to_stderr)
{
    const auto ck = selected_checkpoint(run);
    auto set = run_test_grid(ck.genome, run.config.train.sim, run.config.analysis.lattice, run.config.train.seed);
    set.checkpoint_id = checkpoint_name(ck.generation);
    set.config_hash = run.hash;
    write_file(run.dir / "test" / "trajectories.bin", encode_trajectories(set));
    if (csv)
        trajectories_csv(set).save(run.dir / "test" / "trajectories.csv");
    log("test: " + std::to_string(set.records.size()) + " trajectories from " + set.checkpoint_id + ", " +
        std::to_string(set.skipped.size()) + " inits inside the patch skipped");
    return set;
}

/// Share of records that touch the patch at some step.
inline double patch_reach_rate(const TrajectorySet& set, const ArenaSpec& arena)
{
    if (set.records.empty())
        return 0.0;
    std::size_t hits = 0;
    for (const auto& r : set.records)
        for (const auto& s : r.series)
            if (distance(Vec2{s.x, s.y}, arena.patch_center) <= arena.patch_radius)
            {
                ++hits;
                break;
            }
    return static_cast<double>(hits) / static_cast<double>(set.records.size());
}

inline BehaviorSummary cmd_analyze(const Run& run, const Log& log = log_to_stderr)
{
    const auto& cfg = run.config;
    const auto& arena = cfg.train.sim.arena;
    const auto set = load_trajectories(run, run.dir / "test" / "trajectories.bin", "test");
    const auto b = summarize_behavior(set.records, arena, cfg.analysis.directedness);
    const fs::path out = run.dir / "analysis";

    CsvWriter summary(run.hash, {"checkpoint", "decorrelation", "censored", "directedness", "occupied_bins", "label",
                                 "mean_turning_speed", "patch_reach_rate"});
    summary.row(set.checkpoint_id, b.decorrelation.time, b.decorrelation.censored ? 1 : 0, b.directedness.mean,
                b.directedness.occupied_bins, label_name(b.label), mean_turning_speed(set), patch_reach_rate(set, arena));
    summary.save(out / "summary.csv");

    CsvWriter corr(run.hash, {"t", "correlation"});
    for (std::size_t t = 0; t < b.correlation.size(); ++t)
        corr.row(t, b.correlation[t]);
    corr.save(out / "correlation.csv");

    const auto& m = b.directedness;
    CsvWriter dmap(run.hash, {"ix", "iy", "x0", "y0", "bin_size", "samples", "directedness"});
    for (int iy = 0; iy < m.ny; ++iy)
        for (int ix = 0; ix < m.nx; ++ix)
        {
            const auto k = static_cast<std::size_t>(iy * m.nx + ix);
            dmap.row(ix, iy, m.origin_x + ix * m.bin_size, m.origin_y + iy * m.bin_size, m.bin_size, m.samples[k], m.value[k]);
        }
    dmap.save(out / "directedness.csv");

    const auto polar = polar_histogram(set.records, arena, cfg.analysis.polar_min_distance, cfg.analysis.lattice.orientations,
                                       cfg.analysis.lattice.mask_prefix);
    CsvWriter pol(run.hash, {"sector", "start_angle", "count", "frequency", "radius"});
    for (std::size_t s = 0; s < polar.counts.size(); ++s)
        pol.row(s, -pi + two_pi * static_cast<double>(s) / static_cast<double>(polar.counts.size()), polar.counts[s],
                polar.frequency[s], polar.radius[s]);
    pol.save(out / "polar.csv");

    const auto ck = load_checkpoint(run, std::stoi(set.checkpoint_id.substr(4)));
    const auto field = mean_action_field(ck.genome, cfg.train.sim, cfg.analysis.field_grid_step, cfg.analysis.field_orientations);
    CsvWriter fcsv(run.hash, {"x", "y", "mean_dx", "mean_dy", "magnitude", "minimum"});
    for (const auto& p : field.points)
    {
        const bool is_min = std::find(field.minima.begin(), field.minima.end(), p.position) != field.minima.end();
        fcsv.row(p.position.x, p.position.y, p.mean.x, p.mean.y, p.magnitude, is_min ? 1 : 0);
    }
    fcsv.save(out / "field.csv");

    log("analysis: decorrelation " + std::to_string(b.decorrelation.time) + (b.decorrelation.censored ? " (censored)" : "") +
        ", directedness " + format_number(m.mean) + ", label " + std::string(label_name(b.label)));
    return b;
}

/// Named perturbation variants. `axis` is fov, corner or speed; empty selects the default suite.
inline std::vector<std::pair<std::string, Perturbation>> perturbation_variants(const RunConfig& cfg, const std::string& axis,
                                                                              const std::vector<double>& values)
{
    std::vector<std::pair<std::string, Perturbation>> out;
    const double fov = cfg.train.sim.fov;
    auto add = [&](const std::string& ax, double v) {
        if (ax == "fov")
            out.push_back({"fov_" + format_number(v), {PerturbationKind::FieldOfVision, v, {}}});
        else if (ax == "corner")
            // positive values move the NW corner inward along the diagonal
            out.push_back({"corner_" + format_number(v), {PerturbationKind::Corner, v, {v, -v}}});
        else if (ax == "speed")
            out.push_back({"speed_" + format_number(v), {PerturbationKind::Speed, v, {}}});
        else
            throw ValidationError("axis", "perturbation axis must be fov, corner or speed");
    };
    if (axis.empty())
    {
        for (double v : {fov - 0.05, fov + 0.05})
            add("fov", v);
        for (double v : {100.0, -100.0})
            add("corner", v);
        for (double v : {0.5, 1.5})
            add("speed", v);
    }
    else
    {
        if (values.empty())
            throw ValidationError("values", "perturbation values are required with --axis");
        for (double v : values)
            add(axis, v);
    }
    return out;
}

inline void cmd_perturb(const Run& run, const std::string& axis, const std::vector<double>& values,
                        const Log& log = log_to_stderr)
{
    const auto& cfg = run.config;
    const auto ck = selected_checkpoint(run);
    CsvWriter summary(run.hash, {"variant", "value", "decorrelation", "censored", "directedness", "label",
                                 "mean_turning_speed", "patch_reach_rate"});
    for (const auto& [name, p] : perturbation_variants(cfg, axis, values))
    {
        const SimConfig sim = perturbed(cfg.train.sim, p);
        auto set = run_test_grid(ck.genome, sim, cfg.analysis.lattice, cfg.train.seed);
        set.checkpoint_id = checkpoint_name(ck.generation);
        set.config_hash = run.hash;
        write_file(run.dir / "perturb" / name / "trajectories.bin", encode_trajectories(set));
        const auto b = summarize_behavior(set.records, sim.arena, cfg.analysis.directedness);
        summary.row(name, p.value, b.decorrelation.time, b.decorrelation.censored ? 1 : 0, b.directedness.mean,
                    label_name(b.label), mean_turning_speed(set), patch_reach_rate(set, sim.arena));
        log("perturb " + name + ": " + std::string(label_name(b.label)));
    }
    summary.save(run.dir / "perturb" / "summary.csv");
}

inline std::vector<ManifoldPoint> cmd_manifold(const Run& run, const Log& log = log_to_stderr)
{
    const auto& sim = run.config.train.sim;
    const auto points = dual_corner_manifold(sim.arena, sim.fov, sim.rays, run.config.analysis.manifold_grid_step);
    CsvWriter w(run.hash, {"ray_i", "ray_j", "corner_a", "corner_b", "x", "y", "heading", "residual"});
    for (const auto& p : points)
        w.row(p.ray_i, p.ray_j, p.corner_a, p.corner_b, p.position.x, p.position.y, p.heading, p.residual);
    w.save(run.dir / "manifold.csv");
    log("manifold: " + std::to_string(points.size()) + " points");
    return points;
}

inline const std::vector<std::string>& figure_names()
{
    static const std::vector<std::string> names{"trajectories", "heading_profile", "polar",       "decorr",
                                                "directedness_map", "vector_field", "manifold"};
    return names;
}

inline fs::path cmd_plot(const Run& run, const std::string& figure, const fs::path& out_path = {})
{
    const auto& arena = run.config.train.sim.arena;
    const auto& analysis = run.config.analysis;
    const fs::path traj = run.dir / "test" / "trajectories.bin";
    cv::Mat image;
    if (figure == "trajectories")
        image = plot_trajectories(load_trajectories(run, traj, "test").records, arena);
    else if (figure == "heading_profile")
    {
        const auto set = load_trajectories(run, traj, "test");
        image = plot_heading_profile(heading_profile(set.records, arena, analysis.lattice.mask_prefix), arena.diameter());
    }
    else if (figure == "polar")
    {
        const auto t = read_run_csv(run, run.dir / "analysis" / "polar.csv", "analyze");
        PolarHistogram h;
        for (const auto& row : t.rows)
        {
            h.counts.push_back(std::stoll(row.at(2)));
            h.frequency.push_back(std::stod(row.at(3)));
            h.radius.push_back(std::stod(row.at(4)));
            h.total += h.counts.back();
        }
        image = plot_polar(h);
    }
    else if (figure == "decorr")
    {
        const auto t = read_run_csv(run, run.dir / "analysis" / "correlation.csv", "analyze");
        std::vector<double> curve;
        for (const auto& row : t.rows)
            curve.push_back(std::stod(row.at(1)));
        image = plot_decorrelation(curve, decorrelation_time(curve));
    }
    else if (figure == "directedness_map")
    {
        const auto t = read_run_csv(run, run.dir / "analysis" / "directedness.csv", "analyze");
        DirectednessMap m;
        for (const auto& row : t.rows)
        {
            m.nx = std::max(m.nx, std::stoi(row.at(0)) + 1);
            m.ny = std::max(m.ny, std::stoi(row.at(1)) + 1);
        }
        m.value.assign(static_cast<std::size_t>(m.nx * m.ny), std::numeric_limits<double>::quiet_NaN());
        for (const auto& row : t.rows)
        {
            const int ix = std::stoi(row.at(0));
            const int iy = std::stoi(row.at(1));
            if (ix == 0 && iy == 0)
            {
                m.origin_x = std::stod(row.at(2));
                m.origin_y = std::stod(row.at(3));
                m.bin_size = std::stod(row.at(4));
            }
            m.value[static_cast<std::size_t>(iy * m.nx + ix)] = std::stod(row.at(6));
        }
        image = plot_directedness(m, arena);
    }
    else if (figure == "vector_field")
    {
        const auto t = read_run_csv(run, run.dir / "analysis" / "field.csv", "analyze");
        ActionField f;
        for (const auto& row : t.rows)
        {
            FieldPoint p{{std::stod(row.at(0)), std::stod(row.at(1))}, {std::stod(row.at(2)), std::stod(row.at(3))},
                         std::stod(row.at(4))};
            f.points.push_back(p);
            if (row.at(5) == "1")
                f.minima.push_back(p.position);
        }
        image = plot_vector_field(f, arena);
    }
    else if (figure == "manifold")
    {
        const auto t = read_run_csv(run, run.dir / "manifold.csv", "manifold");
        std::vector<ManifoldPoint> pts;
        for (const auto& row : t.rows)
            pts.push_back({{std::stod(row.at(4)), std::stod(row.at(5))}, std::stod(row.at(6)), std::stoi(row.at(0)),
                           std::stoi(row.at(1)), std::stoi(row.at(2)), std::stoi(row.at(3)), std::stod(row.at(7))});
        image = plot_manifold(pts, arena, run.config.train.sim.rays);
    }
    else
        throw ValidationError("figure", "unknown figure '" + figure + "'");
    const fs::path path = out_path.empty() ? run.dir / "figures" / (figure + ".png") : out_path;
    const auto png = encode_png(image, run.hash);
    write_file(path, std::string(png.begin(), png.end()));
    return path;
}

inline RunConfig with_axis_value(RunConfig c, const std::string& axis, double value)
{
    if (axis == "rays")
    {
        if (value != std::floor(value))
            throw ValidationError("values", "ray counts must be integers");
        c.train.sim.rays = static_cast<int>(value);
        c.train.arch.rays = c.train.sim.rays;
    }
    else if (axis == "sigma")
        c.train.sim.calibration.sigma = value;
    else if (axis == "fov")
        c.train.sim.fov = value;
    else
        throw ValidationError("axis", "sweep axis must be rays, sigma or fov");
    validate_config(c);
    return c;
}

struct SweepRow
{
    double value = 0.0;
    std::uint64_t seed = 0;
    std::string status;
    int decorrelation = 0;
    double directedness = 0.0;
    std::string label;
    double validation_median = 0.0;
};

/// Independent seeded pipelines (train, validate, test, analyze) for every (value, replicate).
/// A failing run is recorded in the table and the batch continues.
inline std::vector<SweepRow> cmd_sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
                                       int replicates, const fs::path& out_dir, const Log& log = log_to_stderr)
{
    if (values.empty())
        throw ValidationError("values", "at least one sweep value is required");
    if (replicates < 1)
        throw ValidationError("replicates", "must be positive");
    with_axis_value(base, axis, values.front());
    std::vector<SweepRow> rows;
    for (double v : values)
        for (int rep = 0; rep < replicates; ++rep)
        {
            SweepRow row;
            row.value = v;
            row.seed = base.train.seed + static_cast<std::uint64_t>(rep);
            try
            {
                RunConfig c = with_axis_value(base, axis, v);
                c.train.seed = row.seed;
                const fs::path dir = out_dir / (axis + "_" + format_number(v) + "-s" + std::to_string(row.seed));
                const Run run = cmd_train(c, dir, log);
                row.validation_median = cmd_validate(run, log).median;
                cmd_test(run, false, log);
                const auto b = cmd_analyze(run, log);
                row.decorrelation = b.decorrelation.time;
                row.directedness = b.directedness.mean;
                row.label = std::string(label_name(b.label));
                row.status = "ok";
            }
            catch (const std::exception& e)
            {
                row.status = std::string("failed: ") + e.what();
                std::replace(row.status.begin(), row.status.end(), ',', ';');
                std::replace(row.status.begin(), row.status.end(), '\n', ' ');
                log("sweep run " + axis + "=" + format_number(v) + " seed " + std::to_string(row.seed) + " " + row.status);
            }
            rows.push_back(row);
        }
    CsvWriter w(config_hash(base), {axis, "seed", "decorr", "directedness", "label", "validation_median", "status"});
    for (const auto& r : rows)
        w.row(r.value, static_cast<unsigned long long>(r.seed), r.decorrelation, r.directedness, r.label,
              r.validation_median, r.status);
    w.save(out_dir / "sweep.csv");
    return rows;
}

} // namespace vrnav

#endif // VRNAV_EXPERIMENT_HPP

// Command-line driver: train, validate, test, analyze, perturb, manifold, plot, sweep.

#include "vrnav/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{

vrnav::Run open_from_flags(const std::string& run_dir, const std::string& config_path)
{
    if (!run_dir.empty())
        return vrnav::open_run(run_dir);
    if (!config_path.empty())
        return vrnav::open_run(vrnav::default_run_dir(vrnav::load_config(config_path)));
    throw vrnav::ValidationError("run-dir", "either --run-dir or --config is required");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Visual navigation agents: training, testing and behaviour analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string run_dir;
    std::optional<std::uint64_t> seed;
    std::string axis;
    std::vector<double> values;
    int replicates = 1;
    std::string figure;
    std::string out;
    bool csv = false;

    auto add_run = [&](CLI::App* cmd) {
        cmd->add_option("--run-dir", run_dir, "Run directory");
        cmd->add_option("--config", config_path, "Config file (locates the default run directory)");
    };

    auto* train = app.add_subcommand("train", "Train a policy (resumes an interrupted run)");
    train->add_option("--config", config_path, "Config file")->required();
    train->add_option("--run-dir", run_dir, "Run directory (default: $VRNAV_OUTPUT_ROOT/<name>-s<seed>)");
    train->add_option("--seed", seed, "Override run.seed");

    auto* validate = app.add_subcommand("validate", "Evaluate the best training generations on fresh inits");
    add_run(validate);
    auto* test = app.add_subcommand("test", "Roll out the validated checkpoint over the test lattice");
    add_run(test);
    test->add_flag("--csv", csv, "Also export the trajectories as CSV");
    auto* analyze = app.add_subcommand("analyze", "Movement statistics, class label and mean action field");
    add_run(analyze);
    auto* perturb = app.add_subcommand("perturb", "Rerun the test lattice under fov, corner or speed perturbations");
    add_run(perturb);
    perturb->add_option("--axis", axis, "fov, corner or speed (default: built-in suite)");
    perturb->add_option("--values", values, "Perturbation values");
    auto* manifold = app.add_subcommand("manifold", "Dual-corner manifold points for the run's arena and vision");
    add_run(manifold);
    auto* plot = app.add_subcommand("plot", "Render a figure");
    add_run(plot);
    plot->add_option("--figure", figure, "Figure name or 'all'")->required();
    plot->add_option("--out", out, "Output PNG (single figure only)");
    auto* sweep = app.add_subcommand("sweep", "Seeded runs over one vision parameter");
    sweep->add_option("--config", config_path, "Base config file")->required();
    sweep->add_option("--axis", axis, "rays, sigma or fov")->required();
    sweep->add_option("--values", values, "Axis values")->required();
    sweep->add_option("--replicates", replicates, "Seeds per value");
    sweep->add_option("--seed", seed, "First seed (default: run.seed)");
    sweep->add_option("--out", out, "Output directory (default: $VRNAV_OUTPUT_ROOT/sweep-<axis>)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        if (train->parsed())
        {
            auto cfg = vrnav::load_config(config_path);
            if (seed)
                cfg.train.seed = *seed;
            const auto dir = run_dir.empty() ? vrnav::default_run_dir(cfg) : vrnav::fs::path(run_dir);
            vrnav::cmd_train(cfg, dir);
            std::cout << dir.string() << '\n';
        }
        else if (validate->parsed())
            vrnav::cmd_validate(open_from_flags(run_dir, config_path));
        else if (test->parsed())
            vrnav::cmd_test(open_from_flags(run_dir, config_path), csv);
        else if (analyze->parsed())
            vrnav::cmd_analyze(open_from_flags(run_dir, config_path));
        else if (perturb->parsed())
            vrnav::cmd_perturb(open_from_flags(run_dir, config_path), axis, values);
        else if (manifold->parsed())
            vrnav::cmd_manifold(open_from_flags(run_dir, config_path));
        else if (plot->parsed())
        {
            const auto run = open_from_flags(run_dir, config_path);
            if (figure == "all")
            {
                for (const auto& f : vrnav::figure_names())
                    std::cout << vrnav::cmd_plot(run, f).string() << '\n';
            }
            else
                std::cout << vrnav::cmd_plot(run, figure, out).string() << '\n';
        }
        else if (sweep->parsed())
        {
            auto cfg = vrnav::load_config(config_path);
            if (seed)
                cfg.train.seed = *seed;
            const auto dir = out.empty() ? vrnav::output_root() / ("sweep-" + axis) : vrnav::fs::path(out);
            const auto rows = vrnav::cmd_sweep(cfg, axis, values, replicates, dir);
            std::cout << (dir / "sweep.csv").string() << '\n';
            for (const auto& r : rows)
                if (r.status != "ok")
                    return 1;
        }
    }
    catch (const vrnav::MissingArtifactError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#include "vrnav/experiment.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sys/wait.h>

using namespace vrnav;

namespace
{

const fs::path root = fs::temp_directory_path() / "vrnav_test_cli";

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(VRNAV_CLI) + " " + args + " > " + (root / "stdout.txt").string() + " 2> " +
                            (root / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string tiny_config(const std::string& name)
{
    std::ifstream in(std::string(VRNAV_SOURCE_DIR) + "/configs/default.ini");
    std::string text(std::istreambuf_iterator<char>(in), {});
    auto set = [&](const std::string& key, const std::string& value) {
        text = std::regex_replace(text, std::regex("\n" + key + " = [^\n]*"), "\n" + key + " = " + value);
    };
    set("generations", "3");
    set("population", "4");
    set("episodes", "2");
    set("episode_horizon", "40");
    set("top_k", "2");
    set("inits", "4");
    set("lattice_spacing", "250");
    set("test_horizon", "60");
    set("mask_prefix", "10");
    set("field_grid_step", "250");
    set("field_orientations", "8");
    set("manifold_grid_step", "100");
    set("name", name);
    const fs::path p = root / (name + ".ini");
    fs::create_directories(root);
    std::ofstream(p) << text;
    return p.string();
}

class Cli : public ::testing::Test
{
protected:
    void SetUp() override
    {
        fs::remove_all(root);
        fs::create_directories(root);
        setenv(output_root_env, (root / "runs").c_str(), 1);
    }
};

} // namespace

TEST_F(Cli, ExitCodes)
{
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("no-such-command"), 1);
    EXPECT_EQ(run_cli("train"), 1);
    EXPECT_EQ(run_cli("train --config " + (root / "missing.ini").string()), 2);
    const fs::path bad = root / "bad.ini";
    std::ofstream(bad) << "[run]\nseed = 1\n";
    EXPECT_EQ(run_cli("train --config " + bad.string()), 1);
    // analysis stages before training name the missing artifact
    EXPECT_EQ(run_cli("test --run-dir " + (root / "empty").string()), 2);
    fs::create_directories(root / "empty");
    EXPECT_EQ(run_cli("validate --run-dir " + (root / "empty").string()), 2);
}

TEST_F(Cli, TinyEndToEndRunIsReproducible)
{
    const std::string cfg = tiny_config("tiny");
    const fs::path run = root / "runs" / "tiny-s1";
    ASSERT_EQ(run_cli("train --config " + cfg), 0);
    ASSERT_TRUE(fs::exists(run / "fitness.csv"));
    ASSERT_TRUE(fs::exists(run / "checkpoints" / "gen_000002.ckpt"));
    const std::string fitness = read_file(run / "fitness.csv");

    EXPECT_EQ(run_cli("analyze --config " + cfg), 2); // no test trajectories yet
    ASSERT_EQ(run_cli("validate --config " + cfg), 0);
    ASSERT_EQ(run_cli("test --csv --config " + cfg), 0);
    ASSERT_EQ(run_cli("analyze --config " + cfg), 0);
    ASSERT_EQ(run_cli("perturb --axis speed --values 0.5 --config " + cfg), 0);
    ASSERT_EQ(run_cli("manifold --config " + cfg), 0);
    ASSERT_EQ(run_cli("plot --figure all --config " + cfg), 0);
    for (const auto& f : figure_names())
        EXPECT_TRUE(fs::exists(run / "figures" / (f + ".png"))) << f;
    const std::string hash = read_csv(run / "analysis" / "summary.csv").config_hash;
    EXPECT_EQ(hash, config_hash(load_config(cfg)));
    const std::string png = read_file(run / "figures" / "trajectories.png");
    EXPECT_EQ(png_config_hash(std::vector<unsigned char>(png.begin(), png.end())), hash);

    // a second run from scratch writes an identical fitness history
    fs::remove_all(run);
    ASSERT_EQ(run_cli("train --config " + cfg), 0);
    EXPECT_EQ(read_file(run / "fitness.csv"), fitness);
    // rerunning a finished run is a no-op resume
    ASSERT_EQ(run_cli("train --config " + cfg), 0);
    EXPECT_EQ(read_file(run / "fitness.csv"), fitness);
}

TEST_F(Cli, ChangedConfigIsRefusedForExistingRun)
{
    const std::string cfg = tiny_config("tiny");
    ASSERT_EQ(run_cli("train --config " + cfg), 0);
    std::string text = read_file(cfg);
    text = std::regex_replace(text, std::regex("\nstd_init = [^\n]*"), "\nstd_init = 0.2");
    std::ofstream(cfg) << text;
    EXPECT_EQ(run_cli("train --config " + cfg), 1);
}

#include "vrnav/io.hpp"

#include <gtest/gtest.h>

using namespace vrnav;

namespace
{

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("vrnav_test_io_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Io, CheckpointRoundTripIsBitExact)
{
    Checkpoint c;
    c.genome = zero_genome(ArchSpec{});
    for (std::size_t i = 0; i < c.genome.params.size(); ++i)
        c.genome.params[i] = std::sin(static_cast<double>(i)) * 1e-3 + 1.0 / 3.0;
    c.fov = 0.45;
    c.sigma = 1.0;
    c.seed = 77;
    c.generation = 12;
    c.config_hash = "abc";
    const fs::path p = scratch("ckpt") / "sub" / "g.ckpt";
    write_file(p, encode_checkpoint(c));
    const Checkpoint back = decode_checkpoint(read_file(p));
    EXPECT_EQ(back.genome.params, c.genome.params);
    EXPECT_EQ(back.genome.arch, c.genome.arch);
    EXPECT_EQ(back.fov, 0.45);
    EXPECT_EQ(back.generation, 12);
    EXPECT_EQ(back.config_hash, "abc");
}

TEST(Io, CorruptContainersAreRejected)
{
    Checkpoint c;
    c.genome = zero_genome(ArchSpec{});
    std::string bytes = encode_checkpoint(c);
    EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 8)), ShapeError);
    EXPECT_THROW(decode_checkpoint("VRNAVXX1" + bytes.substr(8)), Error);
    EXPECT_THROW(decode_checkpoint(""), Error);
    EXPECT_THROW(read_file("/nonexistent/file.bin"), MissingArtifactError);
}

TEST(Io, EsStateRoundTripAndHashCheck)
{
    EsState s;
    s.center = {1.0, -2.5, 1e-300};
    s.stds = {0.1, 0.2, 0.3};
    s.velocity = {0.0, 0.01, -0.02};
    const std::string bytes = encode_es_state(s, "h1");
    const EsState back = decode_es_state(bytes, "h1");
    EXPECT_EQ(back.center, s.center);
    EXPECT_EQ(back.stds, s.stds);
    EXPECT_EQ(back.velocity, s.velocity);
    try
    {
        decode_es_state(bytes, "h2");
        FAIL();
    }
    catch (const ValidationError& e)
    {
        EXPECT_EQ(e.field, "config_hash");
    }
}

TEST(Io, TrajectoryRoundTrip)
{
    TrajectorySet set;
    set.checkpoint_id = "gen_000003";
    set.config_hash = "h";
    set.lattice.horizon = 3;
    for (int r = 0; r < 4; ++r)
    {
        TrajectoryRecord rec;
        rec.init = {{100.0 + r, 200.0}, 0.5 * r, 0};
        for (int t = 0; t < 3; ++t)
            rec.series.push_back({t, 100.0 + r + t, 200.0, 0.5 * r, -0.25 * t});
        set.records.push_back(rec);
    }
    set.skipped.push_back({{400.0, 600.0}, 0.0, 0});
    const TrajectorySet back = decode_trajectories(encode_trajectories(set));
    EXPECT_EQ(back.checkpoint_id, set.checkpoint_id);
    EXPECT_EQ(back.config_hash, "h");
    ASSERT_EQ(back.records.size(), 4u);
    ASSERT_EQ(back.skipped.size(), 1u);
    EXPECT_EQ(back.skipped[0].position, (Vec2{400.0, 600.0}));
    for (int r = 0; r < 4; ++r)
        for (int t = 0; t < 3; ++t)
        {
            EXPECT_EQ(back.records[r].series[t].x, set.records[r].series[t].x);
            EXPECT_EQ(back.records[r].series[t].action, set.records[r].series[t].action);
        }
    EXPECT_EQ(back.records[2].init.heading, 1.0);
}

TEST(Io, CsvCarriesHashAndNan)
{
    CsvWriter w("deadbeef", {"a", "b", "c"});
    w.row(1, 0.1, std::string("x"));
    w.row(std::size_t{7}, std::nan(""), "y");
    const fs::path p = scratch("csv") / "t.csv";
    w.save(p);
    const CsvTable t = read_csv(p);
    EXPECT_EQ(t.config_hash, "deadbeef");
    EXPECT_EQ(t.columns, (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0], (std::vector<std::string>{"1", "0.1", "x"}));
    EXPECT_EQ(t.rows[1], (std::vector<std::string>{"7", "nan", "y"}));
}

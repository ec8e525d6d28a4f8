#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "vlab/config.hpp"
#include "vlab/error.hpp"
#include "vlab/io.hpp"
#include "vlab/kernels.hpp"
#include "vlab/lab.hpp"

namespace vlab {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("vlab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TEST(Config, ParsesTypedValues) {
    const auto c = Config::parse(
        "# comment\n"
        "experiment = meanfield\n"
        "seed = 18446744073709551615   # max u64\n"
        "eps=0.25\n"
        "force = yes\n"
        "N_values = 1000, 4000,16000\n"
        "\n");
    EXPECT_EQ(c.get_string("experiment", ""), "meanfield");
    EXPECT_EQ(c.get_u64("seed", 0), 18446744073709551615ull);
    EXPECT_EQ(c.get_double("eps", 0.0), 0.25);
    EXPECT_TRUE(c.get_bool("force", false));
    EXPECT_EQ(c.get_list("N_values", {}), std::vector<double>({1000, 4000, 16000}));
    EXPECT_EQ(c.get_int("missing", 7), 7);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(Config::parse("eps 0.5\n"), DomainError);
    EXPECT_THROW(Config::parse(" = 3\n"), DomainError);
    const auto c = Config::parse("eps = half\nwhatever = 1\n");
    EXPECT_THROW(c.get_double("eps", 0.0), DomainError);
    EXPECT_THROW(Config::parse("whatever = 1\nseed = 1\n").check(experiment_schema()), DomainError);
    EXPECT_THROW(Config::parse("eps = half\nseed = 1\n").check(experiment_schema()), DomainError);
}

TEST(Config, ExperimentConfigNeedsSeed) {
    EXPECT_THROW(experiment_config(Config::parse("eps = 0.5\n")), DomainError);
    const auto e = experiment_config(Config::parse("seed = 9\neps = 0.3\ngrid.mx = 32\nmetric = torus\n"));
    EXPECT_EQ(*e.seed, 9u);
    EXPECT_EQ(e.regime.eps, 0.3);
    EXPECT_EQ(e.mx, 32);
    EXPECT_EQ(e.distance.metric, Metric::TorusGeodesic);
}

TEST(Config, LoadsFromFileAndEchoesToJson) {
    const auto dir = scratch_dir("config");
    std::ofstream(dir / "run.cfg") << "seed = 4\nexperiment = quasineutral\neps_values = 0.2, 0.1\nC_T = 2.5\n";
    const auto e = experiment_config(Config::load((dir / "run.cfg").string()));
    const auto j = to_json(e);
    EXPECT_EQ(j["seed"], 4u);
    EXPECT_EQ(j["experiment"], "quasineutral");
    EXPECT_EQ(j["regime"]["constants"]["C_T"], 2.5);
    EXPECT_THROW(Config::load((dir / "absent.cfg").string()), Error);
}

TEST(Csv, RoundTripKeepsHeaderAndValues) {
    const auto dir = scratch_dir("csv");
    Table t{"demo", {"N", "label", "value"}, {}};
    t.add({1000, "a", 0.1});
    t.add({4000, "b", 1.0 / 3.0});
    t.add({16000, "c", -2.5e-17});
    const auto path = (dir / "demo.csv").string();
    write_csv(t, path);
    const auto back = read_csv(path);
    EXPECT_EQ(back.header, t.header);
    ASSERT_EQ(back.rows.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.rows[i][0].get<double>(), t.rows[i][0].get<double>());
        EXPECT_EQ(back.rows[i][1].get<std::string>(), t.rows[i][1].get<std::string>());
        EXPECT_EQ(back.rows[i][2].get<double>(), t.rows[i][2].get<double>());
    }
    EXPECT_THROW(t.add({1.0}), MismatchError);
}

TEST(KernelBinary, RoundTripIsBitwise) {
    const auto dir = scratch_dir("kernel");
    const auto table = mollified_force_table(MollifierSpec{1.0 / 8, "bump"}, 0.5, 64, 1);
    const auto path = (dir / "k.bin").string();
    write_kernel_table_binary(table, path);
    const auto back = read_kernel_table_binary(path);
    EXPECT_EQ(back.d, table.d);
    EXPECT_EQ(back.m, table.m);
    EXPECT_EQ(back.eps, table.eps);
    EXPECT_EQ(back.r, table.r);
    EXPECT_EQ(back.profile, table.profile);
    EXPECT_EQ(back.force, table.force);
    EXPECT_EQ(back.green, table.green);

    write_kernel_table_csv(table, (dir / "k.csv").string());
    const auto csv = read_csv((dir / "k.csv").string());
    EXPECT_EQ(csv.header, std::vector<std::string>({"lag0", "force0", "green"}));
    ASSERT_EQ(csv.rows.size(), 64u);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(csv.rows[i][1].get<double>(), table.force[i]);

    std::ofstream(dir / "junk.bin") << "not a kernel";
    EXPECT_THROW(read_kernel_table_binary((dir / "junk.bin").string()), Error);
}

}  // namespace
}  // namespace vlab

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "vlab/error.hpp"
#include "vlab/lab.hpp"

namespace vlab {
namespace {

ExperimentConfig small(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.seed = 12;
    c.seeds = 1;
    c.mx = 32;
    c.mv = 64;
    c.regime.T = 0.2;
    c.regime.eps = 0.5;
    c.snapshot_dt = 0.1;
    c.distance.blocks_x = 16;
    c.distance.blocks_v = 16;
    return c;
}

double column_max(const Table& t, const std::string& col) {
    const auto it = std::find(t.header.begin(), t.header.end(), col);
    EXPECT_NE(it, t.header.end()) << col;
    const auto k = static_cast<std::size_t>(it - t.header.begin());
    double m = -INFINITY;
    for (const auto& row : t.rows) m = std::max(m, row[k].get<double>());
    return m;
}

TEST(Lab, SingleParticleSanity) {
    auto c = small("meanfield");
    c.N_values = {1};
    const auto rep = run_meanfield_convergence(c);
    const double w = column_max(rep.table("runs"), "sup_W1");
    EXPECT_GT(w, 0.05);
    EXPECT_LT(w, 2.0);
    EXPECT_TRUE(rep.checks.empty());
}

TEST(Lab, IdenticalSeedsGiveIdenticalReports) {
    auto c = small("meanfield");
    c.N_values = {200, 800};
    auto a = run_meanfield_convergence(c).to_json();
    auto b = run_meanfield_convergence(c).to_json();
    a.erase("wall_seconds");
    b.erase("wall_seconds");
    EXPECT_EQ(a, b);
    c.seed = 13;
    auto d = run_meanfield_convergence(c).to_json();
    d.erase("wall_seconds");
    EXPECT_NE(a["tables"], d["tables"]);
    EXPECT_EQ(a["seed"], 12u);
    EXPECT_EQ(a["version"], code_version());
}

TEST(Lab, SeedIsMandatory) {
    auto c = small("meanfield");
    c.seed.reset();
    EXPECT_THROW(run_meanfield_convergence(c), DomainError);
    EXPECT_THROW(run_experiment(c), DomainError);
}

TEST(Lab, DegenerateScheduleIsRefusedUnlessForced) {
    auto c = small("combined");
    c.regime.constants.A = 2.5;
    c.amplitude = 0.5;
    c.N_values = {10};  // eps(N) = 2.5 / log 10 > 1
    try {
        run_combined_limit(c);
        FAIL() << "expected AdmissibilityError";
    } catch (const AdmissibilityError& e) {
        EXPECT_NE(std::string(e.what()).find("eps <= 1"), std::string::npos) << e.what();
    }
    c.force = true;
    const auto rep = run_combined_limit(c);
    EXPECT_TRUE(rep.forced);
    EXPECT_FALSE(rep.violations.empty());
    const auto j = rep.to_json();
    EXPECT_TRUE(j["forced"].get<bool>());
    EXPECT_FALSE(j["violations"].empty());
}

TEST(Lab, UnregularizedCombinedPathIsAccepted) {
    auto c = small("combined");
    c.regime.constants.A = 2.5;
    c.regime.r = 0.0;
    c.N_values = {1024};
    const auto rep = run_combined_limit(c);
    EXPECT_FALSE(rep.forced);
    EXPECT_EQ(rep.table("runs").rows.size(), 1u);
    EXPECT_NE(rep.diagnostics["placement_radius"].get<std::string>().find("r_min"), std::string::npos);
}

TEST(Lab, MeanfieldRefusesLargeEps) {
    auto c = small("meanfield");
    c.regime.eps = 1.5;
    c.N_values = {10};
    EXPECT_THROW(run_meanfield_convergence(c), AdmissibilityError);
}

TEST(Lab, HomogeneousProfileSitsAtSolverFloor) {
    auto c = small("quasineutral");
    c.amplitude = 0.0;
    c.eps_values = {0.2, 0.1};
    c.spectrum_periods = 2.0;
    const auto rep = run_quasineutral_sweep(c);
    EXPECT_LE(column_max(rep.table("distances"), "W1_filtered"), 1e-10);
    EXPECT_LE(column_max(rep.table("distances"), "W1_unfiltered"), 1e-10);
}

TEST(Lab, ReportWritesJsonAndCsv) {
    auto c = small("meanfield");
    c.N_values = {50};
    const auto rep = run_meanfield_convergence(c);
    const auto dir = std::filesystem::temp_directory_path() / "vlab_test_report";
    std::filesystem::remove_all(dir);
    rep.write(dir.string());
    EXPECT_TRUE(std::filesystem::exists(dir / "meanfield.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "meanfield_runs.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "meanfield_summary.csv"));
    const auto back = read_csv((dir / "meanfield_runs.csv").string());
    EXPECT_EQ(back.header, rep.table("runs").header);
}

TEST(Lab, RegimeReportCarriesConstantsAndVerdict) {
    RegimeParams p;
    p.d = 2;
    p.eps = 0.97;
    p.N = 1e8;
    p.r = 0.2;
    const auto j = regime_report(p);
    EXPECT_EQ(j["inputs"]["constants"]["C_T"], 1.0);
    EXPECT_TRUE(j.contains("admissible"));
    EXPECT_TRUE(j.contains("gronwall"));
    EXPECT_EQ(j["schedules"]["zeta"], 2.5);
}

TEST(Lab, LemmaSuiteHasNoViolations) {
    ConcentrationOptions co;
    co.resamples = 60;
    co.reference_grid = 24;
    const auto rep = run_lemma_suite(3, 40, co);
    EXPECT_EQ(rep.table("concentration").rows.size(), co.x_grid.size());
    ASSERT_FALSE(rep.checks.empty());
    for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
}

TEST(Lab, ConcentrationBoundDominatesFreshResamples) {
    ConcentrationOptions co;
    co.N = 50;
    co.resamples = 80;
    co.reference_grid = 20;
    const auto res = concentration_check(co);
    EXPECT_TRUE(res.passed);
    EXPECT_GT(res.c, 0.0);
    for (std::size_t i = 0; i < res.x.size(); ++i) EXPECT_LE(res.frequency[i], res.bound[i]);
    for (std::size_t i = 1; i < res.x.size(); ++i) EXPECT_LE(res.frequency[i], res.frequency[i - 1]);
    EXPECT_NEAR(res.quantization_error, std::sqrt(2.0) / 20, 1e-15);
}

}  // namespace
}  // namespace vlab

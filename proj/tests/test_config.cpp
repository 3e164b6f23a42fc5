#include "chemostokes/config.hpp"
#include "chemostokes/errors.hpp"
#include "chemostokes/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

using namespace chemostokes;

namespace {

const std::string kMinimal = "grid.dim = 2\ngrid.n = 16\ntime.end = 1.0\n";

std::string error_of(const std::string& text)
{
    try {
        (void)parse_config_text(text);
    }
    catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, MinimalFileTakesDefaults)
{
    const RunConfig cfg = parse_config_text(kMinimal);
    EXPECT_EQ(cfg.grid.dim, 2);
    EXPECT_EQ(cfg.grid.cells[0], 16);
    EXPECT_EQ(cfg.grid.cells[1], 16);
    EXPECT_EQ(cfg.grid.cells[2], 1);
    EXPECT_DOUBLE_EQ(cfg.control.cfl_safety, 0.4);
    EXPECT_DOUBLE_EQ(cfg.control.output_cadence, 0.1);
    EXPECT_DOUBLE_EQ(cfg.control.end_time, 1.0);
    EXPECT_EQ(cfg.control.positivity, PositivityPolicy::Reject);
    EXPECT_EQ(cfg.poisson.method, PoissonMethod::Spectral);
    EXPECT_DOUBLE_EQ(cfg.transient_cutoff, 1.0);
}

TEST(Config, CommentsBlankLinesAndPerAxisLists)
{
    const RunConfig cfg = parse_config_text(
        "# a comment\n\ngrid.dim = 3   # trailing\ngrid.n = 8, 6, 4\ngrid.length = 1, 2, 0.5\ntime.end = 0.5\n"
        "model.chi1 = 0.25\nmodel.a1 = 0.3\nmodel.a2 = 0.6\nmodel.phi_slope = 0, 0, -1\n"
        "stokes.poisson = cg\ntime.positivity = clip\noutput.snapshots = false\nseed = 7\n");
    EXPECT_EQ(cfg.grid.cells[1], 6);
    EXPECT_DOUBLE_EQ(cfg.grid.spacing[1], 2.0 / 6.0);
    EXPECT_DOUBLE_EQ(cfg.grid.spacing[2], 0.125);
    EXPECT_DOUBLE_EQ(cfg.params.chi1, 0.25);
    EXPECT_DOUBLE_EQ(cfg.params.phi.slope[2], -1.0);
    EXPECT_EQ(cfg.poisson.method, PoissonMethod::ConjugateGradient);
    EXPECT_EQ(cfg.control.positivity, PositivityPolicy::Clip);
    EXPECT_FALSE(cfg.write_snapshots);
    EXPECT_EQ(cfg.seed, 7U);
}

TEST(Config, RejectsNonPositiveRate)
{
    const auto msg = error_of(kMinimal + "model.mu1 = 0\n");
    EXPECT_NE(msg.find("mu1"), std::string::npos) << msg;
}

TEST(Config, RejectsUnknownKey)
{
    const auto msg = error_of(kMinimal + "model.xi0 = 1\n");
    EXPECT_NE(msg.find("model.xi0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unknown key"), std::string::npos) << msg;
    EXPECT_NE(error_of(kMinimal + "xi0 = 1\n").find("xi0"), std::string::npos);
}

TEST(Config, RejectsDuplicates)
{
    const auto msg = error_of(kMinimal + "grid.n = 8\n");
    EXPECT_NE(msg.find("grid.n"), std::string::npos) << msg;
    EXPECT_NE(msg.find("duplicate"), std::string::npos) << msg;
}

TEST(Config, RejectsTypeMismatch)
{
    const auto msg = error_of("grid.dim = 2\ngrid.n = sixteen\ntime.end = 1\n");
    EXPECT_NE(msg.find("grid.n"), std::string::npos) << msg;
    EXPECT_NE(error_of(kMinimal + "model.chi1 = 0.1x\n").find("model.chi1"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "output.snapshots = maybe\n").find("output.snapshots"), std::string::npos);
}

TEST(Config, RejectsMissingRequiredKeys)
{
    EXPECT_NE(error_of("grid.dim = 2\ngrid.n = 16\n").find("time.end"), std::string::npos);
    EXPECT_NE(error_of("grid.n = 16\ntime.end = 1\n").find("grid.dim"), std::string::npos);
}

TEST(Config, RejectsStructuralProblems)
{
    EXPECT_FALSE(error_of(kMinimal + "this line has no equals\n").empty());
    EXPECT_FALSE(error_of("grid.dim = 2\ngrid.n = 16, 8, 4\ntime.end = 1\n").empty());
    EXPECT_FALSE(error_of(kMinimal + "grid.length = 1\ngrid.h = 0.1\n").empty());
    EXPECT_FALSE(error_of("grid.dim = 2\ngrid.n = 2\ntime.end = 1\n").empty());
    EXPECT_FALSE(error_of(kMinimal + "time.cfl_safety = 1.5\n").empty());
    EXPECT_FALSE(error_of(kMinimal + "model.kappa = 1\n").empty());
    EXPECT_FALSE(error_of(kMinimal + "ic.n1_mean = 0\nic.amplitude = 0\n").empty());
}

TEST(Config, ResolvedTextRoundTrips)
{
    const RunConfig a = parse_config_text(kMinimal + "model.chi2 = 0.123456789012345678\nic.preset = two-bump\nseed = 99\n");
    const RunConfig b = parse_config_text(to_config_text(a));
    EXPECT_EQ(to_config_text(a), to_config_text(b));
    EXPECT_EQ(a.params.chi2, b.params.chi2);
    EXPECT_EQ(b.initial.preset, InitialPreset::TwoBump);
    EXPECT_EQ(b.seed, 99U);
}

TEST(Config, InitialStatesArePositiveAndSeeded)
{
    const RunConfig cos = parse_config_text(kMinimal);
    const SimState s = build_initial_state(cos);
    EXPECT_EQ(s.grid().cell_count(), 256U);
    for (std::size_t i = 0; i < s.n1.size(); ++i) {
        EXPECT_GT(s.n1[i], 0.0);
        EXPECT_GT(s.n2[i], 0.0);
        EXPECT_GE(s.c[i], 0.0);
    }
    const RunConfig bump1 = parse_config_text(kMinimal + "ic.preset = two-bump\nseed = 1\n");
    const RunConfig bump2 = parse_config_text(kMinimal + "ic.preset = two-bump\nseed = 2\n");
    const SimState a = build_initial_state(bump1);
    const SimState b = build_initial_state(bump1);
    const SimState c = build_initial_state(bump2);
    bool differs = false;
    for (std::size_t i = 0; i < a.n1.size(); ++i) {
        EXPECT_EQ(a.n1[i], b.n1[i]);
        differs = differs || a.n1[i] != c.n1[i];
    }
    EXPECT_TRUE(differs);
}

TEST(Config, FromFileInitialCondition)
{
    const auto dir = std::filesystem::temp_directory_path() / "chemostokes_test_config_ic";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const Grid g(2, {16, 16, 1}, {1.0 / 16, 1.0 / 16, 1});
    ScalarField n1(g, 0.7);
    n1(3, 4) = 1.3;
    write_snapshot(dir / "n1.bin", "n1", n1, 0.0);
    write_snapshot(dir / "n2.bin", "n2", ScalarField(g, 0.4), 0.0);
    write_snapshot(dir / "c.bin", "c", ScalarField(g, 0.2), 0.0);
    const RunConfig cfg = parse_config_text(
        kMinimal + "ic.preset = from-file\nic.n1_file = n1.bin\nic.n2_file = n2.bin\nic.c_file = c.bin\n", dir);
    const SimState s = build_initial_state(cfg);
    EXPECT_EQ(s.n1(3, 4), 1.3);
    EXPECT_EQ(s.n2(0, 0), 0.4);

    write_snapshot(dir / "n2.bin", "n2", ScalarField(g, 0.0), 0.0);
    EXPECT_THROW(build_initial_state(cfg), ValidationError);
    std::filesystem::remove_all(dir);
}

TEST(Config, SetupCarriesEnergyWeightsForRegime)
{
    const RunConfig excl = parse_config_text(kMinimal + "model.a1 = 1.5\nmodel.a2 = 0.5\n");
    EXPECT_EQ(make_setup(excl).energy_weights.kind, EnergyCase::Exclusion);
    const RunConfig coex = parse_config_text(kMinimal + "model.a1 = 0.5\nmodel.a2 = 0.5\nlyapunov.k = 2\n");
    EXPECT_EQ(make_setup(coex).energy_weights.kind, EnergyCase::Coexistence);
    EXPECT_DOUBLE_EQ(make_setup(coex).energy_weights.k, 2.0);
}

#include "epdd/config_io.hpp"
#include "epdd/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace epdd;
namespace fs = std::filesystem;

namespace {

SimulationConfig quick()
{
    auto c = default_config();
    c.grid.nx = c.grid.ny = 21;
    derive_spacing(c);
    c.grid.dt = 0.5;
    c.pulses.pulse_count_PN = 2;
    c.pulses.off_time_tM = 10.0;
    return c;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("epdd_io_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Output, RunWritesEveryArtifact)
{
    const auto dir = scratch("run");
    const auto summary = execute_run(quick(), dir);
    EXPECT_EQ(summary.steps, 2u * (1u + 20u));
    for (const char* f : {"manifest.json", "probe_00.tsv", "ledger.tsv", "field_phi.grid", "field_E.grid",
                          "field_sigma.grid", "snapshots/snapshot_01_C_E.grid", "snapshots/snapshot_02_C_RE.grid"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_FALSE(fs::exists(dir / "snapshots/snapshot_03_C_E.grid"));

    const auto grid = slurp(dir / "snapshots/snapshot_02_C_RE.grid");
    EXPECT_NE(grid.find("# quantity: C_RE"), std::string::npos);
    EXPECT_NE(grid.find("# units: a.u."), std::string::npos);
    EXPECT_NE(grid.find("# nx: 21"), std::string::npos);
    EXPECT_NE(grid.find("# dx: 0.05 mm"), std::string::npos);
    EXPECT_NE(slurp(dir / "field_E.grid").find("# units: V/mm"), std::string::npos);
    EXPECT_NE(slurp(dir / "probe_00.tsv").find("time[s]\tC_E[a.u.]\tC_RE[a.u.]"), std::string::npos);
    EXPECT_NE(slurp(dir / "ledger.tsv").find("residual[-]"), std::string::npos);
}

TEST(Output, ManifestReproducesRun)
{
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    execute_run(quick(), a);
    execute_run(load_config(a / "manifest.json"), b);
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file())
            continue;
        const auto rel = fs::relative(entry.path(), a);
        EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
    }
}

TEST(Output, FailedRunStillWritesManifest)
{
    auto c = quick();
    c.grid.dt = 5.0;
    c.solver.allow_unstable = true;
    const auto dir = scratch("unstable");
    EXPECT_THROW(execute_run(c, dir), StabilityViolation);
    const auto m = slurp(dir / "manifest.json");
    EXPECT_NE(m.find("\"status\": \"failed\""), std::string::npos);
    EXPECT_NE(m.find("\"unstable\": true"), std::string::npos);
}

TEST(Output, UnwritableDirectoryIsIoError)
{
    try {
        execute_run(quick(), "/proc/epdd_cannot_write_here");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Output, SweepReportAndTransect)
{
    const auto dir = scratch("sweep");
    const auto report = execute_sweep(quick(), SweepAxis::PulseCount, {1.0, 2.0}, dir, 2);
    EXPECT_TRUE(report.all_ok());
    for (const char* f : {"sweep_report.json", "sweep_summary.tsv", "transect_C_RE.tsv", "member_00/manifest.json",
                          "member_01/ledger.tsv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const auto transect = slurp(dir / "transect_C_RE.tsv");
    EXPECT_NE(transect.find("x[mm]\tC_RE[a.u.]@PN=1\tC_RE[a.u.]@PN=2"), std::string::npos);
}

TEST(Output, SweepMemberFailureFailsSweep)
{
    const auto dir = scratch("sweep_fail");
    EXPECT_THROW(execute_sweep(quick(), SweepAxis::Beta, {0.1, -2.0}, dir, 1), Error);
    EXPECT_NE(slurp(dir / "sweep_report.json").find("\"status\": \"failed\""), std::string::npos);
}

TEST(Output, CompareKalamizaSinglePulseOnly)
{
    auto c = quick();
    const auto dir = scratch("kal");
    EXPECT_THROW(execute_compare_kalamiza(c, dir), ValidationError);
    c.pulses.pulse_count_PN = 1;
    const auto r = execute_compare_kalamiza(c, dir);
    EXPECT_NEAR(r.mtc.prefactor_ratio, 0.974, 1e-3);
    EXPECT_TRUE(fs::exists(dir / "kalamiza_summary.json"));
    EXPECT_TRUE(fs::exists(dir / "mtc_curves.tsv"));
    EXPECT_TRUE(fs::exists(dir / "probe_curves.tsv"));
}

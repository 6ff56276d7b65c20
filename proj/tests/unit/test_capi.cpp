// Exercises the shared library through its C header only, plus the CLI exit-code contract.

#include "epdd/epdd.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Config {
    epdd_config* p = nullptr;
    ~Config() { epdd_config_free(p); }
};

const char* kQuick = R"({
  "grid": {"nx": 21, "ny": 21, "dt": "0.5 s"},
  "pulses": {"count": 2, "off_time": "10 s"}
})";

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("epdd_capi_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text)
{
    std::ofstream(dir / name) << text;
    return dir / name;
}

int cli(const std::string& args)
{
    const std::string cmd = std::string(EPDD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(CApi, VersionAndErrors)
{
    EXPECT_STREQ(epdd_version(), "1.0.0");
    Config c;
    EXPECT_EQ(epdd_config_load("/nonexistent.json", &c.p), EPDD_IO);
    EXPECT_NE(std::string(epdd_last_error()).find("cannot read"), std::string::npos);
    EXPECT_EQ(epdd_config_parse("{", &c.p), EPDD_INVALID);
    EXPECT_EQ(epdd_config_parse(R"({"bogus": 1})", &c.p), EPDD_INVALID);
    EXPECT_EQ(epdd_config_default(nullptr), EPDD_BAD_ARGUMENT);
    EXPECT_EQ(epdd_exit_code(EPDD_IO), 3);
    EXPECT_EQ(epdd_exit_code(EPDD_RUNTIME), 2);
    EXPECT_EQ(epdd_exit_code(EPDD_INVALID), 1);
}

TEST(CApi, ValidateAndSet)
{
    Config c;
    ASSERT_EQ(epdd_config_default(&c.p), EPDD_OK);
    double limit = 0.0;
    ASSERT_EQ(epdd_config_validate(c.p, &limit), EPDD_OK);
    EXPECT_NEAR(limit, 0.025, 1e-15);
    EXPECT_NEAR(epdd_stability_limit(0.02, 0.01, 1e-3), 0.04, 1e-15);

    ASSERT_EQ(epdd_config_set(c.p, "grid.dt", "\"0.2 s\""), EPDD_OK);
    EXPECT_EQ(epdd_config_validate(c.p, nullptr), EPDD_INVALID);
    EXPECT_NE(std::string(epdd_last_error()).find("dt violates stability bound"), std::string::npos);
    ASSERT_EQ(epdd_config_set_allow_unstable(c.p, 1), EPDD_OK);
    EXPECT_EQ(epdd_config_validate(c.p, nullptr), EPDD_OK);

    EXPECT_EQ(epdd_config_set(c.p, "grid.nx", "51"), EPDD_OK);
    EXPECT_EQ(epdd_config_set(c.p, "drug.permeability", "1e-3 mm/s"), EPDD_OK);
    EXPECT_EQ(epdd_config_set(c.p, "drug.nothing", "1"), EPDD_BAD_ARGUMENT);
    EXPECT_EQ(epdd_config_set(c.p, "nodot", "1"), EPDD_BAD_ARGUMENT);
    EXPECT_EQ(epdd_config_set(c.p, "drug.permeability", "0.001"), EPDD_BAD_ARGUMENT);

    std::size_t needed = 0;
    ASSERT_EQ(epdd_config_to_json(c.p, nullptr, 0, &needed), EPDD_OK);
    std::string text(needed, '\0');
    ASSERT_EQ(epdd_config_to_json(c.p, text.data(), text.size(), &needed), EPDD_OK);
    EXPECT_NE(text.find("\"nx\": 51"), std::string::npos);
    EXPECT_NE(text.find("\"dx\": \"0.02 mm\""), std::string::npos);
    EXPECT_NE(text.find("0.001 mm/s"), std::string::npos);
}

TEST(CApi, KineticsScalars)
{
    Config c;
    ASSERT_EQ(epdd_config_default(&c.p), EPDD_OK);
    EXPECT_NEAR(epdd_conductivity(c.p, 58.0), 0.241 / 9.0, 1e-15);
    EXPECT_EQ(epdd_pore_fraction(c.p, 65.8), 0.5);
    EXPECT_NEAR(epdd_mtc(c.p, 0.0, 60.0), 3.1575e-3, 1e-7);
    EXPECT_NEAR(epdd_mtc_kalamiza(c.p, 0.0), 0.00324, 1e-15);
}

TEST(CApi, RunAndCompare)
{
    const auto dir = scratch("run");
    Config c;
    ASSERT_EQ(epdd_config_parse(kQuick, &c.p), EPDD_OK);
    epdd_run_summary s{};
    ASSERT_EQ(epdd_run(c.p, (dir / "run").c_str(), &s), EPDD_OK) << epdd_last_error();
    EXPECT_EQ(s.steps, 42u);
    EXPECT_EQ(s.unstable, 0);
    EXPECT_LE(s.max_residual, 1e-8);
    EXPECT_TRUE(fs::exists(dir / "run" / "manifest.json"));

    // Pulse count set explicitly to 2: comparison refused.
    double ratio = 0.0, gap = 0.0;
    EXPECT_EQ(epdd_compare_kalamiza(c.p, (dir / "cmp").c_str(), &ratio, &gap), EPDD_INVALID);

    Config d;
    ASSERT_EQ(epdd_config_parse(R"({"grid": {"nx": 21, "ny": 21, "dt": "0.5 s"}, "pulses": {"off_time": "10 s"}})",
                                &d.p),
              EPDD_OK);
    ASSERT_EQ(epdd_compare_kalamiza(d.p, (dir / "cmp").c_str(), &ratio, &gap), EPDD_OK) << epdd_last_error();
    EXPECT_NEAR(ratio, 0.974, 1e-3);
    EXPECT_GT(gap, 0.0);
}

TEST(CApi, Sweep)
{
    const auto dir = scratch("sweep");
    Config c;
    ASSERT_EQ(epdd_config_parse(kQuick, &c.p), EPDD_OK);
    const double values[] = {0.0, 0.5};
    EXPECT_EQ(epdd_sweep(c.p, "beta", values, 2, dir.c_str(), 2), EPDD_OK) << epdd_last_error();
    EXPECT_EQ(epdd_sweep(c.p, "beta", values, 0, dir.c_str(), 1), EPDD_BAD_ARGUMENT);
    EXPECT_EQ(epdd_sweep(c.p, "gamma", values, 2, dir.c_str(), 1), EPDD_INVALID);
}

TEST(Cli, ExitCodes)
{
    const auto dir = scratch("cli");
    const auto quick = write_file(dir, "quick.json", kQuick);
    const auto unstable = write_file(dir, "unstable.json", R"({"grid": {"dt": "0.2 s"}})");
    const auto q = quick.string();
    const auto o = (dir / "out").string();

    EXPECT_EQ(cli("run " + q + " -o " + o), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
    EXPECT_EQ(cli("run " + (dir / "out" / "manifest.json").string() + " -o " + o + "2"), 0);
    EXPECT_EQ(cli("run " + unstable.string() + " -o " + o), 1);
    EXPECT_EQ(cli("run " + (dir / "missing.json").string() + " -o " + o), 3);
    EXPECT_EQ(cli("validate " + q), 0);
    EXPECT_EQ(cli("validate " + unstable.string()), 1);
    EXPECT_EQ(cli("sweep " + q + " --axis beta --values '' -o " + o), 1);
    EXPECT_EQ(cli("sweep " + q + " --axis beta --values 0,0.1 --threads 2 -o " + (dir / "sw").string()), 0);
    EXPECT_EQ(cli("sweep " + q + " --axis beta --values 0,-1 -o " + (dir / "swbad").string()), 2);
    EXPECT_EQ(cli("compare-kalamiza " + q + " -o " + (dir / "cmp").string()), 1);
    EXPECT_EQ(cli("compare-kalamiza " + q + " --set pulses.count=1 -o " + (dir / "cmp").string()), 0);
    EXPECT_EQ(cli("run " + q + " --set 'grid.dt=5 s' --allow-unstable -o " + (dir / "boom").string()), 2);
    EXPECT_EQ(cli("bogus"), 1);
    EXPECT_EQ(cli("defaults"), 0);
}

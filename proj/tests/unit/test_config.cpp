#include "epdd/config.hpp"
#include "epdd/config_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace epdd;

namespace {

bool mentions(const ValidationError& e, std::string_view text)
{
    for (const auto& v : e.violations())
        if (v.reason.find(text) != std::string::npos)
            return true;
    return false;
}

}  // namespace

TEST(StabilityLimit, ReferenceGrid)
{
    EXPECT_NEAR(stability_limit(0.01, 0.01, 1e-3), 0.025, 1e-15);
}

TEST(StabilityLimit, AnisotropicGrid)
{
    EXPECT_NEAR(stability_limit(0.02, 0.01, 1e-3), 0.04, 1e-15);
}

TEST(StabilityLimit, SquareCellReducesToQuarter)
{
    for (double dx : {0.003, 0.01, 0.07})
        for (double D : {1e-4, 1e-3, 2.5e-2})
            EXPECT_NEAR(stability_limit(dx, dx, D), dx * dx / (4.0 * D), 1e-14 * dx * dx / D);
}

TEST(StabilityLimit, SymmetricAndInverseInDiffusivity)
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> h(1e-3, 0.1);
    std::uniform_real_distribution<double> d(1e-5, 1e-1);
    for (int k = 0; k < 200; ++k) {
        const double dx = h(rng), dy = h(rng), D = d(rng);
        EXPECT_DOUBLE_EQ(stability_limit(dx, dy, D), stability_limit(dy, dx, D));
        EXPECT_NEAR(stability_limit(dx, dy, 2.0 * D), 0.5 * stability_limit(dx, dy, D),
                    1e-15 * stability_limit(dx, dy, D));
    }
}

TEST(Validate, DefaultsAccepted)
{
    const auto v = validate(default_config());
    EXPECT_NEAR(v.stability_limit(), 0.025, 1e-15);
    EXPECT_FALSE(v.unstable());
}

TEST(Validate, LargeStepRejected)
{
    auto c = default_config();
    c.grid.dt = 0.2;
    try {
        validate(c);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_TRUE(mentions(e, "dt violates stability bound"));
    }
}

TEST(Validate, LargeStepAllowedWhenForced)
{
    auto c = default_config();
    c.grid.dt = 0.2;
    c.solver.allow_unstable = true;
    const auto v = validate(c);
    EXPECT_TRUE(v.unstable());
    EXPECT_FALSE(v.warnings().empty());
}

TEST(Validate, PorosityBounds)
{
    for (double eps : {0.0, 1.0, -0.2, 1.5}) {
        auto c = default_config();
        c.tissue.porosity_eps = eps;
        try {
            validate(c);
            FAIL() << "porosity " << eps << " accepted";
        } catch (const ValidationError& e) {
            EXPECT_TRUE(mentions(e, "porosity must be in (0,1)"));
        }
    }
}

TEST(Validate, ReportsEveryViolation)
{
    auto c = default_config();
    c.tissue.porosity_eps = 0.0;
    c.grid.dt = 1.0;
    c.drug.diffusivity_D = -1.0;
    try {
        validate(c);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_GE(e.violations().size(), 2u);
    }
}

TEST(Validate, Idempotent)
{
    auto c = default_config();
    c.boundary.beta = 0.37;
    const auto once = validate(c);
    const auto twice = validate(once.config());
    EXPECT_EQ(once.config(), twice.config());
    EXPECT_EQ(once.stability_limit(), twice.stability_limit());
}

TEST(Units, Conversions)
{
    EXPECT_DOUBLE_EQ(parse_quantity("50 um", Dimension::Length), 0.05);
    EXPECT_DOUBLE_EQ(parse_quantity("1 ms", Dimension::Time), 1e-3);
    EXPECT_DOUBLE_EQ(parse_quantity("600 V/cm", Dimension::Field), 60.0);
    EXPECT_DOUBLE_EQ(parse_quantity("60 kV/m", Dimension::Field), 60.0);
    EXPECT_DOUBLE_EQ(parse_quantity("1e-9 m^2/s", Dimension::Diffusivity), 1e-3);
    EXPECT_DOUBLE_EQ(parse_quantity("5e-7 m/s", Dimension::Velocity), 5e-4);
    EXPECT_DOUBLE_EQ(parse_quantity("100 1/m", Dimension::InverseLength), 0.1);
    EXPECT_DOUBLE_EQ(parse_quantity("241 mS/m", Dimension::Conductivity), 0.241);
}

TEST(Units, RejectsWrongDimension)
{
    EXPECT_THROW(parse_quantity("1 s", Dimension::Length), Error);
    EXPECT_THROW(parse_quantity("abc mm", Dimension::Length), Error);
    EXPECT_THROW(parse_quantity("1", Dimension::Length), Error);
}

TEST(ConfigFile, EmptyObjectGivesDefaults)
{
    EXPECT_EQ(parse_config("{}"), default_config());
}

TEST(ConfigFile, RoundTripIsBitExact)
{
    const auto c = default_config();
    EXPECT_EQ(parse_config(serialize_config(c)), c);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        auto r = default_config();
        r.tissue.porosity_eps = u(rng);
        r.tissue.sigma_max = u(rng);
        r.drug.permeability_P = u(rng) * 1e-3;
        r.electro.resealing_tau = 1.0 + 100.0 * u(rng);
        r.boundary.beta = u(rng);
        r.grid.dt = 0.025 * u(rng);
        r.output.snapshot_times = {u(rng) * 100.0, 200.0 + u(rng)};
        r.output.probes = {{u(rng), u(rng)}};
        const auto back = parse_config(serialize_config(r));
        EXPECT_EQ(back, r);
        EXPECT_EQ(std::signbit(back.boundary.beta), std::signbit(r.boundary.beta));
    }
}

TEST(ConfigFile, UnknownKeysRejected)
{
    EXPECT_THROW(parse_config(R"({"tissue": {"lenght": "1 mm"}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"extra": 1})"), ValidationError);
}

TEST(ConfigFile, BareNumberForDimensionedFieldRejected)
{
    try {
        parse_config(R"({"drug": {"permeability": 5e-4}})");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_TRUE(mentions(e, "unit"));
    }
}

TEST(ConfigFile, SpacingDerivedFromLength)
{
    const auto c = parse_config(R"({"tissue": {"length": "2 mm"}, "grid": {"nx": 51, "ny": 21}})");
    EXPECT_DOUBLE_EQ(c.grid.dx, 0.04);
    EXPECT_DOUBLE_EQ(c.grid.dy, 0.1);
}

TEST(ConfigFile, ManifestAccepted)
{
    auto c = default_config();
    c.boundary.beta = 0.5;
    const std::string manifest =
        R"({"manifest_version": 1, "status": "ok", "config": )" + serialize_config(c) + "}";
    EXPECT_EQ(parse_config(manifest), c);
}

TEST(ConfigFile, MalformedJson)
{
    EXPECT_THROW(parse_config("{"), ValidationError);
}

TEST(ConfigFile, MissingFileIsIoError)
{
    try {
        load_config("/nonexistent/epdd.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

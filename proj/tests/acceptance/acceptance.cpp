// Acceptance checks for the reference setup. Prints one PASS/FAIL line per
// criterion and exits non-zero if any criterion fails.

#include "epdd/config_io.hpp"
#include "epdd/field_solver.hpp"
#include "epdd/io.hpp"
#include "epdd/kinetics.hpp"
#include "epdd/oracles.hpp"
#include "epdd/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace epdd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what)
    {
        if (!detail.empty())
            detail += "; ";
        detail += what + (ok ? "" : " [X]");
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunOutput run_reference(SimulationConfig c)
{
    const auto v = validate(c);
    return run_pulses(v, solve_field(v));
}

// ---------------------------------------------------------------------------

Outcome field_solve()
{
    Outcome o;
    const auto v = validate(default_config());
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_field(v);
    const double elapsed = seconds_since(t0);
    double dev = 0.0;
    for (double e : sol.E_mag.values())
        dev = std::max(dev, std::abs(e - 60.0) / 60.0);
    o.check(dev <= 1e-8, "max |E-60|/60 = " + fmt("%.2e", dev) + " (<= 1e-8)");
    o.check(elapsed <= 5.0, "101x101 solve " + fmt("%.3f", elapsed) + " s (<= 5 s)");
    return o;
}

Outcome kinetics()
{
    Outcome o;
    const SimulationConfig c;
    const double s58 = conductivity(58.0, c.tissue);
    const double f65 = pore_fraction(65.8, c.electro);
    const double f60 = pore_fraction(60.0, c.electro);
    const double mu = mtc(0.0, f60, MtcParams::from(c));
    const double k = mtc_kalamiza_prefactor(KalamizaParams::from(c));
    o.check(std::abs(s58 - 0.0267778) <= 5e-8, "sigma(58) = " + fmt("%.7f", s58));
    o.check(f65 == 0.5, "f_p(65.8) = " + fmt("%.17g", f65));
    o.check(std::abs(f60 - 0.31575) <= 1e-5, "f_p(60) = " + fmt("%.6f", f60));
    o.check(std::abs(mu - 3.1575e-3) <= 1e-7, "mu(0) = " + fmt("%.7e", mu));
    char two[16];
    std::snprintf(two, sizeof two, "%.1e", k);
    o.check(std::string(two) == "3.2e-03", "reference prefactor " + fmt("%.5f", k) + " -> " + two);
    return o;
}

Outcome conservation()
{
    Outcome o;
    auto closed = default_config();
    closed.boundary.beta = 0.0;
    const auto r0 = run_reference(closed);
    o.check(r0.stats.steps >= 50000, std::to_string(r0.stats.steps) + " steps");
    o.check(r0.ledger.max_residual() <= 1e-10, "beta=0 drift " + fmt("%.2e", r0.ledger.max_residual()) + " (<= 1e-10)");
    const auto r1 = run_reference(default_config());
    o.check(r1.ledger.max_residual() <= 1e-8,
            "beta=0.1 ledger residual " + fmt("%.2e", r1.ledger.max_residual()) + " (<= 1e-8)");
    return o;
}

// Transport run from a uniform state compared with the closed form at the end of the schedule.
double well_mixed_error(double dt)
{
    auto c = default_config();
    c.tissue.length_L = 0.1;
    c.grid.nx = c.grid.ny = 11;
    derive_spacing(c);
    c.grid.dt = dt;
    c.boundary.beta = 0.0;
    c.pulses.pulse_count_PN = 1;
    c.output.probes = {{0.05, 0.05}};
    c.drug.injection_center = {0.0, 0.05};
    c.output.probe_stride = 1e9;
    const auto v = validate(c);
    const double mu0 = 3.1575e-3;
    ConcentrationState s;
    s.C_E = ScalarField2D(11, 11, c.grid.dx, c.grid.dy, Quantity::Concentration, 1.0);
    s.C_RE = ScalarField2D(11, 11, c.grid.dx, c.grid.dy, Quantity::Concentration, 0.0);
    const ScalarField2D mu(11, 11, c.grid.dx, c.grid.dy, Quantity::Concentration, mu0);
    const auto run = run_schedule(v, mu, s);
    const WellMixedParams p{c.tissue.porosity_eps, mu0, c.electro.resealing_tau, 1.0, 0.0};
    const auto [ce, cre] = well_mixed_schedule(p, c.pulses, run.final_state.time);
    return std::max(std::abs(run.final_state.C_E(5, 5) - ce) / ce, std::abs(run.final_state.C_RE(5, 5) - cre) / cre);
}

Outcome oracles()
{
    Outcome o;
    std::mt19937_64 rng(0x5eed2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> n(3, 11);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        NaiveStepParams p;
        const std::size_t nx = n(rng), ny = n(rng);
        p.diffusivity = 1e-4 + 1e-2 * u(rng);
        p.dx = 0.01 + 0.19 * u(rng);
        p.dy = 0.01 + 0.19 * u(rng);
        p.dt = 0.5 * stability_limit(p.dx, p.dy, p.diffusivity) * (0.05 + 0.95 * u(rng));
        p.porosity = 0.05 + 0.9 * u(rng);
        p.mu = 0.2 * u(rng) / (std::max((1.0 - p.porosity) / p.porosity, 1.0) * p.dt);
        p.beta = u(rng);
        p.literal_robin = u(rng) < 0.3;
        ConcentrationState s;
        s.C_E = ScalarField2D(nx, ny, p.dx, p.dy, Quantity::Concentration);
        s.C_RE = s.C_E;
        for (double& v : s.C_E.values())
            v = u(rng);
        for (double& v : s.C_RE.values())
            v = u(rng);
        const auto ref = brute_force_step(s, p);
        ConcentrationState fast;
        const double mu[1] = {p.mu};
        ftcs_step(s, fast, mu, StepCoefficients::make(p.diffusivity, p.dx, p.dy, p.dt, p.porosity),
                  RobinClosure{p.beta, p.literal_robin ? RobinConvention::Literal : RobinConvention::OutwardLoss});
        for (std::size_t k = 0; k < s.C_E.size(); ++k) {
            worst = std::max(worst, std::abs(ref.C_E.values()[k] - fast.C_E.values()[k]));
            worst = std::max(worst, std::abs(ref.C_RE.values()[k] - fast.C_RE.values()[k]));
        }
    }
    o.check(worst <= 1e-13, "1000 random steps vs naive: max diff " + fmt("%.1e", worst) + " (<= 1e-13)");

    const double limit = stability_limit(0.01, 0.01, 1e-3);
    std::vector<double> err;
    for (double f : {10.0, 20.0, 40.0, 80.0})
        err.push_back(well_mixed_error(limit / f));
    o.check(err[0] <= 1e-3, "well-mixed error at limit/10 " + fmt("%.2e", err[0]) + " (<= 1e-3)");
    bool orders_ok = true;
    std::string orders;
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
        const double p = std::log2(err[k] / err[k + 1]);
        orders += (k ? "," : "") + fmt("%.3f", p);
        orders_ok = orders_ok && p >= 0.9 && p <= 1.1;
    }
    o.check(orders_ok, "observed dt orders " + orders + " (0.9..1.1)");
    return o;
}

Outcome probe_merge()
{
    Outcome o;
    const auto run = run_reference(default_config());
    const auto& p = run.probes.front();
    const auto peak_it = std::max_element(p.C_E.begin(), p.C_E.end());
    const double peak = *peak_it;
    const bool rises_then_falls = peak > p.C_E.front() && peak > p.C_E.back() && peak_it != p.C_E.end() - 1;
    o.check(rises_then_falls, "C_E peak " + fmt("%.4f", peak) + " at t=" +
                                  fmt("%.0f s", p.time[static_cast<std::size_t>(peak_it - p.C_E.begin())]) +
                                  ", final " + fmt("%.4f", p.C_E.back()));
    const double gap = std::abs(p.C_E.back() - p.C_RE.back()) / peak;
    o.check(gap <= 0.01, "final |C_E-C_RE|/peak = " + fmt("%.4f", gap) + " (<= 0.01)");
    return o;
}

template <class T>
bool strictly(const std::vector<T>& v, std::function<bool(T, T)> order)
{
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
        if (!order(v[k], v[k + 1]))
            return false;
    return true;
}

std::string list(const std::vector<double>& v, const char* f = "%.5g")
{
    std::string s;
    for (double x : v)
        s += (s.empty() ? "" : ",") + fmt(f, x);
    return s;
}

Outcome orderings()
{
    Outcome o;
    const auto less = std::function<bool(double, double)>([](double a, double b) { return a < b; });
    const auto greater = std::function<bool(double, double)>([](double a, double b) { return a > b; });

    const auto beta = run_sweep(default_config(), SweepAxis::Beta, {0.0, 0.05, 0.1, 0.5});
    std::vector<double> ics;
    for (const auto& m : beta.members)
        ics.push_back(m.ics_mass);
    o.check(beta.all_ok() && strictly(ics, greater), "ICS mass vs beta {0,0.05,0.1,0.5}: " + list(ics));

    // Early uptake: probe C_RE at the end of the first cycle.
    auto early = default_config();
    early.pulses.pulse_count_PN = 1;
    std::vector<double> cre;
    for (double P : {2.5e-4, 5e-4, 1e-3}) {
        early.drug.permeability_P = P;
        cre.push_back(run_reference(early).probes.front().C_RE.back());
    }
    o.check(strictly(cre, less), "C_RE(0.5,0.5) at 100 s vs P {2.5e-4,5e-4,1e-3}: " + list(cre));

    auto closed = default_config();
    closed.boundary.beta = 0.0;
    const auto pn = run_sweep(closed, SweepAxis::PulseCount, {1, 5, 10, 20});
    std::vector<double> pn_ics, cov;
    for (const auto& m : pn.members) {
        pn_ics.push_back(m.ics_mass);
        cov.push_back(m.cov);
    }
    o.check(pn.all_ok() && strictly(pn_ics, less), "ICS mass vs PN {1,5,10,20} at beta=0: " + list(pn_ics));
    o.check(pn.all_ok() && strictly(cov, greater), "CoV(C_RE) vs PN: " + list(cov, "%.4f"));
    return o;
}

Outcome stability_guard()
{
    Outcome o;
    auto c = default_config();
    const double limit = validate(c).stability_limit();
    o.check(std::abs(limit - 0.025) <= 1e-15, "limit " + fmt("%.17g", limit) + " s");
    c.grid.dt = 0.2;
    bool rejected = false;
    try {
        validate(c);
    } catch (const ValidationError& e) {
        rejected = std::string(e.what()).find("dt violates stability bound") != std::string::npos;
    }
    o.check(rejected, "dt=0.2 s rejected");

    c.solver.allow_unstable = true;
    const auto dir = fs::temp_directory_path() / "epdd_acceptance_unstable";
    fs::remove_all(dir);
    std::string outcome;
    bool safe = false;
    try {
        const auto s = execute_run(c, dir);
        std::ifstream in(dir / "manifest.json");
        std::stringstream m;
        m << in.rdbuf();
        safe = s.unstable && m.str().find("\"unstable\": true") != std::string::npos;
        outcome = "completed with unstable flag";
    } catch (const StabilityViolation& e) {
        std::ifstream in(dir / "manifest.json");
        std::stringstream m;
        m << in.rdbuf();
        safe = m.str().find("\"status\": \"failed\"") != std::string::npos;
        outcome = "aborted: " + std::string(e.what());
    }
    o.check(safe, "--allow-unstable run " + outcome);
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    Outcome o;
    const auto root = fs::temp_directory_path() / "epdd_acceptance_det";
    fs::remove_all(root);
    execute_run(default_config(), root / "seed");
    const auto manifest = root / "seed" / "manifest.json";
    execute_run(load_config(manifest), root / "a");
    execute_run(load_config(manifest), root / "b");
    std::size_t files = 0, same = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
        if (!e.is_regular_file())
            continue;
        ++files;
        const auto rel = fs::relative(e.path(), root / "a");
        if (slurp(e.path()) == slurp(root / "b" / rel) && slurp(e.path()) == slurp(root / "seed" / rel))
            ++same;
    }
    o.check(files > 0 && same == files, std::to_string(same) + "/" + std::to_string(files) + " files bit-identical");
    fs::remove_all(root);
    return o;
}

}  // namespace

int main()
{
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"field solve", field_solve},
        {"kinetics scalars", kinetics},
        {"conservation", conservation},
        {"oracle equivalence", oracles},
        {"probe profiles merge", probe_merge},
        {"monotonic orderings", orderings},
        {"stability guard", stability_guard},
        {"determinism", determinism},
    };

    const auto start = std::chrono::steady_clock::now();
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %d. %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%d criteria passed in %.1f s\n", index - failed, index, seconds_since(start));
    return failed == 0 ? 0 : 1;
}

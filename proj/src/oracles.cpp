#include "epdd/oracles.hpp"

#include "epdd/field_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace epdd {

std::pair<double, double> well_mixed_from_integral(const WellMixedParams& p, double integral)
{
    const double eps = p.porosity_eps;
    const double mean = eps * p.C_E0 + (1.0 - eps) * p.C_RE0;
    // 1 + (1-eps)/eps = 1/eps
    const double gap = (p.C_E0 - p.C_RE0) * std::exp(-integral / eps);
    return {mean + (1.0 - eps) * gap, mean - eps * gap};
}

std::pair<double, double> well_mixed_closed_form(const WellMixedParams& p, double t)
{
    return well_mixed_from_integral(p, mtc_integral(t, p.mu0, p.tau));
}

double schedule_mtc_integral(const PulseSchedule& schedule, double mu0, double tau, double t)
{
    double total = 0.0;
    for (int k = 0; k < schedule.pulse_count_PN; ++k) {
        const double start = static_cast<double>(k) * schedule.cycle_length();
        if (t <= start)
            break;
        const double on = std::min(t - start, schedule.on_time_tep);
        total += mu0 * on;
        const double off = std::clamp(t - start - schedule.on_time_tep, 0.0, schedule.off_time_tM);
        total += mtc_integral(off, mu0, tau);
    }
    return total;
}

std::pair<double, double> well_mixed_schedule(const WellMixedParams& p, const PulseSchedule& schedule, double t)
{
    return well_mixed_from_integral(p, schedule_mtc_integral(schedule, p.mu0, p.tau, t));
}

ConcentrationState brute_force_step(const ConcentrationState& state, const NaiveStepParams& p)
{
    const std::size_t nx = state.C_E.nx();
    const std::size_t ny = state.C_E.ny();
    if (nx > 11 || ny > 11 || nx < 3 || ny < 3)
        throw Error(ErrorKind::Validation, "brute_force_step supports grids from 3x3 up to 11x11");

    const double a = p.diffusivity * p.dt / (p.dx * p.dx);
    const double c = p.diffusivity * p.dt / (p.dy * p.dy);
    const double k = (1.0 - p.porosity) / p.porosity;
    const double b = 1.0 - (2.0 * p.diffusivity * (1.0 / (p.dx * p.dx) + 1.0 / (p.dy * p.dy)) + k * p.mu) * p.dt;
    const double d = k * p.mu * p.dt;
    const double far_sign = p.literal_robin ? -1.0 : 1.0;

    // padded[i + 1][j + 1] holds C_E(i, j); the outer ring holds ghost values.
    std::vector<std::vector<double>> padded(nx + 2, std::vector<double>(ny + 2, 0.0));
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            padded[i + 1][j + 1] = state.C_E(i, j);
    for (std::size_t j = 0; j < ny; ++j) {
        padded[0][j + 1] = state.C_E(1, j) - 2.0 * p.dx * p.beta * state.C_E(0, j);
        padded[nx + 1][j + 1] = state.C_E(nx - 2, j) - 2.0 * p.dx * p.beta * far_sign * state.C_E(nx - 1, j);
    }
    for (std::size_t i = 0; i < nx; ++i) {
        padded[i + 1][0] = state.C_E(i, 1) - 2.0 * p.dy * p.beta * state.C_E(i, 0);
        padded[i + 1][ny + 1] = state.C_E(i, ny - 2) - 2.0 * p.dy * p.beta * far_sign * state.C_E(i, ny - 1);
    }

    ConcentrationState next = state;
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const double east = padded[i + 2][j + 1];
            const double west = padded[i][j + 1];
            const double north = padded[i + 1][j + 2];
            const double south = padded[i + 1][j];
            const double here = padded[i + 1][j + 1];
            const double cell = state.C_RE(i, j);
            next.C_E(i, j) = a * east + a * west + b * here + c * north + c * south + d * cell;
            next.C_RE(i, j) = cell + p.mu * p.dt * (here - cell);
        }
    }
    next.time = state.time + p.dt;
    return next;
}

MtcComparison compare_mtc_curves(double fp, const MtcParams& model, const KalamizaParams& reference, double horizon,
                                 std::size_t samples)
{
    MtcComparison out;
    out.prefactor_model = mtc_prefactor(fp, model);
    out.prefactor_reference = mtc_kalamiza_prefactor(reference);
    out.prefactor_ratio = out.prefactor_model / out.prefactor_reference;
    samples = std::max<std::size_t>(samples, 1);
    for (std::size_t s = 0; s <= samples; ++s) {
        const double t = horizon * static_cast<double>(s) / static_cast<double>(samples);
        const double m = mtc(t, fp, model);
        const double r = mtc_kalamiza(t, reference);
        out.time.push_back(t);
        out.mu_model.push_back(m);
        out.mu_reference.push_back(r);
        double gap = 0.0;
        if (r != 0.0)
            gap = std::abs(m - r) / r;
        else if (m != 0.0)
            gap = INFINITY;
        out.max_relative_gap = std::max(out.max_relative_gap, gap);
    }
    return out;
}

double uniformity(const ScalarField2D& field)
{
    const auto v = field.values();
    if (v.empty())
        throw Error(ErrorKind::DegenerateField, "empty field");
    double sum = 0.0;
    for (double x : v)
        sum += x;
    const double mean = sum / static_cast<double>(v.size());
    if (mean == 0.0)
        throw Error(ErrorKind::DegenerateField, "field mean is zero");
    double sq = 0.0;
    for (double x : v)
        sq += (x - mean) * (x - mean);
    return std::sqrt(sq / static_cast<double>(v.size())) / std::abs(mean);
}

SweepAxis parse_sweep_axis(const std::string& name)
{
    if (name == "beta")
        return SweepAxis::Beta;
    if (name == "P" || name == "permeability")
        return SweepAxis::Permeability;
    if (name == "PN" || name == "pulses")
        return SweepAxis::PulseCount;
    throw Error(ErrorKind::Validation, "unknown sweep axis \"" + name + "\" (expected beta, P or PN)");
}

std::string sweep_axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::Beta: return "beta";
    case SweepAxis::Permeability: return "P";
    case SweepAxis::PulseCount: return "PN";
    }
    return "";
}

std::string sweep_axis_units(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::Beta: return "1/mm";
    case SweepAxis::Permeability: return "mm/s";
    case SweepAxis::PulseCount: return "-";
    }
    return "";
}

SimulationConfig with_axis_value(SimulationConfig base, SweepAxis axis, double value)
{
    switch (axis) {
    case SweepAxis::Beta: base.boundary.beta = value; break;
    case SweepAxis::Permeability: base.drug.permeability_P = value; break;
    case SweepAxis::PulseCount:
        if (value != std::floor(value) || value < 1.0 || value > 1e6)
            throw Error(ErrorKind::Validation, "pulse count must be a positive integer");
        base.pulses.pulse_count_PN = static_cast<int>(value);
        break;
    }
    return base;
}

bool SweepReport::all_ok() const noexcept
{
    return std::all_of(members.begin(), members.end(), [](const SweepMember& m) { return m.ok; });
}

SweepMember summarize_run(const ValidatedConfig& config, const RunOutput& run)
{
    const auto& c = config.config();
    const auto& s = run.final_state;
    SweepMember m;
    m.ok = true;
    m.final_time = s.time;
    m.ecs_mass = ecs_mass(s, c.tissue.porosity_eps);
    m.ics_mass = ics_mass(s, c.tissue.porosity_eps);
    m.boundary_loss = run.ledger.boundary_loss.empty() ? 0.0 : run.ledger.boundary_loss.back();
    try {
        m.cov = uniformity(s.C_RE);
    } catch (const Error&) {
        m.cov = NAN;
    }
    if (!run.probes.empty() && !run.probes.front().time.empty()) {
        const auto& p = run.probes.front();
        m.probe_peak_C_E = *std::max_element(p.C_E.begin(), p.C_E.end());
        m.probe_final_C_E = p.C_E.back();
        m.probe_final_C_RE = p.C_RE.back();
    }
    const auto row = static_cast<std::size_t>(std::llround(0.5 * c.tissue.length_L / c.grid.dy));
    for (std::size_t i = 0; i < s.C_RE.nx(); ++i) {
        m.transect_x.push_back(static_cast<double>(i) * c.grid.dx);
        m.transect_C_RE.push_back(s.C_RE(i, row));
    }
    return m;
}

SweepReport run_sweep(const SimulationConfig& base, SweepAxis axis, const std::vector<double>& values,
                      unsigned threads, const SweepMemberSink& sink)
{
    if (values.empty())
        throw Error(ErrorKind::Validation, "sweep needs at least one value");

    // The field does not depend on any sweep axis, so it is solved once.
    const ValidatedConfig base_valid = validate(base);
    const FieldSolution field = solve_field(base_valid);

    SweepReport report;
    report.axis = axis;
    report.values = values;
    report.members.resize(values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < values.size(); k = next++) {
            SweepMember& member = report.members[k];
            try {
                const ValidatedConfig cfg = validate(with_axis_value(base, axis, values[k]));
                const RunOutput run = run_pulses(cfg, field);
                member = summarize_run(cfg, run);
                if (sink)
                    sink(k, cfg, run);
            } catch (const std::exception& e) {
                member = SweepMember{};
                member.ok = false;
                member.error = e.what();
            }
            member.value = values[k];
        }
    };

    const unsigned n = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(values.size()));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t)
            pool.emplace_back(worker);
    }
    return report;
}

}  // namespace epdd

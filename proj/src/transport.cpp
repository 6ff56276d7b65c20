#include "epdd/transport.hpp"

#include "epdd/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace epdd {

StepCoefficients StepCoefficients::make(double diffusivity, double dx, double dy, double dt, double porosity)
{
    StepCoefficients s;
    s.a = diffusivity * dt / (dx * dx);
    s.c = diffusivity * dt / (dy * dy);
    s.dt = dt;
    s.exchange = (1.0 - porosity) / porosity;
    s.diffusivity = diffusivity;
    return s;
}

namespace {

template <bool Uniform>
StepReport step_kernel(const ConcentrationState& cur, ConcentrationState& next, std::span<const double> mu,
                       const StepCoefficients& k, const RobinClosure& robin)
{
    const std::size_t nx = cur.C_E.nx();
    const std::size_t ny = cur.C_E.ny();
    const double dx = cur.C_E.dx();
    const double dy = cur.C_E.dy();
    const double* ce = cur.C_E.values().data();
    const double* re = cur.C_RE.values().data();
    double* out_e = next.C_E.values().data();
    double* out_r = next.C_RE.values().data();

    const double a = k.a;
    const double c = k.c;
    const double dt = k.dt;
    const double base_b = 1.0 - 2.0 * a - 2.0 * c;
    const double gx_lo = 2.0 * dx * robin.beta * robin.sign_low();
    const double gx_hi = 2.0 * dx * robin.beta * robin.sign_high();
    const double gy_lo = 2.0 * dy * robin.beta * robin.sign_low();
    const double gy_hi = 2.0 * dy * robin.beta * robin.sign_high();

    std::vector<double> south_ghost(nx);
    std::vector<double> north_ghost(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        south_ghost[i] = ce[nx + i] - gy_lo * ce[i];
        north_ghost[i] = ce[(ny - 2) * nx + i] - gy_hi * ce[(ny - 1) * nx + i];
    }

    StepReport report;
    const double new_time = cur.time + dt;
    auto settle = [&](double& v, std::size_t node) {
        if (v >= 0.0)
            return;
        if (v >= kNegativeTolerance) {
            v = 0.0;
            ++report.clamped;
            return;
        }
        throw StabilityViolation(new_time, v, node);
    };

    const double mu_u = Uniform ? mu[0] : 0.0;
    const double b_u = Uniform ? base_b - k.exchange * mu_u * dt : 0.0;
    const double d_u = Uniform ? k.exchange * mu_u * dt : 0.0;

    for (std::size_t j = 0; j < ny; ++j) {
        const double* row = ce + j * nx;
        const double* south = j == 0 ? south_ghost.data() : row - nx;
        const double* north = j + 1 == ny ? north_ghost.data() : row + nx;
        const std::size_t base = j * nx;

        auto update = [&](std::size_t i, double west, double east) {
            const std::size_t node = base + i;
            const double m = Uniform ? mu_u : mu[node];
            const double b = Uniform ? b_u : base_b - k.exchange * m * dt;
            const double d = Uniform ? d_u : k.exchange * m * dt;
            const double C = row[i];
            const double R = re[node];
            double ve = a * (west + east) + c * (south[i] + north[i]) + b * C + d * R;
            double vr = R + m * dt * (C - R);
            settle(ve, node);
            settle(vr, node);
            out_e[node] = ve;
            out_r[node] = vr;
        };

        update(0, row[1] - gx_lo * row[0], row[1]);
        for (std::size_t i = 1; i + 1 < nx; ++i)
            update(i, row[i - 1], row[i + 1]);
        update(nx - 1, row[nx - 2], row[nx - 2] - gx_hi * row[nx - 1]);
    }

    if (robin.beta != 0.0) {
        auto edge = [](std::size_t n, std::size_t idx) { return (idx == 0 || idx + 1 == n) ? 0.5 : 1.0; };
        double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            lo_x += edge(ny, j) * ce[j * nx];
            hi_x += edge(ny, j) * ce[j * nx + nx - 1];
        }
        for (std::size_t i = 0; i < nx; ++i) {
            lo_y += edge(nx, i) * ce[i];
            hi_y += edge(nx, i) * ce[(ny - 1) * nx + i];
        }
        const double signed_sum = robin.sign_low() * (lo_x * dy + lo_y * dx) + robin.sign_high() * (hi_x * dy + hi_y * dx);
        report.boundary_outflow = k.diffusivity * dt * robin.beta * signed_sum;
    }

    next.time = new_time;
    next.pulse_index = cur.pulse_index;
    next.reseal_clock = cur.reseal_clock;
    return report;
}

std::size_t steps_for(double duration, double dt)
{
    const double n = std::ceil(duration / dt * (1.0 - 1e-12));
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

}  // namespace

StepReport ftcs_step(const ConcentrationState& cur, ConcentrationState& next, std::span<const double> mu,
                     const StepCoefficients& coeffs, const RobinClosure& robin)
{
    if (!next.C_E.same_layout(cur.C_E) || next.C_E.size() != cur.C_E.size())
        next.C_E = ScalarField2D(cur.C_E.nx(), cur.C_E.ny(), cur.C_E.dx(), cur.C_E.dy(), Quantity::Concentration);
    if (!next.C_RE.same_layout(cur.C_RE) || next.C_RE.size() != cur.C_RE.size())
        next.C_RE = ScalarField2D(cur.C_RE.nx(), cur.C_RE.ny(), cur.C_RE.dx(), cur.C_RE.dy(), Quantity::Concentration);
    if (mu.size() == 1)
        return step_kernel<true>(cur, next, mu, coeffs, robin);
    if (mu.size() != cur.C_E.size())
        throw Error(ErrorKind::Validation, "transfer coefficient field does not match the grid");
    return step_kernel<false>(cur, next, mu, coeffs, robin);
}

ConcentrationState ftcs_step(const ConcentrationState& state, double mu_now, const StepCoefficients& coeffs,
                             double beta)
{
    ConcentrationState next;
    const double mu[1] = {mu_now};
    ftcs_step(state, next, mu, coeffs, RobinClosure{beta, RobinConvention::OutwardLoss});
    return next;
}

ConcentrationState init_concentration(const ValidatedConfig& config)
{
    const auto& c = config.config();
    const auto& g = c.grid;
    ConcentrationState s;
    s.C_E = ScalarField2D(g.nx, g.ny, g.dx, g.dy, Quantity::Concentration);
    s.C_RE = ScalarField2D(g.nx, g.ny, g.dx, g.dy, Quantity::Concentration);

    const double width = c.drug.delta_width_d * c.tissue.length_L;
    const double amplitude = c.drug.dose_nd / (width * std::sqrt(std::numbers::pi));
    const auto column = std::min<std::size_t>(
        g.nx - 1, static_cast<std::size_t>(std::llround(c.drug.injection_center.x / g.dx)));
    // (j - yc/dy)*dy keeps the profile exactly mirror-symmetric about the centre row.
    const double centre = c.drug.injection_center.y / g.dy;
    if (c.drug.dose_nd == 0.0)
        return s;
    for (std::size_t j = 0; j < g.ny; ++j) {
        const double u = (static_cast<double>(j) - centre) * g.dy / width;
        s.C_E(column, j) = amplitude * std::exp(-u * u);
    }
    return s;
}

std::pair<double, double> probe(const ConcentrationState& state, Point point)
{
    const auto& E = state.C_E;
    const double Lx = static_cast<double>(E.nx() - 1) * E.dx();
    const double Ly = static_cast<double>(E.ny() - 1) * E.dy();
    const double slack = 1e-12 * std::max(Lx, Ly);
    if (!(point.x >= -slack && point.x <= Lx + slack && point.y >= -slack && point.y <= Ly + slack))
        throw Error(ErrorKind::OutOfDomain, "probe point lies outside the tissue");

    auto locate = [](double coord, double h, std::size_t n, std::size_t& lo, double& frac) {
        double u = std::clamp(coord / h, 0.0, static_cast<double>(n - 1));
        const double r = std::round(u);
        if (std::abs(u - r) <= 1e-9)
            u = r;
        lo = std::min(static_cast<std::size_t>(u), n - 2);
        frac = u - static_cast<double>(lo);
    };
    std::size_t i = 0, j = 0;
    double fx = 0.0, fy = 0.0;
    locate(point.x, E.dx(), E.nx(), i, fx);
    locate(point.y, E.dy(), E.ny(), j, fy);

    auto interp = [&](const ScalarField2D& f) {
        if (fx == 0.0 && fy == 0.0)
            return f(i, j);
        const double bottom = (1.0 - fx) * f(i, j) + fx * f(i + 1, j);
        const double top = (1.0 - fx) * f(i, j + 1) + fx * f(i + 1, j + 1);
        return (1.0 - fy) * bottom + fy * top;
    };
    return {interp(state.C_E), interp(state.C_RE)};
}

double ecs_mass(const ConcentrationState& state, double porosity) { return porosity * weighted_sum(state.C_E); }

double ics_mass(const ConcentrationState& state, double porosity)
{
    return (1.0 - porosity) * weighted_sum(state.C_RE);
}

double MassLedger::max_residual() const noexcept
{
    return residual.empty() ? 0.0 : *std::max_element(residual.begin(), residual.end());
}

std::vector<double> resolve_snapshot_times(const SimulationConfig& config)
{
    std::vector<double> times = config.output.snapshot_times;
    if (times.empty() || config.output.snapshot_every_cycle) {
        for (int p = 1; p <= config.pulses.pulse_count_PN; ++p)
            times.push_back(static_cast<double>(p) * config.pulses.cycle_length());
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

ScalarField2D mu0_field(const ValidatedConfig& config, const FieldSolution& field)
{
    const auto& c = config.config();
    const auto params = MtcParams::from(c);
    ScalarField2D mu0(field.E_mag.nx(), field.E_mag.ny(), field.E_mag.dx(), field.E_mag.dy(), Quantity::Concentration);
    for (std::size_t k = 0; k < mu0.size(); ++k)
        mu0.values()[k] = mtc_prefactor(pore_fraction(field.E_mag.values()[k], c.electro), params);
    return mu0;
}

RunOutput run_schedule(const ValidatedConfig& config, const ScalarField2D& mu0, ConcentrationState initial)
{
    const auto& c = config.config();
    const double eps = c.tissue.porosity_eps;
    const double total_time = c.pulses.total_time();
    const double time_slack = 1e-9 * std::max(1.0, total_time);

    const auto snapshot_times = resolve_snapshot_times(c);
    for (double t : snapshot_times) {
        if (t > total_time + time_slack)
            throw Error(ErrorKind::SnapshotTimeOutOfRange,
                        "snapshot time " + std::to_string(t) + " s is beyond the simulated time " +
                            std::to_string(total_time) + " s");
    }

    RunOutput out;
    out.unstable = config.unstable();
    out.stats.mu0_min = mu0.min();
    out.stats.mu0_max = mu0.max();

    const bool uniform = mu0.size() > 0 && mu0.min() == mu0.max();
    std::vector<double> mu(uniform ? 1 : mu0.size());

    const RobinClosure robin{c.boundary.beta, c.boundary.convention};
    const std::size_t n_on = steps_for(c.pulses.on_time_tep, c.grid.dt);
    const std::size_t n_off = steps_for(c.pulses.off_time_tM, c.grid.dt);
    const double h_on = c.pulses.on_time_tep / static_cast<double>(n_on);
    const double h_off = c.pulses.off_time_tM / static_cast<double>(n_off);
    const auto coeff_on = StepCoefficients::make(c.drug.diffusivity_D, c.grid.dx, c.grid.dy, h_on, eps);
    const auto coeff_off = StepCoefficients::make(c.drug.diffusivity_D, c.grid.dx, c.grid.dy, h_off, eps);

    ConcentrationState cur = std::move(initial);
    cur.time = 0.0;
    cur.pulse_index = 0;
    cur.reseal_clock = 0.0;
    ConcentrationState next = cur;

    const double total0 = ecs_mass(cur, eps) + ics_mass(cur, eps);
    double loss = 0.0;
    auto& ledger = out.ledger;
    const std::size_t expected = static_cast<std::size_t>(c.pulses.pulse_count_PN) * (n_on + n_off) + 1;
    ledger.time.reserve(expected);
    ledger.ecs_mass.reserve(expected);
    ledger.ics_mass.reserve(expected);
    ledger.boundary_loss.reserve(expected);
    ledger.residual.reserve(expected);
    auto record_ledger = [&](const ConcentrationState& s) {
        const double e = ecs_mass(s, eps);
        const double r = ics_mass(s, eps);
        const double gap = std::abs(e + r + loss - total0);
        ledger.time.push_back(s.time);
        ledger.ecs_mass.push_back(e);
        ledger.ics_mass.push_back(r);
        ledger.boundary_loss.push_back(loss);
        ledger.residual.push_back(total0 > 0.0 ? gap / total0 : gap);
    };

    for (const auto& p : c.output.probes)
        out.probes.push_back(ProbeSeries{p, {}, {}, {}});
    auto record_probes = [&](const ConcentrationState& s) {
        for (auto& series : out.probes) {
            const auto [ce, cre] = probe(s, series.point);
            series.time.push_back(s.time);
            series.C_E.push_back(ce);
            series.C_RE.push_back(cre);
        }
    };

    std::size_t next_snapshot = 0;
    auto take_snapshots = [&](const ConcentrationState& s) {
        while (next_snapshot < snapshot_times.size() && s.time >= snapshot_times[next_snapshot] - time_slack) {
            out.snapshots.push_back(Snapshot{snapshot_times[next_snapshot], s});
            ++next_snapshot;
        }
    };

    const double stride = c.output.probe_stride;
    std::size_t probe_index = 1;
    auto maybe_probe = [&](const ConcentrationState& s, bool force) {
        const double due = static_cast<double>(probe_index) * stride;
        if (force || s.time >= due - time_slack) {
            record_probes(s);
            while (static_cast<double>(probe_index) * stride <= s.time + time_slack)
                ++probe_index;
        }
    };

    record_ledger(cur);
    record_probes(cur);
    take_snapshots(cur);

    auto advance = [&](const StepCoefficients& coeffs, double decay, double t_end) {
        if (uniform) {
            mu[0] = mu0.values()[0] * decay;
        } else {
            for (std::size_t k = 0; k < mu.size(); ++k)
                mu[k] = mu0.values()[k] * decay;
        }
        const auto report = ftcs_step(cur, next, mu, coeffs, robin);
        next.time = t_end;
        std::swap(cur, next);
        loss += eps * report.boundary_outflow;
        out.stats.clamped += report.clamped;
        ++out.stats.steps;
        record_ledger(cur);
        maybe_probe(cur, false);
        take_snapshots(cur);
    };

    const double tau = c.electro.resealing_tau;
    for (int p = 0; p < c.pulses.pulse_count_PN; ++p) {
        const double cycle_start = static_cast<double>(p) * c.pulses.cycle_length();
        cur.pulse_index = p;
        cur.reseal_clock = 0.0;
        for (std::size_t s = 0; s < n_on; ++s)
            advance(coeff_on, 1.0, cycle_start + static_cast<double>(s + 1) * h_on);
        const double off_start = cycle_start + c.pulses.on_time_tep;
        for (std::size_t s = 0; s < n_off; ++s) {
            const double clock = static_cast<double>(s) * h_off;
            cur.reseal_clock = clock;
            advance(coeff_off, std::exp(-clock / tau), off_start + static_cast<double>(s + 1) * h_off);
        }
        cur.reseal_clock = c.pulses.off_time_tM;
    }
    if (out.probes.empty() || out.probes.front().time.empty() || out.probes.front().time.back() != cur.time)
        maybe_probe(cur, true);

    out.stats.max_residual = ledger.max_residual();
    out.stats.conservation_ok = out.stats.max_residual <= c.solver.conservation_tol;
    out.final_state = std::move(cur);
    return out;
}

RunOutput run_pulses(const ValidatedConfig& config, const FieldSolution& field)
{
    return run_schedule(config, mu0_field(config, field), init_concentration(config));
}

}  // namespace epdd

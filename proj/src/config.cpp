#include "epdd/config.hpp"

#include <cmath>
#include <sstream>

namespace epdd {

double stability_limit(double dx, double dy, double diffusivity)
{
    const double dx2 = dx * dx;
    const double dy2 = dy * dy;
    return 0.5 * (dx2 * dy2) / (diffusivity * (dx2 + dy2));
}

namespace {

class Checker {
public:
    void require(bool ok, std::string field, std::string reason)
    {
        if (!ok)
            out.push_back({std::move(field), std::move(reason)});
    }

    void finite(double v, const std::string& field)
    {
        require(std::isfinite(v), field, "must be finite");
    }

    void positive(double v, const std::string& field)
    {
        finite(v, field);
        require(v > 0.0, field, "must be > 0");
    }

    void inside(const Point& p, double L, const std::string& field)
    {
        finite(p.x, field + ".x");
        finite(p.y, field + ".y");
        require(p.x >= 0.0 && p.x <= L && p.y >= 0.0 && p.y <= L, field, "must lie inside [0,L]x[0,L]");
    }

    std::vector<Violation> out;
};

bool spacing_matches(std::size_t n, double h, double L)
{
    return n >= 2 && std::abs(static_cast<double>(n - 1) * h - L) <= 1e-12 * L;
}

}  // namespace

std::vector<Violation> check(const SimulationConfig& c)
{
    Checker k;
    const auto& t = c.tissue;
    k.positive(t.length_L, "tissue.length");
    k.finite(t.sigma_min, "tissue.sigma_min");
    k.finite(t.sigma_max, "tissue.sigma_max");
    k.require(t.sigma_min >= 0.0, "tissue.sigma_min", "must be >= 0");
    k.require(t.sigma_max > t.sigma_min, "tissue.sigma_max", "must exceed sigma_min");
    k.finite(t.E_rev, "tissue.E_rev");
    k.finite(t.E_irrev, "tissue.E_irrev");
    k.require(t.E_rev > 0.0, "tissue.E_rev", "must be > 0");
    k.require(t.E_irrev > t.E_rev, "tissue.E_irrev", "must exceed E_rev");
    k.positive(t.gamma1, "tissue.gamma1");
    k.positive(t.gamma2, "tissue.gamma2");
    k.finite(t.porosity_eps, "tissue.porosity");
    k.require(t.porosity_eps > 0.0 && t.porosity_eps < 1.0, "tissue.porosity", "porosity must be in (0,1)");
    k.positive(t.cell_radius_rc, "tissue.cell_radius");

    const auto& d = c.drug;
    k.positive(d.diffusivity_D, "drug.diffusivity");
    k.finite(d.permeability_P, "drug.permeability");
    k.require(d.permeability_P >= 0.0, "drug.permeability", "must be >= 0");
    k.finite(d.dose_nd, "drug.dose");
    k.require(d.dose_nd >= 0.0, "drug.dose", "must be >= 0");
    k.finite(d.delta_width_d, "drug.delta_width");
    k.require(d.delta_width_d > 0.0 && d.delta_width_d < 1.0, "drug.delta_width", "must be in (0,1)");
    k.inside(d.injection_center, t.length_L, "drug.injection_center");

    const auto& e = c.electro;
    k.finite(e.phi0, "electro.phi0");
    k.finite(e.phiL, "electro.phiL");
    k.finite(e.Ef_fit, "electro.E_f");
    k.positive(e.bf_fit, "electro.b_f");
    k.positive(e.resealing_tau, "electro.resealing_tau");

    const auto& p = c.pulses;
    k.require(p.pulse_count_PN >= 1, "pulses.count", "must be >= 1");
    k.positive(p.on_time_tep, "pulses.on_time");
    k.positive(p.off_time_tM, "pulses.off_time");

    const auto& g = c.grid;
    k.require(g.nx >= 3 && g.ny >= 3, "grid", "need at least 3 nodes per direction");
    k.positive(g.dx, "grid.dx");
    k.positive(g.dy, "grid.dy");
    k.positive(g.dt, "grid.dt");
    k.require(spacing_matches(g.nx, g.dx, t.length_L), "grid.dx", "(nx-1)*dx must equal L");
    k.require(spacing_matches(g.ny, g.dy, t.length_L), "grid.dy", "(ny-1)*dy must equal L");
    if (g.dx > 0.0 && g.dy > 0.0 && d.diffusivity_D > 0.0 && !c.solver.allow_unstable) {
        const double limit = stability_limit(g, d.diffusivity_D);
        if (!(g.dt < limit)) {
            std::ostringstream os;
            os.precision(17);
            os << "dt violates stability bound (dt=" << g.dt << " s, limit=" << limit << " s)";
            k.require(false, "grid.dt", os.str());
        }
    }

    k.finite(c.boundary.beta, "boundary.beta");
    k.require(c.boundary.beta >= 0.0, "boundary.beta", "must be >= 0");

    k.positive(c.kalamiza.pore_fraction, "kalamiza.pore_fraction");
    k.positive(c.kalamiza.membrane_thickness, "kalamiza.membrane_thickness");

    const auto& o = c.output;
    for (std::size_t i = 0; i < o.snapshot_times.size(); ++i) {
        const std::string f = "output.snapshot_times[" + std::to_string(i) + "]";
        k.finite(o.snapshot_times[i], f);
        k.require(o.snapshot_times[i] >= 0.0, f, "must be >= 0");
    }
    k.positive(o.probe_stride, "output.probe_stride");
    for (std::size_t i = 0; i < o.probes.size(); ++i)
        k.inside(o.probes[i], t.length_L, "output.probes[" + std::to_string(i) + "]");

    k.positive(c.solver.field_tol, "solver.field_tol");
    k.require(c.solver.max_picard >= 1, "solver.max_picard", "must be >= 1");
    k.positive(c.solver.conservation_tol, "solver.conservation_tol");
    return k.out;
}

ValidatedConfig validate(const SimulationConfig& config)
{
    auto violations = check(config);
    if (!violations.empty())
        throw ValidationError(std::move(violations));

    ValidatedConfig v;
    v.config_ = config;
    v.stability_limit_ = stability_limit(config.grid, config.drug.diffusivity_D);
    if (!(config.grid.dt < v.stability_limit_)) {
        v.unstable_ = true;
        std::ostringstream os;
        os.precision(17);
        os << "dt=" << config.grid.dt << " s exceeds the stability bound " << v.stability_limit_
           << " s; outputs are tagged unstable";
        v.warnings_.push_back(os.str());
    }
    return v;
}

void derive_spacing(SimulationConfig& config)
{
    const double L = config.tissue.length_L;
    if (config.grid.nx >= 2)
        config.grid.dx = L / static_cast<double>(config.grid.nx - 1);
    if (config.grid.ny >= 2)
        config.grid.dy = L / static_cast<double>(config.grid.ny - 1);
}

SimulationConfig default_config()
{
    SimulationConfig c;
    derive_spacing(c);
    return c;
}

}  // namespace epdd

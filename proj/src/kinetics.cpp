#include "epdd/kinetics.hpp"

#include <cmath>

namespace epdd {

double MembraneState::mu() const noexcept { return mu0 * std::exp(-clock / resealing_tau); }

MtcParams MtcParams::from(const SimulationConfig& c)
{
    return {c.drug.permeability_P, c.tissue.cell_radius_rc, c.electro.resealing_tau};
}

KalamizaParams KalamizaParams::from(const SimulationConfig& c)
{
    return {c.kalamiza.pore_fraction, c.kalamiza.membrane_thickness, c.drug.diffusivity_D, c.tissue.cell_radius_rc,
            c.electro.resealing_tau};
}

double conductivity_midpoint(const TissueParams& p) noexcept { return 0.5 * (p.E_rev + p.E_irrev); }

double conductivity_width(const TissueParams& p) noexcept { return (p.E_irrev - p.E_rev) / p.gamma2; }

double conductivity(double E, const TissueParams& p) noexcept
{
    const double a = conductivity_midpoint(p);
    const double b = conductivity_width(p);
    return (p.sigma_max - p.sigma_min) / (1.0 + p.gamma1 * std::exp(-(E - a) / b)) + p.sigma_min;
}

double pore_fraction(double E, const ElectroParams& p) noexcept
{
    return 1.0 / (1.0 + std::exp((p.Ef_fit - E) / p.bf_fit));
}

double mtc_prefactor(double fp, const MtcParams& p) noexcept { return p.permeability_P * fp / p.cell_radius_rc; }

double mtc(double clock, double fp, const MtcParams& p) noexcept
{
    return mtc_prefactor(fp, p) * std::exp(-clock / p.resealing_tau);
}

double mtc_kalamiza_prefactor(const KalamizaParams& p) noexcept
{
    return 3.0 * p.diffusivity_D * p.fp_k / (p.membrane_thickness_dm * p.cell_radius_rc);
}

double mtc_kalamiza(double clock, const KalamizaParams& p) noexcept
{
    return mtc_kalamiza_prefactor(p) * std::exp(-clock / p.resealing_tau);
}

double mtc_integral(double t, double mu0, double tau) noexcept { return mu0 * tau * -std::expm1(-t / tau); }

}  // namespace epdd

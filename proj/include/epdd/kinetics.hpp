#ifndef EPDD_KINETICS_HPP
#define EPDD_KINETICS_HPP

/**
 * @file kinetics.hpp
 * @brief Scalar membrane kinetics.
 *
 *   sigma(E) = (sigma_max - sigma_min) / (1 + gamma1 exp(-(E - a)/b)) + sigma_min
 *              a = (E_rev + E_irrev)/2,  b = (E_irrev - E_rev)/gamma2
 *   f_p(E)   = 1 / (1 + exp((E_f - E)/b_f))
 *   mu(t)    = (P f_p / r_c) exp(-t/tau)
 *   mu_k(t)  = (3 D f_p / (d_m r_c)) exp(-t/tau)
 *
 * All functions are pure. The resealing clock t is owned by the pulse
 * scheduler: it is held at zero while a pulse is on and restarts at every
 * pulse.
 */

#include "epdd/config.hpp"

namespace epdd {

struct MembraneState {
    double pore_fraction_fp = 0.0;
    double mu0 = 0.0;            ///< 1/s, transfer coefficient at clock zero
    double resealing_tau = 0.0;  ///< s
    double clock = 0.0;          ///< s since the current pulse ended

    [[nodiscard]] double mu() const noexcept;
};

struct MtcParams {
    double permeability_P = 0.0;  ///< mm/s
    double cell_radius_rc = 0.0;  ///< mm
    double resealing_tau = 0.0;   ///< s

    static MtcParams from(const SimulationConfig& c);
};

struct KalamizaParams {
    double fp_k = 2.7e-7;
    double membrane_thickness_dm = 5e-6;  ///< mm
    double diffusivity_D = 1e-3;          ///< mm^2/s
    double cell_radius_rc = 0.05;         ///< mm
    double resealing_tau = 20.0;          ///< s

    static KalamizaParams from(const SimulationConfig& c);
};

/// Field-dependent tissue conductivity in S/m.
double conductivity(double E, const TissueParams& p) noexcept;

/// Sigmoid midpoint a and width b of the conductivity curve.
double conductivity_midpoint(const TissueParams& p) noexcept;
double conductivity_width(const TissueParams& p) noexcept;

/// Fraction of membrane area that is porated at field strength E.
double pore_fraction(double E, const ElectroParams& p) noexcept;

/// Transfer-coefficient prefactor P f_p / r_c in 1/s.
double mtc_prefactor(double fp, const MtcParams& p) noexcept;

/// Mass-transfer coefficient at resealing clock @p clock (s >= 0).
double mtc(double clock, double fp, const MtcParams& p) noexcept;

/// Prefactor 3 D f_p / (d_m r_c) of the reference coefficient.
double mtc_kalamiza_prefactor(const KalamizaParams& p) noexcept;

double mtc_kalamiza(double clock, const KalamizaParams& p) noexcept;

/// Integral of mu over [0, t] for a coefficient mu0 exp(-s/tau): mu0 tau (1 - exp(-t/tau)).
double mtc_integral(double t, double mu0, double tau) noexcept;

}  // namespace epdd

#endif

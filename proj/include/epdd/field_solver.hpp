#ifndef EPDD_FIELD_SOLVER_HPP
#define EPDD_FIELD_SOLVER_HPP

/**
 * @file field_solver.hpp
 * @brief Electric potential and field magnitude under field-dependent conductivity.
 *
 * Solves div(sigma(E) grad phi) = 0 on the square with phi = phi0 on y = 0,
 * phi = phiL on y = L and insulating (zero normal current) sides x = 0, x = L.
 * The nonlinearity is resolved by Picard iteration starting from
 * sigma = sigma_min; each linear solve uses a symmetric 5-point
 * finite-volume stencil with arithmetic-mean face conductivities.
 */

#include "epdd/config.hpp"
#include "epdd/grid.hpp"

namespace epdd {

struct FieldSolution {
    ScalarField2D phi;      ///< V
    ScalarField2D E_mag;    ///< V/mm
    ScalarField2D sigma;    ///< S/m, sigma(E_mag) without the assembly floor
    int picard_iterations = 0;
    double final_residual = 0.0;   ///< last Picard change in E, relative to |phiL - phi0| / L
    double linear_residual = 0.0;  ///< relative residual of the last linear solve
};

/// Conductivity used in assembly is never below this: 1e-6 sigma_max.
double sigma_floor(const TissueParams& p) noexcept;

/**
 * Solves the potential for a fixed conductivity field.
 * Throws Error(SingularSystem) when the floored conductivity vanishes
 * everywhere or the factorization fails.
 */
ScalarField2D solve_potential(const ValidatedConfig& config, const ScalarField2D& sigma, double tol,
                              double* linear_residual = nullptr);

/// |grad phi|: central differences inside, second-order one-sided on the edges.
ScalarField2D field_magnitude(const ScalarField2D& phi);

/// sigma(E) applied node by node.
ScalarField2D conductivity_field(const ScalarField2D& E, const TissueParams& p);

/**
 * Picard loop until the max-norm change in E between iterates is at most
 * tol * |phiL - phi0| / L. Needs at least two iterates, so max_picard >= 2.
 * Throws NonConvergence when max_picard is exhausted.
 */
FieldSolution solve_field(const ValidatedConfig& config, double tol, int max_picard);

/// Uses the tolerance and iteration cap from the config's solver settings.
FieldSolution solve_field(const ValidatedConfig& config);

}  // namespace epdd

#endif

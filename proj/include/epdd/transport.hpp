#ifndef EPDD_TRANSPORT_HPP
#define EPDD_TRANSPORT_HPP

/**
 * @file transport.hpp
 * @brief Coupled extracellular/intracellular drug transport.
 *
 *   dC_E/dt  = D lap(C_E) - ((1-eps)/eps) mu(t) (C_E - C_RE)
 *   dC_RE/dt = mu(t) (C_E - C_RE)
 *
 * integrated with forward-time centred-space steps. The drug-loss boundary
 * dC_E/dn = -beta C_E is closed with mirror ghost nodes,
 * C_ghost = C_inner - 2 h beta C_boundary, which makes the trapezoid-weighted
 * mass eps*sum(C_E) + (1-eps)*sum(C_RE) exactly conserved at beta = 0 and
 * lets the boundary flux be booked exactly at beta > 0.
 */

#include "epdd/config.hpp"
#include "epdd/field_solver.hpp"
#include "epdd/grid.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace epdd {

struct ConcentrationState {
    ScalarField2D C_E;   ///< extracellular, a.u.
    ScalarField2D C_RE;  ///< intracellular (reversibly electroporated cells), a.u.
    double time = 0.0;
    int pulse_index = 0;
    double reseal_clock = 0.0;
};

/// a = D dt/dx^2, c = D dt/dy^2, b(mu) = 1 - 2a - 2c - k mu dt, d(mu) = k mu dt with k = (1-eps)/eps.
struct StepCoefficients {
    double a = 0.0;
    double c = 0.0;
    double dt = 0.0;
    double exchange = 0.0;  ///< (1-eps)/eps
    double diffusivity = 0.0;

    static StepCoefficients make(double diffusivity, double dx, double dy, double dt, double porosity);

    [[nodiscard]] double b(double mu) const noexcept { return 1.0 - 2.0 * a - 2.0 * c - exchange * mu * dt; }
    [[nodiscard]] double d(double mu) const noexcept { return exchange * mu * dt; }
};

/// Robin closure parameters. Face signs: +1 removes drug, -1 adds it.
struct RobinClosure {
    double beta = 0.0;  ///< 1/mm
    RobinConvention convention = RobinConvention::OutwardLoss;

    [[nodiscard]] double sign_low() const noexcept { return 1.0; }
    [[nodiscard]] double sign_high() const noexcept
    {
        return convention == RobinConvention::OutwardLoss ? 1.0 : -1.0;
    }
};

struct StepReport {
    std::size_t clamped = 0;       ///< nodes in [-1e-13, 0) reset to zero
    double boundary_outflow = 0.0; ///< D dt sum_faces sign beta C ds (ECS concentration x mm^2)
};

/// Values below this abort a step; values in [kNegativeTolerance, 0) are clamped.
inline constexpr double kNegativeTolerance = -1e-13;

/**
 * One FTCS step from @p cur into @p next (time advanced by coeffs.dt).
 * @p mu holds one value (spatially uniform) or one per node.
 * Throws StabilityViolation if a node drops below kNegativeTolerance.
 */
StepReport ftcs_step(const ConcentrationState& cur, ConcentrationState& next, std::span<const double> mu,
                     const StepCoefficients& coeffs, const RobinClosure& robin);

/// Value-returning form with a uniform coefficient and outward-loss closure.
ConcentrationState ftcs_step(const ConcentrationState& state, double mu_now, const StepCoefficients& coeffs,
                             double beta);

/// Gaussian-regularized dose on the injection column, zero elsewhere; C_RE = 0.
ConcentrationState init_concentration(const ValidatedConfig& config);

/// Bilinear interpolation; exact on nodes. Throws Error(OutOfDomain).
std::pair<double, double> probe(const ConcentrationState& state, Point point);

double ecs_mass(const ConcentrationState& state, double porosity);
double ics_mass(const ConcentrationState& state, double porosity);

struct MassLedger {
    std::vector<double> time;
    std::vector<double> ecs_mass;
    std::vector<double> ics_mass;
    std::vector<double> boundary_loss;  ///< cumulative
    std::vector<double> residual;       ///< |total + loss - total(0)| / total(0)

    [[nodiscard]] std::size_t size() const noexcept { return time.size(); }
    [[nodiscard]] double max_residual() const noexcept;
};

struct ProbeSeries {
    Point point;
    std::vector<double> time;
    std::vector<double> C_E;
    std::vector<double> C_RE;
};

struct Snapshot {
    double requested_time = 0.0;
    ConcentrationState state;
};

struct RunStats {
    std::size_t steps = 0;
    std::size_t clamped = 0;
    double max_residual = 0.0;
    bool conservation_ok = true;
    double mu0_min = 0.0;  ///< 1/s, range of the clock-zero transfer coefficient
    double mu0_max = 0.0;
};

struct RunOutput {
    ConcentrationState final_state;
    std::vector<ProbeSeries> probes;
    std::vector<Snapshot> snapshots;
    MassLedger ledger;
    RunStats stats;
    bool unstable = false;
};

/// Snapshot times for a config: explicit times, cycle ends when none are given or when requested.
std::vector<double> resolve_snapshot_times(const SimulationConfig& config);

/// mu0 = P f_p(E) / r_c at every node.
ScalarField2D mu0_field(const ValidatedConfig& config, const FieldSolution& field);

/**
 * Runs the pulse schedule from @p initial. Each cycle holds the resealing
 * clock at zero for the on time, then lets mu decay for the off time. Each
 * interval is split into the fewest equal steps not exceeding grid.dt.
 * Throws Error(SnapshotTimeOutOfRange) for snapshot times past the end of
 * the schedule; propagates StabilityViolation.
 */
RunOutput run_schedule(const ValidatedConfig& config, const ScalarField2D& mu0, ConcentrationState initial);

/// run_schedule with the transfer coefficient from @p field and the injected initial state.
RunOutput run_pulses(const ValidatedConfig& config, const FieldSolution& field);

}  // namespace epdd

#endif

#ifndef EPDD_ORACLES_HPP
#define EPDD_ORACLES_HPP

/**
 * @file oracles.hpp
 * @brief Independent reference solutions and run statistics.
 *
 * The well-mixed solution and the naive stepper share no code with the
 * transport kernel; tests use them to cross-check it.
 */

#include "epdd/config.hpp"
#include "epdd/grid.hpp"
#include "epdd/kinetics.hpp"
#include "epdd/transport.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epdd {

// ---------------------------------------------------------------------------
// Well-mixed (spatially uniform) closed form
// ---------------------------------------------------------------------------

struct WellMixedParams {
    double porosity_eps = 0.18;
    double mu0 = 0.0;  ///< 1/s
    double tau = 20.0; ///< s
    double C_E0 = 1.0;
    double C_RE0 = 0.0;
};

/**
 * Exact solution with no spatial gradients and mu = mu0 exp(-t/tau):
 * the conserved mean m = eps C_E + (1-eps) C_RE stays fixed while the gap
 * C_E - C_RE decays as exp(-(1/eps) * integral of mu).
 */
std::pair<double, double> well_mixed_closed_form(const WellMixedParams& p, double t);

/// Same solution for integral I of mu over [0, t].
std::pair<double, double> well_mixed_from_integral(const WellMixedParams& p, double integral);

/// Integral of mu over [0, t] under a pulse schedule (clock held at zero while on).
double schedule_mtc_integral(const PulseSchedule& schedule, double mu0, double tau, double t);

/// Closed form chained over the pulse schedule.
std::pair<double, double> well_mixed_schedule(const WellMixedParams& p, const PulseSchedule& schedule, double t);

// ---------------------------------------------------------------------------
// Naive reference stepper
// ---------------------------------------------------------------------------

struct NaiveStepParams {
    double diffusivity = 1e-3;
    double dx = 0.1;
    double dy = 0.1;
    double dt = 0.01;
    double porosity = 0.18;
    double mu = 0.0;
    double beta = 0.0;
    bool literal_robin = false;
};

/// Index-by-index FTCS step with explicit ghost padding; grids up to 11x11 only.
ConcentrationState brute_force_step(const ConcentrationState& state, const NaiveStepParams& p);

// ---------------------------------------------------------------------------
// Transfer-coefficient comparison
// ---------------------------------------------------------------------------

struct MtcComparison {
    double prefactor_model = 0.0;
    double prefactor_reference = 0.0;
    double prefactor_ratio = 0.0;  ///< model / reference
    double max_relative_gap = 0.0; ///< max |mu - mu_k| / mu_k over the samples
    std::vector<double> time;
    std::vector<double> mu_model;
    std::vector<double> mu_reference;
};

/// Samples both coefficients on [0, horizon] (clock = t) at @p samples + 1 points.
MtcComparison compare_mtc_curves(double fp, const MtcParams& model, const KalamizaParams& reference, double horizon,
                                 std::size_t samples = 1000);

// ---------------------------------------------------------------------------
// Uniformity and sweeps
// ---------------------------------------------------------------------------

/// Coefficient of variation (population stddev / mean). Throws Error(DegenerateField) if the mean is 0.
double uniformity(const ScalarField2D& field);

enum class SweepAxis { Beta, Permeability, PulseCount };

SweepAxis parse_sweep_axis(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);
std::string sweep_axis_units(SweepAxis axis);

/// Copy of @p base with the axis parameter replaced.
SimulationConfig with_axis_value(SimulationConfig base, SweepAxis axis, double value);

struct SweepMember {
    double value = 0.0;
    bool ok = false;
    std::string error;
    double final_time = 0.0;
    double ecs_mass = 0.0;
    double ics_mass = 0.0;
    double boundary_loss = 0.0;
    double cov = 0.0;            ///< coefficient of variation of the final C_RE
    double probe_peak_C_E = 0.0; ///< first probe
    double probe_final_C_E = 0.0;
    double probe_final_C_RE = 0.0;
    std::vector<double> transect_x;    ///< mm
    std::vector<double> transect_C_RE; ///< C_RE along the row nearest y = L/2
};

struct SweepReport {
    SweepAxis axis = SweepAxis::Beta;
    std::vector<double> values;
    std::vector<SweepMember> members;

    [[nodiscard]] bool all_ok() const noexcept;
};

/// Called once per member after its run, possibly from a worker thread.
using SweepMemberSink = std::function<void(std::size_t index, const ValidatedConfig&, const RunOutput&)>;

/**
 * One full simulation per value. Members run on up to @p threads threads;
 * a failing member is recorded in the report rather than aborting the sweep.
 */
SweepReport run_sweep(const SimulationConfig& base, SweepAxis axis, const std::vector<double>& values,
                      unsigned threads = 1, const SweepMemberSink& sink = {});

/// Summary statistics of a finished run (used by sweeps).
SweepMember summarize_run(const ValidatedConfig& config, const RunOutput& run);

}  // namespace epdd

#endif

#ifndef EPDD_CONFIG_HPP
#define EPDD_CONFIG_HPP

/**
 * @file config.hpp
 * @brief Simulation parameters and their validation.
 *
 * Internal units are fixed: length in mm, time in s, potential in V, field in
 * V/mm, conductivity in S/m. Concentrations are in arbitrary units (a.u.).
 * Default-constructed parameter blocks hold the reference tissue/drug setup
 * (1 mm square, 60 V across it, 10 pulses of 1 ms with 100 s rest).
 */

#include "epdd/errors.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace epdd {

struct Point {
    double x = 0.0;  ///< mm
    double y = 0.0;  ///< mm
    bool operator==(const Point&) const = default;
};

struct TissueParams {
    double length_L = 1.0;         ///< mm
    double sigma_min = 0.0;        ///< S/m
    double sigma_max = 0.241;      ///< S/m
    double E_rev = 46.0;           ///< V/mm
    double E_irrev = 70.0;         ///< V/mm
    double gamma1 = 8.0;
    double gamma2 = 10.0;
    double porosity_eps = 0.18;    ///< extracellular volume fraction
    double cell_radius_rc = 0.05;  ///< mm
    bool operator==(const TissueParams&) const = default;
};

struct DrugParams {
    double diffusivity_D = 1e-3;   ///< mm^2/s
    double permeability_P = 5e-4;  ///< mm/s
    double dose_nd = 100.0;
    double delta_width_d = 0.1;    ///< Gaussian width of the injected dose, fraction of L
    Point injection_center{0.0, 0.5};
    bool operator==(const DrugParams&) const = default;
};

struct ElectroParams {
    double phi0 = 0.0;            ///< V, electrode at y = 0
    double phiL = 60.0;           ///< V, electrode at y = L
    double Ef_fit = 65.8;         ///< V/mm, pore-fraction sigmoid midpoint
    double bf_fit = 7.5;          ///< V/mm, pore-fraction sigmoid width
    double resealing_tau = 20.0;  ///< s, chosen default; no measured value is available
    bool operator==(const ElectroParams&) const = default;
};

struct PulseSchedule {
    int pulse_count_PN = 10;
    double on_time_tep = 1e-3;   ///< s
    double off_time_tM = 100.0;  ///< s

    [[nodiscard]] double cycle_length() const noexcept { return on_time_tep + off_time_tM; }
    [[nodiscard]] double total_time() const noexcept { return pulse_count_PN * cycle_length(); }
    bool operator==(const PulseSchedule&) const = default;
};

struct GridSpec {
    std::size_t nx = 101;
    std::size_t ny = 101;
    double dx = 0.01;  ///< mm
    double dy = 0.01;  ///< mm
    double dt = 0.02;  ///< s, upper bound on the transport step
    bool operator==(const GridSpec&) const = default;
};

/// Sign convention of the drug-loss boundary condition.
enum class RobinConvention {
    OutwardLoss,  ///< dC/dn = -beta*C on every face (loss everywhere)
    Literal,      ///< dC/dx = beta*C, dC/dy = beta*C on every face as printed; gains mass on x=L, y=L
};

struct BoundaryParams {
    double beta = 0.1;  ///< 1/mm
    RobinConvention convention = RobinConvention::OutwardLoss;
    bool operator==(const BoundaryParams&) const = default;
};

/// Membrane parameters of the reference transfer-coefficient model used for comparison runs.
struct KalamizaSettings {
    double pore_fraction = 2.7e-7;
    double membrane_thickness = 5e-6;  ///< mm
    bool operator==(const KalamizaSettings&) const = default;
};

struct OutputSettings {
    std::vector<double> snapshot_times;    ///< s; empty means end of every cycle
    bool snapshot_every_cycle = false;     ///< add cycle ends to explicit times
    double probe_stride = 1.0;             ///< s
    std::vector<Point> probes{{0.5, 0.5}};
    bool export_field = true;
    bool operator==(const OutputSettings&) const = default;
};

struct SolverSettings {
    double field_tol = 1e-8;
    int max_picard = 50;
    double conservation_tol = 1e-8;
    bool allow_unstable = false;
    bool operator==(const SolverSettings&) const = default;
};

struct SimulationConfig {
    TissueParams tissue;
    DrugParams drug;
    ElectroParams electro;
    PulseSchedule pulses;
    GridSpec grid;
    BoundaryParams boundary;
    KalamizaSettings kalamiza;
    OutputSettings output;
    SolverSettings solver;
    bool operator==(const SimulationConfig&) const = default;
};

/// FTCS time-step bound: (1/2) dx^2 dy^2 / (D (dx^2 + dy^2)).
double stability_limit(double dx, double dy, double diffusivity);
inline double stability_limit(const GridSpec& grid, double diffusivity)
{
    return stability_limit(grid.dx, grid.dy, diffusivity);
}

/// Every failed invariant of @p config; empty when the configuration is usable.
std::vector<Violation> check(const SimulationConfig& config);

/**
 * @brief Immutable, validated configuration.
 *
 * Only validate() creates one. A config accepted with
 * SolverSettings::allow_unstable and a step above the stability bound is
 * tagged unstable() so that every output can carry the flag.
 */
class ValidatedConfig {
public:
    [[nodiscard]] const SimulationConfig& config() const noexcept { return config_; }
    const SimulationConfig* operator->() const noexcept { return &config_; }
    [[nodiscard]] double stability_limit() const noexcept { return stability_limit_; }
    [[nodiscard]] bool unstable() const noexcept { return unstable_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    friend ValidatedConfig validate(const SimulationConfig& config);
    ValidatedConfig() = default;

    SimulationConfig config_;
    double stability_limit_ = 0.0;
    bool unstable_ = false;
    std::vector<std::string> warnings_;
};

/// Throws ValidationError listing every violation.
ValidatedConfig validate(const SimulationConfig& config);

/// Reference setup with dx, dy derived from L and the node counts.
SimulationConfig default_config();

/// Sets dx = L/(nx-1), dy = L/(ny-1).
void derive_spacing(SimulationConfig& config);

}  // namespace epdd

#endif

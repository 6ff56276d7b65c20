#ifndef EPDD_IO_HPP
#define EPDD_IO_HPP

/**
 * @file io.hpp
 * @brief Output files and the run / sweep / comparison drivers.
 *
 * Every file is plain text. Grids carry a '#' metadata header (quantity,
 * units, nx, ny, dx, dy, time) followed by one tab-separated line per y row.
 * Time series are tab-separated with units in the column names. The run
 * manifest is JSON holding the full resolved config, so it can be fed back
 * to `epdd run` to reproduce a run.
 */

#include "epdd/config.hpp"
#include "epdd/field_solver.hpp"
#include "epdd/oracles.hpp"
#include "epdd/transport.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace epdd {

inline constexpr const char* kVersion = "1.0.0";

/// Process exit codes of the command drivers.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitIo = 3 };

int exit_code_for(ErrorKind kind) noexcept;

void write_grid(const std::filesystem::path& path, const ScalarField2D& field, double time,
                std::optional<double> requested_time = std::nullopt, bool unstable = false);

void write_probe(const std::filesystem::path& path, const ProbeSeries& series, bool unstable);
void write_ledger(const std::filesystem::path& path, const MassLedger& ledger, bool unstable);

/// Writes manifest, probes, ledger, snapshots and (optionally) the field grids into @p dir.
void write_run_output(const std::filesystem::path& dir, const ValidatedConfig& config, const RunOutput& run,
                      const FieldSolution* field);

void write_sweep_report(const std::filesystem::path& dir, const SimulationConfig& base, const SweepReport& report);

struct RunSummary {
    double final_time = 0.0;
    double ecs_mass = 0.0;
    double ics_mass = 0.0;
    double boundary_loss = 0.0;
    double max_residual = 0.0;
    std::size_t steps = 0;
    std::size_t clamped = 0;
    bool unstable = false;
    bool conservation_ok = true;
};

/**
 * validate, solve the field, run the schedule, write everything to @p out.
 * On a runtime failure a manifest with status "failed" is still written
 * before the exception propagates.
 */
RunSummary execute_run(const SimulationConfig& config, const std::filesystem::path& out);

SweepReport execute_sweep(const SimulationConfig& config, SweepAxis axis, const std::vector<double>& values,
                          const std::filesystem::path& out, unsigned threads);

struct KalamizaComparison {
    MtcComparison mtc;
    double max_C_RE_gap = 0.0;  ///< max |C_RE model - C_RE reference| at the probe, relative to the reference peak
};

/// Single-pulse comparison against the reference transfer coefficient. Rejects pulse counts other than 1.
KalamizaComparison execute_compare_kalamiza(const SimulationConfig& config, const std::filesystem::path& out);

}  // namespace epdd

#endif

#include "epdd/io.hpp"

#include "epdd/config_io.hpp"
#include "epdd/kinetics.hpp"

#include "config_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace epdd {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Buffered text writer that fails loudly.
class TextFile {
public:
    explicit TextFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc)
    {
        if (!out_)
            throw IoError("cannot open " + path.string() + " for writing");
    }

    TextFile& operator<<(std::string_view s)
    {
        out_ << s;
        return *this;
    }

    TextFile& num(double v)
    {
        out_ << format_number(v);
        return *this;
    }

    void close()
    {
        out_.flush();
        if (!out_)
            throw IoError("write failed for " + path_.string());
        out_.close();
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string());
}

std::string quantity_name(const ScalarField2D& f, const std::string& stem)
{
    switch (f.quantity()) {
    case Quantity::Potential: return "phi";
    case Quantity::FieldMagnitude: return "E";
    case Quantity::Conductivity: return "sigma";
    case Quantity::Concentration: break;
    }
    for (const char* name : {"C_RE", "C_E"})
        if (stem.ends_with(name))
            return name;
    return "concentration";
}

std::string two_digits(std::size_t k)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", k);
    return buf;
}

ordered_json run_json(const RunOutput& run, double eps)
{
    const auto& s = run.final_state;
    return {
        {"steps", run.stats.steps},
        {"final_time", format_quantity(s.time, Dimension::Time)},
        {"clamped_nodes", run.stats.clamped},
        {"max_ledger_residual", run.stats.max_residual},
        {"conservation_ok", run.stats.conservation_ok},
        {"mu0_min", format_number(run.stats.mu0_min) + " 1/s"},
        {"mu0_max", format_number(run.stats.mu0_max) + " 1/s"},
        {"final_ecs_mass", ecs_mass(s, eps)},
        {"final_ics_mass", ics_mass(s, eps)},
        {"boundary_loss", run.ledger.boundary_loss.empty() ? 0.0 : run.ledger.boundary_loss.back()},
    };
}

ordered_json field_json(const FieldSolution& field)
{
    return {
        {"picard_iterations", field.picard_iterations},
        {"final_residual", field.final_residual},
        {"linear_residual", field.linear_residual},
        {"E_min", format_quantity(field.E_mag.min(), Dimension::Field)},
        {"E_max", format_quantity(field.E_mag.max(), Dimension::Field)},
    };
}

ordered_json manifest_base(const std::string& command, const SimulationConfig& config, bool unstable,
                           const std::vector<std::string>& warnings)
{
    ordered_json m;
    m["manifest_version"] = 1;
    m["software"] = {{"name", "epdd"}, {"version", kVersion}};
    m["command"] = command;
    m["status"] = "ok";
    m["unstable"] = unstable;
    m["warnings"] = warnings;
    m["seed"] = nullptr;  // the simulation uses no random numbers
    m["stability_limit"] = format_quantity(stability_limit(config.grid, config.drug.diffusivity_D), Dimension::Time);
    return m;
}

void write_json(const fs::path& path, const ordered_json& doc)
{
    TextFile f(path);
    f << doc.dump(2) << "\n";
    f.close();
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Validation: return kExitValidation;
    case ErrorKind::Io: return kExitIo;
    default: return kExitRuntime;
    }
}

void write_grid(const fs::path& path, const ScalarField2D& field, double time, std::optional<double> requested_time,
                bool unstable)
{
    TextFile f(path);
    f << "# quantity: " << quantity_name(field, path.stem().string()) << "\n";
    f << "# units: " << quantity_units(field.quantity()) << "\n";
    f << "# nx: " << std::to_string(field.nx()) << "\n";
    f << "# ny: " << std::to_string(field.ny()) << "\n";
    f << "# dx: " << format_quantity(field.dx(), Dimension::Length) << "\n";
    f << "# dy: " << format_quantity(field.dy(), Dimension::Length) << "\n";
    f << "# time: " << format_quantity(time, Dimension::Time) << "\n";
    if (requested_time)
        f << "# requested_time: " << format_quantity(*requested_time, Dimension::Time) << "\n";
    f << "# unstable: " << (unstable ? "true" : "false") << "\n";
    f << "# layout: line j holds y = j*dy (j = 0..ny-1), column i holds x = i*dx (i = 0..nx-1)\n";
    for (std::size_t j = 0; j < field.ny(); ++j) {
        for (std::size_t i = 0; i < field.nx(); ++i) {
            if (i)
                f << "\t";
            f.num(field(i, j));
        }
        f << "\n";
    }
    f.close();
}

void write_probe(const fs::path& path, const ProbeSeries& series, bool unstable)
{
    TextFile f(path);
    f << "# probe: x=" << format_quantity(series.point.x, Dimension::Length)
      << ", y=" << format_quantity(series.point.y, Dimension::Length) << "\n";
    f << "# unstable: " << (unstable ? "true" : "false") << "\n";
    f << "time[s]\tC_E[a.u.]\tC_RE[a.u.]\n";
    for (std::size_t k = 0; k < series.time.size(); ++k) {
        f.num(series.time[k]) << "\t";
        f.num(series.C_E[k]) << "\t";
        f.num(series.C_RE[k]) << "\n";
    }
    f.close();
}

void write_ledger(const fs::path& path, const MassLedger& ledger, bool unstable)
{
    TextFile f(path);
    f << "# mass = trapezoid-weighted sum over nodes x dx dy; ecs weighted by eps, ics by (1-eps)\n";
    f << "# unstable: " << (unstable ? "true" : "false") << "\n";
    f << "time[s]\tecs_mass[a.u.*mm^2]\tics_mass[a.u.*mm^2]\tboundary_loss_cumulative[a.u.*mm^2]\tresidual[-]\n";
    for (std::size_t k = 0; k < ledger.size(); ++k) {
        f.num(ledger.time[k]) << "\t";
        f.num(ledger.ecs_mass[k]) << "\t";
        f.num(ledger.ics_mass[k]) << "\t";
        f.num(ledger.boundary_loss[k]) << "\t";
        f.num(ledger.residual[k]) << "\n";
    }
    f.close();
}

void write_run_output(const fs::path& dir, const ValidatedConfig& config, const RunOutput& run,
                      const FieldSolution* field)
{
    ensure_dir(dir);
    const auto& c = config.config();
    ordered_json files = ordered_json::array();

    for (std::size_t k = 0; k < run.probes.size(); ++k) {
        const std::string name = "probe_" + two_digits(k) + ".tsv";
        write_probe(dir / name, run.probes[k], run.unstable);
        files.push_back(name);
    }
    write_ledger(dir / "ledger.tsv", run.ledger, run.unstable);
    files.push_back("ledger.tsv");

    ordered_json snaps = ordered_json::array();
    if (!run.snapshots.empty())
        ensure_dir(dir / "snapshots");
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        const auto& s = run.snapshots[k];
        const std::string stem = "snapshots/snapshot_" + two_digits(k + 1);
        write_grid(dir / (stem + "_C_E.grid"), s.state.C_E, s.state.time, s.requested_time, run.unstable);
        write_grid(dir / (stem + "_C_RE.grid"), s.state.C_RE, s.state.time, s.requested_time, run.unstable);
        snaps.push_back({{"requested_time", format_quantity(s.requested_time, Dimension::Time)},
                         {"time", format_quantity(s.state.time, Dimension::Time)},
                         {"C_E", stem + "_C_E.grid"},
                         {"C_RE", stem + "_C_RE.grid"}});
    }

    if (field && c.output.export_field) {
        write_grid(dir / "field_phi.grid", field->phi, 0.0, std::nullopt, run.unstable);
        write_grid(dir / "field_E.grid", field->E_mag, 0.0, std::nullopt, run.unstable);
        write_grid(dir / "field_sigma.grid", field->sigma, 0.0, std::nullopt, run.unstable);
        files.push_back("field_phi.grid");
        files.push_back("field_E.grid");
        files.push_back("field_sigma.grid");
    }

    auto m = manifest_base("run", c, run.unstable, config.warnings());
    if (field)
        m["field_solve"] = field_json(*field);
    m["transport"] = run_json(run, c.tissue.porosity_eps);
    m["outputs"] = {{"files", files}, {"snapshots", snaps}};
    m["config"] = detail::config_to_json(c);
    write_json(dir / "manifest.json", m);
}

RunSummary execute_run(const SimulationConfig& config, const fs::path& out)
{
    const ValidatedConfig valid = validate(config);
    ensure_dir(out);
    std::optional<FieldSolution> field;
    try {
        field = solve_field(valid);
        const RunOutput run = run_pulses(valid, *field);
        write_run_output(out, valid, run, &*field);

        RunSummary s;
        s.final_time = run.final_state.time;
        s.ecs_mass = ecs_mass(run.final_state, config.tissue.porosity_eps);
        s.ics_mass = ics_mass(run.final_state, config.tissue.porosity_eps);
        s.boundary_loss = run.ledger.boundary_loss.empty() ? 0.0 : run.ledger.boundary_loss.back();
        s.max_residual = run.stats.max_residual;
        s.steps = run.stats.steps;
        s.clamped = run.stats.clamped;
        s.unstable = run.unstable;
        s.conservation_ok = run.stats.conservation_ok;
        return s;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Io)
            throw;
        auto m = manifest_base("run", config, valid.unstable(), valid.warnings());
        m["status"] = "failed";
        m["error"] = e.what();
        if (field)
            m["field_solve"] = field_json(*field);
        m["config"] = detail::config_to_json(config);
        write_json(out / "manifest.json", m);
        throw;
    }
}

void write_sweep_report(const fs::path& dir, const SimulationConfig& base, const SweepReport& report)
{
    ensure_dir(dir);
    const std::string axis = sweep_axis_name(report.axis);
    const std::string units = sweep_axis_units(report.axis);

    {
        TextFile f(dir / "sweep_summary.tsv");
        f << "# axis: " << axis << " [" << units << "]\n";
        f << "# masses are trapezoid-weighted sums x dx dy in a.u.*mm^2; cov is stddev/mean of final C_RE over all nodes\n";
        f << axis << "[" << units << "]\tstatus\tfinal_time[s]\tecs_mass[a.u.*mm^2]\tics_mass[a.u.*mm^2]"
          << "\tboundary_loss[a.u.*mm^2]\tcov_C_RE[-]\tprobe_peak_C_E[a.u.]\tprobe_final_C_E[a.u.]"
          << "\tprobe_final_C_RE[a.u.]\n";
        for (const auto& m : report.members) {
            f.num(m.value) << "\t" << (m.ok ? "ok" : "failed") << "\t";
            f.num(m.final_time) << "\t";
            f.num(m.ecs_mass) << "\t";
            f.num(m.ics_mass) << "\t";
            f.num(m.boundary_loss) << "\t";
            f.num(m.cov) << "\t";
            f.num(m.probe_peak_C_E) << "\t";
            f.num(m.probe_final_C_E) << "\t";
            f.num(m.probe_final_C_RE) << "\n";
        }
        f.close();
    }

    {
        TextFile f(dir / "transect_C_RE.tsv");
        f << "# final C_RE along the grid row nearest y = L/2, one column per sweep value\n";
        f << "x[mm]";
        for (const auto& m : report.members) {
            f << "\tC_RE[a.u.]@" << axis << "=";
            f.num(m.value);
        }
        f << "\n";
        std::size_t rows = 0;
        for (const auto& m : report.members)
            rows = std::max(rows, m.transect_x.size());
        for (std::size_t i = 0; i < rows; ++i) {
            f.num(static_cast<double>(i) * base.grid.dx);
            for (const auto& m : report.members) {
                f << "\t";
                if (i < m.transect_C_RE.size())
                    f.num(m.transect_C_RE[i]);
                else
                    f << "nan";
            }
            f << "\n";
        }
        f.close();
    }

    ordered_json members = ordered_json::array();
    for (std::size_t k = 0; k < report.members.size(); ++k) {
        const auto& m = report.members[k];
        ordered_json j = {{"value", m.value}, {"status", m.ok ? "ok" : "failed"}, {"directory", "member_" + two_digits(k)}};
        if (!m.ok) {
            j["error"] = m.error;
        } else {
            j["final_time"] = format_quantity(m.final_time, Dimension::Time);
            j["ecs_mass"] = m.ecs_mass;
            j["ics_mass"] = m.ics_mass;
            j["boundary_loss"] = m.boundary_loss;
            j["cov_C_RE"] = m.cov;
            j["probe_peak_C_E"] = m.probe_peak_C_E;
            j["probe_final_C_E"] = m.probe_final_C_E;
            j["probe_final_C_RE"] = m.probe_final_C_RE;
        }
        members.push_back(std::move(j));
    }
    ordered_json doc;
    doc["manifest_version"] = 1;
    doc["software"] = {{"name", "epdd"}, {"version", kVersion}};
    doc["command"] = "sweep";
    doc["status"] = report.all_ok() ? "ok" : "failed";
    doc["axis"] = axis;
    doc["axis_units"] = units;
    doc["values"] = report.values;
    doc["members"] = members;
    doc["config"] = detail::config_to_json(base);
    write_json(dir / "sweep_report.json", doc);
}

SweepReport execute_sweep(const SimulationConfig& config, SweepAxis axis, const std::vector<double>& values,
                          const fs::path& out, unsigned threads)
{
    if (values.empty())
        throw Error(ErrorKind::Validation, "sweep needs at least one value");
    ensure_dir(out);
    auto sink = [&out](std::size_t k, const ValidatedConfig& cfg, const RunOutput& run) {
        write_run_output(out / ("member_" + two_digits(k)), cfg, run, nullptr);
    };
    SweepReport report = run_sweep(config, axis, values, threads, sink);
    write_sweep_report(out, config, report);
    if (!report.all_ok()) {
        std::ostringstream os;
        os << "sweep member(s) failed:";
        for (const auto& m : report.members)
            if (!m.ok)
                os << "\n  " << sweep_axis_name(axis) << "=" << format_number(m.value) << ": " << m.error;
        throw Error(ErrorKind::SweepMemberFailed, os.str());
    }
    return report;
}

KalamizaComparison execute_compare_kalamiza(const SimulationConfig& config, const fs::path& out)
{
    if (config.pulses.pulse_count_PN != 1)
        throw ValidationError("pulses.count", "the transfer-coefficient comparison is defined for a single pulse (PN=1)");
    const ValidatedConfig valid = validate(config);
    ensure_dir(out);

    const FieldSolution field = solve_field(valid);
    const auto& c = valid.config();
    const Point centre{0.5 * c.tissue.length_L, 0.5 * c.tissue.length_L};
    const auto ci = static_cast<std::size_t>(std::llround(centre.x / c.grid.dx));
    const auto cj = static_cast<std::size_t>(std::llround(centre.y / c.grid.dy));
    const double fp = pore_fraction(field.E_mag(ci, cj), c.electro);

    KalamizaComparison result;
    result.mtc = compare_mtc_curves(fp, MtcParams::from(c), KalamizaParams::from(c), c.pulses.off_time_tM);

    SimulationConfig probe_cfg = c;
    probe_cfg.output.probes = {centre};
    const ValidatedConfig run_cfg = validate(probe_cfg);
    const RunOutput model = run_pulses(run_cfg, field);
    const ScalarField2D reference_mu0(c.grid.nx, c.grid.ny, c.grid.dx, c.grid.dy, Quantity::Concentration,
                                      result.mtc.prefactor_reference);
    const RunOutput reference = run_schedule(run_cfg, reference_mu0, init_concentration(run_cfg));

    const auto& pm = model.probes.front();
    const auto& pr = reference.probes.front();
    double peak = 0.0;
    double gap = 0.0;
    for (std::size_t k = 0; k < pm.time.size(); ++k) {
        peak = std::max(peak, pr.C_RE[k]);
        gap = std::max(gap, std::abs(pm.C_RE[k] - pr.C_RE[k]));
    }
    result.max_C_RE_gap = peak > 0.0 ? gap / peak : gap;

    {
        TextFile f(out / "mtc_curves.tsv");
        f << "# clock = time since the end of the pulse\n";
        f << "clock[s]\tmu_model[1/s]\tmu_reference[1/s]\n";
        for (std::size_t k = 0; k < result.mtc.time.size(); ++k) {
            f.num(result.mtc.time[k]) << "\t";
            f.num(result.mtc.mu_model[k]) << "\t";
            f.num(result.mtc.mu_reference[k]) << "\n";
        }
        f.close();
    }
    {
        TextFile f(out / "probe_curves.tsv");
        f << "# probe: x=" << format_quantity(centre.x, Dimension::Length)
          << ", y=" << format_quantity(centre.y, Dimension::Length) << "\n";
        f << "time[s]\tC_E_model[a.u.]\tC_RE_model[a.u.]\tC_E_reference[a.u.]\tC_RE_reference[a.u.]\n";
        for (std::size_t k = 0; k < pm.time.size(); ++k) {
            f.num(pm.time[k]) << "\t";
            f.num(pm.C_E[k]) << "\t";
            f.num(pm.C_RE[k]) << "\t";
            f.num(pr.C_E[k]) << "\t";
            f.num(pr.C_RE[k]) << "\n";
        }
        f.close();
    }

    auto m = manifest_base("compare-kalamiza", c, valid.unstable(), valid.warnings());
    m["summary"] = {
        {"pore_fraction_model", fp},
        {"prefactor_model", format_number(result.mtc.prefactor_model) + " 1/s"},
        {"prefactor_reference", format_number(result.mtc.prefactor_reference) + " 1/s"},
        {"prefactor_ratio", result.mtc.prefactor_ratio},
        {"max_relative_mtc_gap", result.mtc.max_relative_gap},
        {"horizon", format_quantity(c.pulses.off_time_tM, Dimension::Time)},
        {"max_C_RE_gap_relative_to_reference_peak", result.max_C_RE_gap},
    };
    m["field_solve"] = field_json(field);
    m["outputs"] = {{"files", {"mtc_curves.tsv", "probe_curves.tsv"}}};
    m["config"] = detail::config_to_json(c);
    write_json(out / "kalamiza_summary.json", m);
    return result;
}

}  // namespace epdd

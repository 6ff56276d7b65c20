#include "epdd/epdd.h"

#include "epdd/config_io.hpp"
#include "epdd/io.hpp"
#include "epdd/kinetics.hpp"

#include "config_json.hpp"

#include <fstream>
#include <sstream>
#include <string>

struct epdd_config {
    epdd::SimulationConfig config;
    bool pulse_count_explicit = false;  // set when pulses.count came from a file or epdd_config_set
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

epdd_status fail(epdd_status status, std::string message)
{
    g_last_error = std::move(message);
    return status;
}

epdd_status status_for(epdd::ErrorKind kind)
{
    switch (kind) {
    case epdd::ErrorKind::Validation: return EPDD_INVALID;
    case epdd::ErrorKind::Io: return EPDD_IO;
    default: return EPDD_RUNTIME;
    }
}

template <class Body>
epdd_status guarded(Body&& body)
{
    g_last_error.clear();
    try {
        body();
        return EPDD_OK;
    } catch (const epdd::Error& e) {
        return fail(status_for(e.kind()), e.what());
    } catch (const json::exception& e) {
        return fail(EPDD_BAD_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(EPDD_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(EPDD_RUNTIME, e.what());
    }
}

bool has_pulse_count(const json& doc)
{
    if (!doc.is_object())
        return false;
    if (doc.contains("manifest_version") && doc.contains("config"))
        return has_pulse_count(doc.at("config"));
    const auto it = doc.find("pulses");
    return it != doc.end() && it->is_object() && it->contains("count");
}

epdd_config* from_text(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw epdd::ValidationError("<file>", std::string("malformed JSON: ") + e.what());
    }
    auto cfg = std::make_unique<epdd_config>();
    cfg->config = epdd::detail::config_from_json(doc);
    cfg->pulse_count_explicit = has_pulse_count(doc);
    return cfg.release();
}

}  // namespace

extern "C" {

const char* epdd_version(void) { return epdd::kVersion; }

const char* epdd_last_error(void) { return g_last_error.c_str(); }

int epdd_exit_code(epdd_status status)
{
    switch (status) {
    case EPDD_OK: return epdd::kExitOk;
    case EPDD_INVALID:
    case EPDD_BAD_ARGUMENT: return epdd::kExitValidation;
    case EPDD_IO: return epdd::kExitIo;
    case EPDD_RUNTIME: return epdd::kExitRuntime;
    }
    return epdd::kExitRuntime;
}

epdd_status epdd_config_default(epdd_config** out)
{
    if (!out)
        return fail(EPDD_BAD_ARGUMENT, "null output pointer");
    return guarded([&] {
        auto cfg = std::make_unique<epdd_config>();
        cfg->config = epdd::default_config();
        *out = cfg.release();
    });
}

epdd_status epdd_config_load(const char* path, epdd_config** out)
{
    if (!path || !out)
        return fail(EPDD_BAD_ARGUMENT, "null argument");
    return guarded([&] {
        std::ifstream in(path);
        if (!in)
            throw epdd::IoError(std::string("cannot read config file ") + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        *out = from_text(buf.str());
    });
}

epdd_status epdd_config_parse(const char* json_text, epdd_config** out)
{
    if (!json_text || !out)
        return fail(EPDD_BAD_ARGUMENT, "null argument");
    return guarded([&] { *out = from_text(json_text); });
}

void epdd_config_free(epdd_config* cfg) { delete cfg; }

epdd_status epdd_config_save(const epdd_config* cfg, const char* path)
{
    if (!cfg || !path)
        return fail(EPDD_BAD_ARGUMENT, "null argument");
    return guarded([&] {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << epdd::serialize_config(cfg->config);
        f.close();
        if (!f)
            throw epdd::IoError(std::string("cannot write ") + path);
    });
}

epdd_status epdd_config_to_json(const epdd_config* cfg, char* buf, size_t size, size_t* needed)
{
    if (!cfg)
        return fail(EPDD_BAD_ARGUMENT, "null config");
    return guarded([&] {
        const std::string text = epdd::serialize_config(cfg->config);
        if (needed)
            *needed = text.size() + 1;
        if (buf && size > 0) {
            const size_t n = std::min(size - 1, text.size());
            text.copy(buf, n);
            buf[n] = '\0';
        }
    });
}

epdd_status epdd_config_set(epdd_config* cfg, const char* key, const char* json_value)
{
    if (!cfg || !key || !json_value)
        return fail(EPDD_BAD_ARGUMENT, "null argument");
    const std::string k = key;
    const auto dot = k.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == k.size())
        return fail(EPDD_BAD_ARGUMENT, "key must look like section.name: " + k);
    const std::string section = k.substr(0, dot);
    const std::string name = k.substr(dot + 1);

    json value;
    try {
        value = json::parse(json_value);
    } catch (const json::parse_error&) {
        // Accept bare unit strings such as 5e-4 mm/s without JSON quoting.
        value = std::string(json_value);
    }

    auto status = guarded([&] {
        json doc = epdd::detail::config_to_json(cfg->config);
        if (!doc.contains(section))
            throw epdd::ValidationError(section, "unknown section");
        if (!doc[section].contains(name))
            throw epdd::ValidationError(k, "unknown key");
        doc[section][name] = value;
        if (section == "grid" && (name == "nx" || name == "ny")) {
            doc["grid"].erase("dx");
            doc["grid"].erase("dy");
        }
        if (k == "tissue.length") {
            doc["grid"].erase("dx");
            doc["grid"].erase("dy");
        }
        cfg->config = epdd::detail::config_from_json(doc);
        if (k == "pulses.count")
            cfg->pulse_count_explicit = true;
    });
    if (status == EPDD_INVALID)
        status = EPDD_BAD_ARGUMENT;
    return status;
}

epdd_status epdd_config_set_allow_unstable(epdd_config* cfg, int allow)
{
    if (!cfg)
        return fail(EPDD_BAD_ARGUMENT, "null config");
    cfg->config.solver.allow_unstable = allow != 0;
    return EPDD_OK;
}

epdd_status epdd_config_set_literal_robin(epdd_config* cfg, int literal)
{
    if (!cfg)
        return fail(EPDD_BAD_ARGUMENT, "null config");
    cfg->config.boundary.convention =
        literal ? epdd::RobinConvention::Literal : epdd::RobinConvention::OutwardLoss;
    return EPDD_OK;
}

epdd_status epdd_config_set_snapshot_every_cycle(epdd_config* cfg, int every)
{
    if (!cfg)
        return fail(EPDD_BAD_ARGUMENT, "null config");
    cfg->config.output.snapshot_every_cycle = every != 0;
    return EPDD_OK;
}

epdd_status epdd_config_set_tau(epdd_config* cfg, double tau_seconds)
{
    if (!cfg)
        return fail(EPDD_BAD_ARGUMENT, "null config");
    cfg->config.electro.resealing_tau = tau_seconds;
    return EPDD_OK;
}

epdd_status epdd_config_validate(const epdd_config* cfg, double* stability_limit)
{
    if (!cfg)
        return fail(EPDD_BAD_ARGUMENT, "null config");
    return guarded([&] {
        const auto valid = epdd::validate(cfg->config);
        if (stability_limit)
            *stability_limit = valid.stability_limit();
    });
}

double epdd_stability_limit(double dx_mm, double dy_mm, double diffusivity_mm2_s)
{
    return epdd::stability_limit(dx_mm, dy_mm, diffusivity_mm2_s);
}

epdd_status epdd_run(const epdd_config* cfg, const char* out_dir, epdd_run_summary* summary)
{
    if (!cfg || !out_dir)
        return fail(EPDD_BAD_ARGUMENT, "null argument");
    return guarded([&] {
        const epdd::RunSummary s = epdd::execute_run(cfg->config, out_dir);
        if (summary) {
            summary->final_time = s.final_time;
            summary->ecs_mass = s.ecs_mass;
            summary->ics_mass = s.ics_mass;
            summary->boundary_loss = s.boundary_loss;
            summary->max_residual = s.max_residual;
            summary->steps = s.steps;
            summary->clamped = s.clamped;
            summary->unstable = s.unstable ? 1 : 0;
            summary->conservation_ok = s.conservation_ok ? 1 : 0;
        }
    });
}

epdd_status epdd_sweep(const epdd_config* cfg, const char* axis, const double* values, size_t count,
                       const char* out_dir, unsigned threads)
{
    if (!cfg || !axis || !out_dir || (count > 0 && !values))
        return fail(EPDD_BAD_ARGUMENT, "null argument");
    if (count == 0)
        return fail(EPDD_BAD_ARGUMENT, "sweep needs at least one value");
    return guarded([&] {
        const epdd::SweepAxis a = epdd::parse_sweep_axis(axis);
        epdd::execute_sweep(cfg->config, a, std::vector<double>(values, values + count), out_dir, threads);
    });
}

epdd_status epdd_compare_kalamiza(const epdd_config* cfg, const char* out_dir, double* prefactor_ratio,
                                  double* max_C_RE_gap)
{
    if (!cfg || !out_dir)
        return fail(EPDD_BAD_ARGUMENT, "null argument");
    return guarded([&] {
        epdd::SimulationConfig c = cfg->config;
        // The comparison is a single-pulse experiment; an unset count means one pulse.
        if (!cfg->pulse_count_explicit)
            c.pulses.pulse_count_PN = 1;
        const auto r = epdd::execute_compare_kalamiza(c, out_dir);
        if (prefactor_ratio)
            *prefactor_ratio = r.mtc.prefactor_ratio;
        if (max_C_RE_gap)
            *max_C_RE_gap = r.max_C_RE_gap;
    });
}

double epdd_conductivity(const epdd_config* cfg, double E)
{
    return cfg ? epdd::conductivity(E, cfg->config.tissue) : 0.0;
}

double epdd_pore_fraction(const epdd_config* cfg, double E)
{
    return cfg ? epdd::pore_fraction(E, cfg->config.electro) : 0.0;
}

double epdd_mtc(const epdd_config* cfg, double clock, double E)
{
    if (!cfg)
        return 0.0;
    return epdd::mtc(clock, epdd::pore_fraction(E, cfg->config.electro), epdd::MtcParams::from(cfg->config));
}

double epdd_mtc_kalamiza(const epdd_config* cfg, double clock)
{
    return cfg ? epdd::mtc_kalamiza(clock, epdd::KalamizaParams::from(cfg->config)) : 0.0;
}

}  // extern "C"

// epdd: command-line front end. Talks to the simulator only through the C API.

#include "epdd/epdd.h"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using ConfigPtr = std::unique_ptr<epdd_config, decltype(&epdd_config_free)>;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "epdd_out";
    bool allow_unstable = false;
    bool literal_robin = false;
    bool snapshot_every_cycle = false;
    std::optional<double> tau;
    std::vector<std::string> overrides;
};

int report(epdd_status status)
{
    if (status != EPDD_OK)
        std::cerr << "error: " << epdd_last_error() << "\n";
    return epdd_exit_code(status);
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_output)
{
    cmd->add_option("config", f.config_path, "JSON config file or run manifest")->required();
    if (with_output)
        cmd->add_option("-o,--output", f.out_dir, "output directory")->capture_default_str();
    cmd->add_flag("--allow-unstable", f.allow_unstable, "accept a time step above the stability bound");
    cmd->add_flag("--literal-robin", f.literal_robin, "boundary signs as printed (gain on x=L and y=L)");
    cmd->add_flag("--snapshot-every-cycle", f.snapshot_every_cycle, "also snapshot at the end of every cycle");
    cmd->add_option("--tau", f.tau, "resealing time constant in s");
    cmd->add_option("--set", f.overrides, "override a field, e.g. --set 'boundary.beta=0 1/mm'");
}

// Loads the config and applies overrides and flags. Returns EPDD_OK or the failure status.
epdd_status prepare(const CommonFlags& f, ConfigPtr& cfg)
{
    epdd_config* raw = nullptr;
    epdd_status s = epdd_config_load(f.config_path.c_str(), &raw);
    if (s != EPDD_OK)
        return s;
    cfg.reset(raw);
    for (const auto& o : f.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --set expects key=value, got '" << o << "'\n";
            return EPDD_BAD_ARGUMENT;
        }
        s = epdd_config_set(cfg.get(), o.substr(0, eq).c_str(), o.substr(eq + 1).c_str());
        if (s != EPDD_OK)
            return s;
    }
    if (f.allow_unstable)
        epdd_config_set_allow_unstable(cfg.get(), 1);
    if (f.literal_robin)
        epdd_config_set_literal_robin(cfg.get(), 1);
    if (f.snapshot_every_cycle)
        epdd_config_set_snapshot_every_cycle(cfg.get(), 1);
    if (f.tau)
        epdd_config_set_tau(cfg.get(), *f.tau);
    return EPDD_OK;
}

// Comma-separated numbers; nullopt on any malformed item, empty for blank input.
std::optional<std::vector<double>> parse_values(const std::string& text)
{
    std::vector<double> out;
    if (text.find_first_not_of(" \t") == std::string::npos)
        return out;
    std::size_t pos = 0;
    for (;;) {
        const auto comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos)
            return std::nullopt;
        item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
        double v = 0.0;
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || p != item.data() + item.size())
            return std::nullopt;
        out.push_back(v);
        if (comma == std::string::npos)
            return out;
        pos = comma + 1;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Electroporation-assisted drug delivery simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", epdd_version());

    CommonFlags run_flags;
    auto* run = app.add_subcommand("run", "solve the field and run the pulse schedule");
    add_common(run, run_flags, true);

    CommonFlags sweep_flags;
    std::string axis;
    std::string values_text;
    unsigned threads = 1;
    auto* sweep = app.add_subcommand("sweep", "one run per value of beta, P or PN");
    add_common(sweep, sweep_flags, true);
    sweep->add_option("--axis", axis, "beta (1/mm), P (mm/s) or PN")->required();
    sweep->add_option("--values", values_text, "comma-separated values in internal units")->required();
    sweep->add_option("--threads", threads, "concurrent member runs")->check(CLI::PositiveNumber);

    CommonFlags cmp_flags;
    auto* cmp = app.add_subcommand("compare-kalamiza", "single-pulse comparison with the reference transfer coefficient");
    add_common(cmp, cmp_flags, true);

    CommonFlags val_flags;
    auto* val = app.add_subcommand("validate", "check a config and print the stability bound");
    add_common(val, val_flags, false);

    auto* defaults = app.add_subcommand("defaults", "print the default config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return epdd_exit_code(EPDD_BAD_ARGUMENT);
    }

    ConfigPtr cfg(nullptr, &epdd_config_free);

    if (*defaults) {
        epdd_config* raw = nullptr;
        if (const auto s = epdd_config_default(&raw); s != EPDD_OK)
            return report(s);
        cfg.reset(raw);
        std::size_t needed = 0;
        epdd_config_to_json(cfg.get(), nullptr, 0, &needed);
        std::string text(needed, '\0');
        epdd_config_to_json(cfg.get(), text.data(), text.size(), &needed);
        text.resize(needed - 1);
        std::cout << text;
        return 0;
    }

    if (*run) {
        if (const auto s = prepare(run_flags, cfg); s != EPDD_OK)
            return report(s);
        epdd_run_summary sum{};
        const auto s = epdd_run(cfg.get(), run_flags.out_dir.c_str(), &sum);
        if (s == EPDD_OK) {
            std::printf("steps %zu, final time %.17g s, ecs mass %.17g, ics mass %.17g, boundary loss %.17g\n",
                        sum.steps, sum.final_time, sum.ecs_mass, sum.ics_mass, sum.boundary_loss);
            std::printf("max ledger residual %.3e%s\n", sum.max_residual, sum.unstable ? " (UNSTABLE step size)" : "");
        }
        return report(s);
    }

    if (*sweep) {
        const auto values = parse_values(values_text);
        if (!values || values->empty()) {
            std::cerr << "error: --values needs at least one number (comma-separated)\n";
            return epdd_exit_code(EPDD_BAD_ARGUMENT);
        }
        if (const auto s = prepare(sweep_flags, cfg); s != EPDD_OK)
            return report(s);
        return report(epdd_sweep(cfg.get(), axis.c_str(), values->data(), values->size(),
                                 sweep_flags.out_dir.c_str(), threads));
    }

    if (*cmp) {
        if (const auto s = prepare(cmp_flags, cfg); s != EPDD_OK)
            return report(s);
        double ratio = 0.0;
        double gap = 0.0;
        const auto s = epdd_compare_kalamiza(cfg.get(), cmp_flags.out_dir.c_str(), &ratio, &gap);
        if (s == EPDD_OK)
            std::printf("prefactor ratio %.6g, max C_RE gap %.6g of reference peak\n", ratio, gap);
        return report(s);
    }

    if (*val) {
        if (const auto s = prepare(val_flags, cfg); s != EPDD_OK)
            return report(s);
        double limit = 0.0;
        const auto s = epdd_config_validate(cfg.get(), &limit);
        if (s == EPDD_OK)
            std::printf("ok (stability limit %.17g s)\n", limit);
        return report(s);
    }
    return 0;
}

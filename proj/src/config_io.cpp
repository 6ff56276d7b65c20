#include "epdd/config_io.hpp"

#include "config_json.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <span>
#include <sstream>

namespace epdd {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct UnitDef {
    std::string_view name;
    double factor;
    bool divide;  // dividing by an exact power of ten rounds better than multiplying by its inverse
};

std::span<const UnitDef> units_for(Dimension d)
{
    static constexpr std::array<UnitDef, 3> none{{{"", 1.0, false}, {"1", 1.0, false}, {"-", 1.0, false}}};
    static constexpr std::array<UnitDef, 4> length{{{"mm", 1.0, false}, {"um", 1e3, true}, {"cm", 10.0, false}, {"m", 1e3, false}}};
    static constexpr std::array<UnitDef, 4> time{{{"s", 1.0, false}, {"ms", 1e3, true}, {"us", 1e6, true}, {"min", 60.0, false}}};
    static constexpr std::array<UnitDef, 3> potential{{{"V", 1.0, false}, {"mV", 1e3, true}, {"kV", 1e3, false}}};
    static constexpr std::array<UnitDef, 5> field{
        {{"V/mm", 1.0, false}, {"V/m", 1e3, true}, {"V/cm", 10.0, true}, {"kV/cm", 100.0, false}, {"kV/m", 1.0, false}}};
    static constexpr std::array<UnitDef, 3> conductivity{{{"S/m", 1.0, false}, {"mS/m", 1e3, true}, {"mS/cm", 10.0, true}}};
    static constexpr std::array<UnitDef, 8> diffusivity{{{"mm^2/s", 1.0, false}, {"mm2/s", 1.0, false},
                                                         {"m^2/s", 1e6, false}, {"m2/s", 1e6, false},
                                                         {"cm^2/s", 100.0, false}, {"cm2/s", 100.0, false},
                                                         {"um^2/s", 1e6, true}, {"um2/s", 1e6, true}}};
    static constexpr std::array<UnitDef, 4> velocity{{{"mm/s", 1.0, false}, {"m/s", 1e3, false}, {"cm/s", 10.0, false}, {"um/s", 1e3, true}}};
    static constexpr std::array<UnitDef, 5> inverse{{{"1/mm", 1.0, false}, {"mm^-1", 1.0, false}, {"1/m", 1e3, true}, {"m^-1", 1e3, true}, {"1/cm", 10.0, true}}};
    switch (d) {
    case Dimension::Dimensionless: return none;
    case Dimension::Length: return length;
    case Dimension::Time: return time;
    case Dimension::Potential: return potential;
    case Dimension::Field: return field;
    case Dimension::Conductivity: return conductivity;
    case Dimension::Diffusivity: return diffusivity;
    case Dimension::Velocity: return velocity;
    case Dimension::InverseLength: return inverse;
    }
    return none;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

Error bad(const std::string& what) { return Error(ErrorKind::Validation, what); }

// Collects violations while walking the document so that one load reports every problem.
class Reader {
public:
    std::vector<Violation> errors;

    void section(const json& doc, const char* name, std::initializer_list<std::string_view> keys,
                 const std::function<void(const json&)>& body)
    {
        if (!doc.contains(name))
            return;
        const json& obj = doc.at(name);
        if (!obj.is_object()) {
            errors.push_back({name, "must be an object"});
            return;
        }
        for (const auto& [k, v] : obj.items()) {
            bool known = false;
            for (auto allowed : keys)
                known = known || (k == allowed);
            if (!known)
                errors.push_back({std::string(name) + "." + k, "unknown key"});
        }
        prefix_ = name;
        body(obj);
    }

    void quantity(const json& obj, const char* key, Dimension d, double& out)
    {
        if (!obj.contains(key))
            return;
        try {
            out = value_of(obj.at(key), d);
        } catch (const std::exception& e) {
            errors.push_back({path(key), e.what()});
        }
    }

    void point(const json& obj, const char* key, Point& out)
    {
        if (!obj.contains(key))
            return;
        try {
            out = point_of(obj.at(key));
        } catch (const std::exception& e) {
            errors.push_back({path(key), e.what()});
        }
    }

    template <class Int>
    void integer(const json& obj, const char* key, Int& out)
    {
        if (!obj.contains(key))
            return;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            errors.push_back({path(key), "must be an integer"});
            return;
        }
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.get<long long>() < 0) {
                errors.push_back({path(key), "must be >= 0"});
                return;
            }
        }
        out = v.get<Int>();
    }

    void boolean(const json& obj, const char* key, bool& out)
    {
        if (!obj.contains(key))
            return;
        if (!obj.at(key).is_boolean()) {
            errors.push_back({path(key), "must be true or false"});
            return;
        }
        out = obj.at(key).get<bool>();
    }

    static double value_of(const json& v, Dimension d)
    {
        if (v.is_number()) {
            if (d != Dimension::Dimensionless)
                throw bad("missing unit (expected \"<number> " + std::string(internal_unit(d)) + "\")");
            return v.get<double>();
        }
        if (!v.is_string())
            throw bad("must be a number or a \"<number> <unit>\" string");
        return parse_quantity(v.get<std::string>(), d);
    }

    static Point point_of(const json& v)
    {
        if (!v.is_array() || v.size() != 2)
            throw bad("must be a [x, y] pair");
        return {value_of(v[0], Dimension::Length), value_of(v[1], Dimension::Length)};
    }

    [[nodiscard]] std::string path(const char* key) const { return prefix_ + "." + key; }

private:
    std::string prefix_;
};

ordered_json q(double value, Dimension d) { return format_quantity(value, d); }

ordered_json point_json(const Point& p)
{
    return ordered_json::array({q(p.x, Dimension::Length), q(p.y, Dimension::Length)});
}

}  // namespace

std::string_view internal_unit(Dimension d) noexcept { return units_for(d).front().name; }

double parse_quantity(std::string_view text, Dimension d)
{
    text = trim(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{})
        throw bad("cannot parse number in \"" + std::string(text) + "\"");
    const std::string_view unit = trim(text.substr(static_cast<std::size_t>(end - text.data())));
    for (const auto& u : units_for(d)) {
        if (u.name == unit)
            return u.divide ? value / u.factor : value * u.factor;
    }
    if (unit.empty())
        throw bad("missing unit (expected \"<number> " + std::string(internal_unit(d)) + "\")");
    throw bad("unsupported unit \"" + std::string(unit) + "\" (internal unit is \"" +
              std::string(internal_unit(d)) + "\")");
}

std::string format_number(double value)
{
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ec == std::errc{} ? end : buf.data());
}

std::string format_quantity(double value, Dimension d)
{
    std::string s = format_number(value);
    const auto unit = internal_unit(d);
    if (!unit.empty()) {
        s += ' ';
        s += unit;
    }
    return s;
}

namespace detail {

SimulationConfig config_from_json(const json& doc)
{
    if (!doc.is_object())
        throw ValidationError("<root>", "config must be a JSON object");

    // A run manifest embeds the resolved config it was produced from.
    if (doc.contains("manifest_version") && doc.contains("config"))
        return config_from_json(doc.at("config"));

    SimulationConfig c;
    Reader r;
    for (const auto& [k, v] : doc.items()) {
        static constexpr std::array<std::string_view, 9> top{
            "tissue", "drug", "electro", "pulses", "grid", "boundary", "kalamiza", "output", "solver"};
        if (std::find(top.begin(), top.end(), k) == top.end())
            r.errors.push_back({k, "unknown key"});
    }

    r.section(doc, "tissue",
              {"length", "sigma_min", "sigma_max", "E_rev", "E_irrev", "gamma1", "gamma2", "porosity", "cell_radius"},
              [&](const json& o) {
                  auto& t = c.tissue;
                  r.quantity(o, "length", Dimension::Length, t.length_L);
                  r.quantity(o, "sigma_min", Dimension::Conductivity, t.sigma_min);
                  r.quantity(o, "sigma_max", Dimension::Conductivity, t.sigma_max);
                  r.quantity(o, "E_rev", Dimension::Field, t.E_rev);
                  r.quantity(o, "E_irrev", Dimension::Field, t.E_irrev);
                  r.quantity(o, "gamma1", Dimension::Dimensionless, t.gamma1);
                  r.quantity(o, "gamma2", Dimension::Dimensionless, t.gamma2);
                  r.quantity(o, "porosity", Dimension::Dimensionless, t.porosity_eps);
                  r.quantity(o, "cell_radius", Dimension::Length, t.cell_radius_rc);
              });
    r.section(doc, "drug", {"diffusivity", "permeability", "dose", "delta_width", "injection_center"},
              [&](const json& o) {
                  auto& d = c.drug;
                  r.quantity(o, "diffusivity", Dimension::Diffusivity, d.diffusivity_D);
                  r.quantity(o, "permeability", Dimension::Velocity, d.permeability_P);
                  r.quantity(o, "dose", Dimension::Dimensionless, d.dose_nd);
                  r.quantity(o, "delta_width", Dimension::Dimensionless, d.delta_width_d);
                  r.point(o, "injection_center", d.injection_center);
              });
    r.section(doc, "electro", {"phi0", "phiL", "E_f", "b_f", "resealing_tau"}, [&](const json& o) {
        auto& e = c.electro;
        r.quantity(o, "phi0", Dimension::Potential, e.phi0);
        r.quantity(o, "phiL", Dimension::Potential, e.phiL);
        r.quantity(o, "E_f", Dimension::Field, e.Ef_fit);
        r.quantity(o, "b_f", Dimension::Field, e.bf_fit);
        r.quantity(o, "resealing_tau", Dimension::Time, e.resealing_tau);
    });
    r.section(doc, "pulses", {"count", "on_time", "off_time"}, [&](const json& o) {
        r.integer(o, "count", c.pulses.pulse_count_PN);
        r.quantity(o, "on_time", Dimension::Time, c.pulses.on_time_tep);
        r.quantity(o, "off_time", Dimension::Time, c.pulses.off_time_tM);
    });

    bool explicit_dx = false;
    bool explicit_dy = false;
    r.section(doc, "grid", {"nx", "ny", "dx", "dy", "dt"}, [&](const json& o) {
        r.integer(o, "nx", c.grid.nx);
        r.integer(o, "ny", c.grid.ny);
        explicit_dx = o.contains("dx");
        explicit_dy = o.contains("dy");
        r.quantity(o, "dx", Dimension::Length, c.grid.dx);
        r.quantity(o, "dy", Dimension::Length, c.grid.dy);
        r.quantity(o, "dt", Dimension::Time, c.grid.dt);
    });
    {
        const double dx = c.grid.dx;
        const double dy = c.grid.dy;
        derive_spacing(c);
        if (explicit_dx)
            c.grid.dx = dx;
        if (explicit_dy)
            c.grid.dy = dy;
    }

    r.section(doc, "boundary", {"beta", "convention"}, [&](const json& o) {
        r.quantity(o, "beta", Dimension::InverseLength, c.boundary.beta);
        if (o.contains("convention")) {
            const json& v = o.at("convention");
            if (v == "outward-loss")
                c.boundary.convention = RobinConvention::OutwardLoss;
            else if (v == "literal")
                c.boundary.convention = RobinConvention::Literal;
            else
                r.errors.push_back({"boundary.convention", "must be \"outward-loss\" or \"literal\""});
        }
    });
    r.section(doc, "kalamiza", {"pore_fraction", "membrane_thickness"}, [&](const json& o) {
        r.quantity(o, "pore_fraction", Dimension::Dimensionless, c.kalamiza.pore_fraction);
        r.quantity(o, "membrane_thickness", Dimension::Length, c.kalamiza.membrane_thickness);
    });
    r.section(doc, "output", {"snapshot_times", "snapshot_every_cycle", "probe_stride", "probes", "export_field"},
              [&](const json& o) {
                  auto& out = c.output;
                  if (o.contains("snapshot_times")) {
                      const json& a = o.at("snapshot_times");
                      if (!a.is_array()) {
                          r.errors.push_back({"output.snapshot_times", "must be an array"});
                      } else {
                          out.snapshot_times.clear();
                          for (std::size_t i = 0; i < a.size(); ++i) {
                              try {
                                  out.snapshot_times.push_back(Reader::value_of(a[i], Dimension::Time));
                              } catch (const std::exception& e) {
                                  r.errors.push_back({"output.snapshot_times[" + std::to_string(i) + "]", e.what()});
                              }
                          }
                      }
                  }
                  r.boolean(o, "snapshot_every_cycle", out.snapshot_every_cycle);
                  r.quantity(o, "probe_stride", Dimension::Time, out.probe_stride);
                  if (o.contains("probes")) {
                      const json& a = o.at("probes");
                      if (!a.is_array()) {
                          r.errors.push_back({"output.probes", "must be an array of [x, y] pairs"});
                      } else {
                          out.probes.clear();
                          for (std::size_t i = 0; i < a.size(); ++i) {
                              try {
                                  out.probes.push_back(Reader::point_of(a[i]));
                              } catch (const std::exception& e) {
                                  r.errors.push_back({"output.probes[" + std::to_string(i) + "]", e.what()});
                              }
                          }
                      }
                  }
                  r.boolean(o, "export_field", out.export_field);
              });
    r.section(doc, "solver", {"field_tol", "max_picard", "conservation_tol", "allow_unstable"}, [&](const json& o) {
        r.quantity(o, "field_tol", Dimension::Dimensionless, c.solver.field_tol);
        r.integer(o, "max_picard", c.solver.max_picard);
        r.quantity(o, "conservation_tol", Dimension::Dimensionless, c.solver.conservation_tol);
        r.boolean(o, "allow_unstable", c.solver.allow_unstable);
    });

    if (!r.errors.empty())
        throw ValidationError(std::move(r.errors));
    return c;
}

ordered_json config_to_json(const SimulationConfig& c)
{
    ordered_json doc;
    const auto& t = c.tissue;
    doc["tissue"] = {
        {"length", q(t.length_L, Dimension::Length)},
        {"sigma_min", q(t.sigma_min, Dimension::Conductivity)},
        {"sigma_max", q(t.sigma_max, Dimension::Conductivity)},
        {"E_rev", q(t.E_rev, Dimension::Field)},
        {"E_irrev", q(t.E_irrev, Dimension::Field)},
        {"gamma1", t.gamma1},
        {"gamma2", t.gamma2},
        {"porosity", t.porosity_eps},
        {"cell_radius", q(t.cell_radius_rc, Dimension::Length)},
    };
    const auto& d = c.drug;
    doc["drug"] = {
        {"diffusivity", q(d.diffusivity_D, Dimension::Diffusivity)},
        {"permeability", q(d.permeability_P, Dimension::Velocity)},
        {"dose", d.dose_nd},
        {"delta_width", d.delta_width_d},
        {"injection_center", point_json(d.injection_center)},
    };
    const auto& e = c.electro;
    doc["electro"] = {
        {"phi0", q(e.phi0, Dimension::Potential)},
        {"phiL", q(e.phiL, Dimension::Potential)},
        {"E_f", q(e.Ef_fit, Dimension::Field)},
        {"b_f", q(e.bf_fit, Dimension::Field)},
        {"resealing_tau", q(e.resealing_tau, Dimension::Time)},
    };
    doc["pulses"] = {
        {"count", c.pulses.pulse_count_PN},
        {"on_time", q(c.pulses.on_time_tep, Dimension::Time)},
        {"off_time", q(c.pulses.off_time_tM, Dimension::Time)},
    };
    doc["grid"] = {
        {"nx", c.grid.nx},
        {"ny", c.grid.ny},
        {"dx", q(c.grid.dx, Dimension::Length)},
        {"dy", q(c.grid.dy, Dimension::Length)},
        {"dt", q(c.grid.dt, Dimension::Time)},
    };
    doc["boundary"] = {
        {"beta", q(c.boundary.beta, Dimension::InverseLength)},
        {"convention", c.boundary.convention == RobinConvention::OutwardLoss ? "outward-loss" : "literal"},
    };
    doc["kalamiza"] = {
        {"pore_fraction", c.kalamiza.pore_fraction},
        {"membrane_thickness", q(c.kalamiza.membrane_thickness, Dimension::Length)},
    };
    ordered_json snaps = ordered_json::array();
    for (double s : c.output.snapshot_times)
        snaps.push_back(q(s, Dimension::Time));
    ordered_json probes = ordered_json::array();
    for (const auto& p : c.output.probes)
        probes.push_back(point_json(p));
    doc["output"] = {
        {"snapshot_times", snaps},
        {"snapshot_every_cycle", c.output.snapshot_every_cycle},
        {"probe_stride", q(c.output.probe_stride, Dimension::Time)},
        {"probes", probes},
        {"export_field", c.output.export_field},
    };
    doc["solver"] = {
        {"field_tol", c.solver.field_tol},
        {"max_picard", c.solver.max_picard},
        {"conservation_tol", c.solver.conservation_tol},
        {"allow_unstable", c.solver.allow_unstable},
    };
    return doc;
}

}  // namespace detail

SimulationConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return detail::config_from_json(doc);
}

SimulationConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const SimulationConfig& config)
{
    return detail::config_to_json(config).dump(2) + "\n";
}

}  // namespace epdd

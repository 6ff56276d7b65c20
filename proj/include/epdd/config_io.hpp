#ifndef EPDD_CONFIG_IO_HPP
#define EPDD_CONFIG_IO_HPP

/**
 * @file config_io.hpp
 * @brief JSON config files with explicit unit suffixes.
 *
 * Dimensioned fields are strings of the form "<number> <unit>", e.g.
 * "50 um" or "1e-3 mm^2/s"; dimensionless fields are plain numbers. Values
 * are converted to the internal unit set on load. Missing fields keep their
 * defaults, unknown keys are rejected. Serialization writes every field in
 * internal units using the shortest decimal that round-trips, so
 * load(serialize(c)) == c bit for bit. A run manifest is accepted wherever a
 * config is, and its embedded config is used. See docs/config.md for the schema.
 */

#include "epdd/config.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace epdd {

enum class Dimension {
    Dimensionless,
    Length,          ///< mm
    Time,            ///< s
    Potential,       ///< V
    Field,           ///< V/mm
    Conductivity,    ///< S/m
    Diffusivity,     ///< mm^2/s
    Velocity,        ///< mm/s
    InverseLength,   ///< 1/mm
};

/// Canonical unit string for a dimension ("" for dimensionless).
std::string_view internal_unit(Dimension d) noexcept;

/// Parses "<number> <unit>" into internal units; throws Error(Validation) on a bad unit or number.
double parse_quantity(std::string_view text, Dimension d);

/// Shortest round-trip decimal text of @p value.
std::string format_number(double value);

/// "<number> <internal unit>".
std::string format_quantity(double value, Dimension d);

/// Parses config text; throws ValidationError listing every malformed or unknown field.
SimulationConfig parse_config(std::string_view text);

/// Throws IoError when the file cannot be read.
SimulationConfig load_config(const std::filesystem::path& path);

/// Full config (every field, defaults included) as pretty-printed JSON.
std::string serialize_config(const SimulationConfig& config);

}  // namespace epdd

#endif

#ifndef EPDD_SRC_CONFIG_JSON_HPP
#define EPDD_SRC_CONFIG_JSON_HPP

#include "epdd/config.hpp"

#include <json.hpp>

namespace epdd::detail {

nlohmann::ordered_json config_to_json(const SimulationConfig& config);
SimulationConfig config_from_json(const nlohmann::json& doc);

}  // namespace epdd::detail

#endif

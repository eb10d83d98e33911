#pragma once

#include <json.hpp>
#include <string>
#include <utility>

#include "gb2d/core.hpp"
#include "gb2d/scenario.hpp"

namespace gb2d {

using json = nlohmann::ordered_json;

json complex_to_json(const cxd& z);
cxd complex_from_json(const json& j, const std::string& key);
json matrix_to_json(const CMat& m);  // row-major nested arrays
CMat matrix_from_json(const json& j, const std::string& key);
json vector_to_json(const CVec& v);
CVec vector_from_json(const json& j, const std::string& key);

json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const json& j);

void save_scenario(const Scenario& s, const std::string& path);
/// Parses, validates and returns the scenario with its validation report.
std::pair<Scenario, ValidationReport> load_scenario(const std::string& path);

json gen_config_to_json(const GenConfig& cfg);
GenConfig gen_config_from_json(const json& j);

}  // namespace gb2d

#pragma once

#include <string>

#include "repgame/construction.hpp"

namespace repgame {

// "3/2", "-1/2", "0.25", or a plain number
double parse_rational(const std::string& text);

ReputationScenario load_scenario(const std::string& path);
ReputationScenario parse_scenario(const std::string& json_text);
std::string scenario_to_json(const ReputationScenario& s);

Profile load_profile(const std::string& path, const ReputationScenario& s);
Profile parse_profile(const std::string& json_text, const ReputationScenario& s);
std::string profile_to_json(const Profile& p, const ReputationScenario& s);

EquilibriumMachine load_equilibrium(const std::string& path);
std::string equilibrium_to_json(const EquilibriumMachine& eq);

std::string plan_to_json(const DeviationPlan& plan, const ReputationScenario& s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace repgame

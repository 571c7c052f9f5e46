#pragma once

#include <string>
#include <vector>

#include "hmp/scenario.hpp"

namespace hmp {

/// Two-link vertical throw with the range objective. Inertial parameters
/// are repo choices, not measured hardware values.
Scenario throwing_scenario();

/// Leg-hip-waist sit-to-stand with the time/torque objective.
Scenario standing_scenario();

/// Oracle-checkable fixtures: "rest_to_rest", "single_switch", "free_pair".
std::vector<Scenario> toy_scenarios();

/// Built-in lookup by name; ConfigError for unknown names.
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_names();

/// The response time matrix used for the Eq. 2 example on the throwing arm.
ResponseTimeMatrix example_matrix();

}  // namespace hmp

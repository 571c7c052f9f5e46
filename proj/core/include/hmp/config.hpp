#pragma once

#include <string>

#include "hmp/scenario.hpp"

namespace hmp {

/// Scenario from JSON text. With a "base" key naming a built-in scenario,
/// every other key is an override; without one, the document must be
/// complete. Throws ConfigError with the offending key path.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

/// Complete JSON document; parse_scenario(dump_scenario(s)) reproduces s.
std::string dump_scenario(const Scenario& s);

/// Rows of a matrix written as "0.1 0.3 0.9; 0 0.2 0.9". Initial modes are
/// taken from the template.
ResponseTimeMatrix parse_matrix(const std::string& text, const ResponseTimeMatrix& like);

}  // namespace hmp

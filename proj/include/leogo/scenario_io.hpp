#pragma once

#include "leogo/model.hpp"

#include <stdexcept>
#include <string>

namespace leogo {

class ScenarioFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full scenario as a JSON document (schema in docs/scenario.md).
std::string scenario_to_json(const Scenario& s, int indent = 2);

/// Reads a scenario document. The canonical scenario named by "case"
/// (default base) supplies every key the document omits; a gas turbine
/// without explicit fuel-curve coefficients gets them fitted from its
/// efficiency points. Throws ScenarioFormatError on malformed input.
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario_file(const std::string& path);

} // namespace leogo

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "telepassive/model.hpp"

namespace telepassive {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario used for every key a config file does not set: the reference desk-scale
/// setup (identical mass-damper robots, spring operator hand, 4 rad wall, p-like
/// coupling, 2 ms sampling, no channel delay, 40 s horizon).
Scenario default_scenario();

/// Flat `section.key = value` format, `#` starts a comment. Unknown or duplicated
/// keys are errors; controller gain keys must match the declared controller.type.
Scenario parse_config_text(const std::string& text);
Scenario parse_config_file(const std::filesystem::path& path);

/// Canonical rendering of a scenario; parse_config_text() round-trips it exactly.
/// The format carries exactly one operator force segment.
std::string dump_config(const Scenario& scenario);

}  // namespace telepassive

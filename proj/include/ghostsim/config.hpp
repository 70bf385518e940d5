#pragma once

#include <string>

#include "ghostsim/scenario.hpp"

namespace ghostsim {

/// Parses the flat INI-style configuration (sections [scheme], [grid],
/// [spectrum], [ensemble], [geometry], [aperture]). Lengths require a unit
/// suffix (nm, um, mm, cm, m); unknown sections or keys fail closed with the
/// offending line number.
ScenarioConfig parse_config(const std::string& text);

ScenarioConfig load_config_file(const std::string& path);

/// Canonical serialization; parse(emit(cfg)) reproduces cfg exactly.
std::string emit_config(const ScenarioConfig& cfg);

/// FNV-1a hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const ScenarioConfig& cfg);

/// "85 um" -> 8.5e-5. Exposed for tests.
double parse_length(const std::string& token);

}  // namespace ghostsim

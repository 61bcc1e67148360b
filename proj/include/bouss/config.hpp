#pragma once

#include "bouss/integrator.hpp"

#include <iosfwd>
#include <string>

namespace bouss {

inline constexpr const char* kVersion = "0.1.0";

// Parses and validates a JSON config. Unknown keys are rejected with the
// nearest known key named; defaults are applied for everything optional.
// Throws config_error with the exact key path on violations.
SimConfig parse_config_file(const std::string& path);
SimConfig parse_config_text(const std::string& text);

// canonical (sorted-key) JSON of a fully-defaulted config
std::string canonical_config_json(const SimConfig& cfg);

// FNV-1a 64 over the canonical JSON, as 16 hex digits
std::string config_hash(const SimConfig& cfg);

// Scenario presets. Known names: heated-cavity-slip, stokes-check,
// manufactured. Throws config_error on unknown names.
SimConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace bouss

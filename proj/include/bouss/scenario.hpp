#pragma once

#include "bouss/config.hpp"
#include "bouss/harness.hpp"

namespace bouss {

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string scenario;      // preset name or "config"
    int nx = 0, ny = 0;
    std::string h0_summary;    // "pass" / "fail (...)"
    bool h0_ok = false;
    std::vector<std::string> outputs;  // file names relative to out_dir
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
    bool success = false;
    std::string error;          // populated on failure
    std::string energy_label;   // energy_report verdict
};

// Executes a run plus its energy report and writes fields, the monitor CSV
// and manifest.json under out_dir. The manifest is written even when the run
// fails; the failure is rethrown afterwards.
RunManifest run_scenario(const SimConfig& cfg, const std::string& out_dir,
                         const std::string& scenario_name = "config");

// Preset-by-name runner; "manufactured" installs the exact-solution hooks.
RunManifest run_scenario_named(const std::string& name, const std::string& out_dir);

void write_manifest(const RunManifest& manifest, const std::string& out_dir);

}  // namespace bouss

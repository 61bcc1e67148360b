#include "bouss/scenario.hpp"

#include "bouss/export.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>

namespace bouss {

void write_manifest(const RunManifest& manifest, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    nlohmann::json j;
    j["config_hash"] = manifest.config_hash;
    j["code_version"] = manifest.code_version;
    j["scenario"] = manifest.scenario;
    j["mesh"] = {{"nx", manifest.nx}, {"ny", manifest.ny}};
    j["h0"] = {{"ok", manifest.h0_ok}, {"summary", manifest.h0_summary}};
    j["outputs"] = manifest.outputs;
    j["warnings"] = manifest.warnings;
    j["wall_seconds"] = manifest.wall_seconds;
    j["success"] = manifest.success;
    j["error"] = manifest.error;
    j["energy_verdict"] = manifest.energy_label;
    std::ofstream out(out_dir + "/manifest.json");
    out << j.dump(2) << "\n";
}

RunManifest run_scenario(const SimConfig& cfg, const std::string& out_dir,
                         const std::string& scenario_name) {
    const auto t0 = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.config_hash = config_hash(cfg);
    manifest.code_version = kVersion;
    manifest.scenario = scenario_name;
    manifest.nx = cfg.nx;
    manifest.ny = cfg.ny;

    std::filesystem::create_directories(out_dir);
    try {
        Simulation sim(cfg);
        {
            const auto& h0 = sim.h0();
            manifest.h0_ok = h0.ok();
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "%s (velocity margin %.6g, thermal margin %.6g)",
                          h0.ok() ? "pass" : "fail", h0.velocity_margin, h0.thermal_margin);
            manifest.h0_summary = buf;
        }
        const RunResult run = sim.run();
        manifest.warnings = run.warnings;

        {
            std::ofstream csv(out_dir + "/" + cfg.output.monitor_csv);
            write_monitor_csv(run.monitors, csv);
            manifest.outputs.push_back(cfg.output.monitor_csv);
        }
        if (cfg.output.fields_every > 0) {
            for (size_t n = 0; n < run.trajectory.size(); n += cfg.output.fields_every) {
                char stem[64];
                std::snprintf(stem, sizeof(stem), "fields_%05zu", n);
                manifest.outputs.push_back(export_fields(run.trajectory[n], sim.spaces(),
                                                         out_dir, stem, cfg.output.format));
            }
        }
        manifest.outputs.push_back(export_fields(run.trajectory.back(), sim.spaces(), out_dir,
                                                 "fields_final", cfg.output.format));

        const EnergyVerdict verdict = energy_report(run);
        manifest.energy_label = verdict.label;
        manifest.success = true;
        if (!verdict.pass && !verdict.h0_violated)
            manifest.warnings.push_back("energy inequality violated at step " +
                                        std::to_string(verdict.worst_step));
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(manifest, out_dir);
        return manifest;
    } catch (const std::exception& e) {
        manifest.success = false;
        manifest.error = e.what();
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(manifest, out_dir);
        throw;
    }
}

RunManifest run_scenario_named(const std::string& name, const std::string& out_dir) {
    if (name == "manufactured") {
        const SimConfig proto = preset_config(name);
        return run_scenario(manufactured_config(proto.nx, proto.T, proto.dt), out_dir, name);
    }
    return run_scenario(preset_config(name), out_dir, name);
}

}  // namespace bouss

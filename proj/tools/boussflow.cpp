// Command-line driver: run scenarios, certify the nonsmooth laws, drive
// refinement studies and manufactured-solution verification, inspect meshes.
#include "bouss/export.hpp"
#include "bouss/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitStudy = 4;

using namespace bouss;

SimConfig load_config(const std::string& config_path, const std::string& preset) {
    if (!config_path.empty() && !preset.empty())
        throw config_error("give either --config or --preset, not both");
    if (!config_path.empty()) return parse_config_file(config_path);
    if (!preset.empty()) {
        if (preset == "manufactured") {
            const SimConfig proto = preset_config(preset);
            return manufactured_config(proto.nx, proto.T, proto.dt);
        }
        return preset_config(preset);
    }
    throw config_error("need --config FILE or --preset NAME");
}

void print_law_constants(const char* label, const PiecewiseLaw& law, double range, int grid) {
    const LawConstants c = estimate_constants(law, range, grid);
    std::printf("%s ('%s'):\n", label, law.name.c_str());
    std::printf("  c0 = %.12g   (growth |dj| <= c0 (1+|s|), certified on [-%g, %g])\n", c.c0,
                range, range);
    if (c.finite())
        std::printf("  m1 = %.12g   (max descent slope of j')\n", c.m1);
    else
        std::printf("  m1 = +inf    (downward jump in j'; declare a bounded-descent slope "
                    "to certify)\n");
    if (c.descent_jump) std::printf("  note: the law has a descending jump\n");
}

int cmd_run(const std::string& config_path, const std::string& preset,
            const std::string& out_dir) {
    const SimConfig cfg = load_config(config_path, preset);
    const std::string name = preset.empty() ? "config" : preset;
    const RunManifest manifest = run_scenario(cfg, out_dir, name);
    std::printf("run complete: %d x %d mesh, hash %s\n", manifest.nx, manifest.ny,
                manifest.config_hash.c_str());
    std::printf("  H0: %s\n", manifest.h0_summary.c_str());
    std::printf("  energy verdict: %s\n", manifest.energy_label.c_str());
    for (const auto& w : manifest.warnings) std::printf("  warning: %s\n", w.c_str());
    std::printf("  outputs in %s: ", out_dir.c_str());
    for (const auto& o : manifest.outputs) std::printf("%s ", o.c_str());
    std::printf("\n");
    return 0;
}

int cmd_check_laws(const std::string& config_path, const std::string& preset) {
    const SimConfig cfg = load_config(config_path, preset);
    print_law_constants("friction law j", cfg.friction, cfg.law_range, cfg.law_grid);
    print_law_constants("heat-flux law j1", cfg.heat_flux, cfg.law_range, cfg.law_grid);

    const auto spaces = build_spaces(build_rect_mesh(cfg.nx, cfg.ny,
                                                     BoundaryTagging{cfg.gamma1_sides}));
    const TraceNorms norms = estimate_trace_norms(spaces);
    if (norms.gamma1_empty)
        std::printf("gamma1 is empty: trace norms 0 (warning: smallness condition vacuous)\n");
    else
        std::printf("trace norms on the %d x %d mesh: |gamma_s| = %.12g, |gamma| = %.12g\n",
                    cfg.nx, cfg.ny, norms.velocity, norms.temperature);

    const auto cj = estimate_constants(cfg.friction, cfg.law_range, cfg.law_grid);
    const auto cj1 = estimate_constants(cfg.heat_flux, cfg.law_range, cfg.law_grid);
    const H0Report rep = check_H0(cj, cj1, cfg.alpha, cfg.conductivity.delta, norms);
    std::printf("smallness condition:\n");
    std::printf("  velocity: %s (margin %.12g, sharper discrete margin %.12g)\n",
                rep.velocity_ok ? "pass" : "FAIL", rep.velocity_margin,
                rep.velocity_margin_sharp);
    std::printf("  thermal:  %s (margin %.12g, sharper discrete margin %.12g)\n",
                rep.thermal_ok ? "pass" : "FAIL", rep.thermal_margin, rep.thermal_margin_sharp);
    for (const auto& n : rep.notes) std::printf("  note: %s\n", n.c_str());
    return rep.ok() ? 0 : kExitStudy;
}

int cmd_study(const std::string& config_path, const std::string& preset,
              const std::string& out_dir, const std::string& knob_name, int levels,
              int threads) {
    const SimConfig cfg = load_config(config_path, preset);
    StudyKnob knob;
    if (knob_name == "dt")
        knob = StudyKnob::dt;
    else if (knob_name == "m")
        knob = StudyKnob::mollification;
    else if (knob_name == "mesh")
        knob = StudyKnob::mesh;
    else
        throw config_error("--knob must be dt | m | mesh");

    const StudyResult res = convergence_study(cfg, knob, levels, threads);
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/study_" + knob_name + ".csv");
    csv << "level,knob,diff_u,diff_theta\n";
    std::printf("%-6s %-12s %-14s %-14s\n", "level", knob_name.c_str(), "diff_u", "diff_theta");
    for (size_t l = 0; l < res.levels.size(); ++l) {
        const auto& lv = res.levels[l];
        char line[160];
        std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g\n", l, lv.value, lv.diff_u,
                      lv.diff_th);
        csv << line;
        std::printf("%-6zu %-12.6g %-14.6g %-14.6g\n", l, lv.value, lv.diff_u, lv.diff_th);
    }
    std::printf("final ratios: u %.4g, theta %.4g%s\n", res.final_ratio_u, res.final_ratio_th,
                res.at_floor ? " (differences at the solver floor)" : "");
    if (!res.pass) {
        std::printf("study threshold FAILED (need monotone decrease, final ratio <= 0.75)\n");
        return kExitStudy;
    }
    std::printf("study threshold passed\n");
    return 0;
}

int cmd_manufactured(const std::string& out_dir, int levels, double T, int base_mesh,
                     int temporal_mesh, int threads) {
    std::vector<int> meshes;
    for (int l = 0; l < levels; ++l) meshes.push_back(base_mesh << l);
    const double dt_spatial = T / 2048.0;
    std::printf("spatial sweep (dt = T/2048):\n");
    const ManufacturedResult spatial = manufactured_spatial(meshes, T, dt_spatial, threads);
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/manufactured.csv");
    csv << "kind,n,dt,err_u,err_theta\n";
    std::printf("%-6s %-10s %-14s %-14s\n", "n", "dt", "err_u", "err_theta");
    for (const auto& lv : spatial.levels) {
        char line[160];
        std::snprintf(line, sizeof(line), "spatial,%d,%.17g,%.17g,%.17g\n", lv.n, lv.dt,
                      lv.err_u, lv.err_th);
        csv << line;
        std::printf("%-6d %-10.4g %-14.6g %-14.6g\n", lv.n, lv.dt, lv.err_u, lv.err_th);
    }
    bool ok = true;
    for (size_t i = 0; i < spatial.ratio_th.size(); ++i) {
        const double order_u = std::log2(spatial.ratio_u[i]);
        const double order_th = std::log2(spatial.ratio_th[i]);
        std::printf("  observed spatial orders: u %.3f, theta %.3f\n", order_u, order_th);
        if (order_u < 1.8 || order_th < 1.8) ok = false;
    }

    std::printf("temporal sweep (mesh %d x %d):\n", temporal_mesh, temporal_mesh);
    std::vector<double> dts;
    for (int l = 0; l < 4; ++l) dts.push_back(T / (8 << l));
    const ManufacturedResult temporal = manufactured_temporal(temporal_mesh, T, dts, threads);
    for (const auto& lv : temporal.levels) {
        char line[160];
        std::snprintf(line, sizeof(line), "temporal,%d,%.17g,%.17g,%.17g\n", lv.n, lv.dt,
                      lv.err_u, lv.err_th);
        csv << line;
        std::printf("%-6d %-10.4g %-14.6g %-14.6g\n", lv.n, lv.dt, lv.err_u, lv.err_th);
    }
    for (size_t i = 0; i < temporal.ratio_th.size(); ++i) {
        std::printf("  temporal error ratio (theta): %.3f\n", temporal.ratio_th[i]);
        if (temporal.ratio_th[i] < 1.7 || temporal.ratio_th[i] > 2.4) ok = false;
    }
    if (!ok) {
        std::printf("manufactured-solution thresholds FAILED\n");
        return kExitStudy;
    }
    std::printf("manufactured-solution thresholds passed\n");
    return 0;
}

int cmd_mesh_info(const std::string& config_path, const std::string& preset,
                  const std::string& out_dir) {
    const SimConfig cfg = load_config(config_path, preset);
    const Mesh mesh = build_rect_mesh(cfg.nx, cfg.ny, BoundaryTagging{cfg.gamma1_sides});
    const auto report = validate_mesh(mesh);
    std::printf("mesh %d x %d: %zu vertices, %zu triangles, %zu boundary edges\n", cfg.nx,
                cfg.ny, mesh.vertices.size(), mesh.triangles.size(),
                mesh.boundary_edges.size());
    std::printf("area %.17g, |gamma1| %.17g, validation: %s\n", mesh.total_area(),
                mesh.gamma1_measure(), report.ok() ? "clean" : "VIOLATIONS");
    for (const auto& v : report.violations) std::printf("  %s\n", v.c_str());
    std::filesystem::create_directories(out_dir);
    std::ofstream dump(out_dir + "/mesh.txt");
    write_mesh_dump(mesh, dump);
    std::printf("dump written to %s/mesh.txt\n", out_dir.c_str());
    return report.ok() ? 0 : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Galerkin solver for the evolution Boussinesq system with nonmonotone "
                 "friction and heat-flux boundary conditions"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir = "out", preset;
    int threads = 1;
    unsigned seed = 0;
    app.add_option("--config", config_path, "JSON configuration file")->envname("BOUSS_CONFIG");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--threads", threads, "study-level parallelism");
    app.add_option("--seed", seed, "seed for randomized diagnostics");

    auto* run = app.add_subcommand("run", "run a scenario");
    run->add_option("--preset", preset, "preset scenario name");

    auto* check = app.add_subcommand("check-laws", "certify law constants and the smallness "
                                                   "condition");
    check->add_option("--preset", preset, "preset scenario name");

    std::string knob = "dt";
    int levels = 3;
    auto* study = app.add_subcommand("study", "self-convergence refinement study");
    study->add_option("--preset", preset, "preset scenario name");
    study->add_option("--knob", knob, "dt | m | mesh");
    study->add_option("--levels", levels, "number of nested levels (>= 3)");

    double mT = 0.25;
    int m_levels = 3, m_base = 8, m_temporal_mesh = 32;
    auto* manu = app.add_subcommand("manufactured", "manufactured-solution verification");
    manu->add_option("--levels", m_levels, "number of nested meshes");
    manu->add_option("--T", mT, "final time");
    manu->add_option("--base-mesh", m_base, "coarsest mesh");
    manu->add_option("--temporal-mesh", m_temporal_mesh, "mesh for the dt sweep");

    auto* info = app.add_subcommand("mesh-info", "print mesh statistics and write a dump");
    info->add_option("--preset", preset, "preset scenario name");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, preset, out_dir);
        if (check->parsed()) return cmd_check_laws(config_path, preset);
        if (study->parsed())
            return cmd_study(config_path, preset, out_dir, knob, levels, threads);
        if (manu->parsed())
            return cmd_manufactured(out_dir, m_levels, mT, m_base, m_temporal_mesh, threads);
        if (info->parsed()) return cmd_mesh_info(config_path, preset, out_dir);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const solver_error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const study_error& e) {
        std::fprintf(stderr, "study error: %s\n", e.what());
        return kExitStudy;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

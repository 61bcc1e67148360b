#include "bouss/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bouss {

using nlohmann::json;

namespace {

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

[[noreturn]] void unknown_key(const std::string& path, const std::string& key,
                              const std::vector<std::string>& known) {
    std::string best;
    int best_d = 1 << 20;
    for (const auto& k : known) {
        const int d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    std::string msg = "unknown key '" + key + "' in " + path;
    if (!best.empty()) msg += "; did you mean '" + best + "'?";
    throw config_error(msg);
}

void check_keys(const json& obj, const std::string& path,
                const std::vector<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            unknown_key(path, key, known);
    }
}

double need_number(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) throw config_error("missing key '" + path + "." + key + "'");
    if (!obj[key].is_number()) throw config_error("'" + path + "." + key + "' must be a number");
    return obj[key].get<double>();
}

double opt_number(const json& obj, const std::string& path, const std::string& key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw config_error("'" + path + "." + key + "' must be a number");
    return obj[key].get<double>();
}

PiecewiseLaw parse_law(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"name", "breakpoints", "pieces", "symmetric", "declared_descent"});
    PiecewiseLaw law;
    law.name = obj.value("name", std::string("law"));
    if (obj.contains("breakpoints"))
        for (const auto& b : obj["breakpoints"]) law.breakpoints.push_back(b.get<double>());
    if (!obj.contains("pieces")) throw config_error("missing key '" + path + ".pieces'");
    int idx = 0;
    for (const auto& piece : obj["pieces"]) {
        const std::string ppath = path + ".pieces[" + std::to_string(idx++) + "]";
        check_keys(piece, ppath, {"kind", "coeffs", "a", "b", "c"});
        const std::string kind = piece.value("kind", std::string("poly"));
        if (kind == "poly") {
            PolyPiece p;
            if (piece.contains("coeffs"))
                for (const auto& c : piece["coeffs"]) p.coeffs.push_back(c.get<double>());
            law.pieces.push_back(p);
        } else if (kind == "exp") {
            law.pieces.push_back(ExpPiece{need_number(piece, ppath, "a"),
                                          need_number(piece, ppath, "b"),
                                          need_number(piece, ppath, "c")});
        } else {
            throw config_error("'" + ppath + ".kind' must be 'poly' or 'exp'");
        }
    }
    law.symmetric = obj.value("symmetric", false);
    if (obj.contains("declared_descent"))
        law.declared_descent = obj["declared_descent"].get<double>();
    try {
        law.check_valid();
    } catch (const std::invalid_argument& e) {
        throw config_error(path + ": " + e.what());
    }
    return law;
}

ConductivitySpec parse_conductivity(const json& obj, const std::string& path) {
    check_keys(obj, path,
               {"kind", "value", "base", "amplitude", "coeffs", "lo", "hi", "delta", "upper",
                "lipschitz"});
    ConductivitySpec spec;
    const std::string kind = obj.value("kind", std::string("constant"));
    if (kind == "constant") {
        spec.kind = ConductivitySpec::Constant{opt_number(obj, path, "value", 1.0)};
    } else if (kind == "offset_sin") {
        spec.kind = ConductivitySpec::OffsetSin{need_number(obj, path, "base"),
                                                need_number(obj, path, "amplitude")};
    } else if (kind == "clipped_poly") {
        ConductivitySpec::ClippedPoly p;
        if (obj.contains("coeffs"))
            for (const auto& c : obj["coeffs"]) p.coeffs.push_back(c.get<double>());
        p.lo = need_number(obj, path, "lo");
        p.hi = need_number(obj, path, "hi");
        spec.kind = p;
    } else {
        throw config_error("'" + path + ".kind' must be constant | offset_sin | clipped_poly");
    }
    spec.delta = need_number(obj, path, "delta");
    spec.upper = opt_number(obj, path, "upper", 0.0);
    spec.lipschitz = opt_number(obj, path, "lipschitz", 0.0);
    if (!(spec.delta > 0.0))
        throw config_error("'" + path + ".delta' violates H(k): k(r) > delta requires delta > 0");
    return spec;
}

Side parse_side(const std::string& s, const std::string& path) {
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    if (s == "bottom") return Side::bottom;
    if (s == "top") return Side::top;
    throw config_error("'" + path + "' entries must be left|right|bottom|top, got '" + s + "'");
}

json law_to_json(const PiecewiseLaw& law) {
    json j;
    j["name"] = law.name;
    j["breakpoints"] = law.breakpoints;
    j["symmetric"] = law.symmetric;
    json pieces = json::array();
    for (const auto& p : law.pieces) {
        json pj;
        if (std::holds_alternative<PolyPiece>(p)) {
            pj["kind"] = "poly";
            pj["coeffs"] = std::get<PolyPiece>(p).coeffs;
        } else {
            const auto& e = std::get<ExpPiece>(p);
            pj["kind"] = "exp";
            pj["a"] = e.a;
            pj["b"] = e.b;
            pj["c"] = e.c;
        }
        pieces.push_back(pj);
    }
    j["pieces"] = pieces;
    if (law.declared_descent) j["declared_descent"] = *law.declared_descent;
    return j;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config", {"mesh", "physics", "laws", "time", "solver", "output"});

    SimConfig cfg;

    if (!root.contains("mesh")) throw config_error("missing key 'mesh'");
    {
        const auto& mesh = root["mesh"];
        check_keys(mesh, "mesh", {"nx", "ny", "gamma1_sides"});
        cfg.nx = static_cast<int>(need_number(mesh, "mesh", "nx"));
        cfg.ny = static_cast<int>(need_number(mesh, "mesh", "ny"));
        if (mesh.contains("gamma1_sides"))
            for (const auto& s : mesh["gamma1_sides"])
                cfg.gamma1_sides.insert(parse_side(s.get<std::string>(), "mesh.gamma1_sides"));
    }

    if (!root.contains("physics")) throw config_error("missing key 'physics'");
    {
        const auto& phys = root["physics"];
        check_keys(phys, "physics", {"alpha", "conductivity", "buoyancy", "source_g"});
        cfg.alpha = need_number(phys, "physics", "alpha");
        if (!phys.contains("conductivity"))
            throw config_error("missing key 'physics.conductivity'");
        cfg.conductivity = parse_conductivity(phys["conductivity"], "physics.conductivity");
        if (phys.contains("buoyancy")) {
            const auto& b = phys["buoyancy"];
            check_keys(b, "physics.buoyancy", {"e", "beta"});
            if (b.contains("e")) {
                if (!b["e"].is_array() || b["e"].size() != 2)
                    throw config_error("'physics.buoyancy.e' must be a 2-vector");
                cfg.buoyancy.direction = Vec2(b["e"][0].get<double>(), b["e"][1].get<double>());
            }
            cfg.buoyancy.beta = opt_number(b, "physics.buoyancy", "beta", 0.0);
        }
        if (phys.contains("source_g")) {
            const auto& g = phys["source_g"];
            check_keys(g, "physics.source_g", {"kind", "value", "amplitude", "center", "width"});
            const std::string kind = g.value("kind", std::string("zero"));
            if (kind == "zero") {
                cfg.source_g.kind = SourceSpec::Kind::zero;
            } else if (kind == "constant") {
                cfg.source_g.kind = SourceSpec::Kind::constant;
                cfg.source_g.value = need_number(g, "physics.source_g", "value");
            } else if (kind == "hotspot") {
                cfg.source_g.kind = SourceSpec::Kind::hotspot;
                cfg.source_g.amplitude = need_number(g, "physics.source_g", "amplitude");
                if (g.contains("center")) {
                    if (!g["center"].is_array() || g["center"].size() != 2)
                        throw config_error("'physics.source_g.center' must be a 2-vector");
                    cfg.source_g.center =
                        Vec2(g["center"][0].get<double>(), g["center"][1].get<double>());
                }
                cfg.source_g.width = opt_number(g, "physics.source_g", "width", 0.1);
            } else {
                throw config_error("'physics.source_g.kind' must be zero | constant | hotspot");
            }
        }
    }

    if (root.contains("laws")) {
        const auto& laws = root["laws"];
        check_keys(laws, "laws", {"friction", "heat_flux", "mollification_m"});
        if (laws.contains("friction")) cfg.friction = parse_law(laws["friction"], "laws.friction");
        if (laws.contains("heat_flux"))
            cfg.heat_flux = parse_law(laws["heat_flux"], "laws.heat_flux");
        cfg.mollification_m =
            static_cast<int>(opt_number(laws, "laws", "mollification_m", 8.0));
    }

    if (!root.contains("time")) throw config_error("missing key 'time'");
    {
        const auto& time = root["time"];
        check_keys(time, "time", {"T", "dt", "lag"});
        cfg.T = need_number(time, "time", "T");
        cfg.dt = need_number(time, "time", "dt");
        cfg.lag = static_cast<int>(opt_number(time, "time", "lag", 1.0));
    }

    if (root.contains("solver")) {
        const auto& solver = root["solver"];
        check_keys(solver, "solver", {"picard_tol", "picard_max", "linear_tol"});
        cfg.picard_tol = opt_number(solver, "solver", "picard_tol", 1e-8);
        cfg.picard_max = static_cast<int>(opt_number(solver, "solver", "picard_max", 50.0));
        cfg.linear_tol = opt_number(solver, "solver", "linear_tol", 1e-10);
    }

    if (root.contains("output")) {
        const auto& output = root["output"];
        check_keys(output, "output", {"monitor_csv", "fields_every", "format"});
        cfg.output.monitor_csv = output.value("monitor_csv", std::string("monitor.csv"));
        cfg.output.fields_every =
            static_cast<int>(opt_number(output, "output", "fields_every", 0.0));
        cfg.output.format = output.value("format", std::string("csv"));
        if (cfg.output.format != "csv" && cfg.output.format != "vtu")
            throw config_error("'output.format' must be csv | vtu");
    }

    cfg.validate();
    return cfg;
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string canonical_config_json(const SimConfig& cfg) {
    json j;
    j["mesh"]["nx"] = cfg.nx;
    j["mesh"]["ny"] = cfg.ny;
    json sides = json::array();
    for (Side s : cfg.gamma1_sides) {
        switch (s) {
            case Side::left: sides.push_back("left"); break;
            case Side::right: sides.push_back("right"); break;
            case Side::bottom: sides.push_back("bottom"); break;
            case Side::top: sides.push_back("top"); break;
        }
    }
    j["mesh"]["gamma1_sides"] = sides;
    j["physics"]["alpha"] = cfg.alpha;
    {
        json k;
        if (std::holds_alternative<ConductivitySpec::Constant>(cfg.conductivity.kind)) {
            k["kind"] = "constant";
            k["value"] = std::get<ConductivitySpec::Constant>(cfg.conductivity.kind).value;
        } else if (std::holds_alternative<ConductivitySpec::OffsetSin>(cfg.conductivity.kind)) {
            const auto& s = std::get<ConductivitySpec::OffsetSin>(cfg.conductivity.kind);
            k["kind"] = "offset_sin";
            k["base"] = s.base;
            k["amplitude"] = s.amplitude;
        } else {
            const auto& p = std::get<ConductivitySpec::ClippedPoly>(cfg.conductivity.kind);
            k["kind"] = "clipped_poly";
            k["coeffs"] = p.coeffs;
            k["lo"] = p.lo;
            k["hi"] = p.hi;
        }
        k["delta"] = cfg.conductivity.delta;
        k["upper"] = cfg.conductivity.upper;
        k["lipschitz"] = cfg.conductivity.lipschitz;
        j["physics"]["conductivity"] = k;
    }
    j["physics"]["buoyancy"]["e"] = {cfg.buoyancy.direction.x(), cfg.buoyancy.direction.y()};
    j["physics"]["buoyancy"]["beta"] = cfg.buoyancy.beta;
    {
        json g;
        switch (cfg.source_g.kind) {
            case SourceSpec::Kind::zero: g["kind"] = "zero"; break;
            case SourceSpec::Kind::constant:
                g["kind"] = "constant";
                g["value"] = cfg.source_g.value;
                break;
            case SourceSpec::Kind::hotspot:
                g["kind"] = "hotspot";
                g["amplitude"] = cfg.source_g.amplitude;
                g["center"] = {cfg.source_g.center.x(), cfg.source_g.center.y()};
                g["width"] = cfg.source_g.width;
                break;
        }
        j["physics"]["source_g"] = g;
    }
    j["laws"]["friction"] = law_to_json(cfg.friction);
    j["laws"]["heat_flux"] = law_to_json(cfg.heat_flux);
    j["laws"]["mollification_m"] = cfg.mollification_m;
    j["time"]["T"] = cfg.T;
    j["time"]["dt"] = cfg.dt;
    j["time"]["lag"] = cfg.lag;
    j["solver"]["picard_tol"] = cfg.picard_tol;
    j["solver"]["picard_max"] = cfg.picard_max;
    j["solver"]["linear_tol"] = cfg.linear_tol;
    j["output"]["monitor_csv"] = cfg.output.monitor_csv;
    j["output"]["fields_every"] = cfg.output.fields_every;
    j["output"]["format"] = cfg.output.format;
    return j.dump(2);
}

std::string config_hash(const SimConfig& cfg) {
    const std::string text = canonical_config_json(cfg);
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> preset_names() {
    return {"heated-cavity-slip", "stokes-check", "manufactured"};
}

SimConfig preset_config(const std::string& name) {
    if (name == "heated-cavity-slip") {
        SimConfig cfg;
        cfg.nx = cfg.ny = 16;
        cfg.gamma1_sides = {Side::bottom};
        cfg.alpha = 1.0;
        cfg.conductivity = ConductivitySpec{ConductivitySpec::OffsetSin{1.0, 0.1}, 0.85, 1.15,
                                            0.11};
        cfg.buoyancy = BuoyancySpec{Vec2(0.0, 1.0), 12.0};
        cfg.source_g.kind = SourceSpec::Kind::hotspot;
        cfg.source_g.amplitude = 80.0;
        cfg.source_g.center = Vec2(0.5, 0.2);
        cfg.source_g.width = 0.15;
        // slip onset inside the velocity range the cavity actually reaches
        cfg.friction = law_stick_slip_ramp(0.05, 0.02, 0.02, 0.04);
        cfg.heat_flux = law_stick_slip_ramp(0.04, 0.01, 0.05, 0.1);
        cfg.mollification_m = 8;
        cfg.T = 0.5;
        cfg.dt = cfg.T / 64.0;
        return cfg;
    }
    if (name == "stokes-check") {
        SimConfig cfg;
        cfg.nx = cfg.ny = 8;
        cfg.gamma1_sides = {Side::bottom};
        cfg.alpha = 1.0;
        cfg.conductivity = ConductivitySpec{ConductivitySpec::Constant{1.0}, 0.9, 1.1, 0.0};
        cfg.buoyancy = BuoyancySpec{Vec2(0.0, 1.0), 1.0};
        cfg.source_g.kind = SourceSpec::Kind::hotspot;
        cfg.source_g.amplitude = 2.0;
        cfg.source_g.center = Vec2(0.5, 0.5);
        cfg.source_g.width = 0.2;
        cfg.T = 0.25;
        cfg.dt = cfg.T / 32.0;
        return cfg;
    }
    if (name == "manufactured") {
        SimConfig cfg;
        cfg.nx = cfg.ny = 8;
        cfg.gamma1_sides = {};
        cfg.alpha = 1.0;
        cfg.conductivity = ConductivitySpec{ConductivitySpec::Constant{1.0}, 0.5, 1.5, 0.0};
        cfg.buoyancy = BuoyancySpec{Vec2(0.0, 1.0), 1.0};
        cfg.T = 0.25;
        cfg.dt = cfg.T / 64.0;
        return cfg;
    }
    throw config_error("unknown scenario '" + name +
                       "'; known: heated-cavity-slip, stokes-check, manufactured");
}

}  // namespace bouss

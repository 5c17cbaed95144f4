#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace arstat::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

template <class T>
T get(const json& obj, const std::string& block, const char* key, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(block + "." + key, e.what());
    }
}

template <class T>
std::optional<T> get_opt(const json& obj, const std::string& block, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return get<T>(obj, block, key, T{});
}

const json& block(const json& doc, const char* name) {
    static const json empty = json::object();
    if (!doc.contains(name)) return empty;
    const auto& b = doc.at(name);
    if (!b.is_object()) fail(name, "must be an object");
    return b;
}

Complex parse_complex(const json& v, const std::string& key) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    fail(key, "complex values are numbers or [re, im] pairs");
}

std::vector<std::vector<Complex>> parse_complex_rows(const json& obj, const std::string& blk, const char* key) {
    std::vector<std::vector<Complex>> out;
    if (!obj.contains(key)) return out;
    const std::string full = blk + "." + key;
    if (!obj.at(key).is_array()) fail(full, "must be a list of lists");
    for (const auto& row : obj.at(key)) {
        if (!row.is_array()) fail(full, "must be a list of lists");
        std::vector<Complex> r;
        for (const auto& v : row) r.push_back(parse_complex(v, full));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::string default_output_directory() {
    if (const char* env = std::getenv("ARSTAT_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "arstat-out";
}

RunConfig parse_config(const json& doc, const std::string& command) {
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    RunConfig cfg;
    cfg.command = command;
    cfg.source = doc;

    const auto& st = block(doc, "statistics");
    cfg.statistics.r = get(st, "statistics", "r", cfg.statistics.r);
    cfg.statistics.s = get(st, "statistics", "s", cfg.statistics.s);
    cfg.statistics.k = get(st, "statistics", "k", cfg.statistics.k);
    cfg.statistics.n_max = get_opt<int>(st, "statistics", "n_max");

    const auto& ham = block(doc, "hamiltonian");
    cfg.hamiltonian.e0 = get(ham, "hamiltonian", "e0", 0.0);
    cfg.hamiltonian.e = get(ham, "hamiltonian", "e", std::vector<double>{});

    const auto& dr = block(doc, "droplet");
    cfg.droplet.N = get_opt<int>(dr, "droplet", "N");
    cfg.droplet.grid_points = get(dr, "droplet", "grid_points", cfg.droplet.grid_points);
    cfg.droplet.rho_max = get_opt<double>(dr, "droplet", "rho_max");

    const auto& sw = block(doc, "sweep");
    cfg.sweep.k = get(sw, "sweep", "k", cfg.sweep.k);
    cfg.sweep.points = parse_complex_rows(sw, "sweep", "points");
    cfg.sweep.pairs = get(sw, "sweep", "pairs", std::vector<std::string>{});

    const auto& ed = block(doc, "edge");
    cfg.edge.velocities = get(ed, "edge", "velocities", cfg.edge.velocities);
    cfg.edge.modes = get(ed, "edge", "modes", cfg.edge.modes);
    cfg.edge.amplitudes = parse_complex_rows(ed, "edge", "amplitudes");
    cfg.edge.alpha0 = get(ed, "edge", "alpha0", std::vector<double>{});
    cfg.edge.alphabar0 = get(ed, "edge", "alphabar0", std::vector<double>{});
    cfg.edge.n_theta = get(ed, "edge", "n_theta", cfg.edge.n_theta);
    cfg.edge.n_t = get(ed, "edge", "n_t", cfg.edge.n_t);
    cfg.edge.window = get_opt<double>(ed, "edge", "window");
    cfg.edge.corrupted = get(ed, "edge", "corrupted", false);
    cfg.edge.levels = get(ed, "edge", "levels", cfg.edge.levels);
    cfg.edge.zero_mode_dim = get(ed, "edge", "zero_mode_dim", cfg.edge.zero_mode_dim);
    cfg.edge.budget = get(ed, "edge", "budget", cfg.edge.budget);

    const auto& out = block(doc, "output");
    cfg.output.directory = get(out, "output", "directory", default_output_directory());
    if (out.contains("formats")) {
        const auto formats = get(out, "output", "formats", std::vector<std::string>{});
        cfg.output.csv = cfg.output.json = false;
        for (const auto& f : formats) {
            if (f == "csv") {
                cfg.output.csv = true;
            } else if (f == "json") {
                cfg.output.json = true;
            } else {
                fail("output.formats", "unknown format '" + f + "'");
            }
        }
    }

    const auto& tol = block(doc, "tolerances");
    auto& t = cfg.tolerances;
    for (auto [key, slot] : std::initializer_list<std::pair<const char*, double*>>{
             {"relations", &t.relations},
             {"hermiticity", &t.hermiticity},
             {"spectrum", &t.spectrum},
             {"gram", &t.gram},
             {"metric_inverse", &t.metric_inverse},
             {"overlap", &t.overlap},
             {"realization", &t.realization},
             {"husimi_match", &t.husimi_match},
             {"slope_low", &t.slope_low},
             {"slope_high", &t.slope_high},
             {"eom", &t.eom},
             {"periodicity", &t.periodicity},
             {"action", &t.action},
             {"mode_commutator", &t.mode_commutator}}) {
        *slot = get(tol, "tolerances", key, *slot);
    }
    for (auto v : {t.relations, t.hermiticity, t.spectrum, t.gram, t.metric_inverse, t.overlap, t.realization,
                   t.husimi_match, t.eom, t.periodicity, t.action, t.mode_commutator}) {
        if (!(v > 0.0)) fail("tolerances", "every tolerance must be positive");
    }
    if (!(t.slope_low < t.slope_high)) fail("tolerances", "slope_low must be below slope_high");

    cfg.seed = get(doc, "", "seed", cfg.seed);
    cfg.threads = get(doc, "", "threads", cfg.threads);
    return cfg;
}

RunConfig load_config(const std::optional<std::string>& path, const std::string& command, const Overrides& ov) {
    json doc = json::object();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot open config file '" + *path + "'");
        try {
            doc = json::parse(in, nullptr, true, true);
        } catch (const json::parse_error& e) {
            throw ConfigError("malformed config '" + *path + "': " + e.what());
        }
    }
    // Flags win over the file: write them into the document before parsing.
    auto& st = doc["statistics"];
    if (st.is_null()) st = json::object();
    if (ov.r) st["r"] = *ov.r;
    if (ov.s) st["s"] = *ov.s;
    if (ov.k) st["k"] = *ov.k;
    if (ov.n_max) st["n_max"] = *ov.n_max;
    if (ov.N) doc["droplet"]["N"] = *ov.N;
    if (ov.out) doc["output"]["directory"] = *ov.out;
    if (ov.format) {
        json formats = json::array();
        std::stringstream ss(*ov.format);
        for (std::string item; std::getline(ss, item, ',');) {
            if (!item.empty()) formats.push_back(item);
        }
        doc["output"]["formats"] = formats;
    }
    if (ov.seed) doc["seed"] = *ov.seed;
    if (ov.threads) doc["threads"] = *ov.threads;

    RunConfig cfg = parse_config(doc, command);
    // Only verify and spectrum build a truncated bosonic basis; the other
    // commands size their own.
    if (cfg.statistics.s == 1 && !cfg.statistics.n_max && command != "verify" && command != "spectrum") {
        cfg.statistics.n_max = cfg.droplet.N.value_or(0);
    }
    validate_for_command(cfg);
    return cfg;
}

void validate_for_command(const RunConfig& cfg) {
    const auto spec = cfg.statistics.spec();
    try {
        spec.validate();
    } catch (const InvalidSpec& e) {
        throw ConfigError(std::string("statistics: ") + e.what());
    }
    if (cfg.threads < 1) fail("threads", "must be at least 1");
    if (!cfg.hamiltonian.e.empty() && static_cast<int>(cfg.hamiltonian.e.size()) != spec.r) {
        fail("hamiltonian.e", "needs one energy per mode");
    }
    const auto& c = cfg.command;
    if (c == "husimi") {
        if (!cfg.droplet.N) fail("droplet.N", "required by the husimi command");
        if (*cfg.droplet.N < 0 || *cfg.droplet.N > spec.occupancy_cap()) {
            fail("droplet.N", "must lie in [0, " + std::to_string(spec.occupancy_cap()) + "]");
        }
        if (cfg.droplet.grid_points < 2) fail("droplet.grid_points", "must be at least 2");
        if (cfg.droplet.rho_max) {
            if (!(*cfg.droplet.rho_max > 0.0)) fail("droplet.rho_max", "must be positive");
            if (spec.s == 1 && !(*cfg.droplet.rho_max < 1.0)) fail("droplet.rho_max", "must be below 1 for s = +1");
        }
    } else if (c == "star-convergence") {
        if (cfg.sweep.k.size() < 3) fail("sweep.k", "need at least 3 values of k");
        for (std::size_t i = 0; i < cfg.sweep.k.size(); ++i) {
            if (i > 0 && !(cfg.sweep.k[i] > cfg.sweep.k[i - 1])) fail("sweep.k", "must be strictly increasing");
            StatisticsSpec probe = spec;
            probe.k = cfg.sweep.k[i];
            if (probe.s == 1 && !probe.n_max) probe.n_max = 0;
            try {
                probe.validate();
            } catch (const InvalidSpec& e) {
                fail("sweep.k", e.what());
            }
        }
        for (const auto& p : cfg.sweep.points) {
            if (static_cast<int>(p.size()) != spec.r) fail("sweep.points", "each point needs r coordinates");
        }
    } else if (c == "edge-sim") {
        const auto r = cfg.edge.velocities.size();
        if (r == 0) fail("edge.velocities", "need at least one component");
        if (cfg.edge.modes < 1) fail("edge.modes", "must be at least 1");
        if (!cfg.edge.amplitudes.empty()) {
            if (cfg.edge.amplitudes.size() != r) fail("edge.amplitudes", "one row per component");
            for (const auto& row : cfg.edge.amplitudes) {
                if (static_cast<int>(row.size()) != cfg.edge.modes) fail("edge.amplitudes", "one entry per mode");
            }
        }
        if (!cfg.edge.alpha0.empty() && cfg.edge.alpha0.size() != r) fail("edge.alpha0", "one entry per component");
        if (!cfg.edge.alphabar0.empty() && cfg.edge.alphabar0.size() != r) {
            fail("edge.alphabar0", "one entry per component");
        }
        if (cfg.edge.n_theta < 2 || cfg.edge.n_t < 2) fail("edge.n_theta", "grid sizes must be at least 2");
        if (cfg.edge.window && !(*cfg.edge.window > 0.0)) fail("edge.window", "must be positive");
        if (cfg.edge.levels < 3) fail("edge.levels", "must be at least 3");
    }
}

std::string config_hash(const RunConfig& cfg) {
    nlohmann::json doc = cfg.source;
    doc["command"] = cfg.command;
    const std::string text = doc.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace arstat::cli

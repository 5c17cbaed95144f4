#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arstat/algebra.hpp"

namespace arstat::cli {

struct StatisticsBlock {
    int r = 2;
    int s = -1;
    double k = 4.0;
    std::optional<int> n_max;
    StatisticsSpec spec() const { return {r, s, k, n_max}; }
};

struct HamiltonianBlock {
    double e0 = 0.0;
    std::vector<double> e;  // empty: all ones
};

struct DropletBlock {
    std::optional<int> N;
    int grid_points = 201;
    std::optional<double> rho_max;
};

struct SweepBlock {
    std::vector<double> k{20, 40, 80, 160};
    std::vector<std::vector<Complex>> points;  // empty: built-in interior points
    std::vector<std::string> pairs;            // empty: the quadratic pairs
};

struct EdgeBlock {
    std::vector<double> velocities{1.0};
    int modes = 1;
    std::vector<std::vector<Complex>> amplitudes;  // empty: alpha_1 = 1/2, rest 0
    std::vector<double> alpha0;
    std::vector<double> alphabar0;
    int n_theta = 32;
    int n_t = 32;
    std::optional<double> window;
    bool corrupted = false;
    int levels = 6;
    int zero_mode_dim = 8;
    std::size_t budget = 300000;
};

struct OutputBlock {
    std::string directory = "arstat-out";
    bool csv = true;
    bool json = true;
};

struct Tolerances {
    double relations = 1e-10;
    double hermiticity = 1e-15;
    double spectrum = 1e-12;
    double gram = 1e-6;
    double metric_inverse = 1e-10;
    double overlap = 1e-8;
    double realization = 1e-12;
    double husimi_match = 1e-8;
    double slope_low = -2.3;
    double slope_high = -1.7;
    double eom = 1e-12;
    double periodicity = 1e-12;
    double action = 1e-10;
    double mode_commutator = 1e-12;
};

struct RunConfig {
    std::string command;
    StatisticsBlock statistics;
    HamiltonianBlock hamiltonian;
    DropletBlock droplet;
    SweepBlock sweep;
    EdgeBlock edge;
    OutputBlock output;
    Tolerances tolerances;
    std::uint64_t seed = 7;
    int threads = 1;
    nlohmann::json source = nlohmann::json::object();  // merged input, for hashing
};

/// Command-line overrides; unset members leave the file value alone.
struct Overrides {
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::optional<int> r;
    std::optional<int> s;
    std::optional<double> k;
    std::optional<int> n_max;
    std::optional<int> N;
};

/// Parses a config document. Throws ConfigError with the offending key.
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);
RunConfig load_config(const std::optional<std::string>& path, const std::string& command, const Overrides& ov);

/// Checks blocks needed by `command`; throws ConfigError.
void validate_for_command(const RunConfig& cfg);

/// FNV-1a hash of the canonical JSON of the merged configuration.
std::string config_hash(const RunConfig& cfg);

/// Default output directory: ARSTAT_OUT_DIR when set, else "arstat-out".
std::string default_output_directory();

}  // namespace arstat::cli

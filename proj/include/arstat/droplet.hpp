#pragma once

// Droplet density operator, its Husimi symbol and step-function profile,
// and the symbol of the excitation potential.

#include <vector>

#include "arstat/bargmann.hpp"

namespace arstat {

/// A droplet of total occupancy n_tot <= N. The per-mode box variant
/// (n_i <= box[i]) is constructible but asymptotic statements refer to the
/// total cap.
struct DropletSpec {
    StatisticsSpec spec;
    int N = 0;
    std::vector<int> box;  // empty: total-cap droplet

    /// Throws CapError when N (or a box side) exceeds the family's cap.
    void validate() const;
    bool contains(const Occupation& occ) const;
    bool is_total_cap() const { return box.empty(); }
};

/// Diagonal projector onto the droplet states of `basis`.
OperatorMatrix density_operator(const FockBasis& basis, const DropletSpec& dspec);

/// <z|rho_0|z> from the normalized coherent state restricted to the droplet.
double husimi(const DropletSpec& dspec, const BargmannPoint& point);

/// Radial series for the total-cap droplet: the shell weights of the
/// coherent state summed up to N (negative-binomial law for s = +1,
/// binomial law with p = rho/(1 + rho) for s = -1).
double husimi_series(const StatisticsSpec& spec, int N, double rho);

struct DropletProfile {
    std::vector<double> rho;
    std::vector<double> value;
    double k = 0.0;
    int N = 0;
    int s = 0;
    int r = 0;
    bool is_monotone() const;
};

/// Total-cap profile on a grid of rho = |z|^2 values.
DropletProfile droplet_profile(const DropletSpec& dspec, const std::vector<double>& rho_grid);

/// Uniform grid of `points` values on [0, rho_max] (rho_max < 1 for s = +1).
std::vector<double> uniform_rho_grid(double rho_max, int points);

/// rho at which the total-cap Husimi crosses `level` (bisection).
double husimi_level_crossing(const StatisticsSpec& spec, int N, double level);

struct StepSummary {
    double crossing_rho = 0.0;       // husimi = 1/2
    double crossing_k_rho = 0.0;     // k * crossing_rho
    double width = 0.0;              // rho(0.1) - rho(0.9)
    double inside_value = 0.0;       // at k rho = N/2
    double outside_value = 0.0;      // at k rho = 3N/2 (NaN when outside the domain)
    double boundary_value = 0.0;     // at k rho = N - 1/2
    bool inside_ok = false;          // > 0.99
    bool outside_ok = false;         // < 0.01
    bool boundary_ok = false;        // |value - 1/2| < 1/sqrt(N)
};

/// Step-function diagnostics of the total-cap droplet.
StepSummary summarize_step(const StatisticsSpec& spec, int N);

struct PotentialSymbol {
    double exact = 0.0;    // (k + s/2 - 1/2) sum_i e_i |z_i|^2 / (1 - s rho)
    double large_k = 0.0;  // k sum_i e_i |z_i|^2
};

PotentialSymbol potential_symbol(const StatisticsSpec& spec, const HamiltonianSpec& hspec,
                                 const BargmannPoint& point);

}  // namespace arstat

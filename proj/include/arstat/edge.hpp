#pragma once

// Chiral boson fields on the droplet boundary: mode expansion, equations of
// motion, periodicity, the boundary action functional and the truncated
// oscillator realization of the mode algebra.
//
// Component field, with phi = theta - e_i t:
//   Phi_i = alphabar0 - alpha0 phi + i sum_{n != 0} (alpha_n / n) exp(i n phi),
// alpha_{-n} = conj(alpha_n), so the oscillator part equals
//   -2 sum_{n > 0} Im(alpha_n exp(i n phi)) / n.

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "arstat/algebra.hpp"

namespace arstat {

struct EdgeField {
    int r = 1;
    std::vector<double> e;                   // velocities
    std::vector<double> alpha0;              // windings
    std::vector<double> alphabar0;           // conjugate zero modes
    std::vector<std::vector<Complex>> alpha; // alpha[i][n - 1], n = 1..M
    double rho_b = 0.0;                      // boundary radius N / k
    /// Velocity used in the oscillator phases. Empty means e; a different
    /// value produces a field that is not a solution (negative control).
    std::vector<double> drift;

    /// Throws DomainError on inconsistent sizes or non-finite data.
    void validate() const;
    int modes() const;
    double phase_velocity(int i) const;
    /// Same data with the oscillator phases advanced at half speed.
    EdgeField corrupted() const;
};

/// All-zero field with r components, M modes each and the given velocities.
EdgeField zero_field(const std::vector<double>& e, int modes);

/// Random field: amplitudes with independent normal parts of scale
/// `amplitude / n`, windings and zero modes uniform in [-1, 1].
EdgeField random_field(const std::vector<double>& e, int modes, unsigned seed, double amplitude = 1.0,
                       bool winding = true);

double component_value(const EdgeField& f, int i, double theta, double t);
double component_dtheta(const EdgeField& f, int i, double theta, double t);
double component_dt(const EdgeField& f, int i, double theta, double t);

/// Product of the component fields at angles theta (one per component).
double evaluate_field(const EdgeField& f, const std::vector<double>& theta, double t);

/// Momentum field alpha0 + sum_{n != 0} alpha_n exp(i n phi).
double momentum_field(const EdgeField& f, int i, double theta, double t);

struct EdgeGrid {
    std::vector<double> theta;
    std::vector<double> t;
};

/// Uniform grid: n_theta points on [0, 2 pi) and n_t points on [0, T).
EdgeGrid uniform_edge_grid(int n_theta, int n_t, double T);

/// max |(d_t + e_i d_theta) Phi_i| over components and grid points.
double eom_residual(const EdgeField& f, const EdgeGrid& grid);

/// max |Phi_i(2 pi, t) - Phi_i(0, t) + 2 pi alpha0_i| over components and times.
double periodicity_residual(const EdgeField& f, const std::vector<double>& times);

/// Largest mismatch between the Fourier coefficients of -d_theta Phi_i,
/// computed spectrally from `samples` values of Phi_i at t = 0, and
/// (alpha0_i, alpha_n^i).
double momentum_coefficient_residual(const EdgeField& f, int samples);

/// Shortest window over which every velocity in `v` completes an integer
/// number of turns, when the ratios are rational with small denominators.
std::optional<double> common_period(const std::vector<double>& v, int max_denominator = 64);

/// Sampled field on a uniform torus x time grid. Values are row-major over
/// (theta_1, ..., theta_r, t), t fastest.
struct FieldSample {
    std::vector<std::vector<double>> theta;  // one axis per component
    std::vector<double> t;
    double window = 0.0;                     // time period of the samples
    std::vector<double> values;
};

/// Samples a scalar function of (theta_1..theta_r, t) on uniform axes.
FieldSample sample_function(int r, int n_theta, int n_t, double window,
                            const std::function<double(const std::vector<double>&, double)>& phi);
FieldSample sample_field(const EdgeField& f, int n_theta, int n_t, double window);

/// -1/2 integral of (L Phi)(d_t Phi + sum_i e_i d_i Phi) over the torus and the
/// sample window, with L = sum_i d_i. Derivatives are spectral in every
/// direction (samples must be periodic) and the integral is the periodic
/// trapezoid rule. Throws GridError on non-uniform or mis-sized axes.
double action_value(const FieldSample& sample, const std::vector<double>& e);

/// The same functional for a factorized field, with analytic derivatives and
/// Gauss-Legendre quadrature over [0, 2 pi)^r x [0, window).
double action_value(const EdgeField& f, double window, int nodes = 48);

/// Mode sum of the equal-time commutator [Pi_i(theta), Phi_i(theta')] implied by
/// unit-normalized modes, truncated at M: i + 2 sum_{n<=M} sin(n d)/n with
/// d = theta - theta'. Tends to i + (pi - d) on (0, 2 pi), a sawtooth rather
/// than a delta function.
Complex mode_sum_field_commutator(double delta, int modes);

// ---------------------------------------------------------------------------
// Quantized modes

struct HilbertDimensions {
    std::vector<std::size_t> oscillator;  // per oscillator factor of one component
    std::size_t zero_mode = 0;
    std::vector<std::size_t> component;   // per component
    std::size_t total = 0;
};

class ModeAlgebra {
public:
    /// r components, M oscillators each truncated at L levels, and a zero-mode
    /// pair on `zero_mode_dim` levels. Throws SizeError beyond `budget`.
    ModeAlgebra(int r, int M, int L, int zero_mode_dim = 8, std::size_t budget = 300000);

    int r() const { return r_; }
    int modes() const { return M_; }
    int levels() const { return L_; }
    std::size_t dim() const { return dims_.total; }
    const HilbertDimensions& dimensions() const { return dims_; }

    /// alpha_n^i for 1 <= |n| <= M (n > 0 lowers); component index zero-based.
    const OperatorMatrix& alpha(int i, int n) const;
    const OperatorMatrix& alpha0(int i) const { return zero_[static_cast<std::size_t>(i)]; }
    const OperatorMatrix& alphabar0(int i) const { return zerobar_[static_cast<std::size_t>(i)]; }

    /// Basis indices where every oscillator and the zero-mode level are at most
    /// two below their truncation.
    const std::vector<std::size_t>& interior() const { return interior_; }

private:
    int r_, M_, L_, D0_;
    HilbertDimensions dims_;
    std::vector<OperatorMatrix> lower_, raise_;  // index i * M + (n - 1)
    std::vector<OperatorMatrix> zero_, zerobar_;
    std::vector<std::size_t> interior_;
};

ModeAlgebra build_mode_algebra(int r, int M, int L, int zero_mode_dim = 8, std::size_t budget = 300000);
HilbertDimensions hilbert_dimensions(const ModeAlgebra& algebra);

struct ModeCommutatorReport {
    double oscillator = 0.0;   // [alpha_n^i, alpha_m^j] - sign(n) delta_ij delta_{n+m,0}
    double zero_mode = 0.0;    // [alpha_0^i, alphabar_0^j] - i delta_ij, and self pairs
    double cross = 0.0;        // zero modes against oscillators
    std::size_t interior_size = 0;
    double max_residual() const { return std::max({oscillator, zero_mode, cross}); }
};

/// Entrywise commutator residuals on interior columns.
ModeCommutatorReport mode_commutator_residuals(const ModeAlgebra& algebra);

}  // namespace arstat

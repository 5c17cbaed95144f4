#pragma once

// Analytic (Bargmann) side of the representation: monomial coefficients,
// coherent states, overlap kernel, distance and metric, the integration
// measure with its quadrature, and the differential realization of the
// ladder operators.
//
// Convention: <n|z> = N(z)^{-1} C_n z^n, so symbols of lowering operators
// are holomorphic-proportional (a^- -> z) and <z|w> depends on conj(z).w.

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "arstat/algebra.hpp"

namespace arstat {

/// A point z in C^r with cached rho = |z_1|^2 + ... + |z_r|^2.
class BargmannPoint {
public:
    BargmannPoint() = default;
    explicit BargmannPoint(std::vector<Complex> z);
    BargmannPoint(std::initializer_list<Complex> z) : BargmannPoint(std::vector<Complex>(z)) {}

    int rank() const { return static_cast<int>(z_.size()); }
    const std::vector<Complex>& z() const { return z_; }
    Complex operator[](std::size_t i) const { return z_[i]; }
    double rho() const { return rho_; }

private:
    std::vector<Complex> z_;
    double rho_ = 0.0;
};

/// conj(z) . w
Complex hermitian_dot(const BargmannPoint& z, const BargmannPoint& w);

/// Throws DomainError when the point is not in the family's domain
/// (rank mismatch, non-finite entries, or rho >= 1 for s = +1).
void check_domain(const StatisticsSpec& spec, const BargmannPoint& p);

/// log C_n with C_n = [(k-1+s n)!/(k-1)!]^{s/2} / sqrt(n_1! ... n_r!).
double log_coefficient(const StatisticsSpec& spec, const Occupation& occ);
double coefficient(const StatisticsSpec& spec, const Occupation& occ);

/// Exponent p = (2ks - s + 1)/4 of the normalization N = (1 - s rho)^{-p}.
double normalization_exponent(const StatisticsSpec& spec);
/// log N(rho).
double log_normalization(const StatisticsSpec& spec, double rho);

/// Certified bound on the coherent-state weight beyond total occupancy n_max
/// (bosonic family); +inf when the geometric bound does not apply.
double bosonic_tail_bound(double k, double rho, int n_max);

struct CoherentVector {
    BargmannPoint point;
    Eigen::VectorXcd amplitudes;
    double normalization = 1.0;  // N(z)
    double tail_bound = 0.0;     // neglected weight (0 for s = -1)
};

/// Normalized coherent state over `basis`. Throws TruncationError when the
/// bosonic tail bound exceeds `tail_tolerance`.
CoherentVector coherent_vector(const FockBasis& basis, const BargmannPoint& point,
                               double tail_tolerance = 1e-10);

/// Smallest bosonic n_max whose tail bound at rho is below `tolerance`.
int required_n_max(double k, double rho, double tolerance = 1e-10);

/// Closed-form kernel <z|w>.
Complex overlap(const StatisticsSpec& spec, const BargmannPoint& z, const BargmannPoint& w);

/// s^2(z, w) = -ln |<z|w>|^2.
double distance_sq(const StatisticsSpec& spec, const BargmannPoint& z, const BargmannPoint& w);

struct MetricMatrix {
    BargmannPoint point;
    Eigen::MatrixXcd g;      // g(i, j) = g_{i jbar}
    Eigen::MatrixXcd g_inv;  // matrix inverse of g
    /// Contravariant component g^{i jbar} used in contractions
    /// g^{i jbar} dA/dz_i dB/dzbar_j; equals g_inv(j, i).
    Complex contravariant(int i, int j) const { return g_inv(j, i); }
};

MetricMatrix metric(const StatisticsSpec& spec, const BargmannPoint& point);

/// Closed-form contravariant metric 2(1 - s rho)/(2k + s - 1) (delta_ij - s z_i conj(z_j)).
Eigen::MatrixXcd contravariant_metric(const StatisticsSpec& spec, const BargmannPoint& point);

// ---------------------------------------------------------------------------
// Measure and quadrature

/// Exponent of the measure weight (1 - s rho)^{sk - r - (s+1)/2}.
double measure_exponent(const StatisticsSpec& spec);

/// Normalization constant as printed next to the measure,
/// pi^{-r} [(k-1)!/(k - s r + (s-1)/2)!]^s.
double printed_measure_constant(const StatisticsSpec& spec);

/// Closed-form value of the constant that makes the vacuum moment equal 1.
double exact_measure_constant(const StatisticsSpec& spec);

enum class RadialMap {
    Compactified,  // s = -1: rho_i = x_i / (1 - sum x), exact on C^r
    Cutoff,        // s = -1: plain radial cutoff at rho <= R (tail estimated)
};

/// Tensor Gauss-Legendre rule over the radial simplex (Duffy coordinates,
/// boundary-softened) with an equispaced angular rule per mode.
class QuadratureRule {
public:
    struct Node {
        std::vector<double> radial;  // rho_i = |z_i|^2
        double weight;               // includes Jacobian and pi^r / (2 pi)^r
    };

    QuadratureRule(const StatisticsSpec& spec, int radial_nodes, int angular_nodes,
                   RadialMap map = RadialMap::Compactified, double cutoff = 0.0);

    const StatisticsSpec& spec() const { return spec_; }
    int radial_order() const { return radial_order_; }
    int angular_nodes() const { return angular_nodes_; }
    const std::vector<Node>& radial_nodes() const { return nodes_; }
    RadialMap map() const { return map_; }
    double cutoff() const { return cutoff_; }
    /// Measure mass outside the cutoff (0 for the compactified map).
    double tail_estimate() const { return tail_; }
    /// Normalization of the measure fixed by the vacuum moment.
    double measure_constant() const { return constant_; }

private:
    StatisticsSpec spec_;
    int radial_order_;
    int angular_nodes_;
    RadialMap map_;
    double cutoff_;
    double tail_ = 0.0;
    double constant_ = 1.0;
    std::vector<Node> nodes_;
};

/// Normalized measure density Sigma(z) (the constant is the numerically
/// fixed one of `rule`).
double measure_density(const QuadratureRule& rule, const BargmannPoint& point);
/// Normalized measure density using the closed-form constant.
double measure_density(const StatisticsSpec& spec, const BargmannPoint& point);

/// Integral of Sigma(z) f(z) d^{2r}z. Throws TailError when a cutoff rule's
/// tail estimate exceeds `tail_tolerance`.
Complex integrate(const QuadratureRule& rule, const std::function<Complex(const BargmannPoint&)>& f,
                  double tail_tolerance = 1e-12);

/// <n'|n> computed as the moment of the Bargmann functions C z^n against the
/// measure, with the angular integral done analytically.
double moment(const QuadratureRule& rule, const Occupation& n_prime, const Occupation& n);

/// Gram matrix of moments over the states of `basis`.
Eigen::MatrixXd gram_matrix(const QuadratureRule& rule, const FockBasis& basis);

// ---------------------------------------------------------------------------
// Differential realization

/// Polynomial in z_1..z_r as a monomial -> coefficient map.
using Polynomial = std::map<Occupation, Complex>;

/// a_i^- -> d/dz_i
Polynomial apply_lowering(const Polynomial& p, int mode);
/// a_i^+ -> (2k + s - 1)/2 z_i + s z_i sum_j z_j d/dz_j
Polynomial apply_raising(const StatisticsSpec& spec, const Polynomial& p, int mode);

struct RealizationReport {
    double lowering_residual = 0.0;
    double raising_residual = 0.0;
    std::size_t states_checked = 0;
    double max_residual() const { return std::max(lowering_residual, raising_residual); }
};

/// Compares the differential operators acting on C_n z^n with the ladder
/// matrices, on states with n_tot <= n_cap.
RealizationReport differential_realization_check(const FockBasis& basis, int n_cap);

}  // namespace arstat

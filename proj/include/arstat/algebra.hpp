#pragma once

// Fock-space realization of the generalized A_r statistics: basis
// enumeration, Jacobson ladder operators, triple-relation residuals and the
// free Hamiltonian.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "arstat/errors.hpp"
#include "arstat/numerics.hpp"

namespace arstat {

/// Identifies one representation family: r modes, sign s, label k and the
/// total-occupancy truncation used for the bosonic (s = +1) family.
struct StatisticsSpec {
    int r = 1;
    int s = -1;
    double k = 2.0;
    std::optional<int> n_max;

    static StatisticsSpec fermionic(int r, int k);
    static StatisticsSpec bosonic(int r, double k, int n_max);

    /// Throws InvalidSpec when 2k - 1 <= s, when k is non-integer for s = -1,
    /// or when n_max is missing for s = +1.
    void validate() const;

    bool is_fermionic() const { return s == -1; }
    /// Largest admissible total occupancy: k - 1 (s = -1) or n_max (s = +1).
    int occupancy_cap() const;
    /// Returns a copy with a different label (n_max kept).
    StatisticsSpec with_k(double new_k) const;
};

/// Occupation numbers (n_1, ..., n_r) labelling a Fock state.
struct Occupation {
    std::vector<int> n;

    Occupation() = default;
    explicit Occupation(std::vector<int> values) : n(std::move(values)) {}
    Occupation(std::initializer_list<int> values) : n(values) {}

    int total() const;
    int rank() const { return static_cast<int>(n.size()); }
    int operator[](std::size_t i) const { return n[i]; }
    Occupation shifted(int mode, int delta) const;

    auto operator<=>(const Occupation&) const = default;
};

/// Admissible Fock states, ordered by total occupancy and then
/// lexicographically in descending (n_1, ..., n_r) so that (1,0) precedes (0,1).
class FockBasis {
public:
    /// All states with n_tot <= max_total (must not exceed the spec's cap).
    FockBasis(const StatisticsSpec& spec, int max_total);

    const StatisticsSpec& spec() const { return spec_; }
    int max_total() const { return max_total_; }
    std::size_t size() const { return states_.size(); }
    const Occupation& state(std::size_t i) const { return states_[i]; }
    std::span<const Occupation> states() const { return states_; }
    std::optional<std::size_t> index_of(const Occupation& occ) const;
    /// First row of each grading block H^n, n = 0..max_total+1 (sentinel).
    std::span<const std::size_t> block_offsets() const { return offsets_; }

private:
    StatisticsSpec spec_;
    int max_total_;
    std::vector<Occupation> states_;
    std::map<Occupation, std::size_t> index_;
    std::vector<std::size_t> offsets_;
};

/// Every admissible state of the family (n_tot <= occupancy_cap()).
FockBasis enumerate_basis(const StatisticsSpec& spec);

/// Closed-form dimension (k - 1 + r)! / ((k - 1)! r!) of the fermionic family.
std::size_t fermionic_dimension(int r, int k);

using SparseMatrix = Eigen::SparseMatrix<Complex>;

enum class Structure { Hermitian, General };

/// Sparse complex operator over an enumerated basis.
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    OperatorMatrix(SparseMatrix m, Structure tag);

    static OperatorMatrix identity(std::size_t dim);
    static OperatorMatrix diagonal(std::span<const double> values);

    const SparseMatrix& data() const { return m_; }
    Structure structure() const { return tag_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(m_); }
    Complex coeff(std::size_t row, std::size_t col) const;

    OperatorMatrix adjoint() const;
    OperatorMatrix operator*(const OperatorMatrix& rhs) const;
    OperatorMatrix operator+(const OperatorMatrix& rhs) const;
    OperatorMatrix operator-(const OperatorMatrix& rhs) const;
    OperatorMatrix scaled(Complex factor) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return m_ * v; }

private:
    SparseMatrix m_;
    Structure tag_ = Structure::General;
};

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// F_i(n) = n_i (2k - (1 + s) + 2 s n_tot) / 2, with `mode` zero-based.
double structure_function(const StatisticsSpec& spec, const Occupation& occ, int mode);

/// Exact diagonal value of [a_i^-, a_i^+] on |n>: F_i(n + e_i) - F_i(n).
double commutator_diagonal(const StatisticsSpec& spec, const Occupation& occ, int mode);

struct LadderSet {
    std::vector<OperatorMatrix> lower;  // a_i^-
    std::vector<OperatorMatrix> raise;  // a_i^+
};

/// a_i^+ |n> = sqrt(F_i(n + e_i)) |n + e_i>; raises leaving the basis are dropped.
LadderSet ladder_matrices(const FockBasis& basis);

/// Number operator n_i (diagonal).
OperatorMatrix number_operator(const FockBasis& basis, int mode);

/// Two operator-norm estimates of a residual restricted to a column subset.
struct ResidualNorm {
    double spectral = 0.0;  // power-iteration estimate
    double max_abs = 0.0;   // largest entry modulus
    double value() const { return std::max(spectral, max_abs); }
};

ResidualNorm residual_norm(const SparseMatrix& residual, std::span<const std::size_t> columns,
                           int iterations = 40);

struct RelationReport {
    ResidualNorm triple_raise;   // [[a_i^+, a_j^-], a_k^+] relation
    ResidualNorm triple_lower;   // [[a_i^+, a_j^-], a_k^-] relation
    ResidualNorm commuting;      // [a_i^+, a_j^+] and [a_i^-, a_j^-]
    std::size_t interior_size = 0;
    double max_residual() const;
};

/// Residuals of the triple relations and mutual commutativity, restricted to
/// the interior n_tot <= n_max - 2 for the bosonic family.
RelationReport verify_triple_relations(const FockBasis& basis, const LadderSet& ladders);
RelationReport verify_triple_relations(const FockBasis& basis);

struct HamiltonianSpec {
    double e0 = 0.0;
    std::vector<double> e;
};

/// Offset c that places the vacuum at energy e0: -(2ks - s + 1) / (2r + 2).
double hamiltonian_offset(const StatisticsSpec& spec);
/// The offset as printed alongside the Hamiltonian, (2ks - s - 1) / (2r + 2).
double printed_hamiltonian_offset(const StatisticsSpec& spec);

/// H = e0 + sum_i e_i h_i with h_i built from the commutators [a_j^-, a_j^+]
/// evaluated through the structure function (exact on every basis state).
OperatorMatrix hamiltonian(const FockBasis& basis, const HamiltonianSpec& hspec);

/// Same construction from truncated matrix commutators; agrees with
/// hamiltonian() on the interior of a bosonic basis.
OperatorMatrix hamiltonian_from_ladders(const FockBasis& basis, const LadderSet& ladders,
                                        const HamiltonianSpec& hspec);

/// Eigenvalue e0 + sum_i e_i n_i of each basis state, in basis order.
std::vector<double> spectrum_closed_form(const FockBasis& basis, const HamiltonianSpec& hspec);

struct CommutatorDeviation {
    double k = 0.0;
    double deviation = 0.0;  // max_ij ||[a_i^-, a_j^+] - k delta_ij|| / k
};

/// Relative deviation of [a_i^-, a_j^+] from k delta_ij on states with
/// n_tot <= n_cap, for each k of the sweep.
std::vector<CommutatorDeviation> large_k_commutator_deviation(int r, int s,
                                                              std::span<const double> ks, int n_cap);

}  // namespace arstat

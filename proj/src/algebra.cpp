#include "arstat/algebra.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace arstat {

namespace {

constexpr double kDropTolerance = 1e-15;

void compositions(int remaining, int slot, std::vector<int>& cur, std::vector<Occupation>& out) {
    const int r = static_cast<int>(cur.size());
    if (slot == r - 1) {
        cur[slot] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        cur[slot] = v;
        compositions(remaining - v, slot + 1, cur, out);
    }
}

bool is_integer(double x) { return std::floor(x) == x; }

}  // namespace

// ---------------------------------------------------------------------------
// StatisticsSpec

StatisticsSpec StatisticsSpec::fermionic(int r, int k) {
    StatisticsSpec spec{r, -1, static_cast<double>(k), std::nullopt};
    spec.validate();
    return spec;
}

StatisticsSpec StatisticsSpec::bosonic(int r, double k, int n_max) {
    StatisticsSpec spec{r, +1, k, n_max};
    spec.validate();
    return spec;
}

void StatisticsSpec::validate() const {
    std::ostringstream msg;
    if (r < 1) {
        msg << "r must be a positive integer (got " << r << ")";
        throw InvalidSpec(msg.str());
    }
    if (s != 1 && s != -1) {
        msg << "s must be +1 or -1 (got " << s << ")";
        throw InvalidSpec(msg.str());
    }
    if (!std::isfinite(k) || !(2.0 * k - 1.0 > s)) {
        msg << "admissibility 2k - 1 > s violated (k = " << k << ", s = " << s << ")";
        throw InvalidSpec(msg.str());
    }
    if (s == -1 && (!is_integer(k) || k < 2.0)) {
        msg << "fermionic family requires integer k >= 2 (got " << k << ")";
        throw InvalidSpec(msg.str());
    }
    if (s == 1) {
        if (!n_max) throw InvalidSpec("bosonic family requires n_max (total-occupancy truncation)");
        if (*n_max < 0) throw InvalidSpec("n_max must be non-negative");
    }
}

int StatisticsSpec::occupancy_cap() const {
    return s == -1 ? static_cast<int>(k) - 1 : *n_max;
}

StatisticsSpec StatisticsSpec::with_k(double new_k) const {
    StatisticsSpec out = *this;
    out.k = new_k;
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Occupation and basis

int Occupation::total() const { return std::accumulate(n.begin(), n.end(), 0); }

Occupation Occupation::shifted(int mode, int delta) const {
    Occupation out = *this;
    out.n[static_cast<std::size_t>(mode)] += delta;
    return out;
}

FockBasis::FockBasis(const StatisticsSpec& spec, int max_total) : spec_(spec), max_total_(max_total) {
    spec_.validate();
    if (max_total < 0 || max_total > spec_.occupancy_cap()) {
        std::ostringstream msg;
        msg << "basis cap " << max_total << " outside [0, " << spec_.occupancy_cap() << "]";
        throw InvalidSpec(msg.str());
    }
    std::vector<int> cur(static_cast<std::size_t>(spec_.r), 0);
    for (int n = 0; n <= max_total; ++n) {
        offsets_.push_back(states_.size());
        compositions(n, 0, cur, states_);
    }
    offsets_.push_back(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::optional<std::size_t> FockBasis::index_of(const Occupation& occ) const {
    const auto it = index_.find(occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

FockBasis enumerate_basis(const StatisticsSpec& spec) {
    spec.validate();
    return FockBasis(spec, spec.occupancy_cap());
}

std::size_t fermionic_dimension(int r, int k) {
    // C(k - 1 + r, r) by the multiplicative formula; each step stays integral.
    std::size_t value = 1;
    for (int j = 1; j <= r; ++j) {
        value = value * static_cast<std::size_t>(k - 1 + j) / static_cast<std::size_t>(j);
    }
    return value;
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(SparseMatrix m, Structure tag) : m_(std::move(m)), tag_(tag) {
    m_.prune(Complex(0.0), kDropTolerance);
    m_.makeCompressed();
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
    SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setIdentity();
    return {std::move(m), Structure::Hermitian};
}

OperatorMatrix OperatorMatrix::diagonal(std::span<const double> values) {
    const auto n = static_cast<Eigen::Index>(values.size());
    std::vector<Eigen::Triplet<Complex>> trips;
    for (Eigen::Index i = 0; i < n; ++i) trips.emplace_back(i, i, values[static_cast<std::size_t>(i)]);
    SparseMatrix m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return {std::move(m), Structure::Hermitian};
}

Complex OperatorMatrix::coeff(std::size_t row, std::size_t col) const {
    return m_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return {SparseMatrix(m_.adjoint()), tag_};
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& rhs) const {
    return {SparseMatrix(m_ * rhs.m_), Structure::General};
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& rhs) const {
    const auto tag = (tag_ == Structure::Hermitian && rhs.tag_ == Structure::Hermitian) ? Structure::Hermitian
                                                                                        : Structure::General;
    return {SparseMatrix(m_ + rhs.m_), tag};
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& rhs) const {
    const auto tag = (tag_ == Structure::Hermitian && rhs.tag_ == Structure::Hermitian) ? Structure::Hermitian
                                                                                        : Structure::General;
    return {SparseMatrix(m_ - rhs.m_), tag};
}

OperatorMatrix OperatorMatrix::scaled(Complex factor) const {
    const auto tag = (factor.imag() == 0.0) ? tag_ : Structure::General;
    return {SparseMatrix(m_ * factor), tag};
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    return {SparseMatrix(a.data() * b.data() - b.data() * a.data()), Structure::General};
}

// ---------------------------------------------------------------------------
// Structure function and ladders

double structure_function(const StatisticsSpec& spec, const Occupation& occ, int mode) {
    if (mode < 0 || mode >= spec.r) {
        std::ostringstream msg;
        msg << "mode index " << mode + 1 << " outside [1, " << spec.r << "]";
        throw ModeOutOfRange(msg.str());
    }
    const int ni = occ[static_cast<std::size_t>(mode)];
    if (ni == 0) return 0.0;
    const double value = 0.5 * ni * (2.0 * spec.k - (1.0 + spec.s) + 2.0 * spec.s * occ.total());
    // Negative values only arise outside the admissible set; clamp round-off.
    return value > 0.0 ? value : 0.0;
}

double commutator_diagonal(const StatisticsSpec& spec, const Occupation& occ, int mode) {
    return structure_function(spec, occ.shifted(mode, +1), mode) - structure_function(spec, occ, mode);
}

LadderSet ladder_matrices(const FockBasis& basis) {
    const auto& spec = basis.spec();
    const auto dim = static_cast<Eigen::Index>(basis.size());
    LadderSet out;
    for (int i = 0; i < spec.r; ++i) {
        std::vector<Eigen::Triplet<Complex>> trips;
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const Occupation up = basis.state(col).shifted(i, +1);
            const auto row = basis.index_of(up);
            if (!row) continue;
            const double f = structure_function(spec, up, i);
            if (f <= 0.0) continue;
            trips.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col), std::sqrt(f));
        }
        SparseMatrix raise(dim, dim);
        raise.setFromTriplets(trips.begin(), trips.end());
        OperatorMatrix plus(std::move(raise), Structure::General);
        out.lower.push_back(plus.adjoint());
        out.raise.push_back(std::move(plus));
    }
    return out;
}

OperatorMatrix number_operator(const FockBasis& basis, int mode) {
    std::vector<double> diag(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) diag[i] = basis.state(i)[static_cast<std::size_t>(mode)];
    return OperatorMatrix::diagonal(diag);
}

// ---------------------------------------------------------------------------
// Residual norms and relation checks

ResidualNorm residual_norm(const SparseMatrix& residual, std::span<const std::size_t> columns, int iterations) {
    ResidualNorm out;
    if (columns.empty()) return out;
    const auto rows = residual.rows();
    const auto ncols = static_cast<Eigen::Index>(columns.size());
    // Restricted residual R P, with P the column selector.
    Eigen::MatrixXcd restricted(rows, ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) {
        restricted.col(c) = residual.col(static_cast<Eigen::Index>(columns[static_cast<std::size_t>(c)]));
    }
    out.max_abs = restricted.cwiseAbs().maxCoeff();
    if (out.max_abs == 0.0) return out;

    Eigen::VectorXcd v(ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) v(c) = Complex(1.0 + 0.1 * (c % 7), 0.05 * (c % 3));
    v.normalize();
    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXcd w = restricted.adjoint() * (restricted * v);
        const double n = w.norm();
        if (n == 0.0) break;
        estimate = std::sqrt(n);
        v = w / n;
    }
    out.spectral = estimate;
    return out;
}

double RelationReport::max_residual() const {
    return std::max({triple_raise.value(), triple_lower.value(), commuting.value()});
}

namespace {

void accumulate(ResidualNorm& into, const ResidualNorm& x) {
    into.spectral = std::max(into.spectral, x.spectral);
    into.max_abs = std::max(into.max_abs, x.max_abs);
}

}  // namespace

RelationReport verify_triple_relations(const FockBasis& basis, const LadderSet& ladders) {
    const auto& spec = basis.spec();
    const int r = spec.r;
    const int s = spec.s;
    const int interior_cap = spec.is_fermionic() ? basis.max_total() : basis.max_total() - 2;

    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis.state(i).total() <= interior_cap) interior.push_back(i);
    }

    RelationReport report;
    report.interior_size = interior.size();
    if (interior.empty()) return report;

    const auto& ap = ladders.raise;
    const auto& am = ladders.lower;
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            const SparseMatrix inner = ap[i].data() * am[j].data() - am[j].data() * ap[i].data();
            for (int k = 0; k < r; ++k) {
                // [[a_i^+, a_j^-], a_k^+] = -s d_jk a_i^+ - s d_ij a_k^+
                SparseMatrix lhs = inner * ap[k].data() - ap[k].data() * inner;
                SparseMatrix rhs(lhs.rows(), lhs.cols());
                if (j == k) rhs += ap[i].data() * Complex(-s);
                if (i == j) rhs += ap[k].data() * Complex(-s);
                accumulate(report.triple_raise, residual_norm(SparseMatrix(lhs - rhs), interior));

                // [[a_i^+, a_j^-], a_k^-] = s d_ik a_j^- + s d_ij a_k^-
                SparseMatrix lhs2 = inner * am[k].data() - am[k].data() * inner;
                SparseMatrix rhs2(lhs2.rows(), lhs2.cols());
                if (i == k) rhs2 += am[j].data() * Complex(s);
                if (i == j) rhs2 += am[k].data() * Complex(s);
                accumulate(report.triple_lower, residual_norm(SparseMatrix(lhs2 - rhs2), interior));
            }
            const SparseMatrix pp = ap[i].data() * ap[j].data() - ap[j].data() * ap[i].data();
            const SparseMatrix mm = am[i].data() * am[j].data() - am[j].data() * am[i].data();
            accumulate(report.commuting, residual_norm(pp, interior));
            accumulate(report.commuting, residual_norm(mm, interior));
        }
    }
    return report;
}

RelationReport verify_triple_relations(const FockBasis& basis) {
    return verify_triple_relations(basis, ladder_matrices(basis));
}

// ---------------------------------------------------------------------------
// Hamiltonian

double hamiltonian_offset(const StatisticsSpec& spec) {
    return -(2.0 * spec.k * spec.s - spec.s + 1.0) / (2.0 * spec.r + 2.0);
}

double printed_hamiltonian_offset(const StatisticsSpec& spec) {
    return (2.0 * spec.k * spec.s - spec.s - 1.0) / (2.0 * spec.r + 2.0);
}

namespace {

void check_energies(const StatisticsSpec& spec, const HamiltonianSpec& hspec) {
    if (static_cast<int>(hspec.e.size()) != spec.r) {
        std::ostringstream msg;
        msg << "expected " << spec.r << " mode energies, got " << hspec.e.size();
        throw InvalidSpec(msg.str());
    }
}

// h_i = s/(r+1) [ (r+1) D_i - sum_j D_j ] + c, D_j the diagonal of [a_j^-, a_j^+].
double mode_energy(const StatisticsSpec& spec, std::span<const double> d, int i) {
    const double total = std::accumulate(d.begin(), d.end(), 0.0);
    const double rp1 = spec.r + 1.0;
    return spec.s / rp1 * (rp1 * d[static_cast<std::size_t>(i)] - total) + hamiltonian_offset(spec);
}

}  // namespace

OperatorMatrix hamiltonian(const FockBasis& basis, const HamiltonianSpec& hspec) {
    const auto& spec = basis.spec();
    check_energies(spec, hspec);
    std::vector<double> diag(basis.size());
    std::vector<double> d(static_cast<std::size_t>(spec.r));
    for (std::size_t row = 0; row < basis.size(); ++row) {
        for (int j = 0; j < spec.r; ++j) d[static_cast<std::size_t>(j)] = commutator_diagonal(spec, basis.state(row), j);
        double value = hspec.e0;
        for (int i = 0; i < spec.r; ++i) value += hspec.e[static_cast<std::size_t>(i)] * mode_energy(spec, d, i);
        diag[row] = value;
    }
    return OperatorMatrix::diagonal(diag);
}

OperatorMatrix hamiltonian_from_ladders(const FockBasis& basis, const LadderSet& ladders,
                                        const HamiltonianSpec& hspec) {
    const auto& spec = basis.spec();
    check_energies(spec, hspec);
    const auto dim = basis.size();
    std::vector<OperatorMatrix> comm;
    for (int j = 0; j < spec.r; ++j) comm.push_back(commutator(ladders.lower[j], ladders.raise[j]));
    OperatorMatrix total = comm.front();
    for (int j = 1; j < spec.r; ++j) total = total + comm[static_cast<std::size_t>(j)];

    const double rp1 = spec.r + 1.0;
    const auto id = OperatorMatrix::identity(dim);
    OperatorMatrix h = id.scaled(hspec.e0);
    for (int i = 0; i < spec.r; ++i) {
        OperatorMatrix hi = (comm[static_cast<std::size_t>(i)].scaled(rp1) - total).scaled(spec.s / rp1) +
                            id.scaled(hamiltonian_offset(spec));
        h = h + hi.scaled(hspec.e[static_cast<std::size_t>(i)]);
    }
    return {SparseMatrix(h.data()), Structure::Hermitian};
}

std::vector<double> spectrum_closed_form(const FockBasis& basis, const HamiltonianSpec& hspec) {
    check_energies(basis.spec(), hspec);
    std::vector<double> out(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        double v = hspec.e0;
        for (int m = 0; m < basis.spec().r; ++m) v += hspec.e[static_cast<std::size_t>(m)] * basis.state(i)[static_cast<std::size_t>(m)];
        out[i] = v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Large-k limit

std::vector<CommutatorDeviation> large_k_commutator_deviation(int r, int s, std::span<const double> ks,
                                                              int n_cap) {
    std::vector<CommutatorDeviation> out;
    for (double k : ks) {
        StatisticsSpec spec{r, s, k, s == 1 ? std::optional<int>(n_cap + 2) : std::nullopt};
        spec.validate();
        const int cap = std::min(n_cap, spec.occupancy_cap());
        // One layer above the cap is enough for the fermionic commutator to be exact there.
        const FockBasis basis(spec, spec.is_fermionic() ? std::min(spec.occupancy_cap(), n_cap + 1) : n_cap + 2);
        const auto ladders = ladder_matrices(basis);

        // Restriction to the capped block: rows and columns with n_tot <= cap.
        const auto block = static_cast<Eigen::Index>(basis.block_offsets()[static_cast<std::size_t>(cap) + 1]);
        double worst = 0.0;
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                SparseMatrix c = ladders.lower[i].data() * ladders.raise[j].data() -
                                 ladders.raise[j].data() * ladders.lower[i].data();
                Eigen::MatrixXcd dense = Eigen::MatrixXcd(c.block(0, 0, block, block));
                if (i == j) dense.diagonal().array() -= k;
                const double norm = dense.jacobiSvd().singularValues()(0);
                worst = std::max(worst, norm);
            }
        }
        out.push_back({k, worst / k});
    }
    return out;
}

}  // namespace arstat

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include <Eigen/Eigenvalues>

#include "arstat/algebra.hpp"

using namespace arstat;

namespace {

// Brute force: every vector in [0, cap]^r with total <= cap.
std::vector<std::vector<int>> brute_force_states(int r, int cap) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(r), 0);
    std::function<void(int)> rec = [&](int slot) {
        if (slot == r) {
            int total = 0;
            for (int v : cur) total += v;
            if (total <= cap) out.push_back(cur);
            return;
        }
        for (int v = 0; v <= cap; ++v) {
            cur[static_cast<std::size_t>(slot)] = v;
            rec(slot + 1);
        }
    };
    rec(0);
    return out;
}

double binom(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

double max_abs(const SparseMatrix& m) {
    double v = 0.0;
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) v = std::max(v, std::abs(it.value()));
    }
    return v;
}

}  // namespace

TEST_CASE("spec validation rejects inadmissible families") {
    CHECK_THROWS_AS(StatisticsSpec({1, -1, 1.0, std::nullopt}).validate(), InvalidSpec);
    CHECK_THROWS_AS(StatisticsSpec({1, -1, 2.5, std::nullopt}).validate(), InvalidSpec);
    CHECK_THROWS_AS(StatisticsSpec({1, 1, 2.0, std::nullopt}).validate(), InvalidSpec);
    CHECK_THROWS_AS(StatisticsSpec({1, 1, 0.5, 4}).validate(), InvalidSpec);
    CHECK_THROWS_AS(StatisticsSpec({0, -1, 3.0, std::nullopt}).validate(), InvalidSpec);
    CHECK_NOTHROW(StatisticsSpec::bosonic(2, 1.5, 3).validate());
}

TEST_CASE("basis enumeration matches brute force") {
    SUBCASE("two modes, k = 3") {
        const auto b = enumerate_basis(StatisticsSpec::fermionic(2, 3));
        const std::vector<Occupation> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
        REQUIRE(b.size() == expected.size());
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.state(i) == expected[i]);
    }
    SUBCASE("single mode, k = 2") {
        const auto b = enumerate_basis(StatisticsSpec::fermionic(1, 2));
        CHECK(b.size() == 2);
    }
    SUBCASE("bosonic stars and bars") {
        CHECK(enumerate_basis(StatisticsSpec::bosonic(3, 2.5, 2)).size() == 10);
    }
    for (int r = 1; r <= 4; ++r) {
        for (int k = 2; k <= 7; ++k) {
            const auto b = enumerate_basis(StatisticsSpec::fermionic(r, k));
            const auto brute = brute_force_states(r, k - 1);
            CHECK(b.size() == brute.size());
            CHECK(b.size() == static_cast<std::size_t>(binom(k - 1 + r, r)));
            CHECK(fermionic_dimension(r, k) == brute.size());
            std::set<Occupation> seen(b.states().begin(), b.states().end());
            CHECK(seen.size() == b.size());
            for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.index_of(b.state(i)) == i);
        }
    }
}

TEST_CASE("basis ordering is graded with contiguous blocks") {
    const auto b = enumerate_basis(StatisticsSpec::fermionic(3, 5));
    for (std::size_t i = 1; i < b.size(); ++i) {
        const auto& prev = b.state(i - 1);
        const auto& cur = b.state(i);
        CHECK(prev.total() <= cur.total());
        if (prev.total() == cur.total()) CHECK(prev.n > cur.n);  // descending n_1 within a shell
    }
    const auto off = b.block_offsets();
    for (std::size_t m = 0; m + 1 < off.size(); ++m) {
        for (std::size_t i = off[m]; i < off[m + 1]; ++i) CHECK(b.state(i).total() == static_cast<int>(m));
    }
}

TEST_CASE("structure function values") {
    // n_1 (k - n_tot) for s = -1 and n_1 (k - 1 + n_tot) for s = +1.
    CHECK(structure_function(StatisticsSpec::fermionic(2, 3), {1, 0}, 0) == doctest::Approx(2.0));
    CHECK(structure_function(StatisticsSpec::bosonic(1, 4.0, 3), {1}, 0) == doctest::Approx(4.0));
    CHECK(structure_function(StatisticsSpec::fermionic(2, 3), {0, 2}, 0) == 0.0);
    CHECK(structure_function(StatisticsSpec::fermionic(1, 3), {3}, 0) == 0.0);
    CHECK_THROWS_AS(structure_function(StatisticsSpec::fermionic(2, 3), {1, 0}, 2), ModeOutOfRange);
    CHECK_THROWS_AS(structure_function(StatisticsSpec::fermionic(2, 3), {1, 0}, -1), ModeOutOfRange);
}

TEST_CASE("ladder matrices") {
    SUBCASE("single mode k = 2") {
        const auto b = enumerate_basis(StatisticsSpec::fermionic(1, 2));
        const auto l = ladder_matrices(b);
        CHECK(std::abs(l.raise[0].coeff(1, 0) - 1.0) < 1e-15);
        CHECK(std::abs(l.raise[0].coeff(0, 1)) == 0.0);
        CHECK(std::abs(l.lower[0].coeff(0, 0)) == 0.0);
    }
    for (const auto& spec : {StatisticsSpec::fermionic(2, 5), StatisticsSpec::bosonic(3, 2.5, 5)}) {
        const auto b = enumerate_basis(spec);
        const auto l = ladder_matrices(b);
        for (int i = 0; i < spec.r; ++i) {
            const auto& up = l.raise[static_cast<std::size_t>(i)].data();
            const auto& down = l.lower[static_cast<std::size_t>(i)].data();
            CHECK(max_abs(up - SparseMatrix(down.adjoint())) <= 1e-15);
            // at most one entry per column, and raising goes exactly one shell up
            for (Eigen::Index c = 0; c < up.outerSize(); ++c) {
                int count = 0;
                for (SparseMatrix::InnerIterator it(up, c); it; ++it) {
                    ++count;
                    CHECK(b.state(static_cast<std::size_t>(it.row())).total() == b.state(static_cast<std::size_t>(c)).total() + 1);
                }
                CHECK(count <= 1);
            }
            // a^- a^+ on interior states equals F_i(n + e_i), with F from its own formula
            const SparseMatrix prod = down * up;
            for (std::size_t c = 0; c < b.size(); ++c) {
                const auto& n = b.state(c);
                if (n.total() + 1 > (spec.is_fermionic() ? spec.occupancy_cap() : *spec.n_max)) continue;
                const double ni = n[static_cast<std::size_t>(i)] + 1.0;
                const double expected = 0.5 * ni * (2.0 * spec.k - (1.0 + spec.s) + 2.0 * spec.s * (n.total() + 1.0));
                CHECK(std::abs(prod.coeff(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)) - expected) < 1e-12);
            }
        }
    }
}

TEST_CASE("fermionic raising is nilpotent of order k") {
    for (int k : {2, 3, 5}) {
        const auto b = enumerate_basis(StatisticsSpec::fermionic(2, k));
        const auto l = ladder_matrices(b);
        for (int i = 0; i < 2; ++i) {
            SparseMatrix p = l.raise[static_cast<std::size_t>(i)].data();
            for (int j = 1; j < k - 1; ++j) p = SparseMatrix(p * l.raise[static_cast<std::size_t>(i)].data());
            CHECK(max_abs(p) > 0.0);  // order k - 1 survives
            p = SparseMatrix(p * l.raise[static_cast<std::size_t>(i)].data());
            CHECK(max_abs(p) == 0.0);
        }
    }
}

TEST_CASE("triple relations by direct matrix arithmetic") {
    // Independent check of one relation with dense matrices.
    const auto spec = StatisticsSpec::fermionic(2, 4);
    const auto b = enumerate_basis(spec);
    const auto l = ladder_matrices(b);
    auto D = [&](const OperatorMatrix& m) { return m.dense(); };
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int q = 0; q < 2; ++q) {
                const Eigen::MatrixXcd inner = D(l.raise[i]) * D(l.lower[j]) - D(l.lower[j]) * D(l.raise[i]);
                const Eigen::MatrixXcd lhs = inner * D(l.raise[q]) - D(l.raise[q]) * inner;
                Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(lhs.rows(), lhs.cols());
                if (j == q) rhs -= spec.s * D(l.raise[i]);
                if (i == j) rhs -= spec.s * D(l.raise[q]);
                CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
    CHECK(verify_triple_relations(b).max_residual() < 1e-12);

    // single mode: [[a+, a-], a+] = -2 s a+
    for (const auto& sp : {StatisticsSpec::fermionic(1, 6), StatisticsSpec::bosonic(1, 3.0, 8)}) {
        const auto bb = enumerate_basis(sp);
        const auto ll = ladder_matrices(bb);
        const auto lhs = commutator(commutator(ll.raise[0], ll.lower[0]), ll.raise[0]);
        const SparseMatrix diff = lhs.data() + ll.raise[0].scaled(2.0 * sp.s).data();
        double worst = 0.0;
        for (std::size_t c = 0; c < bb.size(); ++c) {
            if (!sp.is_fermionic() && bb.state(c).total() > *sp.n_max - 2) continue;
            for (SparseMatrix::InnerIterator it(diff, static_cast<Eigen::Index>(c)); it; ++it) worst = std::max(worst, std::abs(it.value()));
        }
        CHECK(worst < 1e-12);
    }
    CHECK(verify_triple_relations(enumerate_basis(StatisticsSpec::bosonic(2, 3.0, 6))).max_residual() < 1e-12);
}

TEST_CASE("truncated bosonic relations fail outside the interior") {
    // Without the interior restriction the top shell contaminates the relations.
    const auto spec = StatisticsSpec::bosonic(1, 3.0, 4);
    const auto b = enumerate_basis(spec);
    const auto l = ladder_matrices(b);
    const auto lhs = commutator(commutator(l.raise[0], l.lower[0]), l.raise[0]);
    const SparseMatrix diff = lhs.data() + l.raise[0].scaled(2.0).data();
    CHECK(max_abs(diff) > 1.0);
    CHECK(verify_triple_relations(b).max_residual() < 1e-12);
}

TEST_CASE("hamiltonian spectrum") {
    SUBCASE("state (1,1) with e = (1,2)") {
        const auto b = enumerate_basis(StatisticsSpec::fermionic(2, 3));
        const auto h = hamiltonian(b, {0.0, {1.0, 2.0}});
        CHECK(h.coeff(*b.index_of({1, 1}), *b.index_of({1, 1})).real() == doctest::Approx(3.0).epsilon(1e-14));
        std::vector<double> diag;
        for (std::size_t i = 0; i < b.size(); ++i) diag.push_back(h.coeff(i, i).real());
        std::sort(diag.begin(), diag.end());
        const std::vector<double> expected{0, 1, 2, 2, 3, 4};
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(diag[i] - expected[i]) < 1e-12);
    }
    SUBCASE("bosonic single mode from commutators") {
        const auto spec = StatisticsSpec::bosonic(1, 2.0, 5);
        const auto b = enumerate_basis(spec);
        const auto h = hamiltonian_from_ladders(b, ladder_matrices(b), {1.0, {0.5}});
        // (3) lies in the interior, where the commutators are exact
        CHECK(std::abs(h.coeff(3, 3).real() - 2.5) < 1e-12);
    }
    SUBCASE("zero mode energies give a degenerate spectrum") {
        const auto b = enumerate_basis(StatisticsSpec::fermionic(3, 4));
        const auto h = hamiltonian(b, {1.25, {0.0, 0.0, 0.0}});
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(h.coeff(i, i) - 1.25) < 1e-15);
    }
    SUBCASE("commutator construction equals the diagonal formula") {
        for (const auto& spec : {StatisticsSpec::fermionic(3, 5), StatisticsSpec::fermionic(2, 7)}) {
            const auto b = enumerate_basis(spec);
            HamiltonianSpec hs{0.3, {}};
            for (int i = 0; i < spec.r; ++i) hs.e.push_back(0.7 + 0.4 * i);
            const auto h1 = hamiltonian(b, hs);
            const auto h2 = hamiltonian_from_ladders(b, ladder_matrices(b), hs);
            CHECK(max_abs(h1.data() - h2.data()) < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h2.dense());
            auto closed = spectrum_closed_form(b, hs);
            std::sort(closed.begin(), closed.end());
            for (std::size_t i = 0; i < closed.size(); ++i) CHECK(std::abs(es.eigenvalues()(static_cast<Eigen::Index>(i)) - closed[i]) < 1e-12);
        }
    }
    CHECK_THROWS_AS(hamiltonian(enumerate_basis(StatisticsSpec::fermionic(2, 3)), {0.0, {1.0}}), InvalidSpec);
}

TEST_CASE("commutator diagonal and large-k limit") {
    const auto spec = StatisticsSpec::fermionic(2, 6);
    const auto b = enumerate_basis(spec);
    const auto l = ladder_matrices(b);
    const auto c = commutator(l.lower[0], l.raise[0]);
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.state(i).total() >= spec.occupancy_cap()) continue;
        CHECK(std::abs(c.coeff(i, i).real() - commutator_diagonal(spec, b.state(i), 0)) < 1e-12);
    }
    CHECK(commutator_diagonal(spec, {0, 0}, 0) == doctest::Approx(5.0));
    CHECK(commutator_diagonal(StatisticsSpec::bosonic(2, 6.0, 4), {0, 0}, 0) == doctest::Approx(6.0));

    const std::vector<double> ks{10, 100};
    const auto dev = large_k_commutator_deviation(2, -1, ks, 2);
    CHECK(dev[0].deviation / dev[1].deviation == doctest::Approx(10.0).epsilon(0.1));
    // fermions: the diagonal shift reaches n_tot + 1 + n_i = 5 on the capped block
    for (const auto& d : dev) CHECK(d.deviation * d.k == doctest::Approx(5.0));
    for (const auto& d : large_k_commutator_deviation(2, 1, ks, 2)) CHECK(d.deviation * d.k == doctest::Approx(4.0));
}

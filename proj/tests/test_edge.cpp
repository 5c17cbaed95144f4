#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arstat/edge.hpp"

using namespace arstat;

namespace {

constexpr double kPi = std::numbers::pi;

SparseMatrix comm(const OperatorMatrix& a, const OperatorMatrix& b) { return commutator(a, b).data(); }

// Largest entry of m in the given columns.
double column_max(const SparseMatrix& m, const std::vector<std::size_t>& cols) {
    double v = 0.0;
    for (auto c : cols) {
        for (SparseMatrix::InnerIterator it(m, static_cast<Eigen::Index>(c)); it; ++it) v = std::max(v, std::abs(it.value()));
    }
    return v;
}

}  // namespace

TEST_CASE("field evaluation") {
    SUBCASE("single mode") {
        auto f = zero_field({1.0}, 1);
        f.alpha[0][0] = 0.5;
        CHECK(std::abs(evaluate_field(f, {0.0}, 0.0)) < 1e-15);
        CHECK(evaluate_field(f, {kPi / 2}, 0.0) == doctest::Approx(-1.0));
        // -sin(theta - t) from the two-term sum
        for (double th : {0.3, 1.7, 4.0}) CHECK(evaluate_field(f, {th}, 0.9) == doctest::Approx(-std::sin(th - 0.9)));
    }
    SUBCASE("constant field") {
        auto f = zero_field({1.0, 3.0}, 2);
        f.alphabar0 = {1.5, -2.0};
        CHECK(evaluate_field(f, {0.4, 2.2}, 7.0) == doctest::Approx(-3.0));
    }
    SUBCASE("chirality and time translation") {
        auto f = random_field({1.0, 2.5}, 3, 11, 1.0, false);
        for (double t : {0.0, 0.5, 2.0}) {
            for (double th : {0.1, 1.0, 5.0}) {
                for (int i = 0; i < 2; ++i) {
                    const double e = f.e[static_cast<std::size_t>(i)];
                    CHECK(std::abs(component_value(f, i, th, t + 0.37) - component_value(f, i, th - e * 0.37, t)) < 1e-12);
                }
            }
        }
    }
    SUBCASE("validation") {
        auto f = zero_field({1.0, 2.0}, 2);
        f.alpha[1].pop_back();
        CHECK_THROWS_AS(f.validate(), DomainError);
        auto g = zero_field({1.0}, 1);
        g.alphabar0[0] = std::nan("");
        CHECK_THROWS_AS(g.validate(), DomainError);
    }
}

TEST_CASE("equations of motion and periodicity") {
    const auto grid = uniform_edge_grid(16, 9, 3.0);
    for (unsigned seed = 1; seed <= 10; ++seed) {
        const auto f = random_field({1.0, 0.5, 2.0}, 4, seed);
        CHECK(eom_residual(f, grid) < 1e-12);
        CHECK(periodicity_residual(f, grid.t) < 1e-12);
        CHECK(momentum_coefficient_residual(f, 16) < 1e-12);
        // difference oracle for the chirality condition
        const double h = 1e-5;
        for (int i = 0; i < 3; ++i) {
            const double e = f.e[static_cast<std::size_t>(i)];
            const double th = 0.3 * seed, t = 0.1 * seed;
            const double dt = (component_value(f, i, th, t + h) - component_value(f, i, th, t - h)) / (2 * h);
            const double dth = (component_value(f, i, th + h, t) - component_value(f, i, th - h, t)) / (2 * h);
            CHECK(std::abs(dt + e * dth) < 1e-6);
            CHECK(std::abs(component_dtheta(f, i, th, t) - dth) < 1e-6);
            CHECK(std::abs(component_dt(f, i, th, t) - dt) < 1e-6);
            // the momentum field is minus the angular derivative
            CHECK(std::abs(momentum_field(f, i, th, t) + component_dtheta(f, i, th, t)) < 1e-12);
        }
    }
    CHECK(eom_residual(zero_field({1.0}, 1), grid) == 0.0);
    auto f = zero_field({1.0}, 1);
    f.alpha[0][0] = 0.5;
    CHECK(eom_residual(f, grid) < 1e-12);
    CHECK(eom_residual(f.corrupted(), grid) > 0.1);
}

TEST_CASE("common period") {
    CHECK(*common_period({1.0, 2.0}) == doctest::Approx(2 * kPi));
    CHECK(*common_period({1.0, 0.5}) == doctest::Approx(4 * kPi));
    CHECK(*common_period({1.5, 2.0}) == doctest::Approx(4 * kPi));
    CHECK_FALSE(common_period({1.0, std::sqrt(2.0)}).has_value());
}

TEST_CASE("action functional") {
    SUBCASE("chiral solutions") {
        for (unsigned seed = 1; seed <= 5; ++seed) {
            auto f = random_field({1.0, 2.0}, 2, seed);
            CHECK(std::abs(action_value(f, 2 * kPi)) < 1e-10);
            auto g = random_field({1.0, 2.0}, 2, seed, 1.0, false);
            CHECK(std::abs(action_value(sample_field(g, 12, 24, 2 * kPi), g.e)) < 1e-10);
        }
    }
    SUBCASE("anti-chiral benchmark") {
        for (double e : {1.0, 2.0}) {
            const double T = 2 * kPi / e;
            const auto s = sample_function(1, 16, 16, T, [&](const std::vector<double>& th, double t) { return std::cos(th[0] + e * t); });
            // -1/2 * 2e * integral of sin^2 over [0, 2 pi) x [0, T) = -e * (2 pi T) / 2
            CHECK(action_value(s, {e}) == doctest::Approx(-e * 2 * kPi * T / 2).epsilon(1e-12));
        }
    }
    SUBCASE("zero field and gauge shifts") {
        const auto z = sample_function(2, 8, 8, 2 * kPi, [](const std::vector<double>&, double) { return 0.0; });
        CHECK(action_value(z, {1.0, 1.0}) == 0.0);
        auto phi = [](const std::vector<double>& th, double t) { return std::sin(th[0] - t) * std::cos(2 * th[1] + t); };
        const auto a = sample_function(2, 12, 12, 2 * kPi, phi);
        const auto b = sample_function(2, 12, 12, 2 * kPi, [&](const std::vector<double>& th, double t) { return phi(th, t) + 3.0 * std::sin(t) + 1.0; });
        CHECK(std::abs(action_value(a, {1.0, 0.5}) - action_value(b, {1.0, 0.5})) < 1e-12);
        CHECK(std::abs(action_value(a, {1.0, 0.5})) > 1e-3);  // not a solution
    }
    SUBCASE("sampled and analytic paths agree off shell") {
        auto f = zero_field({1.0}, 2);
        f.alpha[0] = {Complex(0.4, 0.1), Complex(0.0, 0.3)};
        const auto g = f.corrupted();
        const double T = *common_period({1.0, 0.5});
        const double analytic = action_value(g, T);
        CHECK(std::abs(analytic) > 1e-2);
        CHECK(action_value(sample_field(g, 16, 24, T), g.e) == doctest::Approx(analytic).epsilon(1e-10));
    }
    SUBCASE("grid errors") {
        auto s = sample_function(1, 8, 8, 1.0, [](const std::vector<double>&, double) { return 1.0; });
        s.values.pop_back();
        CHECK_THROWS_AS(action_value(s, {1.0}), GridError);
        auto u = sample_function(1, 8, 8, 1.0, [](const std::vector<double>&, double) { return 1.0; });
        u.t[3] += 1e-3;
        CHECK_THROWS_AS(action_value(u, {1.0}), GridError);
        auto v = sample_function(1, 8, 8, 1.0, [](const std::vector<double>&, double) { return 1.0; });
        CHECK_THROWS_AS(action_value(v, {1.0, 2.0}), GridError);
    }
}

TEST_CASE("mode algebra") {
    SUBCASE("single oscillator") {
        const auto alg = build_mode_algebra(1, 1, 6);
        const SparseMatrix c = comm(alg.alpha(0, 1), alg.alpha(0, -1));
        // the vacuum is the first basis state
        CHECK(std::abs(c.coeff(0, 0) - 1.0) < 1e-15);
        CHECK(comm(alg.alpha(0, 1), alg.alpha(0, 1)).norm() == 0.0);
        // zero modes: [alpha_0, alphabar_0] = i on the interior
        const SparseMatrix z = comm(alg.alpha0(0), alg.alphabar0(0)) - SparseMatrix(OperatorMatrix::identity(alg.dim()).scaled(Complex(0, 1)).data());
        CHECK(column_max(z, alg.interior()) < 1e-12);
    }
    SUBCASE("components commute") {
        const auto alg = build_mode_algebra(2, 2, 4, 4);
        for (int n : {-2, -1, 1, 2}) {
            for (int m : {-2, -1, 1, 2}) CHECK(comm(alg.alpha(0, n), alg.alpha(1, m)).norm() == 0.0);
        }
        CHECK(mode_commutator_residuals(alg).max_residual() < 1e-12);
        CHECK(mode_commutator_residuals(alg).interior_size > 0);
    }
    SUBCASE("dimensions") {
        const auto a = build_mode_algebra(1, 2, 4, 8);
        const auto d = hilbert_dimensions(a);
        CHECK(d.total == 128);
        CHECK(d.component.size() == 1);
        CHECK(a.alpha(0, 1).dim() == d.total);
        const auto b = hilbert_dimensions(build_mode_algebra(2, 2, 4, 8));
        CHECK(b.component.size() == 2);
        CHECK(b.total == 128 * 128);  // one zero-mode pair per component
        CHECK_THROWS_AS(build_mode_algebra(2, 3, 6, 8, 100000), SizeError);
        CHECK_THROWS_AS(build_mode_algebra(1, 0, 6), DomainError);
    }
    SUBCASE("field commutator mode sum is a sawtooth") {
        const double d = 1.0;
        const Complex v = mode_sum_field_commutator(d, 4000);
        CHECK(v.imag() == 1.0);
        CHECK(v.real() == doctest::Approx(kPi - d).epsilon(1e-3));
    }
}

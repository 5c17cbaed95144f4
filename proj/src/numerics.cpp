#include "arstat/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace arstat {

void KahanSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

double log_factorial(double x) { return std::lgamma(x + 1.0); }

double log_sum_exp(std::span<const double> terms) {
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    const double peak = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(peak)) return peak;
    KahanSum acc;
    for (double t : terms) acc.add(std::exp(t - peak));
    return peak + std::log(acc.value());
}

GaussRule gauss_legendre_unit(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be positive");
    // Boost returns the non-negative roots of P_n in ascending order.
    const auto half = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> roots;
    roots.reserve(n);
    for (double x : half) {
        if (x != 0.0) roots.push_back(-x);
    }
    for (double x : half) roots.push_back(x);
    std::sort(roots.begin(), roots.end());

    GaussRule rule;
    rule.nodes.reserve(n);
    rule.weights.reserve(n);
    for (double x : roots) {
        const double dp = boost::math::legendre_p_prime(n, x);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes.push_back(0.5 * (x + 1.0));
        rule.weights.push_back(0.5 * w);
    }
    return rule;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_line: need at least two matching points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

std::vector<double> fourier_diff_matrix(int n, double period) {
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    const double scale = 2.0 * std::numbers::pi / period;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            const double arg = std::numbers::pi * (j - k) / n;
            const double sign = ((j - k) % 2 == 0) ? 1.0 : -1.0;
            const double v = (n % 2 == 0) ? 0.5 * sign / std::tan(arg) : 0.5 * sign / std::sin(arg);
            d[static_cast<std::size_t>(j) * n + k] = scale * v;
        }
    }
    return d;
}

}  // namespace arstat

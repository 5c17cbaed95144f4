#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace arstat {

using Complex = std::complex<double>;

/// Compensated (Kahan-Babuska) accumulator.
class KahanSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// log(x!) for real x > -1, via lgamma.
double log_factorial(double x);

/// log of sum of exp(terms), stable for large magnitudes.
double log_sum_exp(std::span<const double> terms);

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre_unit(int n);

/// Least-squares line y = slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // root-mean-square residual
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fourier differentiation matrix for n equispaced samples on a periodic
/// interval of length `period` (row-major, n x n).
std::vector<double> fourier_diff_matrix(int n, double period);

}  // namespace arstat

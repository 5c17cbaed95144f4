#include "arstat/bargmann.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

namespace arstat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Amplitude C_n z^n / N with the modulus accumulated in log space.
Complex scaled_monomial(double log_prefactor, const Occupation& n, const BargmannPoint& p) {
    double log_mod = log_prefactor;
    double phase = 0.0;
    for (std::size_t i = 0; i < n.n.size(); ++i) {
        const int e = n.n[i];
        if (e == 0) continue;
        const double mod = std::abs(p[i]);
        if (mod == 0.0) return {0.0, 0.0};
        log_mod += e * std::log(mod);
        phase += e * std::arg(p[i]);
    }
    return std::polar(std::exp(log_mod), phase);
}

}  // namespace

// ---------------------------------------------------------------------------
// Points and domain

BargmannPoint::BargmannPoint(std::vector<Complex> z) : z_(std::move(z)) {
    for (const auto& zi : z_) rho_ += std::norm(zi);
}

Complex hermitian_dot(const BargmannPoint& z, const BargmannPoint& w) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < z.z().size(); ++i) acc += std::conj(z[i]) * w[i];
    return acc;
}

void check_domain(const StatisticsSpec& spec, const BargmannPoint& p) {
    if (p.rank() != spec.r) {
        std::ostringstream msg;
        msg << "point has " << p.rank() << " coordinates, expected r = " << spec.r;
        throw DomainError(msg.str());
    }
    for (const auto& zi : p.z()) {
        if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag())) throw DomainError("non-finite coordinate");
    }
    if (spec.s == 1 && !(p.rho() < 1.0)) {
        std::ostringstream msg;
        msg << "bosonic domain requires |z|^2 < 1 (got " << p.rho() << ")";
        throw DomainError(msg.str());
    }
}

// ---------------------------------------------------------------------------
// Coefficients and normalization

double log_coefficient(const StatisticsSpec& spec, const Occupation& occ) {
    const int n = occ.total();
    if (spec.is_fermionic() && n > static_cast<int>(spec.k) - 1) return -kInf;
    double v = 0.5 * spec.s * (std::lgamma(spec.k + spec.s * n) - std::lgamma(spec.k));
    for (int ni : occ.n) v -= 0.5 * log_factorial(ni);
    return v;
}

double coefficient(const StatisticsSpec& spec, const Occupation& occ) {
    return std::exp(log_coefficient(spec, occ));
}

double normalization_exponent(const StatisticsSpec& spec) {
    return (2.0 * spec.k * spec.s - spec.s + 1.0) / 4.0;
}

double log_normalization(const StatisticsSpec& spec, double rho) {
    return -normalization_exponent(spec) * std::log1p(-spec.s * rho);
}

double bosonic_tail_bound(double k, double rho, int n_max) {
    if (rho <= 0.0) return 0.0;
    if (rho >= 1.0) return kInf;
    const int m = n_max + 1;
    // Weight of the total-occupancy shell m under the negative binomial law.
    const double log_term = k * std::log1p(-rho) + std::lgamma(k + m) - std::lgamma(k) -
                            std::lgamma(m + 1.0) + m * std::log(rho);
    const double ratio = rho * (k + m) / (m + 1.0);
    if (ratio >= 1.0) return kInf;
    return std::exp(log_term) / (1.0 - ratio);
}

int required_n_max(double k, double rho, double tolerance) {
    int n = 0;
    while (bosonic_tail_bound(k, rho, n) > tolerance) {
        ++n;
        if (n > 1'000'000) throw TruncationError("no truncation reaches the requested tail tolerance");
    }
    return n;
}

CoherentVector coherent_vector(const FockBasis& basis, const BargmannPoint& point, double tail_tolerance) {
    const auto& spec = basis.spec();
    check_domain(spec, point);
    CoherentVector cv;
    cv.point = point;
    const double log_n = log_normalization(spec, point.rho());
    cv.normalization = std::exp(log_n);
    cv.amplitudes.resize(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto& occ = basis.state(i);
        cv.amplitudes(static_cast<Eigen::Index>(i)) = scaled_monomial(log_coefficient(spec, occ) - log_n, occ, point);
    }
    if (!spec.is_fermionic()) {
        cv.tail_bound = bosonic_tail_bound(spec.k, point.rho(), basis.max_total());
    } else if (basis.max_total() < spec.occupancy_cap()) {
        cv.tail_bound = std::max(0.0, 1.0 - cv.amplitudes.squaredNorm());
    }
    if (cv.tail_bound > tail_tolerance) {
        std::ostringstream msg;
        msg << "coherent-state tail bound " << cv.tail_bound << " exceeds " << tail_tolerance
            << " at rho = " << point.rho() << " with cap " << basis.max_total();
        throw TruncationError(msg.str());
    }
    return cv;
}

// ---------------------------------------------------------------------------
// Kernel, distance, metric

Complex overlap(const StatisticsSpec& spec, const BargmannPoint& z, const BargmannPoint& w) {
    check_domain(spec, z);
    check_domain(spec, w);
    const double p = normalization_exponent(spec);
    const double s = spec.s;
    const Complex cross = 1.0 - s * hermitian_dot(z, w);
    const double mod_part = p * (std::log1p(-s * z.rho()) + std::log1p(-s * w.rho()));
    return std::exp(mod_part - 2.0 * p * std::log(cross));
}

double distance_sq(const StatisticsSpec& spec, const BargmannPoint& z, const BargmannPoint& w) {
    check_domain(spec, z);
    check_domain(spec, w);
    const double s = spec.s;
    // |1 - s z.w|^2 / ((1 - s rho_z)(1 - s rho_w)) = 1 + num/den, with num
    // s |z - w|^2 - sum_{i<j} |z_i w_j - z_j w_i|^2 (Lagrange identity).
    double diff = 0.0, wedge = 0.0;
    for (int i = 0; i < spec.r; ++i) {
        diff += std::norm(z[static_cast<std::size_t>(i)] - w[static_cast<std::size_t>(i)]);
        for (int j = i + 1; j < spec.r; ++j) {
            wedge += std::norm(z[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] -
                               z[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(i)]);
        }
    }
    const double num = s * diff - wedge;
    const double den = (1.0 - s * z.rho()) * (1.0 - s * w.rho());
    return 2.0 * normalization_exponent(spec) * std::log1p(num / den);
}

Eigen::MatrixXcd contravariant_metric(const StatisticsSpec& spec, const BargmannPoint& point) {
    check_domain(spec, point);
    const int r = spec.r;
    const double s = spec.s;
    const double scale = 2.0 * (1.0 - s * point.rho()) / (2.0 * spec.k + s - 1.0);
    Eigen::MatrixXcd m(r, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            const Complex zz = point[static_cast<std::size_t>(i)] * std::conj(point[static_cast<std::size_t>(j)]);
            m(i, j) = scale * ((i == j ? 1.0 : 0.0) - s * zz);
        }
    }
    return m;
}

MetricMatrix metric(const StatisticsSpec& spec, const BargmannPoint& point) {
    check_domain(spec, point);
    const int r = spec.r;
    const double s = spec.s;
    const double c = spec.k + 0.5 * s - 0.5;
    const double q = 1.0 - s * point.rho();
    MetricMatrix out;
    out.point = point;
    out.g.resize(r, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            const Complex zz = std::conj(point[static_cast<std::size_t>(i)]) * point[static_cast<std::size_t>(j)];
            out.g(i, j) = c * ((i == j ? 1.0 : 0.0) / q + s * zz / (q * q));
        }
    }
    out.g_inv = contravariant_metric(spec, point).transpose();
    return out;
}

// ---------------------------------------------------------------------------
// Measure

double measure_exponent(const StatisticsSpec& spec) {
    return spec.s * spec.k - spec.r - 0.5 * (spec.s + 1.0);
}

double printed_measure_constant(const StatisticsSpec& spec) {
    const double log_ratio = std::lgamma(spec.k) - std::lgamma(spec.k - spec.s * spec.r + 0.5 * (spec.s - 1.0) + 1.0);
    return std::exp(spec.s * log_ratio - spec.r * std::log(kPi));
}

double exact_measure_constant(const StatisticsSpec& spec) {
    const double r = spec.r;
    if (spec.is_fermionic()) {
        return std::exp(std::lgamma(spec.k + r) - std::lgamma(spec.k) - r * std::log(kPi));
    }
    if (!(spec.k > r)) throw DomainError("bosonic measure is normalizable only for k > r");
    return std::exp(std::lgamma(spec.k) - std::lgamma(spec.k - r) - r * std::log(kPi));
}

double measure_density(const StatisticsSpec& spec, const BargmannPoint& point) {
    check_domain(spec, point);
    return exact_measure_constant(spec) * std::pow(1.0 - spec.s * point.rho(), measure_exponent(spec));
}

double measure_density(const QuadratureRule& rule, const BargmannPoint& point) {
    const auto& spec = rule.spec();
    check_domain(spec, point);
    return rule.measure_constant() * std::pow(1.0 - spec.s * point.rho(), measure_exponent(spec));
}

QuadratureRule::QuadratureRule(const StatisticsSpec& spec, int radial_nodes, int angular_nodes, RadialMap map,
                               double cutoff)
    : spec_(spec), radial_order_(radial_nodes), angular_nodes_(angular_nodes), map_(map), cutoff_(cutoff) {
    spec_.validate();
    if (radial_nodes < 1 || angular_nodes < 1) throw DomainError("quadrature orders must be positive");
    if (!spec_.is_fermionic() && !(spec_.k > spec_.r)) {
        throw DomainError("bosonic measure is normalizable only for k > r");
    }
    if (map_ == RadialMap::Cutoff) {
        if (!spec_.is_fermionic()) throw DomainError("radial cutoff applies to the fermionic family only");
        if (!(cutoff_ > 0.0)) throw DomainError("radial cutoff must be positive");
        // Measure mass beyond total radius R: incomplete beta in t = rho / (1 + rho).
        tail_ = boost::math::ibetac(static_cast<double>(spec_.r), spec_.k, cutoff_ / (1.0 + cutoff_));
    }

    const int r = spec_.r;
    const double s = spec_.s;
    const double expo = measure_exponent(spec_);
    const auto gl = gauss_legendre_unit(radial_nodes);

    std::vector<int> idx(static_cast<std::size_t>(r), 0);
    std::vector<double> u(static_cast<std::size_t>(r)), x(static_cast<std::size_t>(r));
    KahanSum mass;
    while (true) {
        double w = 1.0;
        for (int l = 0; l < r; ++l) {
            const double t = gl.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])];
            // u = 1 - (1 - t)^2 softens the boundary behaviour at u -> 1.
            u[static_cast<std::size_t>(l)] = 1.0 - (1.0 - t) * (1.0 - t);
            w *= gl.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])] * 2.0 * (1.0 - t);
        }
        // Duffy map from the cube to the simplex sum x <= 1.
        double remaining = 1.0;  // prod_{l < j} (1 - u_l)
        for (int l = 0; l < r; ++l) {
            x[static_cast<std::size_t>(l)] = remaining * u[static_cast<std::size_t>(l)];
            w *= remaining;
            remaining *= 1.0 - u[static_cast<std::size_t>(l)];
        }
        // `remaining` now equals 1 - sum x.
        Node node;
        node.radial.resize(static_cast<std::size_t>(r));
        double density = 0.0;
        if (!spec_.is_fermionic()) {
            for (int l = 0; l < r; ++l) node.radial[static_cast<std::size_t>(l)] = x[static_cast<std::size_t>(l)];
            density = std::pow(remaining, expo);
        } else if (map_ == RadialMap::Compactified) {
            for (int l = 0; l < r; ++l) node.radial[static_cast<std::size_t>(l)] = x[static_cast<std::size_t>(l)] / remaining;
            // (1 + rho)^expo with 1 + rho = 1/remaining, Jacobian remaining^{-r-1}.
            density = std::pow(remaining, -expo - r - 1.0);
        } else {
            double rho = 0.0;
            for (int l = 0; l < r; ++l) {
                node.radial[static_cast<std::size_t>(l)] = cutoff_ * x[static_cast<std::size_t>(l)];
                rho += node.radial[static_cast<std::size_t>(l)];
            }
            density = std::pow(cutoff_, r) * std::pow(1.0 - s * rho, expo);
        }
        node.weight = w * density * std::pow(kPi, r);
        mass.add(node.weight);
        nodes_.push_back(std::move(node));

        int l = 0;
        while (l < r && ++idx[static_cast<std::size_t>(l)] == radial_nodes) idx[static_cast<std::size_t>(l++)] = 0;
        if (l == r) break;
    }
    constant_ = 1.0 / mass.value();
    for (auto& node : nodes_) node.weight *= constant_;
}

Complex integrate(const QuadratureRule& rule, const std::function<Complex(const BargmannPoint&)>& f,
                  double tail_tolerance) {
    if (rule.tail_estimate() > tail_tolerance) {
        std::ostringstream msg;
        msg << "measure tail beyond cutoff " << rule.cutoff() << " is " << rule.tail_estimate();
        throw TailError(msg.str());
    }
    const int r = rule.spec().r;
    const int m = rule.angular_nodes();
    const double angular_weight = std::pow(1.0 / m, r);
    std::vector<Complex> z(static_cast<std::size_t>(r));
    std::vector<int> idx(static_cast<std::size_t>(r));
    Complex total = 0.0;
    for (const auto& node : rule.radial_nodes()) {
        std::fill(idx.begin(), idx.end(), 0);
        Complex acc = 0.0;
        while (true) {
            for (int l = 0; l < r; ++l) {
                const double theta = 2.0 * kPi * idx[static_cast<std::size_t>(l)] / m;
                z[static_cast<std::size_t>(l)] = std::polar(std::sqrt(node.radial[static_cast<std::size_t>(l)]), theta);
            }
            acc += f(BargmannPoint(z));
            int l = 0;
            while (l < r && ++idx[static_cast<std::size_t>(l)] == m) idx[static_cast<std::size_t>(l++)] = 0;
            if (l == r) break;
        }
        total += acc * (node.weight * angular_weight);
    }
    return total;
}

double moment(const QuadratureRule& rule, const Occupation& n_prime, const Occupation& n) {
    if (n_prime != n) return 0.0;  // angular orthogonality of the phases
    const auto& spec = rule.spec();
    const double log_c2 = 2.0 * log_coefficient(spec, n);
    KahanSum acc;
    for (const auto& node : rule.radial_nodes()) {
        double log_term = log_c2;
        bool zero = false;
        for (std::size_t i = 0; i < n.n.size(); ++i) {
            if (n.n[i] == 0) continue;
            if (node.radial[i] == 0.0) {
                zero = true;
                break;
            }
            log_term += n.n[i] * std::log(node.radial[i]);
        }
        if (!zero) acc.add(node.weight * std::exp(log_term));
    }
    return acc.value();
}

Eigen::MatrixXd gram_matrix(const QuadratureRule& rule, const FockBasis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            g(i, j) = moment(rule, basis.state(static_cast<std::size_t>(i)), basis.state(static_cast<std::size_t>(j)));
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Differential realization

Polynomial apply_lowering(const Polynomial& p, int mode) {
    Polynomial out;
    for (const auto& [mono, c] : p) {
        const int e = mono[static_cast<std::size_t>(mode)];
        if (e == 0) continue;
        out[mono.shifted(mode, -1)] += c * static_cast<double>(e);
    }
    return out;
}

Polynomial apply_raising(const StatisticsSpec& spec, const Polynomial& p, int mode) {
    Polynomial out;
    const double base = 0.5 * (2.0 * spec.k + spec.s - 1.0);
    for (const auto& [mono, c] : p) {
        // z_i * (base + s * Euler(z)) on a monomial of total degree |m|.
        out[mono.shifted(mode, +1)] += c * (base + spec.s * mono.total());
    }
    return out;
}

RealizationReport differential_realization_check(const FockBasis& basis, int n_cap) {
    const auto& spec = basis.spec();
    if (n_cap < 0 || n_cap > basis.max_total()) throw InvalidSpec("n_cap outside the basis bounds");
    const auto ladders = ladder_matrices(basis);
    RealizationReport report;

    auto compare = [&](const Polynomial& poly, const OperatorMatrix& op, std::size_t col, double& worst) {
        Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
        unit(static_cast<Eigen::Index>(col)) = 1.0;
        Eigen::VectorXcd expected = op.apply(unit);
        Eigen::VectorXcd got = Eigen::VectorXcd::Zero(expected.size());
        for (const auto& [mono, c] : poly) {
            const auto row = basis.index_of(mono);
            if (!row) {
                // Outside the basis: fermionic chains must terminate exactly.
                if (spec.is_fermionic()) worst = std::max(worst, std::abs(c));
                continue;
            }
            got(static_cast<Eigen::Index>(*row)) = c / coefficient(spec, mono);
        }
        if (expected.size() > 0) worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff());
    };

    for (std::size_t col = 0; col < basis.size(); ++col) {
        const auto& occ = basis.state(col);
        if (occ.total() > n_cap) continue;
        ++report.states_checked;
        const Polynomial poly{{occ, coefficient(spec, occ)}};
        for (int i = 0; i < spec.r; ++i) {
            compare(apply_lowering(poly, i), ladders.lower[static_cast<std::size_t>(i)], col, report.lowering_residual);
            compare(apply_raising(spec, poly, i), ladders.raise[static_cast<std::size_t>(i)], col, report.raising_residual);
        }
    }
    return report;
}

}  // namespace arstat

#include "arstat/edge.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace arstat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

double product_except(const std::vector<double>& v, std::size_t skip) {
    double p = 1.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j != skip) p *= v[j];
    }
    return p;
}

void check_uniform(const std::vector<double>& axis, double spacing, const char* what) {
    if (axis.size() < 2) throw GridError(std::string(what) + " axis needs at least two samples");
    for (std::size_t j = 0; j < axis.size(); ++j) {
        const double expected = axis.front() + spacing * static_cast<double>(j);
        if (std::abs(axis[j] - expected) > 1e-10 * std::max(1.0, std::abs(expected))) {
            std::ostringstream msg;
            msg << what << " axis is not uniform with spacing " << spacing << " at sample " << j;
            throw GridError(msg.str());
        }
    }
}

// Applies the periodic differentiation matrix along one axis of a row-major array.
std::vector<double> differentiate(const std::vector<double>& values, const std::vector<std::size_t>& shape,
                                  std::size_t axis, double period) {
    const int n = static_cast<int>(shape[axis]);
    const auto d = fourier_diff_matrix(n, period);
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
    const std::size_t block = stride * shape[axis];
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t base = 0; base < values.size(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) {
                    acc += d[static_cast<std::size_t>(j) * n + k] * values[base + off + stride * k];
                }
                out[base + off + stride * j] = acc;
            }
        }
    }
    return out;
}

SparseMatrix truncated_lowering(int levels) {
    SparseMatrix b(levels, levels);
    std::vector<Eigen::Triplet<Complex>> trip;
    for (int m = 1; m < levels; ++m) trip.emplace_back(m - 1, m, std::sqrt(static_cast<double>(m)));
    b.setFromTriplets(trip.begin(), trip.end());
    return b;
}

// I_left (x) op (x) I_right.
SparseMatrix embed(const SparseMatrix& op, std::size_t left, std::size_t right) {
    const auto d = static_cast<std::size_t>(op.rows());
    const std::size_t n = left * d * right;
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(left * static_cast<std::size_t>(op.nonZeros()) * right);
    for (std::size_t a = 0; a < left; ++a) {
        for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(op, col); it; ++it) {
                for (std::size_t c = 0; c < right; ++c) {
                    const auto row = (a * d + static_cast<std::size_t>(it.row())) * right + c;
                    const auto cc = (a * d + static_cast<std::size_t>(it.col())) * right + c;
                    trip.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(cc), it.value());
                }
            }
        }
    }
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

double interior_max_abs(const SparseMatrix& m, const std::vector<char>& is_interior) {
    double worst = 0.0;
    for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
        if (!is_interior[static_cast<std::size_t>(col)]) continue;
        for (SparseMatrix::InnerIterator it(m, col); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------------------
// Field data

void EdgeField::validate() const {
    const auto n = idx(r);
    if (r < 1) throw DomainError("edge field needs r >= 1");
    if (e.size() != n || alpha0.size() != n || alphabar0.size() != n || alpha.size() != n) {
        throw DomainError("edge field data must have one entry per component");
    }
    if (!drift.empty() && drift.size() != n) throw DomainError("drift must be empty or have one entry per component");
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i].size() != alpha[0].size()) throw DomainError("components must share the mode cutoff");
        if (!std::isfinite(e[i]) || !std::isfinite(alpha0[i]) || !std::isfinite(alphabar0[i])) {
            throw DomainError("non-finite edge field data");
        }
        for (const auto& a : alpha[i]) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw DomainError("non-finite amplitude");
        }
    }
}

int EdgeField::modes() const { return alpha.empty() ? 0 : static_cast<int>(alpha[0].size()); }

double EdgeField::phase_velocity(int i) const { return drift.empty() ? e[idx(i)] : drift[idx(i)]; }

EdgeField EdgeField::corrupted() const {
    EdgeField out = *this;
    out.drift.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) out.drift[i] = 0.5 * e[i];
    return out;
}

EdgeField zero_field(const std::vector<double>& e, int modes) {
    EdgeField f;
    f.r = static_cast<int>(e.size());
    f.e = e;
    f.alpha0.assign(e.size(), 0.0);
    f.alphabar0.assign(e.size(), 0.0);
    f.alpha.assign(e.size(), std::vector<Complex>(idx(modes)));
    f.validate();
    return f;
}

EdgeField random_field(const std::vector<double>& e, int modes, unsigned seed, double amplitude, bool winding) {
    EdgeField f = zero_field(e, modes);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < e.size(); ++i) {
        f.alpha0[i] = winding ? uniform(gen) : 0.0;
        f.alphabar0[i] = uniform(gen);
        for (int n = 1; n <= modes; ++n) {
            const double scale = amplitude / n;
            f.alpha[i][idx(n - 1)] = Complex(scale * normal(gen), scale * normal(gen));
        }
    }
    return f;
}

double component_value(const EdgeField& f, int i, double theta, double t) {
    const auto ii = idx(i);
    const double phi = theta - f.phase_velocity(i) * t;
    double osc = 0.0;
    for (std::size_t n = 1; n <= f.alpha[ii].size(); ++n) {
        osc -= 2.0 * std::imag(f.alpha[ii][n - 1] * std::polar(1.0, static_cast<double>(n) * phi)) / static_cast<double>(n);
    }
    return f.alphabar0[ii] - f.alpha0[ii] * (theta - f.e[ii] * t) + osc;
}

double component_dtheta(const EdgeField& f, int i, double theta, double t) {
    const auto ii = idx(i);
    const double phi = theta - f.phase_velocity(i) * t;
    double osc = 0.0;
    for (std::size_t n = 1; n <= f.alpha[ii].size(); ++n) {
        osc -= 2.0 * std::real(f.alpha[ii][n - 1] * std::polar(1.0, static_cast<double>(n) * phi));
    }
    return -f.alpha0[ii] + osc;
}

double component_dt(const EdgeField& f, int i, double theta, double t) {
    const auto ii = idx(i);
    const double v = f.phase_velocity(i);
    const double phi = theta - v * t;
    double osc = 0.0;
    for (std::size_t n = 1; n <= f.alpha[ii].size(); ++n) {
        osc += 2.0 * v * std::real(f.alpha[ii][n - 1] * std::polar(1.0, static_cast<double>(n) * phi));
    }
    return f.alpha0[ii] * f.e[ii] + osc;
}

double evaluate_field(const EdgeField& f, const std::vector<double>& theta, double t) {
    if (static_cast<int>(theta.size()) != f.r) throw DomainError("need one angle per component");
    double p = 1.0;
    for (int i = 0; i < f.r; ++i) p *= component_value(f, i, theta[idx(i)], t);
    return p;
}

double momentum_field(const EdgeField& f, int i, double theta, double t) {
    const auto ii = idx(i);
    const double phi = theta - f.phase_velocity(i) * t;
    double v = f.alpha0[ii];
    for (std::size_t n = 1; n <= f.alpha[ii].size(); ++n) {
        v += 2.0 * std::real(f.alpha[ii][n - 1] * std::polar(1.0, static_cast<double>(n) * phi));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Classical checks

EdgeGrid uniform_edge_grid(int n_theta, int n_t, double T) {
    if (n_theta < 2 || n_t < 1 || !(T > 0.0)) throw GridError("grid sizes and window must be positive");
    EdgeGrid g;
    for (int j = 0; j < n_theta; ++j) g.theta.push_back(kTwoPi * j / n_theta);
    for (int j = 0; j < n_t; ++j) g.t.push_back(T * j / n_t);
    return g;
}

double eom_residual(const EdgeField& f, const EdgeGrid& grid) {
    f.validate();
    double worst = 0.0;
    for (int i = 0; i < f.r; ++i) {
        for (double t : grid.t) {
            for (double th : grid.theta) {
                const double res = component_dt(f, i, th, t) + f.e[idx(i)] * component_dtheta(f, i, th, t);
                worst = std::max(worst, std::abs(res));
            }
        }
    }
    return worst;
}

double periodicity_residual(const EdgeField& f, const std::vector<double>& times) {
    f.validate();
    double worst = 0.0;
    for (int i = 0; i < f.r; ++i) {
        for (double t : times) {
            const double jump = component_value(f, i, kTwoPi, t) - component_value(f, i, 0.0, t);
            worst = std::max(worst, std::abs(jump + kTwoPi * f.alpha0[idx(i)]));
        }
    }
    return worst;
}

double momentum_coefficient_residual(const EdgeField& f, int samples) {
    f.validate();
    if (samples <= 2 * f.modes()) throw GridError("too few samples to resolve every mode");
    const auto n = idx(samples);
    double worst = 0.0;
    for (int i = 0; i < f.r; ++i) {
        // Periodic part of Phi_i, differentiated spectrally, plus the winding slope.
        std::vector<double> periodic(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double th = kTwoPi * static_cast<double>(j) / samples;
            periodic[j] = component_value(f, i, th, 0.0) + f.alpha0[idx(i)] * th;
        }
        auto d = differentiate(periodic, {n}, 0, kTwoPi);
        for (auto& v : d) v = -(v - f.alpha0[idx(i)]);
        for (int m = 0; m <= f.modes(); ++m) {
            Complex c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                c += d[j] * std::polar(1.0, -kTwoPi * m * static_cast<double>(j) / samples);
            }
            c /= static_cast<double>(samples);
            const Complex expected = m == 0 ? Complex(f.alpha0[idx(i)]) : f.alpha[idx(i)][idx(m - 1)];
            worst = std::max(worst, std::abs(c - expected));
        }
    }
    return worst;
}

std::optional<double> common_period(const std::vector<double>& v, int max_denominator) {
    double reference = 0.0;
    for (double x : v) {
        if (x != 0.0) {
            reference = std::abs(x);
            break;
        }
    }
    if (reference == 0.0) return kTwoPi;
    // Write each |v_i| / reference = p_i / q_i; the window is 2 pi L / reference
    // with L the smallest multiple making every L p_i / q_i an integer.
    long long window_turns = 1;
    for (double x : v) {
        if (x == 0.0) continue;
        const double ratio = std::abs(x) / reference;
        std::optional<long long> q_found;
        for (long long q = 1; q <= max_denominator; ++q) {
            const double p = std::round(ratio * static_cast<double>(q));
            if (p >= 1.0 && std::abs(ratio * static_cast<double>(q) - p) < 1e-10 * q) {
                q_found = q / std::gcd(q, static_cast<long long>(p));
                break;
            }
        }
        if (!q_found) return std::nullopt;
        window_turns = std::lcm(window_turns, *q_found);
    }
    return kTwoPi * static_cast<double>(window_turns) / reference;
}

FieldSample sample_function(int r, int n_theta, int n_t, double window,
                            const std::function<double(const std::vector<double>&, double)>& phi) {
    const auto grid = uniform_edge_grid(n_theta, n_t, window);
    FieldSample s;
    s.theta.assign(idx(r), grid.theta);
    s.t = grid.t;
    s.window = window;
    std::size_t total = idx(n_t);
    for (int i = 0; i < r; ++i) total *= idx(n_theta);
    s.values.resize(total);
    std::vector<int> digit(idx(r), 0);
    std::vector<double> th(idx(r));
    std::size_t pos = 0;
    while (true) {
        for (int i = 0; i < r; ++i) th[idx(i)] = grid.theta[idx(digit[idx(i)])];
        for (double t : grid.t) s.values[pos++] = phi(th, t);
        int a = r - 1;
        while (a >= 0 && ++digit[idx(a)] == n_theta) digit[idx(a--)] = 0;
        if (a < 0) break;
    }
    return s;
}

FieldSample sample_field(const EdgeField& f, int n_theta, int n_t, double window) {
    f.validate();
    return sample_function(f.r, n_theta, n_t, window,
                           [&f](const std::vector<double>& th, double t) { return evaluate_field(f, th, t); });
}

double action_value(const FieldSample& sample, const std::vector<double>& e) {
    const std::size_t r = sample.theta.size();
    if (r == 0 || e.size() != r) throw GridError("need one velocity per angular axis");
    std::vector<std::size_t> shape;
    for (const auto& axis : sample.theta) {
        const double h = kTwoPi / static_cast<double>(axis.size());
        check_uniform(axis, h, "theta");
        if (std::abs(axis.front()) > 1e-12) throw GridError("theta axis must start at 0");
        shape.push_back(axis.size());
    }
    if (!(sample.window > 0.0)) throw GridError("time window must be positive");
    check_uniform(sample.t, sample.window / static_cast<double>(sample.t.size()), "time");
    shape.push_back(sample.t.size());
    const std::size_t total = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    if (sample.values.size() != total) throw GridError("sample values do not match the grid shape");

    std::vector<double> lphi(total, 0.0), chiral = differentiate(sample.values, shape, r, sample.window);
    for (std::size_t a = 0; a < r; ++a) {
        const auto d = differentiate(sample.values, shape, a, kTwoPi);
        for (std::size_t j = 0; j < total; ++j) {
            lphi[j] += d[j];
            chiral[j] += e[a] * d[j];
        }
    }
    KahanSum acc;
    for (std::size_t j = 0; j < total; ++j) acc.add(lphi[j] * chiral[j]);
    double cell = sample.window / static_cast<double>(sample.t.size());
    for (std::size_t a = 0; a < r; ++a) cell *= kTwoPi / static_cast<double>(shape[a]);
    return -0.5 * acc.value() * cell;
}

double action_value(const EdgeField& f, double window, int nodes) {
    f.validate();
    if (!(window > 0.0)) throw GridError("time window must be positive");
    const auto gl = gauss_legendre_unit(nodes);
    const auto r = idx(f.r);
    const auto n = idx(nodes);
    // Component i depends on (theta_i, t) only: tabulate once per component.
    std::vector<std::vector<double>> tab_val(r, std::vector<double>(n * n)), tab_dth = tab_val, tab_dt = tab_val;
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            const double th = kTwoPi * gl.nodes[a];
            for (std::size_t b = 0; b < n; ++b) {
                const double t = gl.nodes[b] * window;
                const int ii = static_cast<int>(i);
                tab_val[i][a * n + b] = component_value(f, ii, th, t);
                tab_dth[i][a * n + b] = component_dtheta(f, ii, th, t);
                tab_dt[i][a * n + b] = component_dt(f, ii, th, t);
            }
        }
    }
    std::vector<std::size_t> digit(r + 1, 0);
    std::vector<double> val(r), dth(r), dt(r);
    KahanSum acc;
    while (true) {
        const std::size_t b = digit[r];
        double w = gl.weights[b] * window;
        for (std::size_t i = 0; i < r; ++i) {
            const std::size_t cell = digit[i] * n + b;
            w *= kTwoPi * gl.weights[digit[i]];
            val[i] = tab_val[i][cell];
            dth[i] = tab_dth[i][cell];
            dt[i] = tab_dt[i][cell];
        }
        double lphi = 0.0, chiral = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            const double rest = product_except(val, i);
            lphi += dth[i] * rest;
            chiral += (dt[i] + f.e[i] * dth[i]) * rest;
        }
        acc.add(w * lphi * chiral);
        std::size_t a = 0;
        while (a <= r && ++digit[a] == n) digit[a++] = 0;
        if (a > r) break;
    }
    return -0.5 * acc.value();
}

Complex mode_sum_field_commutator(double delta, int modes) {
    double s = 0.0;
    for (int n = 1; n <= modes; ++n) s += std::sin(n * delta) / n;
    return {2.0 * s, 1.0};
}

// ---------------------------------------------------------------------------
// Mode algebra

ModeAlgebra::ModeAlgebra(int r, int M, int L, int zero_mode_dim, std::size_t budget)
    : r_(r), M_(M), L_(L), D0_(zero_mode_dim) {
    if (r < 1 || M < 1) throw DomainError("mode algebra needs r >= 1 and M >= 1");
    if (L < 3 || zero_mode_dim < 3) throw DomainError("truncation levels must be at least 3");
    std::size_t component = idx(zero_mode_dim);
    for (int n = 0; n < M; ++n) {
        component *= idx(L);
        if (component > budget) break;
    }
    std::size_t total = 1;
    for (int i = 0; i < r && total <= budget; ++i) total *= component;
    if (component > budget || total > budget) {
        std::ostringstream msg;
        msg << "mode space dimension (" << L << "^" << M << " x " << zero_mode_dim << ")^" << r
            << " exceeds the budget " << budget;
        throw SizeError(msg.str());
    }
    dims_.oscillator.assign(idx(M), idx(L));
    dims_.zero_mode = idx(zero_mode_dim);
    dims_.component.assign(idx(r), component);
    dims_.total = total;

    const SparseMatrix b = truncated_lowering(L);
    const SparseMatrix b0 = truncated_lowering(zero_mode_dim);
    const SparseMatrix b0d = SparseMatrix(b0.adjoint());
    const double root_half = std::sqrt(0.5);
    const SparseMatrix x = (b0 + b0d) * Complex(root_half);
    const SparseMatrix p = (b0d - b0) * Complex(0.0, root_half);

    // Factor order: component 0 first; inside a component, oscillators 1..M then the zero mode.
    for (int i = 0; i < r; ++i) {
        const std::size_t left_comp = static_cast<std::size_t>(std::pow(component, i));
        const std::size_t right_comp = total / (left_comp * component);
        for (int n = 1; n <= M; ++n) {
            std::size_t left = left_comp, right = idx(zero_mode_dim) * right_comp;
            for (int m = 1; m < n; ++m) left *= idx(L);
            for (int m = n + 1; m <= M; ++m) right *= idx(L);
            SparseMatrix lo = embed(b, left, right);
            SparseMatrix hi = SparseMatrix(lo.adjoint());
            lower_.emplace_back(std::move(lo), Structure::General);
            raise_.emplace_back(std::move(hi), Structure::General);
        }
        std::size_t left = left_comp;
        for (int m = 0; m < M; ++m) left *= idx(L);
        zero_.emplace_back(embed(x, left, right_comp), Structure::Hermitian);
        zerobar_.emplace_back(embed(p, left, right_comp), Structure::Hermitian);
    }

    // Mixed-radix digits, last factor fastest.
    for (std::size_t s = 0; s < total; ++s) {
        std::size_t rest = s;
        bool inside = true;
        for (int i = r - 1; i >= 0 && inside; --i) {
            const std::size_t z = rest % idx(zero_mode_dim);
            rest /= idx(zero_mode_dim);
            if (z > idx(zero_mode_dim - 2)) inside = false;
            for (int n = M; n >= 1 && inside; --n) {
                const std::size_t level = rest % idx(L);
                rest /= idx(L);
                if (level > idx(L - 2)) inside = false;
            }
        }
        if (inside) interior_.push_back(s);
    }
}

const OperatorMatrix& ModeAlgebra::alpha(int i, int n) const {
    if (i < 0 || i >= r_ || n == 0 || std::abs(n) > M_) {
        std::ostringstream msg;
        msg << "mode (" << i << ", " << n << ") outside the algebra";
        throw ModeOutOfRange(msg.str());
    }
    const auto k = idx(i * M_ + std::abs(n) - 1);
    return n > 0 ? lower_[k] : raise_[k];
}

ModeAlgebra build_mode_algebra(int r, int M, int L, int zero_mode_dim, std::size_t budget) {
    return {r, M, L, zero_mode_dim, budget};
}

HilbertDimensions hilbert_dimensions(const ModeAlgebra& algebra) { return algebra.dimensions(); }

ModeCommutatorReport mode_commutator_residuals(const ModeAlgebra& alg) {
    std::vector<char> inside(alg.dim(), 0);
    for (auto s : alg.interior()) inside[s] = 1;
    const auto id = OperatorMatrix::identity(alg.dim());
    ModeCommutatorReport rep;
    rep.interior_size = alg.interior().size();
    std::vector<int> ns;
    for (int n = -alg.modes(); n <= alg.modes(); ++n) {
        if (n != 0) ns.push_back(n);
    }
    for (int i = 0; i < alg.r(); ++i) {
        for (int j = 0; j < alg.r(); ++j) {
            for (int n : ns) {
                for (int m : ns) {
                    // Antisymmetry fixes [alpha_{-n}, alpha_n] = -1 once [alpha_n, alpha_{-n}] = 1.
                    const double expect = (i == j && n + m == 0) ? (n > 0 ? 1.0 : -1.0) : 0.0;
                    const auto res = commutator(alg.alpha(i, n), alg.alpha(j, m)) - id.scaled(expect);
                    rep.oscillator = std::max(rep.oscillator, interior_max_abs(res.data(), inside));
                }
                rep.cross = std::max(rep.cross, interior_max_abs(commutator(alg.alpha0(i), alg.alpha(j, n)).data(), inside));
                rep.cross =
                    std::max(rep.cross, interior_max_abs(commutator(alg.alphabar0(i), alg.alpha(j, n)).data(), inside));
            }
            const auto res = commutator(alg.alpha0(i), alg.alphabar0(j)) - id.scaled(Complex(0.0, i == j ? 1.0 : 0.0));
            rep.zero_mode = std::max(rep.zero_mode, interior_max_abs(res.data(), inside));
            rep.zero_mode =
                std::max(rep.zero_mode, interior_max_abs(commutator(alg.alpha0(i), alg.alpha0(j)).data(), inside));
            rep.zero_mode =
                std::max(rep.zero_mode, interior_max_abs(commutator(alg.alphabar0(i), alg.alphabar0(j)).data(), inside));
        }
    }
    return rep;
}

}  // namespace arstat

#include "arstat/starprod.hpp"

#include <cmath>
#include <sstream>

namespace arstat {

namespace {

// N^{-1} C_n n_i z^{n - e_i}: the d/dz_i derivative of a normalized amplitude
// without the normalization factor's own derivative.
Eigen::VectorXcd amplitude_derivative(const FockBasis& basis, const BargmannPoint& p, int mode, double log_n) {
    const auto& spec = basis.spec();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    const auto mi = static_cast<std::size_t>(mode);
    for (std::size_t row = 0; row < basis.size(); ++row) {
        const auto& occ = basis.state(row);
        if (occ[mi] == 0) continue;
        double log_mod = log_coefficient(spec, occ) - log_n + std::log(static_cast<double>(occ[mi]));
        double phase = 0.0;
        bool zero = false;
        for (std::size_t i = 0; i < occ.n.size(); ++i) {
            const int e = occ.n[i] - (i == mi ? 1 : 0);
            if (e == 0) continue;
            const double m = std::abs(p[i]);
            if (m == 0.0) {
                zero = true;
                break;
            }
            log_mod += e * std::log(m);
            phase += e * std::arg(p[i]);
        }
        if (!zero) v(static_cast<Eigen::Index>(row)) = std::polar(std::exp(log_mod), phase);
    }
    return v;
}

Complex correction_term(const SymbolGradient& ga, const SymbolGradient& gb, const Eigen::MatrixXcd& ginv) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < ginv.rows(); ++i) {
        for (Eigen::Index j = 0; j < ginv.cols(); ++j) {
            acc += ginv(i, j) * ga.dz[static_cast<std::size_t>(i)] * gb.dzbar[static_cast<std::size_t>(j)];
        }
    }
    return acc;
}

bool uses_differences(const Symbol& a, const Symbol& b) {
    return !a.has_analytic_gradient() || !b.has_analytic_gradient();
}

// Finite-difference noise estimate: the change of `term` between steps h and h/2.
template <class Term>
void check_step_noise(const Symbol& a, const Symbol& b, const BargmannPoint& point, Complex value, double scale,
                      Term term) {
    const double h = std::max(a.has_analytic_gradient() ? 0.0 : a.step(), b.has_analytic_gradient() ? 0.0 : b.step());
    auto grad = [&](const Symbol& s, double step) {
        return s.has_analytic_gradient() ? s.gradient(point) : s.finite_difference_gradient(point, step);
    };
    const Complex half = term(grad(a, 0.5 * h), grad(b, 0.5 * h));
    const double noise = std::abs(value - half);
    if (noise > std::abs(value) && noise > 1e-13 * (1.0 + scale)) {
        std::ostringstream msg;
        msg << "finite-difference noise " << noise << " exceeds the first-order correction " << std::abs(value);
        throw StepError(msg.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Symbol

Symbol::Symbol(Eval eval, Provenance provenance, Grad grad, double step)
    : eval_(std::move(eval)), provenance_(provenance), grad_(std::move(grad)), step_(step) {
    if (!(step_ > 0.0)) throw StepError("finite-difference step must be positive");
}

Symbol Symbol::from_operator(std::shared_ptr<const FockBasis> basis, OperatorMatrix op) {
    auto shared_op = std::make_shared<const OperatorMatrix>(std::move(op));
    Eval eval = [basis, shared_op](const BargmannPoint& p) { return symbol_of(*shared_op, *basis, p); };
    Grad grad = [basis, shared_op](const BargmannPoint& p) {
        const auto& spec = basis->spec();
        const auto cv = coherent_vector(*basis, p);
        const auto& amp = cv.amplitudes;
        const Eigen::VectorXcd a_amp = shared_op->apply(amp);
        const Complex value = amp.dot(a_amp);
        const double log_n = log_normalization(spec, p.rho());
        const double pexp = normalization_exponent(spec);
        const double q = 1.0 - spec.s * p.rho();
        SymbolGradient g;
        for (int i = 0; i < spec.r; ++i) {
            const auto v = amplitude_derivative(*basis, p, i, log_n);
            const Complex zi = p[static_cast<std::size_t>(i)];
            const double s = spec.s;
            // Eigen's dot conjugates its first argument.
            g.dz.push_back(amp.dot(shared_op->apply(v)) - 2.0 * pexp * s * std::conj(zi) / q * value);
            g.dzbar.push_back(v.dot(a_amp) - 2.0 * pexp * s * zi / q * value);
        }
        return g;
    };
    return {std::move(eval), Provenance::Operator, std::move(grad)};
}

Symbol Symbol::constant(Complex value) {
    return {[value](const BargmannPoint&) { return value; }, Provenance::Analytic,
            [](const BargmannPoint& p) {
                return SymbolGradient{std::vector<Complex>(static_cast<std::size_t>(p.rank())),
                                      std::vector<Complex>(static_cast<std::size_t>(p.rank()))};
            }};
}

SymbolGradient Symbol::gradient(const BargmannPoint& p) const {
    return grad_ ? grad_(p) : finite_difference_gradient(p, step_);
}

SymbolGradient Symbol::finite_difference_gradient(const BargmannPoint& p, double h) const {
    SymbolGradient g;
    std::vector<Complex> z = p.z();
    for (std::size_t i = 0; i < z.size(); ++i) {
        const Complex z0 = z[i];
        auto eval_at = [&](Complex zi) {
            z[i] = zi;
            const Complex v = eval_(BargmannPoint(z));
            z[i] = z0;
            return v;
        };
        const Complex dx = (eval_at(z0 + h) - eval_at(z0 - h)) / (2.0 * h);
        const Complex dy = (eval_at(z0 + Complex(0.0, h)) - eval_at(z0 - Complex(0.0, h))) / (2.0 * h);
        g.dz.push_back(0.5 * (dx - Complex(0.0, 1.0) * dy));
        g.dzbar.push_back(0.5 * (dx + Complex(0.0, 1.0) * dy));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Products

Complex symbol_of(const OperatorMatrix& op, const FockBasis& basis, const BargmannPoint& point) {
    if (op.dim() != basis.size()) throw DomainError("operator and basis dimensions differ");
    const auto cv = coherent_vector(basis, point);
    return cv.amplitudes.dot(op.apply(cv.amplitudes));
}

Complex star_exact(const OperatorMatrix& a, const OperatorMatrix& b, const FockBasis& basis,
                   const BargmannPoint& point) {
    return symbol_of(a * b, basis, point);
}

Complex star_quadrature(const OperatorMatrix& a, const OperatorMatrix& b, const FockBasis& basis,
                        const BargmannPoint& point, const QuadratureRule& rule) {
    const auto& spec = basis.spec();
    const auto cv = coherent_vector(basis, point);
    // <z|A|n> = conj((A^dagger amp)_n) and <m|B|z> = (B amp)_m.
    const Eigen::VectorXcd alpha = a.adjoint().apply(cv.amplitudes);
    const Eigen::VectorXcd beta = b.apply(cv.amplitudes);
    std::vector<double> coeff(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) coeff[i] = coefficient(spec, basis.state(i));

    auto integrand = [&](const BargmannPoint& zp) {
        Complex left = 0.0, right = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const auto& occ = basis.state(i);
            Complex mono = 1.0;
            for (std::size_t l = 0; l < occ.n.size(); ++l) {
                for (int e = 0; e < occ.n[l]; ++e) mono *= zp[l];
            }
            const auto idx = static_cast<Eigen::Index>(i);
            left += std::conj(alpha(idx)) * coeff[i] * mono;
            right += beta(idx) * coeff[i] * std::conj(mono);
        }
        return left * right;
    };
    return integrate(rule, integrand);
}

Complex star_first_order(const Symbol& a, const Symbol& b, const StatisticsSpec& spec, const BargmannPoint& point) {
    check_domain(spec, point);
    const Eigen::MatrixXcd ginv = contravariant_metric(spec, point);
    const Complex av = a(point), bv = b(point);
    const Complex corr = correction_term(a.gradient(point), b.gradient(point), ginv);
    if (uses_differences(a, b)) {
        check_step_noise(a, b, point, corr, std::abs(av * bv),
                         [&](const SymbolGradient& ga, const SymbolGradient& gb) { return correction_term(ga, gb, ginv); });
    }
    return av * bv + corr;
}

Complex moyal_bracket(const Symbol& a, const Symbol& b, const StatisticsSpec& spec, const BargmannPoint& point) {
    check_domain(spec, point);
    const Eigen::MatrixXcd ginv = contravariant_metric(spec, point);
    auto bracket = [&](const SymbolGradient& ga, const SymbolGradient& gb) {
        return correction_term(ga, gb, ginv) - correction_term(gb, ga, ginv);
    };
    const Complex value = bracket(a.gradient(point), b.gradient(point));
    if (uses_differences(a, b)) check_step_noise(a, b, point, value, std::abs(a(point) * b(point)), bracket);
    return value;
}

// ---------------------------------------------------------------------------
// Operator pairs

namespace {

using Builder = std::function<OperatorMatrix(const FockBasis&, const LadderSet&)>;

double label(const FockBasis& basis) { return basis.spec().k; }

Builder number(int mode) {
    return [mode](const FockBasis& b, const LadderSet&) { return number_operator(b, mode).scaled(1.0 / label(b)); };
}

Builder raise(int mode) {
    return [mode](const FockBasis& b, const LadderSet& l) {
        return l.raise[static_cast<std::size_t>(mode)].scaled(1.0 / label(b));
    };
}

Builder lower(int mode) {
    return [mode](const FockBasis& b, const LadderSet& l) {
        return l.lower[static_cast<std::size_t>(mode)].scaled(1.0 / label(b));
    };
}

Builder position(int mode) {
    return [mode](const FockBasis& b, const LadderSet& l) {
        const auto m = static_cast<std::size_t>(mode);
        return (l.raise[m] + l.lower[m]).scaled(1.0 / label(b));
    };
}

Builder momentum(int mode) {
    return [mode](const FockBasis& b, const LadderSet& l) {
        const auto m = static_cast<std::size_t>(mode);
        return (l.raise[m] - l.lower[m]).scaled(Complex(0.0, 1.0) / label(b));
    };
}

Builder square(Builder f) {
    return [f = std::move(f)](const FockBasis& b, const LadderSet& l) {
        const auto op = f(b, l);
        return op * op;
    };
}

}  // namespace

std::vector<std::string> operator_pair_names() {
    return {"a1plus2_a1minus2", "a1minus2_a1plus2", "n1sq_a1plus2", "a1minus2_n1sq", "x1sq_p1sq",
            "n1_a1plus",        "n1_a1minus",       "n1_x1",        "a1minus_a1plus", "n1_n2",
            "identity"};
}

OperatorPair operator_pair(const std::string& name, int r) {
    if (name == "a1plus2_a1minus2") return {name, square(raise(0)), square(lower(0))};
    if (name == "a1minus2_a1plus2") return {name, square(lower(0)), square(raise(0))};
    if (name == "n1sq_a1plus2") return {name, square(number(0)), square(raise(0))};
    if (name == "a1minus2_n1sq") return {name, square(lower(0)), square(number(0))};
    if (name == "x1sq_p1sq") return {name, square(position(0)), square(momentum(0))};
    if (name == "n1_a1plus") return {name, number(0), raise(0)};
    if (name == "n1_a1minus") return {name, number(0), lower(0)};
    if (name == "n1_x1") return {name, number(0), position(0)};
    if (name == "a1minus_a1plus") return {name, lower(0), raise(0)};
    if (name == "n1_n2") {
        if (r < 2) throw DomainError("pair n1_n2 needs r >= 2");
        return {name, number(0), number(1)};
    }
    if (name == "identity") {
        auto id = [](const FockBasis& b, const LadderSet&) { return OperatorMatrix::identity(b.size()); };
        return {name, id, id};
    }
    throw DomainError("unknown operator pair '" + name + "'");
}

// ---------------------------------------------------------------------------
// Convergence

LineFit fit_convergence(const std::vector<double>& ks, const std::vector<double>& errs, double floor) {
    if (ks.size() != errs.size()) throw FitError("k grid and error table differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (errs[i] >= floor && std::isfinite(errs[i])) {
            x.push_back(std::log(ks[i]));
            y.push_back(std::log(errs[i]));
        }
    }
    if (x.size() < 3) {
        std::ostringstream msg;
        msg << "only " << x.size() << " of " << ks.size() << " errors lie above the floor " << floor;
        throw FitError(msg.str());
    }
    return fit_line(x, y);
}

ConvergenceFit convergence_study(const OperatorPair& pair, const StatisticsSpec& family,
                                 const std::vector<double>& ks, const BargmannPoint& point) {
    if (ks.size() < 3) throw FitError("convergence study needs at least three k values");
    for (std::size_t i = 1; i < ks.size(); ++i) {
        if (!(ks[i] > ks[i - 1])) throw FitError("k grid must be strictly increasing");
    }
    ConvergenceFit out;
    out.ks = ks;
    for (double k : ks) {
        StatisticsSpec spec = family;
        spec.k = k;
        if (spec.s == 1) spec.n_max = required_n_max(k, point.rho(), 1e-16) + 4;
        spec.validate();
        auto basis = std::make_shared<const FockBasis>(enumerate_basis(spec));
        const auto ladders = ladder_matrices(*basis);
        const auto a = pair.a(*basis, ladders);
        const auto b = pair.b(*basis, ladders);
        const auto sa = Symbol::from_operator(basis, a);
        const auto sb = Symbol::from_operator(basis, b);
        out.err_star.push_back(std::abs(star_exact(a, b, *basis, point) - star_first_order(sa, sb, spec, point)));
        out.err_moyal.push_back(std::abs(symbol_of(commutator(a, b), *basis, point) - moyal_bracket(sa, sb, spec, point)));
    }
    try {
        out.fit_star = fit_convergence(ks, out.err_star);
    } catch (const FitError& e) {
        out.note += std::string("product: ") + e.what() + "; ";
    }
    try {
        out.fit_moyal = fit_convergence(ks, out.err_moyal);
    } catch (const FitError& e) {
        out.note += std::string("bracket: ") + e.what() + "; ";
    }
    return out;
}

}  // namespace arstat

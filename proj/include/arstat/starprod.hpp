#pragma once

// Coherent-state symbols, the exact and first-order star products, the
// Moyal bracket and the large-k convergence study of their remainder.
//
// With <n|z> proportional to z^n, the first-order product reads
//   A * B = A B + g^{i jbar} dA/dz_i dB/dzbar_j + O(1/k^2)
// and the bracket {A, B} = g^{i jbar} (dA/dz_i dB/dzbar_j - dB/dz_i dA/dzbar_j).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arstat/bargmann.hpp"

namespace arstat {

/// Wirtinger derivatives d/dz_i and d/dzbar_i at a point.
struct SymbolGradient {
    std::vector<Complex> dz;
    std::vector<Complex> dzbar;
};

/// A function on the Bargmann domain with optional analytic derivatives.
class Symbol {
public:
    enum class Provenance { Operator, Analytic };
    using Eval = std::function<Complex(const BargmannPoint&)>;
    using Grad = std::function<SymbolGradient(const BargmannPoint&)>;

    Symbol(Eval eval, Provenance provenance, Grad grad = {}, double step = 1e-5);

    /// Symbol of an operator: the quadratic form in the normalized coherent
    /// state, with exact derivatives of that quadratic form.
    static Symbol from_operator(std::shared_ptr<const FockBasis> basis, OperatorMatrix op);
    static Symbol constant(Complex value);

    Complex operator()(const BargmannPoint& p) const { return eval_(p); }
    Provenance provenance() const { return provenance_; }
    bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
    double step() const { return step_; }

    /// Analytic gradient when provided, central differences otherwise.
    SymbolGradient gradient(const BargmannPoint& p) const;
    /// Central differences in the real and imaginary parts with step h.
    SymbolGradient finite_difference_gradient(const BargmannPoint& p, double h) const;

private:
    Eval eval_;
    Provenance provenance_;
    Grad grad_;
    double step_;
};

/// <z|A|z> with the normalized coherent vector over `basis`.
Complex symbol_of(const OperatorMatrix& op, const FockBasis& basis, const BargmannPoint& point);

/// <z|AB|z>.
Complex star_exact(const OperatorMatrix& a, const OperatorMatrix& b, const FockBasis& basis,
                   const BargmannPoint& point);

/// The same product as an integral over the intermediate coherent state,
/// evaluated with `rule` (validation path for small r and k).
Complex star_quadrature(const OperatorMatrix& a, const OperatorMatrix& b, const FockBasis& basis,
                        const BargmannPoint& point, const QuadratureRule& rule);

/// Pointwise product plus the metric-contracted first-order correction.
/// Throws StepError when finite-difference noise exceeds the correction.
Complex star_first_order(const Symbol& a, const Symbol& b, const StatisticsSpec& spec, const BargmannPoint& point);

/// First-order bracket (the classical image of the commutator symbol).
Complex moyal_bracket(const Symbol& a, const Symbol& b, const StatisticsSpec& spec, const BargmannPoint& point);

// ---------------------------------------------------------------------------
// Convergence study

/// A named operator pair realized on any basis of the family. Operators are
/// scaled by k^{-degree} so that their symbols have k-independent limits.
struct OperatorPair {
    std::string name;
    std::function<OperatorMatrix(const FockBasis&, const LadderSet&)> a;
    std::function<OperatorMatrix(const FockBasis&, const LadderSet&)> b;
};

/// Built-in pairs, see operator_pair_names(). Pairs in which one factor is a
/// single ladder or number operator have no remainder beyond first order
/// (that factor acts on the coherent ket as a first-order differential
/// operator); the quadratic pairs carry the generic 1/k^2 remainder. Throws
/// DomainError for unknown names or pairs needing more modes than r.
OperatorPair operator_pair(const std::string& name, int r);
std::vector<std::string> operator_pair_names();

struct ConvergenceFit {
    std::vector<double> ks;
    std::vector<double> err_star;   // |star_exact - star_first_order|
    std::vector<double> err_moyal;  // |symbol([A,B]) - moyal_bracket|
    std::optional<LineFit> fit_star;
    std::optional<LineFit> fit_moyal;
    std::string note;  // reason a fit is missing
    bool degenerate() const { return !fit_star || !fit_moyal; }
};

/// Least-squares slope of log err against log k, ignoring errors below
/// `floor`. Throws FitError when fewer than three usable points remain.
LineFit fit_convergence(const std::vector<double>& ks, const std::vector<double>& errs, double floor = 1e-13);

/// Error tables of the first-order product and bracket over a k sweep at one
/// point. `family` supplies r and s; for s = +1 the truncation is chosen per
/// k from the coherent-state tail at the point.
ConvergenceFit convergence_study(const OperatorPair& pair, const StatisticsSpec& family,
                                 const std::vector<double>& ks, const BargmannPoint& point);

}  // namespace arstat

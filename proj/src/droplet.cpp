#include "arstat/droplet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace arstat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// States of a per-mode box, filtered by the family cap.
void box_states(const DropletSpec& d, int slot, std::vector<int>& cur, std::vector<Occupation>& out) {
    if (slot == d.spec.r) {
        Occupation occ(cur);
        if (occ.total() <= d.spec.occupancy_cap()) out.push_back(std::move(occ));
        return;
    }
    for (int v = 0; v <= d.box[static_cast<std::size_t>(slot)]; ++v) {
        cur[static_cast<std::size_t>(slot)] = v;
        box_states(d, slot + 1, cur, out);
    }
}

std::vector<Occupation> droplet_states(const DropletSpec& d) {
    if (d.is_total_cap()) {
        FockBasis basis(d.spec, d.N);
        return {basis.states().begin(), basis.states().end()};
    }
    std::vector<Occupation> out;
    std::vector<int> cur(static_cast<std::size_t>(d.spec.r), 0);
    box_states(d, 0, cur, out);
    return out;
}

// log of the weight of shell M = n_tot in the coherent state at radius rho.
double log_shell_weight(const StatisticsSpec& spec, int M, double rho) {
    const double k = spec.k;
    const double log_rho = M == 0 ? 0.0 : M * std::log(rho);
    if (spec.s == 1) {
        return k * std::log1p(-rho) + std::lgamma(k + M) - std::lgamma(k) - std::lgamma(M + 1.0) + log_rho;
    }
    return -(k - 1.0) * std::log1p(rho) + std::lgamma(k) - std::lgamma(k - M) - std::lgamma(M + 1.0) + log_rho;
}

}  // namespace

void DropletSpec::validate() const {
    spec.validate();
    const int cap = spec.occupancy_cap();
    std::ostringstream msg;
    if (N < 0 || N > cap) {
        msg << "droplet cap N = " << N << " outside [0, " << cap << "]";
        throw CapError(msg.str());
    }
    if (!box.empty()) {
        if (static_cast<int>(box.size()) != spec.r) throw CapError("box needs one side per mode");
        for (int b : box) {
            if (b < 0 || b > cap) {
                msg << "box side " << b << " outside [0, " << cap << "]";
                throw CapError(msg.str());
            }
        }
    }
}

bool DropletSpec::contains(const Occupation& occ) const {
    if (box.empty()) return occ.total() <= N;
    for (std::size_t i = 0; i < box.size(); ++i) {
        if (occ[i] > box[i]) return false;
    }
    return true;
}

OperatorMatrix density_operator(const FockBasis& basis, const DropletSpec& dspec) {
    dspec.validate();
    std::vector<double> diag(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) diag[i] = dspec.contains(basis.state(i)) ? 1.0 : 0.0;
    return OperatorMatrix::diagonal(diag);
}

double husimi(const DropletSpec& dspec, const BargmannPoint& point) {
    dspec.validate();
    check_domain(dspec.spec, point);
    const double log_n = log_normalization(dspec.spec, point.rho());
    KahanSum acc;
    for (const auto& occ : droplet_states(dspec)) {
        double log_w = 2.0 * (log_coefficient(dspec.spec, occ) - log_n);
        bool zero = false;
        for (std::size_t i = 0; i < occ.n.size(); ++i) {
            if (occ[i] == 0) continue;
            const double m = std::abs(point[i]);
            if (m == 0.0) {
                zero = true;
                break;
            }
            log_w += 2.0 * occ[i] * std::log(m);
        }
        if (!zero) acc.add(std::exp(log_w));
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

double husimi_series(const StatisticsSpec& spec, int N, double rho) {
    if (rho < 0.0 || !std::isfinite(rho)) throw DomainError("rho must be finite and non-negative");
    if (spec.s == 1 && rho >= 1.0) throw DomainError("bosonic domain requires rho < 1");
    if (rho == 0.0) return 1.0;
    const int top = spec.is_fermionic() ? std::min(N, spec.occupancy_cap()) : N;
    KahanSum lower;
    for (int M = 0; M <= top; ++M) lower.add(std::exp(log_shell_weight(spec, M, rho)));
    if (lower.value() <= 0.5) return std::clamp(lower.value(), 0.0, 1.0);
    // Near 1 the complement is the accurate quantity.
    KahanSum upper;
    if (spec.is_fermionic()) {
        for (int M = top + 1; M <= spec.occupancy_cap(); ++M) upper.add(std::exp(log_shell_weight(spec, M, rho)));
    } else {
        const double mode = rho * (spec.k - 1.0) / (1.0 - rho);
        for (int M = top + 1;; ++M) {
            const double w = std::exp(log_shell_weight(spec, M, rho));
            upper.add(w);
            if (M > mode && w <= 1e-18 * upper.value()) break;
            if (w == 0.0 && M > mode) break;
        }
    }
    return std::clamp(1.0 - upper.value(), 0.0, 1.0);
}

bool DropletProfile::is_monotone() const {
    for (std::size_t i = 1; i < value.size(); ++i) {
        if (value[i] > value[i - 1] + 1e-14) return false;
    }
    return true;
}

DropletProfile droplet_profile(const DropletSpec& dspec, const std::vector<double>& rho_grid) {
    dspec.validate();
    DropletProfile prof;
    prof.k = dspec.spec.k;
    prof.N = dspec.N;
    prof.s = dspec.spec.s;
    prof.r = dspec.spec.r;
    prof.rho = rho_grid;
    prof.value.reserve(rho_grid.size());
    for (double rho : rho_grid) {
        if (dspec.is_total_cap()) {
            prof.value.push_back(husimi_series(dspec.spec, dspec.N, rho));
        } else {
            // Spread the radius evenly over the modes.
            std::vector<Complex> z(static_cast<std::size_t>(dspec.spec.r), std::sqrt(rho / dspec.spec.r));
            prof.value.push_back(husimi(dspec, BargmannPoint(z)));
        }
    }
    return prof;
}

std::vector<double> uniform_rho_grid(double rho_max, int points) {
    if (points < 2) throw DomainError("profile grid needs at least two points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = rho_max * i / (points - 1);
    return grid;
}

double husimi_level_crossing(const StatisticsSpec& spec, int N, double level) {
    double lo = 0.0;
    double hi;
    if (spec.s == 1) {
        hi = std::nextafter(1.0, 0.0);
    } else {
        hi = 1.0;
        while (husimi_series(spec, N, hi) > level) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) throw DomainError("level crossing not bracketed");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (husimi_series(spec, N, mid) > level) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

StepSummary summarize_step(const StatisticsSpec& spec, int N) {
    DropletSpec{spec, N, {}}.validate();
    const double k = spec.k;
    StepSummary out;
    out.crossing_rho = husimi_level_crossing(spec, N, 0.5);
    out.crossing_k_rho = k * out.crossing_rho;
    out.width = husimi_level_crossing(spec, N, 0.1) - husimi_level_crossing(spec, N, 0.9);

    auto at = [&](double k_rho) {
        const double rho = k_rho / k;
        if (rho < 0.0 || (spec.s == 1 && rho >= 1.0)) return kNaN;
        return husimi_series(spec, N, rho);
    };
    out.inside_value = at(0.5 * N);
    out.outside_value = at(1.5 * N);
    out.boundary_value = at(N - 0.5);
    out.inside_ok = out.inside_value > 0.99;
    out.outside_ok = std::isfinite(out.outside_value) && out.outside_value < 0.01;
    out.boundary_ok = N > 0 && std::isfinite(out.boundary_value) && std::abs(out.boundary_value - 0.5) < 1.0 / std::sqrt(static_cast<double>(N));
    return out;
}

PotentialSymbol potential_symbol(const StatisticsSpec& spec, const HamiltonianSpec& hspec,
                                 const BargmannPoint& point) {
    check_domain(spec, point);
    if (static_cast<int>(hspec.e.size()) != spec.r) throw DomainError("mode energies need one entry per mode");
    double weighted = 0.0;
    for (int i = 0; i < spec.r; ++i) weighted += hspec.e[static_cast<std::size_t>(i)] * std::norm(point[i]);
    const double c = spec.k + 0.5 * spec.s - 0.5;
    return {c * weighted / (1.0 - spec.s * point.rho()), spec.k * weighted};
}

}  // namespace arstat

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "arstat/bargmann.hpp"
#include "arstat/droplet.hpp"
#include "arstat/edge.hpp"
#include "arstat/starprod.hpp"
#include "cli/commands.hpp"
#include "cli/report.hpp"

using namespace arstat;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;
    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void note(const std::string& what) { details.push_back("     " + what); }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

BargmannPoint random_point(std::mt19937_64& gen, int r, double rho_max) {
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u;
    std::vector<Complex> z(static_cast<std::size_t>(r));
    double norm = 0.0;
    for (auto& zi : z) {
        zi = Complex(nd(gen), nd(gen));
        norm += std::norm(zi);
    }
    const double scale = std::sqrt(rho_max * u(gen) / norm);
    for (auto& zi : z) zi *= scale;
    return BargmannPoint(z);
}

// ---------------------------------------------------------------------------

Outcome algebra_exactness() {
    Outcome out;
    double worst = 0.0;
    for (int r = 1; r <= 3; ++r) {
        for (int s : {-1, 1}) {
            // fermionic k runs over integers >= 2; bosonic k must exceed 1
            for (double k : {1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) {
                if (s == -1 && k < 2.0) continue;
                const auto spec = s == -1 ? StatisticsSpec::fermionic(r, static_cast<int>(k)) : StatisticsSpec::bosonic(r, k, 8);
                const auto rep = verify_triple_relations(enumerate_basis(spec));
                worst = std::max(worst, rep.max_residual());
                if (rep.max_residual() >= 1e-10) {
                    out.require(false, "r=" + std::to_string(r) + " s=" + std::to_string(s) + " k=" + num(k) +
                                           " residual " + num(rep.max_residual()));
                }
            }
        }
    }
    out.require(worst < 1e-10, "max triple/commuting residual over 45 families = " + num(worst));
    return out;
}

Outcome dimension_and_spectrum() {
    Outcome out;
    bool dims_ok = true;
    for (int r = 1; r <= 4; ++r) {
        for (int k = 2; k <= 10; ++k) {
            const auto oracle = static_cast<std::size_t>(boost::math::binomial_coefficient<double>(k - 1 + r, r));
            const auto n = enumerate_basis(StatisticsSpec::fermionic(r, k)).size();
            dims_ok = dims_ok && n == oracle && fermionic_dimension(r, k) == oracle;
        }
    }
    out.require(dims_ok, "fermionic basis counts equal (k-1+r)!/((k-1)! r!) for k <= 10, r <= 4");

    const std::vector<double> energies{1.0, 1.5, 0.7, 2.2};
    double worst = 0.0;
    auto compare = [&](const StatisticsSpec& spec) {
        const auto basis = enumerate_basis(spec);
        const HamiltonianSpec h{0.3, std::vector<double>(energies.begin(), energies.begin() + spec.r)};
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(basis, h).dense(), Eigen::EigenvaluesOnly);
        std::vector<double> expected;
        for (const auto& n : basis.states()) {
            double e = h.e0;
            for (int i = 0; i < spec.r; ++i) e += h.e[static_cast<std::size_t>(i)] * n[static_cast<std::size_t>(i)];
            expected.push_back(e);
        }
        std::sort(expected.begin(), expected.end());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            worst = std::max(worst, std::abs(es.eigenvalues()(static_cast<Eigen::Index>(i)) - expected[i]));
        }
    };
    for (int r = 1; r <= 4; ++r) {
        for (int k = 2; k <= 10; ++k) compare(StatisticsSpec::fermionic(r, k));
    }
    for (int r = 1; r <= 3; ++r) {
        for (double k : {1.5, 2.0, 5.0}) compare(StatisticsSpec::bosonic(r, k, 8));
    }
    out.require(worst < 1e-12, "max |eigenvalue - (e0 + sum e_i n_i)| = " + num(worst));
    return out;
}

Eigen::MatrixXcd wirtinger_hessian(const std::function<double(const BargmannPoint&)>& f, const BargmannPoint& w, double h) {
    const int r = w.rank();
    auto at = [&](int a, Complex da, int b, Complex db) {
        auto z = w.z();
        z[static_cast<std::size_t>(a)] += da;
        z[static_cast<std::size_t>(b)] += db;
        return f(BargmannPoint(z));
    };
    auto second = [&](int a, Complex da, int b, Complex db) {
        return (at(a, da, b, db) - at(a, da, b, -db) - at(a, -da, b, db) + at(a, -da, b, -db)) / (4.0 * h * h);
    };
    const Complex x(h, 0.0), y(0.0, h);
    Eigen::MatrixXcd H(r, r);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            H(i, j) = 0.25 * Complex(second(i, x, j, x) + second(i, y, j, y), second(i, x, j, y) - second(i, y, j, x));
        }
    }
    return H;
}

Outcome bargmann_consistency() {
    Outcome out;
    std::mt19937_64 gen(2024);

    // overlap closed form against inner products of coherent vectors
    for (const auto& family : {StatisticsSpec::fermionic(2, 6), StatisticsSpec::bosonic(2, 3.5, 0)}) {
        const bool bos = family.s == 1;
        const double rho_max = bos ? 0.6 : 3.0;
        auto spec = family;
        if (bos) spec.n_max = required_n_max(spec.k, rho_max, 1e-14);
        const auto basis = enumerate_basis(spec);
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            const auto z = random_point(gen, spec.r, rho_max), w = random_point(gen, spec.r, rho_max);
            const Complex inner = coherent_vector(basis, z, 1e-12).amplitudes.dot(coherent_vector(basis, w, 1e-12).amplitudes);
            worst = std::max(worst, std::abs(overlap(spec, z, w) - inner));
        }
        out.require(worst < 1e-8, std::string(bos ? "bosonic" : "fermionic") + " overlap vs inner product, 100 pairs: " + num(worst));
    }

    // metric against the Hessian of the distance, and its inverse
    // The stencil error grows like h^2 / (1 - rho)^4 towards the bosonic
    // boundary, so the absolute check samples rho <= 1/2 there; the relative
    // error further out is reported alongside.
    double hess = 0.0, inv = 0.0, rel_outer = 0.0;
    for (const auto& spec : {StatisticsSpec::fermionic(1, 3), StatisticsSpec::fermionic(2, 5), StatisticsSpec::fermionic(3, 4),
                             StatisticsSpec::bosonic(1, 2.0, 0), StatisticsSpec::bosonic(2, 3.5, 0), StatisticsSpec::bosonic(3, 6.0, 0)}) {
        auto hessian_gap = [&](const BargmannPoint& z) {
            const auto m = metric(spec, z);
            const auto H = wirtinger_hessian([&](const BargmannPoint& w) { return distance_sq(spec, z, w); }, z, 1e-4);
            inv = std::max(inv, (m.g * m.g_inv - Eigen::MatrixXcd::Identity(spec.r, spec.r)).cwiseAbs().maxCoeff());
            return std::pair{(m.g - H).cwiseAbs().maxCoeff(), m.g.cwiseAbs().maxCoeff()};
        };
        for (int t = 0; t < 10; ++t) hess = std::max(hess, hessian_gap(random_point(gen, spec.r, spec.s == 1 ? 0.5 : 2.0)).first);
        if (spec.s == 1) {
            for (int t = 0; t < 10; ++t) {
                const auto [gap, scale] = hessian_gap(random_point(gen, spec.r, 0.9));
                rel_outer = std::max(rel_outer, gap / scale);
            }
        }
    }
    out.require(hess < 1e-5, "metric vs difference Hessian (h = 1e-4): " + num(hess));
    out.note("bosonic points with rho <= 0.9: relative Hessian gap " + num(rel_outer));
    out.require(inv < 1e-10, "g g_inv - I: " + num(inv));

    // Gram identities from the measure
    double gram = 0.0;
    for (int r = 1; r <= 2; ++r) {
        for (int k = 2; k <= 6; ++k) {
            std::vector<StatisticsSpec> specs{StatisticsSpec::fermionic(r, k)};
            if (k > r) specs.push_back(StatisticsSpec::bosonic(r, k, 4));
            for (const auto& spec : specs) {
                const FockBasis basis(spec, std::min(4, spec.occupancy_cap()));
                const Eigen::MatrixXd g = gram_matrix(QuadratureRule(spec, 40, 1), basis);
                gram = std::max(gram, (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
            }
        }
    }
    out.require(gram < 1e-6, "Gram identity for n_tot <= 4, r <= 2, k <= 6: " + num(gram));
    out.note("bosonic Gram checks use integer k in (r, 6]; the measure is not normalizable for k <= r");
    return out;
}

double cdf_oracle(const StatisticsSpec& spec, int N, double rho) {
    if (spec.s == 1) return boost::math::cdf(boost::math::negative_binomial(spec.k, 1.0 - rho), N);
    const int trials = static_cast<int>(spec.k) - 1;
    if (N >= trials) return 1.0;
    return boost::math::cdf(boost::math::binomial(trials, rho / (1.0 + rho)), N);
}

Outcome droplet_limit() {
    Outcome out;
    for (int s : {1, -1}) {
        std::vector<double> widths;
        for (auto [k, N] : {std::pair{200, 100}, std::pair{400, 200}}) {
            const StatisticsSpec spec{1, s, static_cast<double>(k), N};
            const auto step = summarize_step(spec, N);
            widths.push_back(step.width);
            const std::string tag = (s == 1 ? "bosonic" : "fermionic") + std::string(" (k,N)=(") + std::to_string(k) + "," +
                                    std::to_string(N) + ") ";
            // the series itself against the distribution library
            double oracle_gap = 0.0;
            for (double kr : {0.5 * N, 1.5 * N, N - 0.5}) {
                const double rho = kr / k;
                if (s == 1 && rho >= 1.0) continue;
                oracle_gap = std::max(oracle_gap, std::abs(husimi_series(spec, N, rho) - cdf_oracle(spec, N, rho)));
            }
            out.require(oracle_gap < 1e-10, tag + "series vs CDF oracle: " + num(oracle_gap));
            out.require(step.inside_ok, tag + "value at k rho = N/2: " + num(step.inside_value) + " (> 0.99)");
            out.require(step.outside_ok, tag + "value at k rho = 3N/2: " +
                                             (std::isfinite(step.outside_value) ? num(step.outside_value) : std::string("outside the disk")) +
                                             " (< 0.01)");
            out.require(step.boundary_ok, tag + "value at k rho = N - 1/2: " + num(step.boundary_value) + " (|v - 0.5| < " +
                                              num(1.0 / std::sqrt(N)) + ")");
            out.note(tag + "half-height at k rho = " + num(step.crossing_k_rho));
        }
        out.require(widths[0] / widths[1] >= 1.3, std::string(s == 1 ? "bosonic" : "fermionic") + " width ratio: " + num(widths[0] / widths[1]));
    }
    return out;
}

Outcome star_order() {
    Outcome out;
    const std::vector<double> ks{20, 40, 80, 160};
    const std::vector<BargmannPoint> points{BargmannPoint{Complex(0.3, 0.0)}, BargmannPoint{Complex(0.2, 0.25)},
                                            BargmannPoint{Complex(-0.1, 0.4)}};
    const std::vector<std::string> pairs{"a1plus2_a1minus2", "n1sq_a1plus2", "a1minus2_n1sq", "x1sq_p1sq"};
    for (const auto& family : {StatisticsSpec::fermionic(1, 20), StatisticsSpec{1, 1, 20.0, 0}}) {
        int good = 0;
        for (const auto& name : pairs) {
            bool all = true;
            std::string slopes;
            for (const auto& p : points) {
                const auto fit = convergence_study(operator_pair(name, 1), family, ks, p);
                if (fit.degenerate()) {
                    all = false;
                    slopes += " degenerate";
                    continue;
                }
                const double a = fit.fit_star->slope, b = fit.fit_moyal->slope;
                all = all && std::abs(a + 2.0) <= 0.3 && std::abs(b + 2.0) <= 0.3;
                slopes += " " + num(a) + "/" + num(b);
            }
            if (all) ++good;
            out.note(std::string(family.s == 1 ? "bosonic " : "fermionic ") + name + " star/moyal slopes:" + slopes);
        }
        out.require(good >= 3, std::string(family.s == 1 ? "bosonic" : "fermionic") + " pairs with slope -2 +/- 0.3 at all 3 points: " +
                                   std::to_string(good));
    }
    return out;
}

Outcome large_k_limit() {
    Outcome out;
    const std::vector<double> ks{50, 100, 200};
    for (int s : {1, -1}) {
        for (int r = 1; r <= 3; ++r) {
            const auto table = large_k_commutator_deviation(r, s, ks, 2);
            bool bound = true, halves = true;
            std::string scaled;
            for (std::size_t i = 0; i < table.size(); ++i) {
                bound = bound && table[i].deviation <= (4.0 / table[i].k) * (1.0 + 1e-12);
                scaled += " " + num(table[i].deviation * table[i].k);
                if (i > 0) {
                    const double ratio = table[i - 1].deviation / table[i].deviation;
                    halves = halves && std::abs(ratio - 2.0) <= 0.2;
                }
            }
            const std::string tag = std::string(s == 1 ? "bosonic" : "fermionic") + " r=" + std::to_string(r);
            out.require(bound, tag + " deviation <= 4/k; k*deviation:" + scaled);
            out.require(halves, tag + " deviation halves per doubling");
        }
    }
    return out;
}

Outcome edge_theory() {
    Outcome out;
    double eom = 0.0, per = 0.0, chiral = 0.0;
    const auto grid = uniform_edge_grid(24, 17, 5.0);
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const std::vector<double> e = seed % 2 ? std::vector<double>{1.0, 2.0} : std::vector<double>{0.5, 1.5, 1.0};
        const auto f = random_field(e, 3, seed);
        eom = std::max(eom, eom_residual(f, grid));
        per = std::max(per, periodicity_residual(f, grid.t));
        const auto g = random_field(e, 3, 100 + seed, 1.0, false);
        chiral = std::max(chiral, std::abs(action_value(g, *common_period(e))));
    }
    out.require(eom < 1e-12, "eom residual, 20 random fields: " + num(eom));
    out.require(per < 1e-12, "periodicity residual, 20 random fields: " + num(per));
    out.require(chiral < 1e-10, "action on chiral solutions: " + num(chiral));

    double bench = 0.0;
    for (double e : {1.0, 2.0, 0.5}) {
        const double T = 2 * kPi / e;
        const auto s = sample_function(1, 16, 16, T, [&](const std::vector<double>& th, double t) { return std::cos(th[0] + e * t); });
        bench = std::max(bench, std::abs(action_value(s, {e}) - (-e * 2 * kPi * T / 2)));
    }
    out.require(bench < 1e-8, "anti-chiral benchmark -e 2 pi T / 2: " + num(bench));

    double modes = 0.0;
    for (int r = 1; r <= 2; ++r) {
        for (int M = 1; M <= 2; ++M) {
            for (int L = 3; L <= 6; ++L) modes = std::max(modes, mode_commutator_residuals(build_mode_algebra(r, M, L)).max_residual());
        }
    }
    out.require(modes < 1e-12, "mode commutators on interior states, r <= 2, M <= 2, L <= 6: " + num(modes));
    return out;
}

// ---------------------------------------------------------------------------

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "arstat");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream sink;
    auto* old_out = std::cout.rdbuf(sink.rdbuf());
    auto* old_err = std::cerr.rdbuf(sink.rdbuf());
    const int code = cli::run(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_determinism(const fs::path& configs) {
    Outcome out;
    const fs::path root = fs::temp_directory_path() / "arstat-acceptance";
    fs::remove_all(root);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"verify", "default.json"},   {"verify", "bosonic.json"}, {"spectrum", "default.json"},
        {"husimi", "husimi.json"},    {"star-convergence", "star.json"}, {"edge-sim", "edge.json"}};
    int idx = 0;
    for (const auto& [command, config] : runs) {
        std::vector<fs::path> dirs;
        bool codes = true;
        for (int rep = 0; rep < 2; ++rep) {
            dirs.push_back(root / (std::to_string(idx) + "-" + command + "-" + std::to_string(rep)));
            codes = codes && run_cli({command, "--config", (configs / config).string(), "--out", dirs.back().string()}) == 0;
        }
        ++idx;
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            if (e.path().filename() != "report.json") names.push_back(e.path().filename().string());
        }
        std::sort(names.begin(), names.end());
        bool same = !names.empty();
        for (const auto& n : names) same = same && fs::exists(dirs[1] / n) && slurp(dirs[0] / n) == slurp(dirs[1] / n);
        std::string listing;
        for (const auto& n : names) listing += " " + n;
        out.require(codes && same, command + " with " + config + ": exit 0 twice, identical" + listing);
    }

    const auto dir = (root / "codes").string();
    out.require(run_cli({"verify", "--out", dir}) == 0, "passing run exits 0");
    {
        std::ofstream(root / "strict.json") << R"({"tolerances": {"relations": 1e-300}})";
        out.require(run_cli({"verify", "--config", (root / "strict.json").string(), "--out", dir}) == 1, "failed check exits 1");
    }
    out.require(run_cli({"verify", "--s", "3", "--out", dir}) == 2, "invalid family sign exits 2");
    out.require(run_cli({"verify", "--config", (root / "missing.json").string(), "--out", dir}) == 2, "missing config exits 2");
    out.require(run_cli({"verify", "--r", "1", "--s", "1", "--k", "5", "--out", dir}) == 2, "bosonic run without n_max exits 2");
    fs::remove_all(root);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path configs = argc > 1 ? fs::path(argv[1]) : fs::path(ARSTAT_CONFIG_DIR);
    bool verbose = true;
    for (int i = 2; i < argc; ++i) verbose = verbose && std::string(argv[i]) != "--quiet";

    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds; 0 = no limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "algebra exactness", 10.0, algebra_exactness},
        {2, "dimension and spectrum", 5.0, dimension_and_spectrum},
        {3, "Bargmann consistency", 60.0, bargmann_consistency},
        {4, "droplet limit", 10.0, droplet_limit},
        {5, "star-product order", 120.0, star_order},
        {6, "large-k commutator", 5.0, large_k_limit},
        {7, "edge theory", 10.0, edge_theory},
        {8, "CLI determinism and exit codes", 0.0, [&] { return cli_determinism(configs); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        cli::Stopwatch sw;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("raised: ") + e.what());
        }
        const double secs = sw.seconds();
        if (c.budget > 0.0) o.require(secs < c.budget, "runtime " + num(secs) + " s (< " + num(c.budget) + " s)");
        std::printf("%s  criterion %d  %-32s %8.3f s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
        if (verbose || !o.pass) {
            for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
        }
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

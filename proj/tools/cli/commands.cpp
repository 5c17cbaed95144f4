#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "arstat/droplet.hpp"
#include "arstat/edge.hpp"
#include "arstat/starprod.hpp"

namespace arstat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

HamiltonianSpec hamiltonian_spec(const RunConfig& cfg) {
    HamiltonianSpec h{cfg.hamiltonian.e0, cfg.hamiltonian.e};
    if (h.e.empty()) h.e.assign(static_cast<std::size_t>(cfg.statistics.r), 1.0);
    return h;
}

std::size_t binomial(int n, int k) {
    std::size_t v = 1;
    for (int j = 1; j <= k; ++j) v = v * static_cast<std::size_t>(n - k + j) / static_cast<std::size_t>(j);
    return v;
}

// Largest rho at which a bosonic coherent state stays within the basis.
double bosonic_rho_limit(double k, int n_max, double tail) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bosonic_tail_bound(k, mid, n_max) <= tail ? lo : hi) = mid;
    }
    return lo;
}

BargmannPoint random_point(std::mt19937_64& gen, int r, double rho_max) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<Complex> z(static_cast<std::size_t>(r));
    double norm = 0.0;
    for (auto& zi : z) {
        zi = {normal(gen), normal(gen)};
        norm += std::norm(zi);
    }
    const double rho = rho_max * uniform(gen);
    for (auto& zi : z) zi *= std::sqrt(rho / norm);
    return BargmannPoint(z);
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json fit_json(const std::optional<LineFit>& fit) {
    if (!fit) return nullptr;
    return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"residual", fit->residual}};
}

std::vector<std::vector<Complex>> default_points(int r) {
    const std::vector<Complex> first{{0.3, 0.0}, {0.2, 0.25}, {-0.1, 0.4}};
    const std::vector<Complex> rest{{0.15, -0.1}, {-0.2, 0.05}, {0.1, 0.1}};
    std::vector<std::vector<Complex>> pts;
    for (std::size_t p = 0; p < first.size(); ++p) {
        std::vector<Complex> z{first[p]};
        for (int i = 1; i < r; ++i) z.push_back(rest[p] / static_cast<double>(i));
        pts.push_back(z);
    }
    return pts;
}

}  // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(guard);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

Report cmd_verify(const RunConfig& cfg, const fs::path& out) {
    Report rep("verify", config_hash(cfg));
    const auto spec = cfg.statistics.spec();
    const auto& tol = cfg.tolerances;
    Stopwatch total;

    const auto basis = enumerate_basis(spec);
    const auto ladders = ladder_matrices(basis);
    const std::size_t expected_dim = spec.is_fermionic() ? fermionic_dimension(spec.r, static_cast<int>(spec.k))
                                                         : binomial(*spec.n_max + spec.r, spec.r);
    rep.check_true("dimension", basis.size() == expected_dim);

    double herm = 0.0;
    for (int i = 0; i < spec.r; ++i) {
        const SparseMatrix diff = ladders.raise[static_cast<std::size_t>(i)].data() -
                                  SparseMatrix(ladders.lower[static_cast<std::size_t>(i)].data().adjoint());
        for (Eigen::Index c = 0; c < diff.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(diff, c); it; ++it) herm = std::max(herm, std::abs(it.value()));
        }
    }
    rep.check_below("hermiticity", herm, tol.hermiticity);

    Stopwatch sw;
    const auto rel = verify_triple_relations(basis, ladders);
    if (rel.interior_size == 0) {
        rep.warn("triple relations skipped: empty interior (n_max < 2)");
    } else {
        rep.check_below("triple_relations", rel.max_residual(), tol.relations);
    }
    rep.time("triple_relations", sw.seconds());

    const auto hspec = hamiltonian_spec(cfg);
    const auto h = hamiltonian(basis, hspec);
    auto closed = spectrum_closed_form(basis, hspec);
    std::vector<double> eig;
    if (basis.size() <= 1500) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.dense(), Eigen::EigenvaluesOnly);
        eig.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    } else {
        for (std::size_t i = 0; i < basis.size(); ++i) eig.push_back(h.coeff(i, i).real());
        rep.warn("spectrum compared through the diagonal (basis too large for a dense solver)");
    }
    std::sort(eig.begin(), eig.end());
    std::sort(closed.begin(), closed.end());
    double spec_err = 0.0;
    for (std::size_t i = 0; i < eig.size(); ++i) spec_err = std::max(spec_err, std::abs(eig[i] - closed[i]));
    rep.check_below("spectrum", spec_err, tol.spectrum);

    const int real_cap = spec.is_fermionic() ? spec.occupancy_cap() : std::max(0, *spec.n_max - 1);
    const auto real = differential_realization_check(basis, std::min(real_cap, 6));
    rep.check_below("differential_realization", real.max_residual(), tol.realization);

    sw = Stopwatch();
    if (!spec.is_fermionic() && !(spec.k > spec.r)) {
        rep.warn("orthonormality skipped: the bosonic measure needs k > r");
    } else {
        const FockBasis small(spec, std::min(4, spec.occupancy_cap()));
        const QuadratureRule rule(spec, spec.r <= 2 ? 40 : 20, 1);
        const Eigen::MatrixXd gram = gram_matrix(rule, small);
        const double err = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
        rep.check_below("orthonormality", err, tol.gram);
        rep.diagnostic("measure_constant",
                       {{"fixed_by_vacuum_moment", rule.measure_constant()},
                        {"closed_form", exact_measure_constant(spec)},
                        {"printed_form", printed_measure_constant(spec)}});
    }
    rep.time("orthonormality", sw.seconds());

    std::mt19937_64 gen(cfg.seed);
    const double rho_max = spec.is_fermionic() ? 2.0 : std::min(0.9, bosonic_rho_limit(spec.k, *spec.n_max, 1e-13));
    double inv_err = 0.0, ov_err = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto z = random_point(gen, spec.r, rho_max);
        const auto w = random_point(gen, spec.r, rho_max);
        const auto m = metric(spec, z);
        inv_err = std::max(inv_err, (m.g * m.g_inv - Eigen::MatrixXcd::Identity(spec.r, spec.r)).cwiseAbs().maxCoeff());
        const auto cz = coherent_vector(basis, z), cw = coherent_vector(basis, w);
        ov_err = std::max(ov_err, std::abs(cz.amplitudes.dot(cw.amplitudes) - overlap(spec, z, w)));
    }
    rep.check_below("metric_inverse", inv_err, tol.metric_inverse);
    rep.check_below("overlap_dual_path", ov_err, tol.overlap);

    if (cfg.output.csv) {
        CsvWriter csv(out / "checks.csv", {"name", "value", "tolerance", "pass"});
        for (const auto& c : rep.checks()) {
            csv << c.name << c.value << c.tolerance << std::string(c.pass ? "true" : "false");
            csv.end_row();
        }
    }
    if (cfg.output.json) {
        json checks = json::array();
        for (const auto& c : rep.checks()) {
            checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
        }
        write_json(out / "checks.json", {{"r", spec.r}, {"s", spec.s}, {"k", spec.k}, {"dimension", basis.size()},
                                         {"checks", checks}});
    }
    rep.time("total", total.seconds());
    return rep;
}

Report cmd_spectrum(const RunConfig& cfg, const fs::path& out) {
    Report rep("spectrum", config_hash(cfg));
    const auto spec = cfg.statistics.spec();
    Stopwatch total;
    const auto basis = enumerate_basis(spec);
    const auto hspec = hamiltonian_spec(cfg);
    const auto h = hamiltonian(basis, hspec);
    const auto closed = spectrum_closed_form(basis, hspec);

    double worst = 0.0;
    std::map<double, std::size_t> levels;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        worst = std::max(worst, std::abs(h.coeff(i, i).real() - closed[i]));
        ++levels[closed[i]];
    }
    // Off-diagonal entries must vanish for the Fock states to be eigenstates.
    double offdiag = 0.0;
    for (Eigen::Index c = 0; c < h.data().outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(h.data(), c); it; ++it) {
            if (it.row() != it.col()) offdiag = std::max(offdiag, std::abs(it.value()));
        }
    }
    rep.check_below("spectrum_exact", std::max(worst, offdiag), cfg.tolerances.spectrum);
    if (spec.is_fermionic()) {
        rep.check_true("fermionic_dimension", basis.size() == fermionic_dimension(spec.r, static_cast<int>(spec.k)));
    }

    if (cfg.output.csv) {
        std::vector<std::string> header;
        for (int i = 1; i <= spec.r; ++i) header.push_back("n_" + std::to_string(i));
        header.insert(header.end(), {"energy", "closed_form", "match"});
        CsvWriter csv(out / "spectrum.csv", header);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (int n : basis.state(i).n) csv << n;
            const double e = h.coeff(i, i).real();
            csv << e << closed[i] << std::string(std::abs(e - closed[i]) <= cfg.tolerances.spectrum ? "true" : "false");
            csv.end_row();
        }
    }
    if (cfg.output.json) {
        json lv = json::array();
        for (const auto& [e, d] : levels) lv.push_back({{"energy", e}, {"degeneracy", d}});
        json doc = {{"dimension", basis.size()}, {"levels", lv}, {"exact_match", worst <= cfg.tolerances.spectrum}};
        if (spec.is_fermionic()) doc["closed_form_dimension"] = fermionic_dimension(spec.r, static_cast<int>(spec.k));
        write_json(out / "spectrum_summary.json", doc);
    }
    rep.time("total", total.seconds());
    return rep;
}

Report cmd_husimi(const RunConfig& cfg, const fs::path& out) {
    Report rep("husimi", config_hash(cfg));
    const auto spec = cfg.statistics.spec();
    const int N = *cfg.droplet.N;
    const DropletSpec dspec{spec, N, {}};
    Stopwatch total;

    const bool full = spec.is_fermionic() && N == spec.occupancy_cap();
    std::optional<StepSummary> step;
    if (!full) step = summarize_step(spec, N);
    double rho_max = 1.0;
    if (cfg.droplet.rho_max) {
        rho_max = *cfg.droplet.rho_max;
    } else if (step) {
        const double c = step->crossing_rho;
        rho_max = spec.s == 1 ? std::min(2.0 * c, 0.5 * (1.0 + c)) : 2.0 * c;
    }
    const auto grid = uniform_rho_grid(rho_max, cfg.droplet.grid_points);
    const auto prof = droplet_profile(dspec, grid);

    bool in_range = true;
    for (double v : prof.value) in_range = in_range && v >= 0.0 && v <= 1.0;
    rep.check_true("profile_in_unit_interval", in_range);
    rep.check_true("profile_monotone", prof.is_monotone());

    // First-principles state sum at a few radii, spread evenly over the modes.
    double match = 0.0;
    for (std::size_t j = 0; j < grid.size(); j += std::max<std::size_t>(1, grid.size() / 5)) {
        std::vector<Complex> z(static_cast<std::size_t>(spec.r), std::sqrt(grid[j] / spec.r));
        match = std::max(match, std::abs(husimi(dspec, BargmannPoint(z)) - prof.value[j]));
    }
    rep.check_below("state_sum_vs_series", match, cfg.tolerances.husimi_match);

    json summary = {{"k", spec.k}, {"N", N}, {"s", spec.s}, {"r", spec.r}, {"rho_max", rho_max}};
    if (step) {
        const double mean_scale = spec.s == 1 ? 1.0 - step->crossing_rho : 1.0 + step->crossing_rho;
        summary["crossing_rho"] = step->crossing_rho;
        summary["crossing_k_rho"] = step->crossing_k_rho;
        summary["crossing_mean_occupation"] =
            (spec.s == 1 ? spec.k : spec.k - 1.0) * step->crossing_rho / mean_scale;
        summary["transition_width"] = step->width;
        summary["step_check"] = {
            {"inside", {{"k_rho", 0.5 * N}, {"value", step->inside_value}, {"pass", step->inside_ok}}},
            {"outside",
             {{"k_rho", 1.5 * N},
              {"value", std::isfinite(step->outside_value) ? json(step->outside_value) : json(nullptr)},
              {"pass", step->outside_ok}}},
            {"boundary", {{"k_rho", N - 0.5}, {"value", step->boundary_value}, {"pass", step->boundary_ok}}}};
        if (!(step->inside_ok && step->outside_ok && step->boundary_ok)) {
            rep.warn("three-point step check in the k*rho coordinate does not hold at this (k, N)");
        }
    } else {
        summary["crossing_rho"] = nullptr;
        summary["note"] = "droplet fills the whole space; the profile is identically 1";
    }

    if (cfg.output.csv) {
        CsvWriter csv(out / "profile.csv", {"rho", "value", "k", "N", "s", "r"});
        for (std::size_t j = 0; j < grid.size(); ++j) {
            csv << prof.rho[j] << prof.value[j] << spec.k << N << spec.s << spec.r;
            csv.end_row();
        }
    }
    if (cfg.output.json) write_json(out / "husimi_summary.json", summary);
    rep.time("total", total.seconds());
    return rep;
}

Report cmd_star_convergence(const RunConfig& cfg, const fs::path& out) {
    Report rep("star-convergence", config_hash(cfg));
    const auto& st = cfg.statistics;
    Stopwatch total;
    auto pairs = cfg.sweep.pairs;
    if (pairs.empty()) pairs = {"a1plus2_a1minus2", "n1sq_a1plus2", "x1sq_p1sq"};
    const auto points = cfg.sweep.points.empty() ? default_points(st.r) : cfg.sweep.points;
    StatisticsSpec family{st.r, st.s, cfg.sweep.k.front(), st.s == 1 ? std::optional<int>(0) : std::nullopt};

    std::vector<OperatorPair> ops;
    for (const auto& name : pairs) {
        try {
            ops.push_back(operator_pair(name, st.r));
        } catch (const DomainError& e) {
            throw ConfigError(std::string("sweep.pairs: ") + e.what());
        }
    }
    for (const auto& p : points) {
        try {
            check_domain(family, BargmannPoint(p));
        } catch (const DomainError& e) {
            throw ConfigError(std::string("sweep.points: ") + e.what());
        }
    }

    std::vector<ConvergenceFit> fits(ops.size() * points.size());
    parallel_for(fits.size(), cfg.threads, [&](std::size_t t) {
        fits[t] = convergence_study(ops[t / points.size()], family, cfg.sweep.k, BargmannPoint(points[t % points.size()]));
    });

    json studies = json::array();
    for (std::size_t t = 0; t < fits.size(); ++t) {
        const auto& f = fits[t];
        const auto& name = ops[t / points.size()].name;
        const auto pi = t % points.size();
        json pt = json::array();
        for (auto c : points[pi]) pt.push_back(complex_json(c));
        studies.push_back({{"pair", name},
                           {"point", pt},
                           {"fit_star", fit_json(f.fit_star)},
                           {"fit_moyal", fit_json(f.fit_moyal)},
                           {"degenerate", f.degenerate()},
                           {"note", f.note}});
        for (const auto& fit : {f.fit_star, f.fit_moyal}) {
            if (fit && (fit->slope < cfg.tolerances.slope_low || fit->slope > cfg.tolerances.slope_high)) {
                rep.warn(name + " at point " + std::to_string(pi) + ": slope " + format_number(fit->slope) +
                         " outside the expected band");
            }
        }
        if (f.degenerate()) rep.warn(name + " at point " + std::to_string(pi) + ": degenerate fit (" + f.note + ")");
    }

    if (cfg.output.csv) {
        CsvWriter csv(out / "convergence.csv", {"pair", "point", "k", "err_star", "err_moyal"});
        for (std::size_t t = 0; t < fits.size(); ++t) {
            for (std::size_t j = 0; j < fits[t].ks.size(); ++j) {
                csv << ops[t / points.size()].name << static_cast<int>(t % points.size()) << fits[t].ks[j]
                    << fits[t].err_star[j] << fits[t].err_moyal[j];
                csv.end_row();
            }
        }
    }
    if (cfg.output.json) {
        write_json(out / "convergence_fit.json",
                   {{"r", st.r}, {"s", st.s}, {"k", cfg.sweep.k}, {"studies", studies},
                    {"band", {cfg.tolerances.slope_low, cfg.tolerances.slope_high}}});
    }
    rep.time("total", total.seconds());
    return rep;
}

Report cmd_edge_sim(const RunConfig& cfg, const fs::path& out) {
    Report rep("edge-sim", config_hash(cfg));
    const auto& ed = cfg.edge;
    Stopwatch total;

    EdgeField f = zero_field(ed.velocities, ed.modes);
    for (std::size_t i = 0; i < ed.velocities.size(); ++i) {
        if (ed.amplitudes.empty()) {
            f.alpha[i][0] = 0.5;
        } else {
            f.alpha[i] = ed.amplitudes[i];
        }
        if (!ed.alpha0.empty()) f.alpha0[i] = ed.alpha0[i];
        if (!ed.alphabar0.empty()) f.alphabar0[i] = ed.alphabar0[i];
    }
    if (cfg.droplet.N && cfg.statistics.k > 0) f.rho_b = *cfg.droplet.N / cfg.statistics.k;
    if (ed.corrupted) f = f.corrupted();

    std::vector<double> speeds = f.e;
    if (!f.drift.empty()) speeds.insert(speeds.end(), f.drift.begin(), f.drift.end());
    double window = 2.0 * std::numbers::pi;
    if (ed.window) {
        window = *ed.window;
    } else if (auto T = common_period(speeds)) {
        window = *T;
    } else {
        rep.warn("velocities are incommensurate; using a 2 pi window and reporting the action per unit time");
    }

    const auto grid = uniform_edge_grid(ed.n_theta, ed.n_t, window);
    const double eom = eom_residual(f, grid);
    const double period = periodicity_residual(f, grid.t);
    const double momentum = momentum_coefficient_residual(f, std::max(ed.n_theta, 2 * ed.modes + 2));
    const double action = action_value(f, window);
    if (ed.corrupted) {
        rep.warn("corrupted field: the equation-of-motion residual is a diagnostic, not a check");
    } else {
        rep.check_below("eom_residual", eom, cfg.tolerances.eom);
        rep.check_below("action_on_chiral_solution", std::abs(action), cfg.tolerances.action);
    }
    rep.check_below("periodicity_residual", period, cfg.tolerances.periodicity);
    rep.check_below("momentum_coefficients", momentum, 1e-10);

    // The sampled functional needs periodic samples, so only without winding.
    std::optional<double> sampled;
    if (std::all_of(f.alpha0.begin(), f.alpha0.end(), [](double a) { return a == 0.0; })) {
        sampled = action_value(sample_field(f, ed.n_theta, ed.n_t, window), f.e);
        if (!ed.corrupted) rep.check_below("sampled_action", std::abs(*sampled), cfg.tolerances.action);
    }

    const auto alg = build_mode_algebra(f.r, ed.modes, ed.levels, ed.zero_mode_dim, ed.budget);
    const auto modes = mode_commutator_residuals(alg);
    rep.check_below("mode_commutators", modes.max_residual(), cfg.tolerances.mode_commutator);
    const auto dims = hilbert_dimensions(alg);

    if (cfg.output.csv) {
        std::vector<std::string> header{"t"};
        for (int i = 1; i <= f.r; ++i) header.push_back(f.r == 1 ? "theta" : "theta_" + std::to_string(i));
        header.push_back("phi");
        CsvWriter csv(out / "timeseries.csv", header);
        std::vector<std::size_t> digit(static_cast<std::size_t>(f.r), 0);
        for (double t : grid.t) {
            std::fill(digit.begin(), digit.end(), 0);
            while (true) {
                std::vector<double> th;
                for (auto d : digit) th.push_back(grid.theta[d]);
                csv << t;
                for (double v : th) csv << v;
                csv << evaluate_field(f, th, t);
                csv.end_row();
                int a = f.r - 1;
                while (a >= 0 && ++digit[static_cast<std::size_t>(a)] == grid.theta.size()) digit[static_cast<std::size_t>(a--)] = 0;
                if (a < 0) break;
            }
        }
    }
    if (cfg.output.json) {
        write_json(out / "edge_summary.json",
                   {{"r", f.r},
                    {"velocities", f.e},
                    {"corrupted", ed.corrupted},
                    {"window", window},
                    {"eom_residual", eom},
                    {"periodicity_residual", period},
                    {"momentum_coefficient_residual", momentum},
                    {"action", action + 0.0},
                    {"sampled_action", sampled ? json(*sampled + 0.0) : json(nullptr)},
                    {"action_per_unit_time", action / window + 0.0},
                    {"mode_commutators",
                     {{"oscillator", modes.oscillator},
                      {"zero_mode", modes.zero_mode},
                      {"cross", modes.cross},
                      {"interior_states", modes.interior_size}}},
                    {"hilbert_dimensions",
                     {{"oscillator", dims.oscillator},
                      {"zero_mode", dims.zero_mode},
                      {"component", dims.component},
                      {"total", dims.total}}}});
    }
    rep.time("total", total.seconds());
    return rep;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"Generalized A_r statistics: representations, coherent states, droplets and edge fields"};
    app.require_subcommand(1);
    std::optional<std::string> config_path;
    Overrides ov;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", ov.out, "output directory (default: $ARSTAT_OUT_DIR or ./arstat-out)");
        sub->add_option("--format", ov.format, "comma-separated data formats: csv,json");
        sub->add_option("--threads", ov.threads, "worker threads for sweeps");
        sub->add_option("--seed", ov.seed, "seed for random test points");
        sub->add_option("--r", ov.r, "number of modes");
        sub->add_option("--s", ov.s, "family sign (+1 or -1)");
        sub->add_option("--k", ov.k, "representation label");
        sub->add_option("--n-max", ov.n_max, "bosonic total-occupancy truncation");
        sub->add_option("--N", ov.N, "droplet occupancy cap");
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"verify", "run the algebra and Bargmann invariant suite"},
        {"spectrum", "tabulate the Hamiltonian spectrum"},
        {"husimi", "droplet Husimi profile and step diagnostics"},
        {"star-convergence", "large-k remainder of the first-order star product"},
        {"edge-sim", "chiral edge field checks and mode algebra"}};
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        cfg = load_config(config_path, command, ov);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }

    const fs::path out(cfg.output.directory);
    try {
        fs::create_directories(out);
        Stopwatch sw;
        Report rep = command == "verify"     ? cmd_verify(cfg, out)
                     : command == "spectrum" ? cmd_spectrum(cfg, out)
                     : command == "husimi"   ? cmd_husimi(cfg, out)
                     : command == "star-convergence" ? cmd_star_convergence(cfg, out)
                                                     : cmd_edge_sim(cfg, out);
        rep.time("wall", sw.seconds());
        write_json(out / "report.json", rep.to_json());
        for (const auto& c : rep.checks()) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_number(c.value) << '\n';
        }
        for (const auto& w : rep.warnings()) std::cerr << "warning: " << w << '\n';
        return rep.passed() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const SizeError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error in " << command << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace arstat::cli

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arstat/bargmann.hpp"
#include "arstat/droplet.hpp"
#include "arstat/edge.hpp"
#include "arstat/starprod.hpp"

namespace py = pybind11;
using namespace arstat;

namespace {

using Point = std::vector<Complex>;

std::vector<int> as_tuple(const Occupation& o) { return o.n; }

HamiltonianSpec hamiltonian_spec(int r, double e0, std::vector<double> e) {
    if (e.empty()) e.assign(static_cast<std::size_t>(r), 1.0);
    return {e0, std::move(e)};
}

py::dict step_dict(const StepSummary& s) {
    py::dict d;
    d["crossing_rho"] = s.crossing_rho;
    d["crossing_k_rho"] = s.crossing_k_rho;
    d["width"] = s.width;
    d["inside_value"] = s.inside_value;
    d["outside_value"] = s.outside_value;
    d["boundary_value"] = s.boundary_value;
    d["inside_ok"] = s.inside_ok;
    d["outside_ok"] = s.outside_ok;
    d["boundary_ok"] = s.boundary_ok;
    return d;
}

py::object fit_or_none(const std::optional<LineFit>& f) {
    if (!f) return py::none();
    py::dict d;
    d["slope"] = f->slope;
    d["intercept"] = f->intercept;
    d["residual"] = f->residual;
    return std::move(d);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Generalized A_r statistics: Fock algebra, coherent states, droplets, star product and edge fields";

    auto base = py::register_exception<Error>(m, "ArstatError", PyExc_ValueError);
    py::register_exception<InvalidSpec>(m, "InvalidSpec", base.ptr());
    py::register_exception<ModeOutOfRange>(m, "ModeOutOfRange", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
    py::register_exception<TailError>(m, "TailError", base.ptr());
    py::register_exception<CapError>(m, "CapError", base.ptr());
    py::register_exception<StepError>(m, "StepError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<GridError>(m, "GridError", base.ptr());
    py::register_exception<SizeError>(m, "SizeError", base.ptr());

    py::class_<StatisticsSpec>(m, "StatisticsSpec")
        .def(py::init([](int r, int s, double k, std::optional<int> n_max) {
                 StatisticsSpec spec{r, s, k, n_max};
                 spec.validate();
                 return spec;
             }),
             py::arg("r"), py::arg("s"), py::arg("k"), py::arg("n_max") = py::none())
        .def_static("fermionic", &StatisticsSpec::fermionic, py::arg("r"), py::arg("k"))
        .def_static("bosonic", &StatisticsSpec::bosonic, py::arg("r"), py::arg("k"), py::arg("n_max"))
        .def_readonly("r", &StatisticsSpec::r)
        .def_readonly("s", &StatisticsSpec::s)
        .def_readonly("k", &StatisticsSpec::k)
        .def_readonly("n_max", &StatisticsSpec::n_max)
        .def("occupancy_cap", &StatisticsSpec::occupancy_cap)
        .def("with_k", &StatisticsSpec::with_k)
        .def("__repr__", [](const StatisticsSpec& s) {
            return "StatisticsSpec(r=" + std::to_string(s.r) + ", s=" + std::to_string(s.s) + ", k=" + py::repr(py::float_(s.k)).cast<std::string>() +
                   (s.n_max ? ", n_max=" + std::to_string(*s.n_max) : std::string()) + ")";
        });

    // algebra
    m.def("enumerate_basis", [](const StatisticsSpec& spec) {
        const auto basis = enumerate_basis(spec);
        std::vector<std::vector<int>> out;
        for (const auto& o : basis.states()) out.push_back(as_tuple(o));
        return out;
    });
    m.def("fermionic_dimension", &fermionic_dimension, py::arg("r"), py::arg("k"));
    m.def("structure_function", [](const StatisticsSpec& spec, std::vector<int> n, int mode) {
        return structure_function(spec, Occupation(std::move(n)), mode);
    });
    m.def("ladder_matrices", [](const StatisticsSpec& spec) {
        const auto basis = enumerate_basis(spec);
        const auto l = ladder_matrices(basis);
        std::vector<Eigen::MatrixXcd> lower, raise;
        for (const auto& a : l.lower) lower.push_back(a.dense());
        for (const auto& a : l.raise) raise.push_back(a.dense());
        return py::make_tuple(lower, raise);
    }, "Dense (lowering, raising) matrices over the enumerated basis.");
    m.def("verify_triple_relations", [](const StatisticsSpec& spec) {
        const auto rep = verify_triple_relations(enumerate_basis(spec));
        py::dict d;
        d["triple_raise"] = rep.triple_raise.value();
        d["triple_lower"] = rep.triple_lower.value();
        d["commuting"] = rep.commuting.value();
        d["interior_size"] = rep.interior_size;
        d["max_residual"] = rep.max_residual();
        return d;
    });
    m.def("hamiltonian", [](const StatisticsSpec& spec, double e0, std::vector<double> e) {
        return hamiltonian(enumerate_basis(spec), hamiltonian_spec(spec.r, e0, std::move(e))).dense();
    }, py::arg("spec"), py::arg("e0") = 0.0, py::arg("e") = std::vector<double>{});
    m.def("spectrum_closed_form", [](const StatisticsSpec& spec, double e0, std::vector<double> e) {
        return spectrum_closed_form(enumerate_basis(spec), hamiltonian_spec(spec.r, e0, std::move(e)));
    }, py::arg("spec"), py::arg("e0") = 0.0, py::arg("e") = std::vector<double>{});
    m.def("hamiltonian_offset", &hamiltonian_offset);
    m.def("large_k_commutator_deviation", [](int r, int s, std::vector<double> ks, int n_cap) {
        std::vector<std::pair<double, double>> out;
        for (const auto& d : large_k_commutator_deviation(r, s, ks, n_cap)) out.emplace_back(d.k, d.deviation);
        return out;
    }, py::arg("r"), py::arg("s"), py::arg("ks"), py::arg("n_cap") = 2);

    // Bargmann space
    m.def("coefficient", [](const StatisticsSpec& spec, std::vector<int> n) { return coefficient(spec, Occupation(std::move(n))); });
    m.def("coherent_vector", [](const StatisticsSpec& spec, const Point& z, double tol) {
        return coherent_vector(enumerate_basis(spec), BargmannPoint(z), tol).amplitudes;
    }, py::arg("spec"), py::arg("z"), py::arg("tail_tolerance") = 1e-10);
    m.def("overlap", [](const StatisticsSpec& spec, const Point& z, const Point& w) {
        return overlap(spec, BargmannPoint(z), BargmannPoint(w));
    });
    m.def("distance_sq", [](const StatisticsSpec& spec, const Point& z, const Point& w) {
        return distance_sq(spec, BargmannPoint(z), BargmannPoint(w));
    });
    m.def("metric", [](const StatisticsSpec& spec, const Point& z) {
        const auto g = metric(spec, BargmannPoint(z));
        return py::make_tuple(g.g, g.g_inv);
    }, "Returns (g, g_inv) with g[i, j] = g_{i jbar}.");
    m.def("measure_density", [](const StatisticsSpec& spec, const Point& z) { return measure_density(spec, BargmannPoint(z)); });
    m.def("exact_measure_constant", &exact_measure_constant);
    m.def("required_n_max", &required_n_max, py::arg("k"), py::arg("rho"), py::arg("tolerance") = 1e-10);
    m.def("gram_matrix", [](const StatisticsSpec& spec, int max_total, int radial_nodes) {
        return gram_matrix(QuadratureRule(spec, radial_nodes, 1), FockBasis(spec, max_total));
    }, py::arg("spec"), py::arg("max_total"), py::arg("radial_nodes") = 40);

    // droplet
    m.def("husimi", [](const StatisticsSpec& spec, int N, const Point& z, std::vector<int> box) {
        return husimi(DropletSpec{spec, N, std::move(box)}, BargmannPoint(z));
    }, py::arg("spec"), py::arg("N"), py::arg("z"), py::arg("box") = std::vector<int>{});
    m.def("husimi_series", &husimi_series, py::arg("spec"), py::arg("N"), py::arg("rho"));
    m.def("droplet_profile", [](const StatisticsSpec& spec, int N, std::vector<double> rho) {
        return droplet_profile(DropletSpec{spec, N, {}}, rho).value;
    });
    m.def("summarize_step", [](const StatisticsSpec& spec, int N) { return step_dict(summarize_step(spec, N)); });

    // star product
    m.def("operator_pair_names", &operator_pair_names);
    m.def("convergence_study", [](const std::string& pair, const StatisticsSpec& family, std::vector<double> ks, const Point& z) {
        const auto fit = convergence_study(operator_pair(pair, family.r), family, ks, BargmannPoint(z));
        py::dict d;
        d["ks"] = fit.ks;
        d["err_star"] = fit.err_star;
        d["err_moyal"] = fit.err_moyal;
        d["fit_star"] = fit_or_none(fit.fit_star);
        d["fit_moyal"] = fit_or_none(fit.fit_moyal);
        d["note"] = fit.note;
        return d;
    });

    // edge
    py::class_<EdgeField>(m, "EdgeField")
        .def_readwrite("e", &EdgeField::e)
        .def_readwrite("alpha0", &EdgeField::alpha0)
        .def_readwrite("alphabar0", &EdgeField::alphabar0)
        .def_readwrite("alpha", &EdgeField::alpha)
        .def_readonly("r", &EdgeField::r)
        .def("corrupted", &EdgeField::corrupted)
        .def("__call__", [](const EdgeField& f, const std::vector<double>& theta, double t) { return evaluate_field(f, theta, t); });
    m.def("zero_field", &zero_field, py::arg("e"), py::arg("modes"));
    m.def("random_field", &random_field, py::arg("e"), py::arg("modes"), py::arg("seed"), py::arg("amplitude") = 1.0,
          py::arg("winding") = true);
    m.def("eom_residual", [](const EdgeField& f, int n_theta, int n_t, double window) {
        return eom_residual(f, uniform_edge_grid(n_theta, n_t, window));
    }, py::arg("field"), py::arg("n_theta") = 16, py::arg("n_t") = 16, py::arg("window") = 6.283185307179586);
    m.def("periodicity_residual", &periodicity_residual);
    m.def("common_period", &common_period, py::arg("velocities"), py::arg("max_denominator") = 64);
    m.def("action_value", py::overload_cast<const EdgeField&, double, int>(&action_value), py::arg("field"), py::arg("window"),
          py::arg("nodes") = 48);
    m.def("mode_commutator_residual", [](int r, int M, int L, int zero_mode_dim) {
        const auto alg = build_mode_algebra(r, M, L, zero_mode_dim);
        return py::make_tuple(mode_commutator_residuals(alg).max_residual(), alg.dim());
    }, py::arg("r"), py::arg("M"), py::arg("L"), py::arg("zero_mode_dim") = 8, "Returns (max residual, Hilbert dimension).");
}

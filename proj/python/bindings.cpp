#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psep/boundary.hpp"
#include "psep/cli.hpp"
#include "psep/errors.hpp"
#include "psep/hardy.hpp"
#include "psep/measures.hpp"
#include "psep/simulate.hpp"

namespace py = pybind11;
using namespace psep;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Numerical mu-domains for the planar Skorokhod embedding problem";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SingularityError>(m, "SingularityError", PyExc_ValueError);
    py::register_exception<RunawayError>(m, "RunawayError", PyExc_RuntimeError);
    py::register_exception<GeometryError>(m, "GeometryError", PyExc_RuntimeError);

    py::class_<Measure>(m, "Measure")
        .def_static("uniform", &Measure::uniform)
        .def_static("biuniform", &Measure::biuniform)
        .def_static("two_point", &Measure::two_point)
        .def_static("truncated_exponential", &Measure::truncated_exponential)
        .def_static("discrete", &Measure::discrete)
        .def_static("dirac", &Measure::dirac)
        .def_static("tabulated", &Measure::tabulated)
        .def("cdf", &Measure::cdf)
        .def("quantile", &Measure::quantile)
        .def("mean", &Measure::mean)
        .def_property_readonly("support", [](const Measure& x) { return py::make_tuple(x.support_lo(), x.support_hi()); })
        .def("shifted", &Measure::shifted)
        .def("__repr__", &Measure::describe);

    m.def("parse_dist_spec", &parse_dist_spec);
    m.def("recenter", py::overload_cast<const Measure&>(&recenter));

    py::class_<QuantileStep>(m, "QuantileStep")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("cut_levels"), py::arg("values"))
        .def("__call__", &QuantileStep::operator())
        .def_property_readonly("cut_levels", &QuantileStep::cut_levels)
        .def_property_readonly("values", &QuantileStep::values)
        .def("mean", &QuantileStep::mean)
        .def("shifted", &QuantileStep::shifted);

    m.def(
        "step_quantile",
        [](const Measure& mu, std::size_t n, bool adapted, bool centre) {
            const Mesh mesh = adapted ? adapted_mesh(mu, n) : uniform_mesh(mu.support_lo(), mu.support_hi(), n);
            const DiscreteMeasure d = discretize(mu, mesh);
            return quantile_step(centre ? recenter(d).first : d);
        },
        py::arg("measure"), py::arg("n"), py::arg("adapted") = true, py::arg("centre") = false,
        "Step quantile of the right-endpoint discretization on n cells.");

    m.def("lp_quantile_distance", [](const Measure& mu, const QuantileStep& qs, double p) {
        return lp_quantile_distance(mu, qs, p);
    });
    m.def("lp_step_distance", py::overload_cast<const QuantileStep&, const QuantileStep&, double>(&lp_quantile_distance));

    m.def("hilbert_indicator", &hilbert_indicator);
    m.def("hilbert_phi_step", &hilbert_phi_step);
    m.def("boundary_curve", [](const QuantileStep& qs, std::size_t grid) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& s : boundary_curve(qs, grid).samples) out.emplace_back(s.theta, s.x, s.y);
        return out;
    });

    m.def("fourier_coeffs", [](const QuantileStep& qs, std::size_t K) { return fourier_coeffs_step(qs, K).coeffs(); });
    m.def(
        "hardy_distance",
        [](const std::vector<double>& a, const std::vector<double>& b, double p) {
            HardyConfig cfg;
            cfg.p = p;
            cfg.method = p == 2.0 ? HardyMethod::SeriesParseval : HardyMethod::BoundaryTrace;
            return hardy_distance(PowerSeriesMap(a), PowerSeriesMap(b), cfg);
        },
        py::arg("a"), py::arg("b"), py::arg("p") = 2.0);
    m.def("trace_hardy_distance", &trace_hardy_distance, py::arg("q1"), py::arg("q2"), py::arg("p"),
          py::arg("nodes_per_cell") = 32);

    m.def("sample_exit_points", &sample_exit_points, py::arg("qs"), py::arg("N"), py::arg("seed") = 1);
    m.def("ks_statistic", [](const std::vector<double>& xs, const std::function<double(double)>& cdf) {
        return ks_statistic(xs, cdf);
    });

    m.def(
        "run",
        [](const std::string& command, const std::map<std::string, std::string>& settings) {
            RunConfig cfg;
            try {
                cfg = build_config({}, settings);
            } catch (const ConfigError&) {
                return 2;
            }
            std::ostringstream log, err;
            return run_command(command, cfg, log, err);
        },
        py::arg("command"), py::arg("settings"), "Run a CLI subcommand; returns its exit code.");
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gapspec/errors.hpp"
#include "gapspec/serialize.hpp"
#include "gapspec/version.hpp"

namespace py = pybind11;
using namespace gapspec;

namespace {

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

GeometrySpec geometry(const std::string& kind, int k, double lambda) {
    if (kind == "sphere") return GeometrySpec::sphere(k, lambda);
    if (kind == "ym") return GeometrySpec::yang_mills(lambda);
    throw DomainError("geometry must be 'sphere' or 'ym'");
}

GeometryKind kind_of(const std::string& kind) { return geometry(kind, 1, 1.0).kind; }

OperatorSpec operator_spec(const std::string& family, const std::string& kind, int k, double lambda) {
    if (family == "half_line") return OperatorSpec::half_line(geometry(kind, k, lambda));
    if (family == "rescaled") return OperatorSpec::rescaled(geometry(kind, k, lambda));
    throw DomainError("family must be 'half_line' or 'rescaled'");
}

SpectralOptions options(double rtol, double atol, double R_factor) {
    SpectralOptions o;
    o.rtol = rtol;
    o.atol = atol;
    o.R_factor = R_factor;
    return o;
}

}  // namespace

PYBIND11_MODULE(_gapspec, m) {
    m.doc() = "Gap spectrum and wave dynamics of harmonic maps on the hyperbolic plane";
    m.attr("__version__") = version;

    static py::exception<Error> base(m, "GapspecError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(base.ptr(), e.what());
        }
    });

    m.def("eval_Q", [](const std::string& kind, int k, double lambda, double r) {
        return eval_Q(geometry(kind, k, lambda), r);
    }, py::arg("geometry"), py::arg("k"), py::arg("lambda_"), py::arg("r"));
    m.def("energy_closed_form", [](const std::string& kind, int k, double lambda) {
        return energy_closed_form(geometry(kind, k, lambda));
    }, py::arg("geometry"), py::arg("k"), py::arg("lambda_"));
    m.def("energy_quadrature", [](const std::string& kind, int k, double lambda) {
        return to_python(energy_quadrature(geometry(kind, k, lambda)));
    }, py::arg("geometry"), py::arg("k"), py::arg("lambda_"));
    m.def("amplitude_bound", [](const std::string& kind, int k, double energy) {
        return amplitude_bound(geometry(kind, k, 1.0), energy);
    }, py::arg("geometry"), py::arg("k"), py::arg("energy"));
    m.def("effective_potential", [](const std::string& kind, int k, double lambda, double r) {
        return effective_potential(OperatorSpec::half_line(geometry(kind, k, lambda)), r);
    }, py::arg("geometry"), py::arg("k"), py::arg("lambda_"), py::arg("r"));
    m.def("zero_mode", [](const std::string& kind, int k, double lambda, double r) {
        return zero_mode(geometry(kind, k, lambda), ZeroModeCoordinate::PhysicalR, r);
    }, py::arg("geometry"), py::arg("k"), py::arg("lambda_"), py::arg("r"));
    m.def("omega_weight", &omega_weight, py::arg("k"), py::arg("theta"), py::arg("rho"));

    m.def("count_eigenvalues_below", [](const std::string& kind, int k, double lambda, double mu2) {
        return count_eigenvalues_below(OperatorSpec::half_line(geometry(kind, k, lambda)), mu2);
    }, py::arg("geometry"), py::arg("k"), py::arg("lambda_"), py::arg("mu2"));
    m.def("find_gap_eigenvalues",
          [](const std::string& kind, int k, double lambda, const std::string& family, double rtol,
             double atol, double R_factor) {
              py::gil_scoped_release release;
              SpectralReport r = find_gap_eigenvalues(operator_spec(family, kind, k, lambda),
                                                      options(rtol, atol, R_factor));
              py::gil_scoped_acquire acquire;
              return to_python(r);
          },
          py::arg("geometry"), py::arg("k"), py::arg("lambda_"), py::arg("family") = "half_line",
          py::arg("rtol") = 1e-11, py::arg("atol") = 1e-13, py::arg("R_factor") = 1.0);
    m.def("sweep_lambda",
          [](const std::string& kind, int k, const std::vector<double>& lambdas, int jobs) {
              py::gil_scoped_release release;
              SweepReport r = sweep_lambda(kind_of(kind), k, lambdas, jobs);
              py::gil_scoped_acquire acquire;
              return to_python(r);
          },
          py::arg("geometry"), py::arg("k"), py::arg("lambdas"), py::arg("jobs") = 0);
    m.def("migration_curve",
          [](const std::string& kind, int k, const std::vector<double>& lambdas, int jobs) {
              py::gil_scoped_release release;
              MigrationCurve c = migration_curve(kind_of(kind), k, lambdas, jobs);
              py::gil_scoped_acquire acquire;
              return to_python(c);
          },
          py::arg("geometry"), py::arg("k"), py::arg("lambdas"), py::arg("jobs") = 0);
    m.def("largek_gap_scan", [](py::object k, double theta) {
        int kk = py::isinstance<py::str>(k) ? (k.cast<std::string>() == "inf" ? k_infinity : -1)
                                            : k.cast<int>();
        if (kk < 0) throw DomainError("k must be a positive integer or 'inf'");
        return to_python(largek_gap_scan(kk, theta));
    }, py::arg("k"), py::arg("theta"));
    m.def("renormalized_f", [](int k, double lambda, double mu2, double rho_max) {
        GeometrySpec geo = GeometrySpec::sphere(k, lambda);
        RenormalizedSolution s = renormalized_f(geo, mu2, rho_max);
        json j{{"solution", s}, {"claims", check_renormalization_claims(geo, s)}};
        return to_python(j);
    }, py::arg("k"), py::arg("lambda_"), py::arg("mu2"), py::arg("rho_max"));
    m.def("nonlinear_source", [](const std::string& kind, int k, double lambda, double r, double u) {
        return nonlinear_source(geometry(kind, k, lambda), r, u);
    }, py::arg("geometry"), py::arg("k"), py::arg("lambda_"), py::arg("r"), py::arg("u"));
    m.def("evolve",
          [](const std::string& kind, int k, double lambda, const std::string& mode,
             const std::string& initial, double R, int points, double t_end, double r_probe) {
              GeometrySpec geo = geometry(kind, k, lambda);
              WaveMode wm = mode == "nonlinear" ? WaveMode::Nonlinear : WaveMode::Linear;
              InitialData init = initial == "eigenmode" ? InitialData{GapEigenmode{}}
                                                        : InitialData{GaussianBump{}};
              EvolutionOptions o;
              o.t_end = t_end;
              o.r_probe = r_probe;
              EvolutionResult r;
              {
                  py::gil_scoped_release release;
                  r = evolve(init_state(geo, wm, R, points, init), o);
              }
              return to_python(r);
          },
          py::arg("geometry"), py::arg("k"), py::arg("lambda_"), py::arg("mode") = "linear",
          py::arg("initial") = "bump", py::arg("R") = 40.0, py::arg("points") = 1024,
          py::arg("t_end") = 20.0, py::arg("r_probe") = 5.0);
}

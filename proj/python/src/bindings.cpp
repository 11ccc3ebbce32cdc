#include "phyp/boundary.hpp"
#include "phyp/builtins.hpp"
#include "phyp/cli.hpp"
#include "phyp/diagnostics.hpp"
#include "phyp/errors.hpp"
#include "phyp/ivp_solver.hpp"
#include "phyp/periodic_solver.hpp"
#include "phyp/system_model.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace phyp;

namespace {

py::array_t<double> field_array(const Field& f)
{
    py::array_t<double> out({f.n(), f.Nt(), f.Nx() + 1});
    auto v = out.mutable_unchecked<3>();
    for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.Nt(); ++j)
            for (int k = 0; k <= f.Nx(); ++k)
                v(i, j, k) = f(i, j, k);
    return out;
}

Field field_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a, double T_star, double L)
{
    if (a.ndim() != 3)
        throw std::invalid_argument("expected an array of shape (n, Nt, Nx + 1)");
    const auto n = static_cast<int>(a.shape(0));
    const auto Nt = static_cast<int>(a.shape(1));
    const auto Nx = static_cast<int>(a.shape(2)) - 1;
    Field f(n, Nt, Nx, T_star, L);
    auto v = a.unchecked<3>();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < Nt; ++j)
            for (int k = 0; k <= Nx; ++k)
                f(i, j, k) = v(i, j, k);
    return f;
}

} // namespace

PYBIND11_MODULE(_core, mod)
{
    mod.doc() = "Time-periodic solutions of quasilinear hyperbolic systems with boundary feedback";

    auto base = py::register_exception<Error>(mod, "PhypError", PyExc_RuntimeError);
    py::register_exception<HyperbolicityError>(mod, "HyperbolicityError", base);
    py::register_exception<SignatureError>(mod, "SignatureError", base);
    py::register_exception<SourceOriginError>(mod, "SourceOriginError", base);
    py::register_exception<DegenerateEigenbasisError>(mod, "DegenerateEigenbasisError", base);
    py::register_exception<DominanceError>(mod, "DominanceError", base);
    py::register_exception<DomainError>(mod, "DomainError", base);
    py::register_exception<BoundaryMapError>(mod, "BoundaryMapError", base);
    py::register_exception<PeriodicityError>(mod, "PeriodicityError", base);
    py::register_exception<DissipativityError>(mod, "DissipativityError", base);
    py::register_exception<ConvergenceError>(mod, "ConvergenceError", base);
    py::register_exception<NonContractionError>(mod, "NonContractionError", base);
    py::register_exception<StepSizeError>(mod, "StepSizeError", base);
    py::register_exception<ConfigError>(mod, "ConfigError", base);
    py::register_exception<IoError>(mod, "IoError", base);

    py::class_<SystemSpec>(mod, "SystemSpec")
        .def(py::init([](int n, int m, MatrixField A, VectorField F, MatrixField gradF, double radius, double L) {
                 return SystemSpec{n, m, std::move(A), std::move(F), std::move(gradF), radius, L};
             }),
             py::arg("n"), py::arg("m"), py::arg("A"), py::arg("F"), py::arg("gradF") = MatrixField{},
             py::arg("domain_radius") = 0.1, py::arg("L") = 1.0)
        .def_readonly("n", &SystemSpec::n)
        .def_readonly("m", &SystemSpec::m)
        .def_readonly("domain_radius", &SystemSpec::domain_radius)
        .def_readonly("L", &SystemSpec::L)
        .def("A", [](const SystemSpec& s, const Vector& u) { return s.A(u); })
        .def("F", [](const SystemSpec& s, const Vector& u) { return s.F(u); });

    py::class_<BoundarySpec>(mod, "BoundarySpec")
        .def_readonly("T_star", &BoundarySpec::T_star)
        .def("forcing", [](const BoundarySpec& b, int i, double t) { return b.h.at(static_cast<std::size_t>(i))(t); })
        .def(
            "eval",
            [](const BoundarySpec& b, int n, int m, const std::string& side, double t, const Vector& out) {
                return eval_boundary(b, n, m, side == "left" ? Side::left : Side::right, t, out);
            },
            py::arg("n"), py::arg("m"), py::arg("side"), py::arg("t"), py::arg("outgoing"));

    py::class_<Harmonic>(mod, "Harmonic")
        .def(py::init([](int component, int multiple, double amplitude, double phase) {
                 return Harmonic{component, multiple, amplitude, phase};
             }),
             py::arg("component"), py::arg("multiple") = 1, py::arg("amplitude") = 0.0, py::arg("phase") = 0.0)
        .def_readwrite("component", &Harmonic::component)
        .def_readwrite("multiple", &Harmonic::multiple)
        .def_readwrite("amplitude", &Harmonic::amplitude)
        .def_readwrite("phase", &Harmonic::phase);

    mod.def("linear_damped_scalar", &linear_damped_scalar, py::arg("speed") = 1.0, py::arg("damping") = 0.5,
            py::arg("L") = 1.0, py::arg("radius") = 0.1);
    mod.def("linear_reflect_2x2", &linear_reflect_2x2, py::arg("speed") = 1.0, py::arg("L") = 1.0,
            py::arg("radius") = 0.1);
    mod.def("quasilinear_euler_damping", &quasilinear_euler_damping, py::arg("gamma") = 1.4,
            py::arg("damping") = 0.2, py::arg("sound_speed") = 1.25, py::arg("L") = 1.0, py::arg("radius") = 0.1);
    mod.def("feedback_boundary", &feedback_boundary, py::arg("n"), py::arg("m"), py::arg("period"),
            py::arg("gain_left"), py::arg("gain_right"), py::arg("quadratic") = 0.0,
            py::arg("terms") = std::vector<Harmonic>{});

    py::class_<EigenStructure>(mod, "EigenStructure")
        .def_readonly("lambdas", &EigenStructure::lambdas)
        .def_readonly("left", &EigenStructure::left)
        .def_readonly("right", &EigenStructure::right)
        .def_readonly("mus", &EigenStructure::mus);
    mod.def("eigen_decompose", &eigen_decompose, py::arg("A"), py::arg("m"));
    mod.def("source_gradient", &source_gradient, py::arg("spec"), py::arg("u"));
    mod.def("minimal_K", &minimal_K, py::arg("g0"));
    mod.def("default_K", &default_K, py::arg("g0"));
    mod.def("gtilde_matrix", &gtilde_matrix, py::arg("spec"), py::arg("K"));
    mod.def("measure_mu_max", &measure_mu_max, py::arg("spec"), py::arg("samples") = 256);
    mod.def("time_rescale_factor", &time_rescale_factor, py::arg("spec"), py::arg("samples") = 256);

    py::class_<ValidationReport>(mod, "ValidationReport")
        .def_readonly("samples", &ValidationReport::samples)
        .def_readonly("signature_constant", &ValidationReport::signature_constant)
        .def_readonly("mu_max", &ValidationReport::mu_max)
        .def_readonly("needs_rescaling", &ValidationReport::needs_rescaling)
        .def_readonly("a0_diagonal", &ValidationReport::a0_diagonal)
        .def_readonly("f0_zero", &ValidationReport::f0_zero)
        .def_readonly("max_eigen_residual", &ValidationReport::max_eigen_residual)
        .def_readonly("max_biorthonormality_error", &ValidationReport::max_biorthonormality_error)
        .def_property_readonly("ok", &ValidationReport::ok);
    mod.def("validate_hyperbolicity", &validate_hyperbolicity, py::arg("spec"), py::arg("samples") = 256);

    py::class_<ThetaData>(mod, "ThetaData")
        .def_readonly("theta_matrix", &ThetaData::theta_matrix)
        .def_readonly("theta", &ThetaData::theta)
        .def_readonly("optimal_scaling", &ThetaData::optimal_scaling);
    mod.def("theta_matrix", &theta_matrix, py::arg("bspec"), py::arg("n"), py::arg("m"));
    mod.def("theta_by_spectral_radius", &theta_by_spectral_radius, py::arg("theta"));
    mod.def("theta_by_scaling_descent", &theta_by_scaling_descent, py::arg("theta"));
    mod.def("minimal_characterizing_number", &minimal_characterizing_number, py::arg("theta"));

    py::class_<Certificate>(mod, "Certificate")
        .def_readonly("theta", &Certificate::theta)
        .def_readonly("K", &Certificate::K)
        .def_readonly("L", &Certificate::L)
        .def_readonly("M3", &Certificate::M3)
        .def_readonly("ok", &Certificate::ok)
        .def_readonly("margin", &Certificate::margin);
    mod.def("smallness_certificate", &smallness_certificate, py::arg("theta"), py::arg("K"), py::arg("L"),
            py::arg("M3"));

    py::class_<RateFit>(mod, "RateFit")
        .def_readonly("beta", &RateFit::beta)
        .def_readonly("points", &RateFit::points)
        .def_property_readonly("valid", &RateFit::valid)
        .def_property_readonly("status", [](const RateFit& r) {
            switch (r.status) {
            case RateFit::Status::ok:
                return "ok";
            case RateFit::Status::insufficient_data:
                return "insufficient_data";
            default:
                return "converged_immediately";
            }
        });

    py::class_<IterationReport>(mod, "IterationReport")
        .def_readonly("deltas", &IterationReport::deltas)
        .def_readonly("c1_deltas", &IterationReport::c1_deltas)
        .def_readonly("fitted_beta", &IterationReport::fitted_beta)
        .def_readonly("iterations", &IterationReport::iterations)
        .def_readonly("converged", &IterationReport::converged)
        .def_readonly("certificate", &IterationReport::certificate);

    py::class_<Field>(mod, "Field")
        .def(py::init(&field_from_array), py::arg("values"), py::arg("T_star"), py::arg("L"))
        .def_property_readonly("n", &Field::n)
        .def_property_readonly("Nt", &Field::Nt)
        .def_property_readonly("Nx", &Field::Nx)
        .def_property_readonly("T_star", &Field::T_star)
        .def_property_readonly("L", &Field::L)
        .def("sup_norm", &Field::sup_norm)
        .def("values", &field_array, "Copy of the grid values with shape (n, Nt, Nx + 1).")
        .def("__call__", [](const Field& f, double t, double x) { return interpolate(f, t, x); });

    py::class_<PeriodicSolution>(mod, "PeriodicSolution")
        .def_readonly("field", &PeriodicSolution::field)
        .def_readonly("report", &PeriodicSolution::report);
    mod.def(
        "solve_periodic",
        [](const SystemSpec& spec, const BoundarySpec& bspec, int nt, int nx, std::optional<double> K, double tol,
           int max_iter) {
            IterationConfig cfg;
            cfg.Nt = nt;
            cfg.Nx = nx;
            cfg.K = K;
            cfg.tol = tol;
            cfg.max_iter = max_iter;
            py::gil_scoped_release release;
            return solve_periodic(spec, bspec, cfg);
        },
        py::arg("spec"), py::arg("bspec"), py::arg("nt") = 128, py::arg("nx") = 128, py::arg("K") = py::none(),
        py::arg("tol") = 1e-10, py::arg("max_iter") = 200);

    py::class_<FieldNorms>(mod, "FieldNorms")
        .def_readonly("c0", &FieldNorms::c0)
        .def_readonly("c1", &FieldNorms::c1);
    mod.def("norms", &norms, py::arg("field"));
    mod.def("pde_residual", &pde_residual, py::arg("field"), py::arg("spec"));
    mod.def("extract_initial_data", &extract_initial_data, py::arg("field"));

    py::class_<Trajectory>(mod, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("profiles", &Trajectory::profiles)
        .def_readonly("dx", &Trajectory::dx)
        .def_readonly("halted", &Trajectory::halted)
        .def_readonly("diagnostic", &Trajectory::diagnostic);
    mod.def("perturbed_initial_data", &perturbed_initial_data, py::arg("periodic"), py::arg("amplitude"),
            py::arg("signs"));
    mod.def(
        "run_ivp",
        [](const Matrix& u0, const SystemSpec& spec, const BoundarySpec& bspec, double t_end, double record_every) {
            py::gil_scoped_release release;
            return run(u0, spec, bspec, t_end, record_every);
        },
        py::arg("u0"), py::arg("spec"), py::arg("bspec"), py::arg("t_end"), py::arg("record_every"));

    py::class_<StabilityReport>(mod, "StabilityReport")
        .def_readonly("phi_samples", &StabilityReport::phi_samples)
        .def_readonly("dphi_samples", &StabilityReport::dphi_samples)
        .def_readonly("fitted_decay", &StabilityReport::fitted_decay)
        .def_readonly("fitted_derivative_decay", &StabilityReport::fitted_derivative_decay)
        .def_readonly("T0", &StabilityReport::T0)
        .def_readonly("exact_match", &StabilityReport::exact_match)
        .def_readonly("monotone_envelope", &StabilityReport::monotone_envelope);
    mod.def("stability_metrics", &stability_metrics, py::arg("trajectory"), py::arg("periodic"), py::arg("spec"));

    mod.def(
        "cli_run",
        [](const std::vector<std::string>& argv) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(argv, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("argv"), "Run the command-line front end; returns (exit_code, stdout, stderr).");
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kvbeam/commands.hpp"
#include "kvbeam/constants.hpp"
#include "kvbeam/inversion.hpp"

namespace py = pybind11;
using namespace kvbeam;

namespace {

BeamCoefficients make_coeffs(double ell, double rho, double mu, double r, double kappa) {
    BeamCoefficients c;
    c.ell = ell;
    c.rho = Coefficient(rho);
    c.mu = Coefficient(mu);
    c.r = Coefficient(r);
    c.kappa = Coefficient(kappa);
    c.derive_missing_bounds();
    return c;
}

BeamSystem make_system(double ell, double rho, double mu, double r, double kappa,
                       std::size_t n_elems) {
    return BeamSystem::build(make_coeffs(ell, rho, mu, r, kappa),
                             SpaceMesh::uniform(ell, n_elems));
}

py::dict bundle_to_dict(const ConstantBundle& b) {
    py::dict d;
    d["ell"] = b.ell;
    d["T"] = b.T;
    d["alpha"] = b.alpha;
    d["c_star"] = b.c_star;
    d["c0_sq"] = b.c0sq;
    d["r1"] = b.r1;
    d["r2"] = b.r2;
    d["r3"] = b.r3;
    d["r4"] = b.r4;
    d["c1_sq"] = b.c1sq;
    d["c5_sq"] = b.c5sq;
    d["c6_sq"] = b.c6sq;
    d["c7_sq"] = b.c7sq;
    d["c9_sq"] = b.c9sq;
    d["c10_sq"] = b.c10sq;
    d["l0_sq"] = b.l0sq;
    d["l1_sq"] = b.l1sq;
    d["l2_sq"] = b.l2sq;
    d["l3_sq"] = b.l3sq;
    d["kappa0_required"] = b.kappa0_required;
    d["c_st"] = b.c_st;
    d["alpha_sq_threshold"] = b.alpha_sq_threshold;
    d["alpha_condition"] = b.alpha_condition;
    d["c_st_tilde"] = b.c_st_tilde;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Damped cantilever simulation and boundary-source recovery";

    m.def(
        "simulate",
        [](double ell, double rho, double mu, double r, double kappa, std::size_t n_elems,
           double T, std::size_t n_steps, const std::vector<double>& g) {
            const TimeGrid grid(T, n_steps);
            const BeamSystem sys = make_system(ell, rho, mu, r, kappa, n_elems);
            const ForwardSolution fwd = solve_direct(sys, grid, g);
            py::dict out;
            std::vector<double> t(grid.size());
            for (std::size_t k = 0; k < t.size(); ++k) t[k] = grid.t(k);
            out["t"] = t;
            out["nu"] = fwd.deflection.values;
            out["omega"] = fwd.moment.values;
            const EnergyReport rep = energy_residual(sys, fwd, g);
            out["max_rel_energy_residual"] = rep.max_rel_residual;
            return out;
        },
        py::arg("ell"), py::arg("rho"), py::arg("mu"), py::arg("r"), py::arg("kappa"),
        py::arg("n_elems"), py::arg("T"), py::arg("n_steps"), py::arg("g"),
        "Direct solve with a constant-coefficient beam; returns traces");

    m.def(
        "reconstruct",
        [](double ell, double rho, double mu, double r, double kappa, std::size_t n_elems,
           double T, std::size_t n_steps, const std::vector<double>& data_values, double delta,
           const std::string& problem, double alpha, unsigned max_iters) {
            const TimeGrid grid(T, n_steps);
            const BeamSystem sys = make_system(ell, rho, mu, r, kappa, n_elems);
            MeasurementTrace data;
            data.grid = grid;
            data.values = data_values;
            data.noise_level = delta;
            TikhonovConfig tc;
            if (problem == "ibvp1") {
                tc.problem = InverseProblem::TipDeflection;
                tc.reg_order = 1;
                data.kind = MeasurementKind::TipDeflection;
            } else if (problem == "ibvp2") {
                tc.problem = InverseProblem::RootMoment;
                tc.reg_order = 3;
                data.kind = MeasurementKind::RootMoment;
            } else {
                throw ConfigError("problem must be 'ibvp1' or 'ibvp2'");
            }
            tc.alpha = alpha;
            tc.max_iters = max_iters;
            SourceSignal g0(grid, std::vector<double>(grid.size(), 0.0),
                            tc.problem == InverseProblem::TipDeflection ? SignalClass::G1
                                                                        : SignalClass::G3);
            const ReconstructionResult rec = landweber(sys, g0, data, tc);
            py::dict out;
            out["g"] = rec.g.values;
            out["iterations"] = rec.history.empty() ? 0u : rec.history.back().iter;
            out["final_misfit"] = rec.final_misfit;
            out["final_residual_norm"] = rec.final_residual_norm;
            switch (rec.stop) {
                case StopReason::Morozov: out["stop"] = "morozov"; break;
                case StopReason::SmallGradient: out["stop"] = "small_gradient"; break;
                default: out["stop"] = "max_iters";
            }
            std::vector<double> js;
            js.reserve(rec.history.size());
            for (const auto& h : rec.history) js.push_back(h.J);
            out["J_history"] = js;
            return out;
        },
        py::arg("ell"), py::arg("rho"), py::arg("mu"), py::arg("r"), py::arg("kappa"),
        py::arg("n_elems"), py::arg("T"), py::arg("n_steps"), py::arg("data"),
        py::arg("delta") = 0.0, py::arg("problem") = "ibvp1", py::arg("alpha") = 0.0,
        py::arg("max_iters") = 50,
        "Projected Landweber reconstruction from a boundary trace");

    m.def(
        "add_noise",
        [](const std::vector<double>& values, double T, double delta, std::uint64_t seed) {
            MeasurementTrace tr;
            tr.grid = TimeGrid(T, values.size() - 1);
            tr.values = values;
            return add_noise(tr, delta, seed).values;
        },
        py::arg("values"), py::arg("T"), py::arg("delta"), py::arg("seed") = 0,
        "Additive Gaussian noise scaled to a relative trace norm");

    m.def(
        "evaluate_constants",
        [](double ell, py::dict bounds, double T, double alpha) {
            CoefficientBounds b;
            b.rho0 = bounds["rho0"].cast<double>();
            b.rho1 = bounds["rho1"].cast<double>();
            b.mu0 = bounds.contains("mu0") ? bounds["mu0"].cast<double>() : 0.0;
            b.mu1 = bounds["mu1"].cast<double>();
            b.r0 = bounds["r0"].cast<double>();
            b.r1 = bounds["r1"].cast<double>();
            b.kappa0 = bounds["kappa0"].cast<double>();
            b.kappa1 = bounds["kappa1"].cast<double>();
            return bundle_to_dict(evaluate_constants(ell, b, T, alpha));
        },
        py::arg("ell"), py::arg("bounds"), py::arg("T"), py::arg("alpha"),
        "Evaluate the full analysis constants bundle");

    m.def("kappa0_lower_bound", &kappa0_lower_bound, py::arg("ell"), py::arg("r0"),
          py::arg("T"), py::arg("alpha"));
    m.def("c_st", &c_st, py::arg("ell"), py::arg("r0"), py::arg("T"), py::arg("kappa0"));

    m.def(
        "stability_table",
        [](const std::vector<std::pair<double, double>>& rows, double ell, double r0) {
            py::list out;
            for (const auto& r : stability_table(rows, ell, r0)) {
                py::dict d;
                d["T"] = r.T;
                d["alpha"] = r.alpha;
                d["kappa0"] = r.kappa0;
                d["c_st"] = r.c_st;
                out.append(d);
            }
            return out;
        },
        py::arg("rows"), py::arg("ell") = 0.5, py::arg("r0") = 1.0,
        "(kappa0, C_ST) rows over (T, alpha) pairs");
    m.def("default_stability_rows", &default_stability_rows);

    m.def(
        "discrete_seminorm",
        [](const std::vector<double>& values, double dt, unsigned m) {
            return discrete_seminorm(values, dt, m);
        },
        py::arg("values"), py::arg("dt"), py::arg("m"));
    m.def(
        "sobolev_norm",
        [](const std::vector<double>& values, double dt, unsigned m) {
            return sobolev_norm(values, dt, m);
        },
        py::arg("values"), py::arg("dt"), py::arg("m"));
    m.def(
        "project_consistency",
        [](std::vector<double> values, double dt, int klass) {
            if (klass < 1 || klass > 3) throw ConfigError("klass must be 1, 2 or 3");
            project_consistency(values, dt, static_cast<SignalClass>(klass));
            return values;
        },
        py::arg("values"), py::arg("dt"), py::arg("klass"),
        "Zero the first klass samples by subtracting the minimal interpolant");
}

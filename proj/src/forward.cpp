#include "kvbeam/forward.hpp"

#include <cmath>

namespace kvbeam {

namespace {

// Centered first differences, one-sided second order at the ends.
std::vector<double> centered_derivative(const std::vector<double>& y, double dt) {
    const std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) {
        if (n == 2) d[0] = d[1] = (y[1] - y[0]) / dt;
        return d;
    }
    d[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * dt);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) / (2 * dt);
    d[n - 1] = (3 * y[n - 1] - 4 * y[n - 2] + y[n - 3]) / (2 * dt);
    return d;
}

}  // namespace

ForwardSolution solve_direct(const BeamSystem& sys, const TimeGrid& grid,
                             const std::vector<double>& g,
                             const std::function<double(double, double)>& body_force,
                             const Eigen::VectorXd* u0, const Eigen::VectorXd* v0) {
    if (g.size() != grid.size())
        throw std::invalid_argument("solve_direct: source samples do not match time grid");
    const Eigen::Index n = sys.ops.mass.rows();

    std::vector<Eigen::VectorXd> loads(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        loads[k] = shear_load(sys.loads, static_cast<std::size_t>(n), g[k]);
        if (body_force) {
            const double t = grid.t(k);
            loads[k] += body_load(sys.mesh, [&](double x) { return body_force(x, t); });
        }
    }

    Eigen::VectorXd zu = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd& iu = u0 ? *u0 : zu;
    const Eigen::VectorXd& iv = v0 ? *v0 : zu;

    const Eigen::MatrixXd damping = sys.ops.damp_mu + sys.ops.stiff_kappa;
    ForwardSolution fwd;
    fwd.grid = grid;
    fwd.traj = integrate(sys.ops.mass, damping, sys.ops.stiff_r, loads, iu, iv, grid.dt());

    const auto tip = static_cast<Eigen::Index>(sys.loads.tip_deflection_index);
    const double ell = sys.coeffs.ell;
    const double r0 = sys.coeffs.r(0.0);
    const double k0 = sys.coeffs.kappa(0.0);

    fwd.deflection.grid = grid;
    fwd.deflection.kind = MeasurementKind::TipDeflection;
    fwd.deflection.values.resize(grid.size());
    fwd.moment.grid = grid;
    fwd.moment.kind = MeasurementKind::RootMoment;
    fwd.moment.values.resize(grid.size());
    fwd.moment_direct = fwd.moment;

    for (std::size_t k = 0; k < grid.size(); ++k) {
        fwd.deflection.values[k] = fwd.traj.u[k](tip);
        const double inertial = sys.loads.x_rho.dot(fwd.traj.a[k]) +
                                sys.loads.x_mu.dot(fwd.traj.v[k]);
        fwd.moment.values[k] = -(ell * g[k] - inertial);
        const double uxx0 = second_derivative_at_root(sys.mesh, expand_clamped(fwd.traj.u[k]));
        const double vxx0 = second_derivative_at_root(sys.mesh, expand_clamped(fwd.traj.v[k]));
        fwd.moment_direct.values[k] = -(r0 * uxx0 + k0 * vxx0);
    }
    return fwd;
}

MeasurementTrace observe_deflection(const ForwardSolution& fwd) { return fwd.deflection; }

MeasurementTrace observe_moment(const ForwardSolution& fwd) { return fwd.moment; }

EnergyReport energy_residual(const BeamSystem& sys, const ForwardSolution& fwd,
                             const std::vector<double>& g) {
    const std::size_t n = fwd.grid.size();
    const double dt = fwd.grid.dt();
    EnergyReport rep;
    rep.energy.resize(n);
    rep.dissipation.resize(n);
    rep.work.resize(n);
    rep.residual.resize(n);

    std::vector<double> rate_mu(n), rate_kappa(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& u = fwd.traj.u[k];
        const auto& v = fwd.traj.v[k];
        rep.energy[k] = v.dot(sys.ops.mass * v) + u.dot(sys.ops.stiff_r * u);
        rate_mu[k] = v.dot(sys.ops.damp_mu * v);
        rate_kappa[k] = v.dot(sys.ops.stiff_kappa * v);
    }

    const auto& nu = fwd.deflection.values;
    const std::vector<double> dg = centered_derivative(g, dt);

    double diss = 0.0, work_int = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            diss += dt * (rate_mu[k - 1] + rate_mu[k] + rate_kappa[k - 1] + rate_kappa[k]);
            work_int += 0.5 * dt * (dg[k - 1] * nu[k - 1] + dg[k] * nu[k]);
        }
        rep.dissipation[k] = diss;
        rep.work[k] = 2.0 * g[k] * nu[k] - 2.0 * g[0] * nu[0] - 2.0 * work_int;
        rep.residual[k] = rep.energy[k] + rep.dissipation[k] - rep.work[k] - rep.energy[0];
    }

    rep.peak_energy = 0.0;
    for (double e : rep.energy) rep.peak_energy = std::max(rep.peak_energy, e);
    double worst = 0.0;
    for (double r : rep.residual) worst = std::max(worst, std::abs(r));
    rep.max_rel_residual = rep.peak_energy > 0.0 ? worst / rep.peak_energy : worst;
    return rep;
}

TraceReport trace_inequality_check(const BeamSystem& sys, const ForwardSolution& fwd,
                                   const std::vector<double>& g) {
    TraceReport rep;
    const double ell = sys.coeffs.ell;
    const double T = fwd.grid.T;
    const double dt = fwd.grid.dt();

    double tip_margin = 0.0;
    for (std::size_t k = 0; k < fwd.grid.size(); ++k) {
        const auto& u = fwd.traj.u[k];
        const double lhs = fwd.deflection.values[k] * fwd.deflection.values[k];
        const double rhs = ell * ell * ell / 3.0 * u.dot(sys.ops.gram_xx * u);
        if (rhs > 0.0) tip_margin = std::max(tip_margin, lhs / rhs);
        else if (lhs > 0.0) tip_margin = std::numeric_limits<double>::infinity();
    }
    rep.tip_margin = tip_margin;
    rep.tip_ok = tip_margin <= 1.0 + 1e-9;

    const double dg = discrete_seminorm(g, dt, 1);
    double gmax = 0.0;
    for (double gv : g) gmax = std::max(gmax, gv * gv);
    const double rhs = T * dg * dg;
    rep.source_margin = rhs > 0.0 ? gmax / rhs
                                  : (gmax > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rep.source_ok = rep.source_margin <= 1.0 + 1e-9;
    return rep;
}

}  // namespace kvbeam

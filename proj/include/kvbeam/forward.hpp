#pragma once

#include <functional>

#include "kvbeam/fem.hpp"
#include "kvbeam/timestep.hpp"

namespace kvbeam {

/// Output of the direct solve: the full trajectory plus the two boundary
/// observations. The root moment comes from the integral identity
///   r(0) u_xx(0,t) + kappa(0) u_xxt(0,t) = ell g(t) - (x rho, u_tt) - (x mu, u_t)
/// (primary path); moment_direct extracts u_xx(0) from the first element's
/// shape functions as an independent cross-check.
struct ForwardSolution {
    TimeGrid grid;
    Trajectory traj;
    MeasurementTrace deflection;     // nu(t) = u(ell, t)
    MeasurementTrace moment;         // omega(t) = -(r u_xx + kappa u_xxt)(0, t)
    MeasurementTrace moment_direct;  // same quantity, direct extraction
};

/// Solve the damped beam driven by the tip shear g sampled on the grid.
/// Optional body force f(x, t) and nonzero initial data feed verification
/// runs; production use passes g only.
ForwardSolution solve_direct(const BeamSystem& sys, const TimeGrid& grid,
                             const std::vector<double>& g,
                             const std::function<double(double, double)>& body_force = {},
                             const Eigen::VectorXd* u0 = nullptr,
                             const Eigen::VectorXd* v0 = nullptr);

MeasurementTrace observe_deflection(const ForwardSolution& fwd);
MeasurementTrace observe_moment(const ForwardSolution& fwd);

/// Pointwise defect of the discrete energy identity
///   E(t) + 2 D_mu(t) + 2 D_kappa(t)
///     = E(0) + 2 g nu |_0^t - 2 int_0^t g' nu
/// with E = (u', rho u') + (u_xx, r u_xx) and cumulative trapezoid
/// dissipation integrals.
struct EnergyReport {
    std::vector<double> energy;       // E(t_k)
    std::vector<double> dissipation;  // 2 D_mu + 2 D_kappa cumulative
    std::vector<double> work;         // boundary work terms
    std::vector<double> residual;     // identity defect per node
    double peak_energy = 0.0;
    double max_rel_residual = 0.0;    // max |residual| / peak_energy
};

EnergyReport energy_residual(const BeamSystem& sys, const ForwardSolution& fwd,
                             const std::vector<double>& g);

/// Pointwise checks of the two trace inequalities
///   u(ell,t)^2 <= (ell^3/3) |u_xx(t)|^2   and   g(t)^2 <= T |g'|^2
/// on the discrete solution. Margins report max(lhs - rhs_bound) scaled.
struct TraceReport {
    bool tip_ok = true;
    bool source_ok = true;
    double tip_margin = 0.0;     // max_t lhs/rhs for the tip inequality
    double source_margin = 0.0;  // max_t lhs/rhs for the source inequality
};

TraceReport trace_inequality_check(const BeamSystem& sys, const ForwardSolution& fwd,
                                   const std::vector<double>& g);

}  // namespace kvbeam

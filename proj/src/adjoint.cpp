#include "kvbeam/adjoint.hpp"

#include <cmath>

namespace kvbeam {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> derivative1(const std::vector<double>& y, double dt) {
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

std::vector<double> derivative2(const std::vector<double>& y, double dt) {
    const std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    if (n < 4) return d;
    const double dt2 = dt * dt;
    d[0] = (2 * y[0] - 5 * y[1] + 4 * y[2] - y[3]) / dt2;
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - 2 * y[k] + y[k - 1]) / dt2;
    d[n - 1] = (2 * y[n - 1] - 5 * y[n - 2] + 4 * y[n - 3] - y[n - 4]) / dt2;
    return d;
}

}  // namespace

AdjointSolution solve_adjoint_neumann(const BeamSystem& sys, const TimeGrid& grid,
                                      const std::vector<double>& xi) {
    if (xi.size() != grid.size())
        throw std::invalid_argument("solve_adjoint_neumann: input does not match time grid");
    const Eigen::Index n = sys.ops.mass.rows();

    std::vector<Eigen::VectorXd> loads(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        loads[k] = shear_load(sys.loads, static_cast<std::size_t>(n), xi[k]);

    const Eigen::MatrixXd damping = sys.ops.damp_mu + sys.ops.stiff_kappa;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);

    AdjointSolution adj;
    adj.grid = grid;
    adj.traj = integrate_reversed(sys.ops.mass, damping, sys.ops.stiff_r, loads, zero, zero,
                                  grid.dt());
    adj.terminal_mismatch = std::abs(xi.back()) > 1e-10 * std::max(1.0, max_abs(xi));

    const auto tip = static_cast<Eigen::Index>(sys.loads.tip_deflection_index);
    adj.tip.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) adj.tip[k] = adj.traj.u[k](tip);
    return adj;
}

AdjointSolution solve_adjoint_dirichlet(const BeamSystem& sys, const TimeGrid& grid,
                                        const std::vector<double>& theta) {
    if (theta.size() != grid.size())
        throw std::invalid_argument("solve_adjoint_dirichlet: input does not match time grid");
    const double dt = grid.dt();

    const std::vector<double> theta1 = derivative1(theta, dt);
    const std::vector<double> theta2 = derivative2(theta, dt);

    std::vector<Eigen::VectorXd> loads(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        loads[k] = lifting_load(sys.loads, theta1[k], theta2[k]);

    const Eigen::MatrixXd damping = sys.ops.damp_mu + sys.ops.stiff_kappa;

    // Terminal data of the lifted state, -x theta(T) and -x theta'(T),
    // imposed weakly: the pointwise interpolant of x is not admissible
    // (its root slope is clamped to zero), and pairing it with the
    // bending part of the damping matrix leaves an O(1) corner defect in
    // the duality relation whenever theta(T) != 0. Enforcing instead
    //   M psi(T)  = -theta(T) (x rho, H_i)
    //   M psi'(T) = (C_mu + K_kappa) psi(T) + theta(T) (x mu, H_i)
    //               - theta'(T) (x rho, H_i)
    // cancels the time boundary terms of the pairing exactly, for inputs
    // that do not vanish at t = T as well. Both reduce to zero for
    // compatible inputs.
    Eigen::LLT<Eigen::MatrixXd> mass_llt(sys.ops.mass);
    const Eigen::VectorXd uT = -theta.back() * mass_llt.solve(sys.loads.x_rho);
    const Eigen::VectorXd vT = mass_llt.solve(
        damping * uT + theta.back() * sys.loads.x_mu - theta1.back() * sys.loads.x_rho);

    AdjointSolution adj;
    adj.grid = grid;
    adj.traj = integrate_reversed(sys.ops.mass, damping, sys.ops.stiff_r, loads, uT, vT,
                                  grid.dt());
    adj.terminal_mismatch = std::abs(theta.back()) > 1e-10 * std::max(1.0, max_abs(theta));

    const auto tip = static_cast<Eigen::Index>(sys.loads.tip_deflection_index);
    const double ell = sys.coeffs.ell;
    adj.tip.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        adj.tip[k] = adj.traj.u[k](tip) + ell * theta[k];
    return adj;
}

}  // namespace kvbeam

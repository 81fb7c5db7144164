#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kvbeam/model.hpp"

namespace kvbeam {

/// Newmark parameters. Default: average acceleration (beta = 1/4,
/// gamma = 1/2), implicit and unconditionally stable, second order.
struct NewmarkConfig {
    double beta = 0.25;
    double gamma = 0.5;
};

/// Discrete states at every time node (displacement, velocity, acceleration
/// on the free DOFs), plus the step size that produced them.
struct Trajectory {
    std::vector<Eigen::VectorXd> u;
    std::vector<Eigen::VectorXd> v;
    std::vector<Eigen::VectorXd> a;
    double dt = 0.0;

    std::size_t size() const { return u.size(); }
};

/// Integrate M u'' + C u' + K u = loads[k] at t_k = k dt from the initial
/// state (u0, v0). loads must hold one vector per time node. The initial
/// acceleration solves the equation of motion at t = 0; the effective
/// operator is factored once and reused for every step.
Trajectory integrate(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                     const Eigen::MatrixXd& K, const std::vector<Eigen::VectorXd>& loads,
                     const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double dt,
                     const NewmarkConfig& nc = {});

/// Integrate the reversed-time (terminal value, sign-flipped damping)
/// problem M u'' - C u' + K u = loads[k], u(T) = uT, u'(T) = vT by the
/// substitution tau = T - t, which turns it into a standard initial value
/// problem handled by integrate(). loads are given in forward time order
/// and the returned trajectory is re-reflected to forward time order (the
/// internal run's velocities change sign).
Trajectory integrate_reversed(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                              const Eigen::MatrixXd& K,
                              const std::vector<Eigen::VectorXd>& loads,
                              const Eigen::VectorXd& uT, const Eigen::VectorXd& vT, double dt,
                              const NewmarkConfig& nc = {});

}  // namespace kvbeam

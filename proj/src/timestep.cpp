#include "kvbeam/timestep.hpp"

#include <algorithm>

namespace kvbeam {

Trajectory integrate(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                     const Eigen::MatrixXd& K, const std::vector<Eigen::VectorXd>& loads,
                     const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double dt,
                     const NewmarkConfig& nc) {
    const Eigen::Index n = M.rows();
    if (loads.size() < 2) throw std::invalid_argument("integrate: need at least two load nodes");
    if (u0.size() != n || v0.size() != n)
        throw std::invalid_argument("integrate: state size does not match operators");
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    const double beta = nc.beta, gamma = nc.gamma;
    if (!(beta > 0.0)) throw std::invalid_argument("integrate: beta must be positive");

    const std::size_t n_steps = loads.size() - 1;

    Eigen::LLT<Eigen::MatrixXd> mass_llt(M);
    if (mass_llt.info() != Eigen::Success)
        throw SolverError("integrate: mass matrix is not positive definite");

    // Effective operator, factored once.
    const double a0 = 1.0 / (beta * dt * dt);
    const double a1 = gamma / (beta * dt);
    Eigen::MatrixXd Keff = a0 * M + a1 * C + K;
    Eigen::LLT<Eigen::MatrixXd> keff_llt(Keff);
    if (keff_llt.info() != Eigen::Success)
        throw SolverError("integrate: effective operator is not positive definite");

    Trajectory tr;
    tr.dt = dt;
    tr.u.reserve(n_steps + 1);
    tr.v.reserve(n_steps + 1);
    tr.a.reserve(n_steps + 1);
    tr.u.push_back(u0);
    tr.v.push_back(v0);
    tr.a.push_back(mass_llt.solve(loads[0] - C * v0 - K * u0));

    const double c0 = 1.0 / (beta * dt);
    const double c1 = 1.0 / (2.0 * beta) - 1.0;
    const double c2 = gamma / beta - 1.0;
    const double c3 = dt * (gamma / (2.0 * beta) - 1.0);

    for (std::size_t k = 0; k < n_steps; ++k) {
        const Eigen::VectorXd& uk = tr.u[k];
        const Eigen::VectorXd& vk = tr.v[k];
        const Eigen::VectorXd& ak = tr.a[k];

        Eigen::VectorXd rhs = loads[k + 1] + M * (a0 * uk + c0 * vk + c1 * ak) +
                              C * (a1 * uk + c2 * vk + c3 * ak);
        Eigen::VectorXd un = keff_llt.solve(rhs);
        Eigen::VectorXd an = a0 * (un - uk) - c0 * vk - c1 * ak;
        Eigen::VectorXd vn = vk + dt * ((1.0 - gamma) * ak + gamma * an);

        tr.u.push_back(std::move(un));
        tr.v.push_back(std::move(vn));
        tr.a.push_back(std::move(an));
    }
    return tr;
}

Trajectory integrate_reversed(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C,
                              const Eigen::MatrixXd& K,
                              const std::vector<Eigen::VectorXd>& loads,
                              const Eigen::VectorXd& uT, const Eigen::VectorXd& vT, double dt,
                              const NewmarkConfig& nc) {
    std::vector<Eigen::VectorXd> reflected(loads.rbegin(), loads.rend());
    Trajectory back = integrate(M, C, K, reflected, uT, -vT, dt, nc);

    Trajectory tr;
    tr.dt = dt;
    const std::size_t n = back.size();
    tr.u.resize(n);
    tr.v.resize(n);
    tr.a.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        tr.u[k] = back.u[n - 1 - k];
        tr.v[k] = -back.v[n - 1 - k];
        tr.a[k] = back.a[n - 1 - k];
    }
    return tr;
}

}  // namespace kvbeam

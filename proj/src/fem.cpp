#include "kvbeam/fem.hpp"

#include <array>
#include <cmath>

namespace kvbeam {

namespace {

// 4-point Gauss rule on [0, 1], exact to polynomial degree 7.
struct QuadRule {
    std::array<double, 4> xi;
    std::array<double, 4> w;
};

QuadRule gauss4() {
    const double a = 0.3399810435848563;
    const double b = 0.8611363115940526;
    const double wa = 0.6521451548625461;
    const double wb = 0.34785484513745385;
    QuadRule q;
    q.xi = {0.5 * (1 - b), 0.5 * (1 - a), 0.5 * (1 + a), 0.5 * (1 + b)};
    q.w = {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb};
    return q;
}

// Hermite shape functions on an element of length h, local coordinate
// xi in [0, 1]: [w_left, theta_left, w_right, theta_right].
std::array<double, 4> shape(double xi, double h) {
    return {1 - 3 * xi * xi + 2 * xi * xi * xi, h * xi * (1 - xi) * (1 - xi),
            xi * xi * (3 - 2 * xi), h * xi * xi * (xi - 1)};
}

std::array<double, 4> shape_dx(double xi, double h) {
    return {6 * xi * (xi - 1) / h, (1 - xi) * (1 - 3 * xi), 6 * xi * (1 - xi) / h,
            xi * (3 * xi - 2)};
}

std::array<double, 4> shape_dxx(double xi, double h) {
    return {(12 * xi - 6) / (h * h), (6 * xi - 4) / h, (6 - 12 * xi) / (h * h),
            (6 * xi - 2) / h};
}

using ShapeFn = std::array<double, 4> (*)(double, double);

// Accumulate (coef N_i, N_j) over all elements into a full-DOF matrix.
void accumulate(Eigen::MatrixXd& full, const SpaceMesh& mesh, const Coefficient& coef,
                ShapeFn fn) {
    const QuadRule q = gauss4();
    for (std::size_t e = 0; e < mesh.n_elems(); ++e) {
        const double h = mesh.h(e);
        const double x0 = mesh.nodes[e];
        Eigen::Matrix4d ke = Eigen::Matrix4d::Zero();
        for (int g = 0; g < 4; ++g) {
            const double x = x0 + h * q.xi[g];
            const auto n = fn(q.xi[g], h);
            const double s = q.w[g] * h * coef(x);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) ke(i, j) += s * n[i] * n[j];
        }
        const std::size_t base = 2 * e;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) full(base + i, base + j) += ke(i, j);
    }
}

Eigen::MatrixXd strip_clamped(const Eigen::MatrixXd& full) {
    const Eigen::Index n = full.rows() - 2;
    return full.block(2, 2, n, n);
}

}  // namespace

AssembledOperators assemble(const BeamCoefficients& c, const SpaceMesh& mesh) {
    const std::size_t nd = mesh.dof_count();
    auto zero = [&] { return Eigen::MatrixXd::Zero(nd, nd); };
    Eigen::MatrixXd mass = zero(), damp = zero(), kr = zero(), kk = zero();
    Eigen::MatrixXd g0 = zero(), gx = zero(), gxx = zero();

    const Coefficient one{1.0};
    accumulate(mass, mesh, c.rho, shape);
    accumulate(damp, mesh, c.mu, shape);
    accumulate(kr, mesh, c.r, shape_dxx);
    accumulate(kk, mesh, c.kappa, shape_dxx);
    accumulate(g0, mesh, one, shape);
    accumulate(gx, mesh, one, shape_dx);
    accumulate(gxx, mesh, one, shape_dxx);

    AssembledOperators ops;
    ops.mass = strip_clamped(mass);
    ops.damp_mu = strip_clamped(damp);
    ops.stiff_r = strip_clamped(kr);
    ops.stiff_kappa = strip_clamped(kk);
    ops.gram0 = strip_clamped(g0);
    ops.gram_x = strip_clamped(gx);
    ops.gram_xx = strip_clamped(gxx);
    return ops;
}

LoadMap build_load_map(const BeamCoefficients& c, const SpaceMesh& mesh) {
    LoadMap lm;
    lm.tip_deflection_index = mesh.tip_deflection_free_index();
    auto moment_vec = [&](const Coefficient& coef) {
        return body_load(mesh, [&](double x) { return x * coef(x); });
    };
    lm.x_rho = moment_vec(c.rho);
    lm.x_mu = moment_vec(c.mu);
    return lm;
}

Eigen::VectorXd shear_load(const LoadMap& lm, std::size_t n_free, double g) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_free));
    f(static_cast<Eigen::Index>(lm.tip_deflection_index)) = g;
    return f;
}

Eigen::VectorXd lifting_load(const LoadMap& lm, double theta1, double theta2) {
    return theta1 * lm.x_mu - theta2 * lm.x_rho;
}

Eigen::VectorXd body_load(const SpaceMesh& mesh, const std::function<double(double)>& f) {
    const QuadRule q = gauss4();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dof_count()));
    for (std::size_t e = 0; e < mesh.n_elems(); ++e) {
        const double h = mesh.h(e);
        const double x0 = mesh.nodes[e];
        for (int g = 0; g < 4; ++g) {
            const double x = x0 + h * q.xi[g];
            const auto n = shape(q.xi[g], h);
            const double s = q.w[g] * h * f(x);
            for (int i = 0; i < 4; ++i) full(static_cast<Eigen::Index>(2 * e) + i) += s * n[i];
        }
    }
    return full.segment(2, full.size() - 2);
}

double second_derivative_at_root(const SpaceMesh& mesh, const Eigen::VectorXd& full_state) {
    if (full_state.size() != static_cast<Eigen::Index>(mesh.dof_count()))
        throw std::invalid_argument("second_derivative_at_root: wrong state size");
    const double h = mesh.h(0);
    const auto n = shape_dxx(0.0, h);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += n[i] * full_state(i);
    return s;
}

Eigen::VectorXd expand_clamped(const Eigen::VectorXd& free_state) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(free_state.size() + 2);
    full.tail(free_state.size()) = free_state;
    return full;
}

Eigen::VectorXd interpolate_free(const SpaceMesh& mesh,
                                 const std::function<double(double)>& value,
                                 const std::function<double(double)>& slope) {
    const std::size_t nn = mesh.nodes.size();
    Eigen::VectorXd free = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * nn - 2));
    for (std::size_t i = 1; i < nn; ++i) {
        free(static_cast<Eigen::Index>(2 * i - 2)) = value(mesh.nodes[i]);
        free(static_cast<Eigen::Index>(2 * i - 1)) = slope(mesh.nodes[i]);
    }
    return free;
}

BeamSystem BeamSystem::build(const BeamCoefficients& c, const SpaceMesh& mesh) {
    BeamCoefficients cc = c;
    cc.derive_missing_bounds();
    auto bad = validate_coefficients(cc);
    if (!bad.empty()) {
        std::string msg = "invalid beam coefficients:";
        for (const auto& b : bad) msg += " " + b + ";";
        throw ConfigError(msg);
    }
    if (std::abs(mesh.nodes.front()) > 0.0 || std::abs(mesh.nodes.back() - cc.ell) > 1e-12 * cc.ell)
        throw ConfigError("mesh does not span [0, ell]");
    BeamSystem s{cc, mesh, assemble(cc, mesh), build_load_map(cc, mesh)};
    return s;
}

}  // namespace kvbeam

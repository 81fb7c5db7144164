#pragma once

#include <Eigen/Dense>
#include <functional>

#include "kvbeam/model.hpp"

namespace kvbeam {

/// Matrices of the semi-discrete system on the free (unclamped) DOFs:
///   mass u'' + (damp_mu + stiff_kappa) u' + stiff_r u = loads(t).
/// The unit-coefficient Gram matrices are kept for norm evaluations.
struct AssembledOperators {
    Eigen::MatrixXd mass;         // (rho H_i, H_j)
    Eigen::MatrixXd damp_mu;      // (mu H_i, H_j)
    Eigen::MatrixXd stiff_r;      // (r H_i'', H_j'')
    Eigen::MatrixXd stiff_kappa;  // (kappa H_i'', H_j'')
    Eigen::MatrixXd gram0;        // (H_i, H_j)
    Eigen::MatrixXd gram_x;       // (H_i', H_j')
    Eigen::MatrixXd gram_xx;      // (H_i'', H_j'')
};

/// Precomputed load ingredients: where the tip shear acts and the moment
/// vectors (x rho, H_i), (x mu, H_i) used by the lifting load and the
/// root-moment identity.
struct LoadMap {
    std::size_t tip_deflection_index = 0;
    Eigen::VectorXd x_rho;
    Eigen::VectorXd x_mu;
};

/// Cubic Hermite (C^1) assembly with clamped DOFs at x = 0 eliminated.
/// Element integrals use 4-point Gauss quadrature, exact for every
/// polynomial integrand appearing here (degree <= 7).
AssembledOperators assemble(const BeamCoefficients& c, const SpaceMesh& mesh);

LoadMap build_load_map(const BeamCoefficients& c, const SpaceMesh& mesh);

/// Load vector of the tip shear g acting on the tip deflection DOF.
Eigen::VectorXd shear_load(const LoadMap& lm, std::size_t n_free, double g);

/// Load vector theta1 * (x mu, H_i) - theta2 * (x rho, H_i) of the lifted
/// slope-driven problem, with theta1 = theta', theta2 = theta''.
Eigen::VectorXd lifting_load(const LoadMap& lm, double theta1, double theta2);

/// Consistent load vector (f, H_i) of a body force sampled at quadrature
/// points, on the free DOFs.
Eigen::VectorXd body_load(const SpaceMesh& mesh, const std::function<double(double)>& f);

/// Second derivative u_xx(0) of the FE function given by a full state
/// vector (clamped DOFs included): evaluates the first element's shape
/// functions at the root.
double second_derivative_at_root(const SpaceMesh& mesh, const Eigen::VectorXd& full_state);

/// Extend a free-DOF vector with the two clamped root DOFs (zeros).
Eigen::VectorXd expand_clamped(const Eigen::VectorXd& free_state);

/// Free-DOF interpolant of a function given by value and slope callables.
Eigen::VectorXd interpolate_free(const SpaceMesh& mesh,
                                 const std::function<double(double)>& value,
                                 const std::function<double(double)>& slope);

/// A beam plus its assembled operators; the unit of work every solver
/// consumes. Assemble once, reuse everywhere.
struct BeamSystem {
    BeamCoefficients coeffs;
    SpaceMesh mesh;
    AssembledOperators ops;
    LoadMap loads;

    static BeamSystem build(const BeamCoefficients& c, const SpaceMesh& mesh);
};

}  // namespace kvbeam

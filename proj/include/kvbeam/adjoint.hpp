#pragma once

#include "kvbeam/fem.hpp"
#include "kvbeam/timestep.hpp"

namespace kvbeam {

/// Solution of a terminal value adjoint problem, re-reflected to forward
/// time order. tip holds the adjoint tip trace phi(ell, t_k), the quantity
/// every gradient formula consumes.
struct AdjointSolution {
    TimeGrid grid;
    Trajectory traj;
    std::vector<double> tip;
    /// Set when the driving data violates the natural compatibility
    /// condition at t = T (nonzero terminal input). The solve proceeds.
    bool terminal_mismatch = false;
};

/// Adjoint of the tip deflection observation: backward problem with
/// sign-flipped damping, zero terminal data and tip shear input xi(t),
///   rho phi_tt - mu phi_t + (r phi_xx)_xx - (kappa phi_xxt)_xx = 0,
///   [shear BC at the tip] = xi(t),  phi(T) = phi_t(T) = 0.
/// The substitution tau = T - t turns it into the direct problem driven by
/// +xi(T - tau); the result returns in forward time order.
AdjointSolution solve_adjoint_neumann(const BeamSystem& sys, const TimeGrid& grid,
                                      const std::vector<double>& xi);

/// Adjoint of the root moment observation: backward problem whose root
/// slope is driven, phi_x(0, t) = theta(t). The lifting
/// psi = phi - x theta(t) converts it to a clamped problem with body load
///   theta'(t) (x mu, H_i) - theta''(t) (x rho, H_i)
/// and terminal data psi(T) = -x theta(T), psi_t(T) = -x theta'(T). The
/// terminal data is imposed weakly (mass-projected, with the corner term
/// that makes the duality pairing exact for theta(T) != 0; see the source).
/// theta', theta'' use centered differences (second order one-sided at the
/// ends). tip returns phi(ell, t) = psi(ell, t) + ell theta(t).
AdjointSolution solve_adjoint_dirichlet(const BeamSystem& sys, const TimeGrid& grid,
                                        const std::vector<double>& theta);

}  // namespace kvbeam

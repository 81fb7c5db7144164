#include <doctest.h>

#include <cmath>

#include "kvbeam/adjoint.hpp"
#include "kvbeam/forward.hpp"

using namespace kvbeam;

namespace {

BeamCoefficients reference_beam() {
    BeamCoefficients c;
    c.mu = Coefficient(0.1);
    c.derive_missing_bounds();
    return c;
}

// trapezoid pairing of two time series
double pair_l2(const std::vector<double>& a, const std::vector<double>& b, double dt) {
    return l2_inner(a, b, dt);
}

}  // namespace

TEST_CASE("zero input gives a zero adjoint state") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 8));
    TimeGrid g(1.0, 100);
    std::vector<double> zero(g.size(), 0.0);
    auto an = solve_adjoint_neumann(sys, g, zero);
    auto ad = solve_adjoint_dirichlet(sys, g, zero);
    for (double v : an.tip) CHECK(v == 0.0);
    for (double v : ad.tip) CHECK(v == 0.0);
    CHECK(!an.terminal_mismatch);
    CHECK(!ad.terminal_mismatch);
}

TEST_CASE("adjoint solves end at exactly zero terminal state") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 6));
    TimeGrid g(1.0, 120);
    std::vector<double> xi(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double s = std::sin(M_PI * g.t(k) / g.T);
        xi[k] = s * s;
    }
    auto an = solve_adjoint_neumann(sys, g, xi);
    CHECK(an.traj.u.back().norm() == 0.0);
    CHECK(an.traj.v.back().norm() == 0.0);
    CHECK(!an.terminal_mismatch);
}

TEST_CASE("tip traces are linear in the driving input") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 6));
    TimeGrid g(0.8, 150);
    std::vector<double> x1(g.size()), x2(g.size()), xs(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double t = g.t(k);
        x1[k] = std::sin(2.0 * M_PI * t);
        x2[k] = t * (g.T - t);
        xs[k] = x1[k] + x2[k];
    }
    auto a1 = solve_adjoint_neumann(sys, g, x1);
    auto a2 = solve_adjoint_neumann(sys, g, x2);
    auto as = solve_adjoint_neumann(sys, g, xs);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(std::abs(as.tip[k] - a1.tip[k] - a2.tip[k]) < 1e-11);

    auto d1 = solve_adjoint_dirichlet(sys, g, x2);
    auto d2 = solve_adjoint_dirichlet(sys, g, x2);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(d1.tip[k] == d2.tip[k]);
}

TEST_CASE("deflection duality: forward and adjoint pairings coincide") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 16));
    TimeGrid g(1.0, 500);
    std::vector<double> dg(g.size()), xi(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double t = g.t(k);
        double s = std::sin(M_PI * t / g.T);
        dg[k] = t * s * s;
        xi[k] = std::sin(2.0 * M_PI * t / g.T) * (g.T - t);
    }
    auto fwd = solve_direct(sys, g, dg);
    auto adj = solve_adjoint_neumann(sys, g, xi);
    double lhs = pair_l2(fwd.deflection.values, xi, g.dt());
    double rhs = pair_l2(adj.tip, dg, g.dt());
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    REQUIRE(scale > 0.0);
    CHECK(std::abs(lhs - rhs) / scale < 1e-2);
}

TEST_CASE("moment duality: slope-driven adjoint matches the moment pairing") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 16));
    TimeGrid g(1.0, 500);
    std::vector<double> dg(g.size()), theta(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double t = g.t(k);
        double s = std::sin(M_PI * t / g.T);
        dg[k] = t * t * s;
        theta[k] = s * s;  // theta(T) = theta'(T) = 0
    }
    auto fwd = solve_direct(sys, g, dg);
    auto adj = solve_adjoint_dirichlet(sys, g, theta);
    std::vector<double> neg_moment(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) neg_moment[k] = -fwd.moment.values[k];
    double lhs = pair_l2(neg_moment, theta, g.dt());
    double rhs = pair_l2(adj.tip, dg, g.dt());
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    REQUIRE(scale > 0.0);
    CHECK(std::abs(lhs - rhs) / scale < 1e-2);
}

TEST_CASE("deflection duality holds to roundoff at any resolution") {
    // the averaged time stepping and trapezoid pairing make the shear-driven
    // problem discretely self-adjoint, not merely consistent
    auto defect = [&](std::size_t ne, std::size_t n) {
        auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, ne));
        TimeGrid g(1.0, n);
        std::vector<double> dg(g.size()), xi(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            double t = g.t(k);
            double s = std::sin(M_PI * t / g.T);
            dg[k] = t * s * s;
            xi[k] = s * s * (g.T - t);
        }
        auto fwd = solve_direct(sys, g, dg);
        auto adj = solve_adjoint_neumann(sys, g, xi);
        double lhs = pair_l2(fwd.deflection.values, xi, g.dt());
        double rhs = pair_l2(adj.tip, dg, g.dt());
        return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
    };
    CHECK(defect(8, 250) < 1e-10);
    CHECK(defect(8, 500) < 1e-10);
}

TEST_CASE("moment duality defect shrinks at second order under refinement") {
    auto defect = [&](std::size_t n) {
        auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 8));
        TimeGrid g(1.0, n);
        std::vector<double> dg(g.size()), theta(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            double t = g.t(k);
            double s = std::sin(M_PI * t / g.T);
            dg[k] = t * t * s;
            theta[k] = s * s;
        }
        auto fwd = solve_direct(sys, g, dg);
        auto adj = solve_adjoint_dirichlet(sys, g, theta);
        std::vector<double> neg(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) neg[k] = -fwd.moment.values[k];
        double lhs = pair_l2(neg, theta, g.dt());
        double rhs = pair_l2(adj.tip, dg, g.dt());
        return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
    };
    double d1 = defect(250);
    double d2 = defect(500);
    CHECK(d1 / d2 > 2.5);
    CHECK(d1 / d2 < 6.0);
}

TEST_CASE("terminal mismatch is flagged for incompatible data") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 4));
    TimeGrid g(1.0, 80);
    std::vector<double> xi(g.size(), 1.0);  // xi(T) != 0
    auto adj = solve_adjoint_neumann(sys, g, xi);
    CHECK(adj.terminal_mismatch);
    // the solve still runs and returns finite values
    for (double v : adj.tip) CHECK(std::isfinite(v));
}

TEST_CASE("neumann adjoint obeys the curvature a-priori bound") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 12));
    TimeGrid g(1.0, 400);
    std::vector<double> xi(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double s = std::sin(M_PI * g.t(k) / g.T);
        xi[k] = s * s;
    }
    auto adj = solve_adjoint_neumann(sys, g, xi);
    auto w = trapezoid_weights(g.size(), g.dt());
    double curv = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        curv += w[k] * adj.traj.u[k].dot(sys.ops.gram_xx * adj.traj.u[k]);
    const double T = g.T, ell = sys.coeffs.ell, r0 = sys.coeffs.bounds.r0;
    const double c0sq = std::exp(T) - 1.0;
    const double dxi = discrete_seminorm(xi, g.dt(), 1);
    const double bound = 4.0 * c0sq / (3.0 * r0 * r0) * (1.0 + T) * ell * ell * ell * dxi * dxi;
    CHECK(curv <= bound);
    CHECK(curv > 0.0);
}

TEST_CASE("moment duality survives inputs that do not vanish at the horizon") {
    // theta(T) = 1: the lifted terminal state has a nonzero root slope, so
    // naive pointwise terminal data would leave an O(1) defect in the
    // pairing. The weakly imposed terminal data keeps it at the
    // discretization level.
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 6));
    TimeGrid g(1.0, 200);
    std::vector<double> theta(g.size()), dg(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double t = g.t(k);
        double s = std::sin(M_PI * t / g.T);
        theta[k] = t;
        dg[k] = t * s * s;
    }
    auto adj = solve_adjoint_dirichlet(sys, g, theta);
    CHECK(adj.terminal_mismatch);
    auto fwd = solve_direct(sys, g, dg);
    std::vector<double> neg(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) neg[k] = -fwd.moment.values[k];
    double lhs = pair_l2(neg, theta, g.dt());
    double rhs = pair_l2(adj.tip, dg, g.dt());
    CHECK(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)) < 1e-3);
    // the lift still cancels at t = T up to the projection of x
    CHECK(std::abs(adj.tip.back()) < 1e-3);
}

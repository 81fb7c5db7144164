#include <doctest.h>

#include <cmath>

#include "kvbeam/fem.hpp"

using namespace kvbeam;

namespace {

BeamCoefficients reference_beam(double ell = 1.0) {
    BeamCoefficients c;
    c.ell = ell;
    c.rho = Coefficient(1.0);
    c.mu = Coefficient(0.1);
    c.r = Coefficient(1.0);
    c.kappa = Coefficient(1.0);
    c.derive_missing_bounds();
    return c;
}

}  // namespace

TEST_CASE("single element operators match the textbook matrices") {
    auto c = reference_beam();
    auto mesh = SpaceMesh::uniform(1.0, 1);
    auto ops = assemble(c, mesh);

    REQUIRE(ops.stiff_r.rows() == 2);
    // free DOFs: tip deflection, tip slope; h = 1, r = 1
    CHECK(ops.stiff_r(0, 0) == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(ops.stiff_r(0, 1) == doctest::Approx(-6.0).epsilon(1e-14));
    CHECK(ops.stiff_r(1, 1) == doctest::Approx(4.0).epsilon(1e-14));

    // consistent mass: 156/420, -22/420, 4/420 (quadrature exact at
    // degree 6, so these are exact rationals)
    CHECK(ops.mass(0, 0) == doctest::Approx(156.0 / 420.0).epsilon(1e-14));
    CHECK(ops.mass(0, 1) == doctest::Approx(-22.0 / 420.0).epsilon(1e-14));
    CHECK(ops.mass(1, 1) == doctest::Approx(4.0 / 420.0).epsilon(1e-14));

    // damp_mu is mu times the unit mass matrix here; stiff_kappa equals
    // stiff_r since kappa = r = 1
    CHECK(ops.damp_mu(0, 0) == doctest::Approx(0.1 * 156.0 / 420.0).epsilon(1e-14));
    CHECK((ops.stiff_kappa - ops.stiff_r).norm() == doctest::Approx(0.0));
    CHECK((ops.gram0 * 1.0 - ops.mass / 1.0).norm() == doctest::Approx(0.0));
}

TEST_CASE("zero density yields a zero mass matrix") {
    auto c = reference_beam();
    c.rho = Coefficient(0.0);
    auto ops = assemble(c, SpaceMesh::uniform(1.0, 4));
    CHECK(ops.mass.norm() == 0.0);
}

TEST_CASE("assembled operators are symmetric") {
    auto c = reference_beam();
    c.r = Coefficient::table({0.0, 0.4, 1.0}, {1.0, 1.5, 1.2});
    c.rho = Coefficient::table({0.0, 1.0}, {1.0, 2.0});
    c.bounds = {};
    c.derive_missing_bounds();
    auto ops = assemble(c, SpaceMesh::uniform(1.0, 7));
    for (const auto* m : {&ops.mass, &ops.damp_mu, &ops.stiff_r, &ops.stiff_kappa,
                          &ops.gram0, &ops.gram_x, &ops.gram_xx}) {
        CHECK((*m - m->transpose()).norm() < 1e-12 * std::max(1.0, m->norm()));
    }
}

TEST_CASE("mass and stiffness are positive definite on the clamped space") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 6));
    Eigen::LLT<Eigen::MatrixXd> lm(sys.ops.mass);
    Eigen::LLT<Eigen::MatrixXd> lk(sys.ops.stiff_r);
    Eigen::LLT<Eigen::MatrixXd> lg(sys.ops.gram_xx);
    CHECK(lm.info() == Eigen::Success);
    CHECK(lk.info() == Eigen::Success);
    CHECK(lg.info() == Eigen::Success);
}

TEST_CASE("stiffness dominates r0 times the curvature gram matrix") {
    auto c = reference_beam();
    c.r = Coefficient::table({0.0, 0.5, 1.0}, {1.0, 2.0, 1.3});
    c.bounds = {};
    c.derive_missing_bounds();
    REQUIRE(c.bounds.r0 == 1.0);
    auto ops = assemble(c, SpaceMesh::uniform(1.0, 9));
    const auto n = ops.stiff_r.rows();
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd v = Eigen::VectorXd::Random(n);
        double lhs = v.dot(ops.stiff_r * v);
        double rhs = c.bounds.r0 * v.dot(ops.gram_xx * v);
        CHECK(lhs >= rhs - 1e-10 * std::abs(lhs));
    }
}

TEST_CASE("clamped functions obey the H2 equivalence bound") {
    for (double ell : {0.5, 1.0}) {
        auto sys = BeamSystem::build(reference_beam(ell), SpaceMesh::uniform(ell, 8));
        const double c_star = 4.0 * ell * ell * (1.0 + 4.0 * ell * ell) + 1.0;
        const auto n = sys.ops.gram0.rows();
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd v = Eigen::VectorXd::Random(n);
            double full = v.dot((sys.ops.gram0 + sys.ops.gram_x + sys.ops.gram_xx) * v);
            double bend = v.dot(sys.ops.gram_xx * v);
            CHECK(full <= c_star * bend * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("cubic interpolants carry mesh-independent exact energy") {
    auto value = [](double x) { return x * x + 0.3 * x * x * x; };
    auto slope = [](double x) { return 2.0 * x + 0.9 * x * x; };
    // int_0^1 (2 + 1.8 x)^2 dx = 8.68
    const double exact = 8.68;
    double prev = 0.0;
    for (std::size_t ne : {8u, 16u}) {
        auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, ne));
        Eigen::VectorXd u = interpolate_free(sys.mesh, value, slope);
        double energy = u.dot(sys.ops.stiff_r * u);
        CHECK(energy == doctest::Approx(exact).epsilon(1e-12));
        if (prev != 0.0) CHECK(energy == doctest::Approx(prev).epsilon(1e-12));
        prev = energy;
    }
}

TEST_CASE("quadrature integrates the quartic mass integrand exactly") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 5));
    Eigen::VectorXd u = interpolate_free(
        sys.mesh, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
    // int_0^1 rho x^4 dx = 1/5
    CHECK(u.dot(sys.ops.mass * u) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("shear load acts on the tip deflection DOF only") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 4));
    auto f = shear_load(sys.loads, sys.mesh.free_dof_count(), 3.5);
    REQUIRE(f.size() == static_cast<Eigen::Index>(sys.mesh.free_dof_count()));
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (i == static_cast<Eigen::Index>(sys.loads.tip_deflection_index))
            CHECK(f[i] == 3.5);
        else
            CHECK(f[i] == 0.0);
    }
}

TEST_CASE("moment load vectors hold the weighted first moments") {
    auto sys = BeamSystem::build(reference_beam(), SpaceMesh::uniform(1.0, 1));
    // one element, h = 1: int_0^1 x N3 = 7/20, int_0^1 x N4 = -1/20
    CHECK(sys.loads.x_rho[0] == doctest::Approx(7.0 / 20.0).epsilon(1e-14));
    CHECK(sys.loads.x_rho[1] == doctest::Approx(-1.0 / 20.0).epsilon(1e-14));
    CHECK(sys.loads.x_mu[0] == doctest::Approx(0.1 * 7.0 / 20.0).epsilon(1e-14));

    auto f = lifting_load(sys.loads, 2.0, -3.0);
    CHECK(f[0] == doctest::Approx(2.0 * 0.1 * 0.35 + 3.0 * 0.35).epsilon(1e-13));
    CHECK(f[1] == doctest::Approx(2.0 * 0.1 * -0.05 + 3.0 * -0.05).epsilon(1e-13));
}

TEST_CASE("body load is the consistent projection of the force") {
    auto mesh = SpaceMesh::uniform(1.0, 6);
    auto f = body_load(mesh, [](double) { return 1.0; });
    Eigen::VectorXd u = interpolate_free(
        mesh, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
    // <f, u> = int_0^1 1 * x^2 = 1/3 exactly for polynomial integrands
    CHECK(f.dot(u) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    auto z = body_load(mesh, [](double) { return 0.0; });
    CHECK(z.norm() == 0.0);
}

TEST_CASE("root curvature extraction is exact for cubics") {
    auto mesh = SpaceMesh::uniform(1.0, 3);
    Eigen::VectorXd q = expand_clamped(interpolate_free(
        mesh, [](double x) { return x * x; }, [](double x) { return 2.0 * x; }));
    CHECK(second_derivative_at_root(mesh, q) == doctest::Approx(2.0).epsilon(1e-12));
    Eigen::VectorXd cub = expand_clamped(interpolate_free(
        mesh, [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; }));
    CHECK(second_derivative_at_root(mesh, cub) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("expand_clamped prepends the two root DOFs") {
    Eigen::VectorXd v(2);
    v << 1.5, -2.0;
    auto full = expand_clamped(v);
    REQUIRE(full.size() == 4);
    CHECK(full[0] == 0.0);
    CHECK(full[1] == 0.0);
    CHECK(full[2] == 1.5);
    CHECK(full[3] == -2.0);
}

TEST_CASE("system build rejects inconsistent inputs") {
    auto c = reference_beam();
    CHECK_THROWS_AS(BeamSystem::build(c, SpaceMesh::uniform(0.5, 4)), ConfigError);
    c = reference_beam();
    c.kappa = Coefficient(0.0);
    c.bounds = {};
    CHECK_THROWS_AS(BeamSystem::build(c, SpaceMesh::uniform(1.0, 4)), ConfigError);
}

TEST_CASE("tip deflection index addresses the interpolated tip value") {
    auto mesh = SpaceMesh::uniform(1.0, 5);
    Eigen::VectorXd u = interpolate_free(
        mesh, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
    CHECK(u[mesh.tip_deflection_free_index()] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u[mesh.tip_slope_free_index()] == doctest::Approx(2.0).epsilon(1e-14));
}

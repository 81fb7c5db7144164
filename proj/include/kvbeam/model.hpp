#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvbeam {

/// Raised for invalid configuration or model data.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numerical solve fails (non-SPD operator, divergence, ...).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Scalar material coefficient on [0, ell]: either a constant or a tabulated
/// profile evaluated by linear interpolation between breakpoints.
class Coefficient {
public:
    Coefficient() : Coefficient(0.0) {}
    Coefficient(double constant) : tabulated_(false), value_(constant) {}

    static Coefficient table(std::vector<double> x, std::vector<double> v);

    double operator()(double x) const;
    bool tabulated() const { return tabulated_; }
    double min_value() const;
    double max_value() const;
    const std::vector<double>& breakpoints() const { return xs_; }

private:
    bool tabulated_;
    double value_;
    std::vector<double> xs_, vs_;
};

/// Pointwise bounds assumed on the material coefficients:
///   rho0 <= rho <= rho1,  mu0 <= mu <= mu1,  r0 <= r <= r1,
///   kappa0 <= kappa <= kappa1.
struct CoefficientBounds {
    double rho0 = 0, rho1 = 0;
    double mu0 = 0, mu1 = 0;
    double r0 = 0, r1 = 0;
    double kappa0 = 0, kappa1 = 0;
};

/// Beam length plus the four material coefficients of the damped
/// Euler-Bernoulli model and their assumed bounds.
struct BeamCoefficients {
    double ell = 1.0;
    Coefficient rho{1.0};
    Coefficient mu{0.0};
    Coefficient r{1.0};
    Coefficient kappa{1.0};
    CoefficientBounds bounds;

    /// Fill any unset (zero) bounds from the coefficients themselves.
    void derive_missing_bounds();
};

/// Checks positivity/ordering of the bounds and that each coefficient stays
/// inside its bounds on a dense sample of [0, ell]. Returns the list of
/// violated conditions; empty means valid.
std::vector<std::string> validate_coefficients(const BeamCoefficients& c);

/// Uniform time grid on [0, T] with n_steps intervals (n_steps + 1 nodes).
struct TimeGrid {
    double T = 1.0;
    std::size_t n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double T_, std::size_t n_steps_);

    double dt() const { return T / static_cast<double>(n_steps); }
    std::size_t size() const { return n_steps + 1; }
    double t(std::size_t k) const { return static_cast<double>(k) * dt(); }
};

/// 1-D mesh of the beam axis. Nodes are strictly increasing and span
/// [0, ell]; each node carries a deflection and a slope degree of freedom.
struct SpaceMesh {
    double ell = 1.0;
    std::vector<double> nodes;

    static SpaceMesh uniform(double ell, std::size_t n_elems);

    std::size_t n_elems() const { return nodes.size() - 1; }
    double h(std::size_t e) const { return nodes[e + 1] - nodes[e]; }
    std::size_t dof_count() const { return 2 * nodes.size(); }
    /// Count after eliminating the two clamped DOFs at x = 0.
    std::size_t free_dof_count() const { return dof_count() - 2; }
    /// Index of the tip deflection DOF within the free numbering.
    std::size_t tip_deflection_free_index() const { return dof_count() - 4; }
    /// Index of the tip slope DOF within the free numbering.
    std::size_t tip_slope_free_index() const { return dof_count() - 3; }
};

/// Admissible source classes: how many derivatives of g vanish at t = 0.
///   G1: g(0) = 0;  G2: additionally g'(0) = 0;  G3: additionally g''(0) = 0.
enum class SignalClass : int { G1 = 1, G2 = 2, G3 = 3 };

/// Boundary shear source g sampled on a time grid.
struct SourceSignal {
    TimeGrid grid;
    std::vector<double> values;
    SignalClass klass = SignalClass::G1;
    double ball_radius = std::numeric_limits<double>::infinity();

    SourceSignal() = default;
    SourceSignal(TimeGrid g, std::vector<double> v, SignalClass k = SignalClass::G1);
};

/// Which boundary quantity a trace records.
enum class MeasurementKind { TipDeflection, RootMoment };

/// A boundary measurement sampled on a time grid. noise_level is the
/// relative perturbation magnitude delta carried along for stopping rules.
struct MeasurementTrace {
    TimeGrid grid;
    std::vector<double> values;
    MeasurementKind kind = MeasurementKind::TipDeflection;
    double noise_level = 0.0;
};

/// Trapezoid quadrature weights for a uniform grid with n nodes and
/// spacing dt: dt/2 at the ends, dt inside.
std::vector<double> trapezoid_weights(std::size_t n, double dt);

/// Trapezoid L^2(0,T) norm of grid samples.
double l2_norm(const std::vector<double>& values, double dt);

/// Trapezoid inner product of two sample vectors.
double l2_inner(const std::vector<double>& a, const std::vector<double>& b, double dt);

/// m-th forward difference quotients of the samples: output has
/// values.size() - m entries, each divided by dt^m. m = 0 copies the input.
std::vector<double> forward_differences(const std::vector<double>& values, double dt,
                                        unsigned m);

/// Discrete seminorm |g^(m)|: trapezoid L^2 norm of the m-th forward
/// difference quotients on their (shortened) grid. m = 0 is the plain norm.
double discrete_seminorm(const std::vector<double>& values, double dt, unsigned m);

/// Discrete Sobolev norm: sqrt of the sum of squared seminorms of orders
/// 0..m.
double sobolev_norm(const std::vector<double>& values, double dt, unsigned m);

/// Enforce the class-consistency conditions at t = 0 by subtracting the
/// interpolating polynomial of minimal degree through the first m+1 samples
/// (m+1 = number of conditions). The first m+1 samples vanish exactly
/// afterwards and the map is idempotent.
void project_consistency(SourceSignal& g);

/// Same projection acting on a raw sample vector.
void project_consistency(std::vector<double>& values, double dt, SignalClass klass);

/// True if the Sobolev norm of order matching the class is within the ball
/// radius (monitoring helper; the constraint is not enforced by default).
bool within_ball(const SourceSignal& g);

}  // namespace kvbeam

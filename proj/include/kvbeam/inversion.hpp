#pragma once

#include <cstdint>

#include "kvbeam/adjoint.hpp"
#include "kvbeam/forward.hpp"

namespace kvbeam {

/// Which boundary observation drives the inversion.
enum class InverseProblem { TipDeflection, RootMoment };

enum class StepRule { ConstantLipschitz, Fixed, Backtracking };

enum class StopReason { MaxIters, Morozov, SmallGradient };

struct TikhonovConfig {
    InverseProblem problem = InverseProblem::TipDeflection;
    double alpha = 0.0;
    /// Order m of the |g^(m)| penalty seminorm (1 for the deflection
    /// problem, 3 for the moment problem).
    unsigned reg_order = 1;
    StepRule step_rule = StepRule::Backtracking;
    /// Step size: the fixed gamma for Fixed, 1/L for ConstantLipschitz
    /// (caller computes 1/L from the constants bundle), the initial trial
    /// gamma for Backtracking (a default is picked when zero).
    double step = 0.0;
    unsigned max_iters = 200;
    double morozov_tau = 1.2;
    /// Absolute gradient L^2 norm below which iteration stops; 0 disables.
    double grad_tol = 0.0;
    /// Pre-smoothing of the measured moment before theta is formed:
    /// repeated centered moving average.
    unsigned smoothing_width = 5;
    unsigned smoothing_passes = 4;
    /// Radially rescale iterates that leave the admissible ball (off by
    /// default: the ball is monitored, not enforced).
    bool enforce_ball = false;
};

struct FunctionalValue {
    double total = 0.0;
    double misfit = 0.0;  // (1/2) ||observation residual||^2
    double reg = 0.0;     // (alpha/2) |g^(m)|^2
};

/// Tikhonov objective at g for the configured problem and data.
FunctionalValue eval_functional(const BeamSystem& sys, const SourceSignal& g,
                                const MeasurementTrace& data, const TikhonovConfig& cfg);

struct GradientResult {
    std::vector<double> values;  // gradient samples on the time grid
    FunctionalValue at_g;        // objective evaluated along the way
    bool terminal_mismatch = false;
};

/// Adjoint-based gradient of the objective. Deflection problem: adjoint tip
/// trace of the residual-driven backward problem plus the discrete
/// regularizer gradient. Moment problem: the same via the slope-driven
/// adjoint with theta = (simulated moment part) + (smoothed data).
GradientResult gradient(const BeamSystem& sys, const SourceSignal& g,
                        const MeasurementTrace& data, const TikhonovConfig& cfg);

struct IterationRecord {
    unsigned iter = 0;
    double J = 0.0;
    double misfit = 0.0;
    double reg = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
};

struct ReconstructionResult {
    SourceSignal g;
    StopReason stop = StopReason::MaxIters;
    std::vector<IterationRecord> history;
    double final_misfit = 0.0;
    double final_residual_norm = 0.0;  // ||observation residual|| at the end
};

/// Projected Landweber iteration
///   g <- project_consistency(g - gamma * gradient(g))
/// with the configured step rule. Stopping precedence: Morozov discrepancy
/// (residual <= tau * delta * ||data||, needs data.noise_level > 0), then
/// small gradient, then max_iters.
ReconstructionResult landweber(const BeamSystem& sys, const SourceSignal& g0,
                               const MeasurementTrace& data, const TikhonovConfig& cfg);

struct DirectionalCheck {
    double fd = 0.0;        // central difference of the objective
    double adjoint = 0.0;   // <gradient, direction> in the trapezoid metric
    double rel_error = 0.0;
};

/// Central finite-difference probe of the adjoint gradient along the given
/// directions. eps scales relative to the signals involved.
std::vector<DirectionalCheck> fd_gradient_oracle(const BeamSystem& sys, const SourceSignal& g,
                                                 const MeasurementTrace& data,
                                                 const TikhonovConfig& cfg,
                                                 const std::vector<std::vector<double>>& dirs,
                                                 double eps_rel = 1e-5);

/// Additive i.i.d. Gaussian perturbation rescaled so its trapezoid L^2 norm
/// equals delta * ||trace||. Deterministic under seed; noise_level is set
/// to delta on the result.
MeasurementTrace add_noise(const MeasurementTrace& trace, double delta, std::uint64_t seed);

/// Repeated centered moving average (width samples per pass); the window
/// shrinks near the ends.
std::vector<double> smooth_samples(const std::vector<double>& y, unsigned width,
                                   unsigned passes);

/// Gradient of the (alpha/2)|g^(m)|^2 penalty in the trapezoid metric:
/// alpha * W^-1 D_m^T W_m D_m g. Exposed for verification.
std::vector<double> regularizer_gradient(const std::vector<double>& g, double dt, unsigned m,
                                         double alpha);

}  // namespace kvbeam

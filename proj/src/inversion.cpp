#include "kvbeam/inversion.hpp"

#include <cmath>
#include <random>

namespace kvbeam {

namespace {

// Observation residual and the theta input of the moment adjoint for the
// current iterate. For the deflection problem residual = nu_sim - nu_data;
// for the moment problem residual = omega_sim - omega_data expressed as
// theta_raw = (moment part) + omega_data, whose norm is the misfit norm.
struct Residuals {
    std::vector<double> residual;   // drives the misfit
    std::vector<double> theta_raw;  // moment problem only (unsmoothed)
};

Residuals observation_residual(const ForwardSolution& fwd, const MeasurementTrace& data,
                               InverseProblem problem) {
    const std::size_t n = fwd.grid.size();
    if (data.values.size() != n)
        throw std::invalid_argument("inversion: data does not match the time grid");
    Residuals r;
    r.residual.resize(n);
    if (problem == InverseProblem::TipDeflection) {
        for (std::size_t k = 0; k < n; ++k)
            r.residual[k] = fwd.deflection.values[k] - data.values[k];
    } else {
        r.theta_raw.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // omega_sim - omega_data = -(moment part) - omega_data = -theta
            r.theta_raw[k] = -fwd.moment.values[k] + data.values[k];
            r.residual[k] = -r.theta_raw[k];
        }
    }
    return r;
}

double misfit_of(const std::vector<double>& residual, double dt) {
    const double n = l2_norm(residual, dt);
    return 0.5 * n * n;
}

unsigned projection_order(SignalClass k) { return static_cast<unsigned>(k); }

}  // namespace

std::vector<double> regularizer_gradient(const std::vector<double>& g, double dt, unsigned m,
                                         double alpha) {
    const std::size_t n = g.size();
    std::vector<double> out(n, 0.0);
    if (alpha == 0.0 || m == 0) return out;
    if (n < m + 1) throw std::invalid_argument("regularizer_gradient: too few samples");

    // d = D_m g on the shortened grid, weighted by its trapezoid weights.
    std::vector<double> d = forward_differences(g, dt, m);
    const auto wd = trapezoid_weights(d.size(), dt);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= wd[i];

    // Apply the transposed difference stages in reverse order. Each stage
    // maps a vector of length s to length s + 1.
    for (unsigned stage = 0; stage < m; ++stage) {
        std::vector<double> up(d.size() + 1, 0.0);
        up[0] = -d[0] / dt;
        for (std::size_t i = 1; i < d.size(); ++i) up[i] = (d[i - 1] - d[i]) / dt;
        up[d.size()] = d.back() / dt;
        d = std::move(up);
    }

    const auto w = trapezoid_weights(n, dt);
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * d[i] / w[i];
    return out;
}

std::vector<double> smooth_samples(const std::vector<double>& y, unsigned width,
                                   unsigned passes) {
    if (width < 2 || y.size() < 3) return y;
    const int half = static_cast<int>(width) / 2;
    std::vector<double> cur = y, next(y.size());
    const int n = static_cast<int>(y.size());
    for (unsigned p = 0; p < passes; ++p) {
        for (int i = 0; i < n; ++i) {
            const int lo = std::max(0, i - half);
            const int hi = std::min(n - 1, i + half);
            double s = 0.0;
            for (int j = lo; j <= hi; ++j) s += cur[j];
            next[i] = s / static_cast<double>(hi - lo + 1);
        }
        std::swap(cur, next);
    }
    return cur;
}

FunctionalValue eval_functional(const BeamSystem& sys, const SourceSignal& g,
                                const MeasurementTrace& data, const TikhonovConfig& cfg) {
    const double dt = g.grid.dt();
    ForwardSolution fwd = solve_direct(sys, g.grid, g.values);
    Residuals res = observation_residual(fwd, data, cfg.problem);

    FunctionalValue v;
    v.misfit = misfit_of(res.residual, dt);
    const double sn = discrete_seminorm(g.values, dt, cfg.reg_order);
    v.reg = 0.5 * cfg.alpha * sn * sn;
    v.total = v.misfit + v.reg;
    return v;
}

GradientResult gradient(const BeamSystem& sys, const SourceSignal& g,
                        const MeasurementTrace& data, const TikhonovConfig& cfg) {
    const double dt = g.grid.dt();
    ForwardSolution fwd = solve_direct(sys, g.grid, g.values);
    Residuals res = observation_residual(fwd, data, cfg.problem);

    GradientResult out;
    out.at_g.misfit = misfit_of(res.residual, dt);
    const double sn = discrete_seminorm(g.values, dt, cfg.reg_order);
    out.at_g.reg = 0.5 * cfg.alpha * sn * sn;
    out.at_g.total = out.at_g.misfit + out.at_g.reg;

    AdjointSolution adj;
    if (cfg.problem == InverseProblem::TipDeflection) {
        adj = solve_adjoint_neumann(sys, g.grid, res.residual);
    } else {
        std::vector<double> theta(g.grid.size());
        const std::vector<double> data_smooth =
            smooth_samples(data.values, cfg.smoothing_width, cfg.smoothing_passes);
        for (std::size_t k = 0; k < theta.size(); ++k)
            theta[k] = -fwd.moment.values[k] + data_smooth[k];
        adj = solve_adjoint_dirichlet(sys, g.grid, theta);
    }
    out.terminal_mismatch = adj.terminal_mismatch;

    out.values = adj.tip;
    const std::vector<double> rg =
        regularizer_gradient(g.values, dt, cfg.reg_order, cfg.alpha);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += rg[k];

    // Gradient of the functional restricted to the admissible class: the
    // leading samples of g are pinned by the consistency conditions, so
    // they are not variations. Zeroing them here keeps every step inside
    // the class; shifting a full tip trace back onto the class instead can
    // turn the step into an ascent direction once the residual is small.
    const unsigned pinned = static_cast<unsigned>(g.klass);
    for (unsigned k = 0; k < pinned && k < out.values.size(); ++k) out.values[k] = 0.0;
    return out;
}

ReconstructionResult landweber(const BeamSystem& sys, const SourceSignal& g0,
                               const MeasurementTrace& data, const TikhonovConfig& cfg) {
    const double dt = g0.grid.dt();
    const double data_norm = l2_norm(data.values, dt);
    const double morozov_level =
        data.noise_level > 0.0 ? cfg.morozov_tau * data.noise_level * data_norm : -1.0;

    ReconstructionResult out;
    out.g = g0;
    project_consistency(out.g);

    auto apply_ball = [&](SourceSignal& s) {
        if (!cfg.enforce_ball || !std::isfinite(s.ball_radius)) return;
        const double norm = sobolev_norm(s.values, dt, projection_order(s.klass));
        if (norm > s.ball_radius && norm > 0.0) {
            const double scale = s.ball_radius / norm;
            for (double& v : s.values) v *= scale;
        }
    };
    apply_ball(out.g);

    double gamma = cfg.step;
    if (cfg.step_rule == StepRule::Backtracking && gamma <= 0.0) gamma = 1.0;
    if (cfg.step_rule != StepRule::Backtracking && gamma <= 0.0)
        throw ConfigError("landweber: step must be positive for the chosen step rule");

    GradientResult gr = gradient(sys, out.g, data, cfg);
    for (unsigned it = 0; it <= cfg.max_iters; ++it) {
        const double grad_norm = l2_norm(gr.values, dt);
        out.history.push_back({it, gr.at_g.total, gr.at_g.misfit, gr.at_g.reg, grad_norm, 0.0});

        const double residual_norm = std::sqrt(2.0 * gr.at_g.misfit);
        if (morozov_level >= 0.0 && residual_norm <= morozov_level) {
            out.stop = StopReason::Morozov;
            break;
        }
        if (cfg.grad_tol > 0.0 && grad_norm <= cfg.grad_tol) {
            out.stop = StopReason::SmallGradient;
            break;
        }
        if (it == cfg.max_iters) {
            out.stop = StopReason::MaxIters;
            break;
        }

        SourceSignal next = out.g;
        double used = gamma;
        auto take_step = [&](double step) {
            next = out.g;
            for (std::size_t k = 0; k < next.values.size(); ++k)
                next.values[k] -= step * gr.values[k];
            project_consistency(next);
            apply_ball(next);
        };
        if (cfg.step_rule == StepRule::Backtracking) {
            // Trial steps need only the objective (one forward solve); the
            // gradient is computed once the step is accepted.
            bool accepted = false;
            for (int tries = 0; tries < 60; ++tries) {
                take_step(used);
                if (eval_functional(sys, next, data, cfg).total < gr.at_g.total) {
                    accepted = true;
                    break;
                }
                used *= 0.5;
            }
            if (!accepted) {
                out.stop = StopReason::SmallGradient;
                break;
            }
            gamma = 2.0 * used;  // re-expand for the next iteration
        } else {
            take_step(used);
        }
        out.history.back().step = used;
        out.g = std::move(next);
        gr = gradient(sys, out.g, data, cfg);
    }

    out.final_misfit = gr.at_g.misfit;
    out.final_residual_norm = std::sqrt(2.0 * gr.at_g.misfit);
    return out;
}

std::vector<DirectionalCheck> fd_gradient_oracle(const BeamSystem& sys, const SourceSignal& g,
                                                 const MeasurementTrace& data,
                                                 const TikhonovConfig& cfg,
                                                 const std::vector<std::vector<double>>& dirs,
                                                 double eps_rel) {
    const double dt = g.grid.dt();
    GradientResult gr = gradient(sys, g, data, cfg);

    std::vector<DirectionalCheck> checks;
    checks.reserve(dirs.size());
    const unsigned pinned = static_cast<unsigned>(g.klass);
    for (auto d : dirs) {
        if (d.size() != g.values.size())
            throw std::invalid_argument("fd_gradient_oracle: direction size mismatch");
        // admissible perturbations keep the class consistency conditions
        for (unsigned k = 0; k < pinned && k < d.size(); ++k) d[k] = 0.0;
        const double dnorm = l2_norm(d, dt);
        if (dnorm == 0.0) {
            checks.push_back({0.0, 0.0, 0.0});
            continue;
        }
        const double eps = eps_rel * (1.0 + l2_norm(g.values, dt)) / dnorm;

        SourceSignal gp = g, gm = g;
        for (std::size_t k = 0; k < d.size(); ++k) {
            gp.values[k] += eps * d[k];
            gm.values[k] -= eps * d[k];
        }
        const double jp = eval_functional(sys, gp, data, cfg).total;
        const double jm = eval_functional(sys, gm, data, cfg).total;

        DirectionalCheck c;
        c.fd = (jp - jm) / (2.0 * eps);
        c.adjoint = l2_inner(gr.values, d, dt);
        const double denom = std::max(std::abs(c.fd), std::abs(c.adjoint));
        c.rel_error = denom > 0.0 ? std::abs(c.fd - c.adjoint) / denom : 0.0;
        checks.push_back(c);
    }
    return checks;
}

MeasurementTrace add_noise(const MeasurementTrace& trace, double delta, std::uint64_t seed) {
    if (delta < 0.0) throw ConfigError("add_noise: delta must be nonnegative");
    MeasurementTrace noisy = trace;
    noisy.noise_level = delta;
    if (delta == 0.0) return noisy;

    const double dt = trace.grid.dt();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> pert(trace.values.size());
    for (double& p : pert) p = gauss(rng);

    const double pnorm = l2_norm(pert, dt);
    if (pnorm == 0.0) return noisy;
    const double scale = delta * l2_norm(trace.values, dt) / pnorm;
    for (std::size_t k = 0; k < pert.size(); ++k) noisy.values[k] += scale * pert[k];
    return noisy;
}

}  // namespace kvbeam

#include "kvbeam/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include "kvbeam/csv.hpp"

namespace kvbeam {

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

const char* stop_name(StopReason s) {
    switch (s) {
        case StopReason::Morozov: return "morozov";
        case StopReason::SmallGradient: return "small_gradient";
        default: return "max_iters";
    }
}

const char* problem_name(InverseProblem p) {
    return p == InverseProblem::TipDeflection ? "ibvp1" : "ibvp2";
}

std::vector<std::pair<std::string, std::string>> config_metadata(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto num = [&](const std::string& k, double v) { kv.emplace_back(k, format_double(v)); };
    num("beam.ell", cfg.beam.ell);
    kv.emplace_back("beam.rho", cfg.beam.rho.tabulated() ? "table" : format_double(cfg.beam.rho(0)));
    kv.emplace_back("beam.mu", cfg.beam.mu.tabulated() ? "table" : format_double(cfg.beam.mu(0)));
    kv.emplace_back("beam.r", cfg.beam.r.tabulated() ? "table" : format_double(cfg.beam.r(0)));
    kv.emplace_back("beam.kappa",
                    cfg.beam.kappa.tabulated() ? "table" : format_double(cfg.beam.kappa(0)));
    num("beam.rho0", cfg.beam.bounds.rho0);
    num("beam.rho1", cfg.beam.bounds.rho1);
    num("beam.mu0", cfg.beam.bounds.mu0);
    num("beam.mu1", cfg.beam.bounds.mu1);
    num("beam.r0", cfg.beam.bounds.r0);
    num("beam.r1", cfg.beam.bounds.r1);
    num("beam.kappa0", cfg.beam.bounds.kappa0);
    num("beam.kappa1", cfg.beam.bounds.kappa1);
    num("mesh.n_elems", static_cast<double>(cfg.n_elems));
    num("time.T", cfg.T);
    num("time.n_steps", static_cast<double>(cfg.n_steps));
    kv.emplace_back("source.kind", cfg.source.kind);
    num("source.amplitude", cfg.source.amplitude);
    num("noise.delta", cfg.noise.delta);
    num("noise.seed", static_cast<double>(effective_seed(cfg.noise)));
    kv.emplace_back("inverse.problem", problem_name(cfg.inverse.problem));
    num("inverse.alpha", cfg.inverse.alpha);
    num("inverse.reg_order", cfg.reg_order());
    num("inverse.max_iters", cfg.inverse.max_iters);
    num("inverse.morozov_tau", cfg.inverse.morozov_tau);
    num("inverse.refine", cfg.inverse.refine);
    return kv;
}

void append_bundle(std::vector<std::pair<std::string, std::string>>& kv,
                   const ConstantBundle& b) {
    auto num = [&](const std::string& k, double v) { kv.emplace_back(k, format_double(v)); };
    num("constants.alpha", b.alpha);
    num("constants.c_star", b.c_star);
    num("constants.c0_sq", b.c0sq);
    num("constants.r1", b.r1);
    num("constants.r2", b.r2);
    num("constants.r3", b.r3);
    num("constants.r4", b.r4);
    num("constants.c1_sq", b.c1sq);
    num("constants.c5_sq", b.c5sq);
    num("constants.c6_sq", b.c6sq);
    num("constants.c7_sq", b.c7sq);
    num("constants.c9_sq", b.c9sq);
    num("constants.c10_sq", b.c10sq);
    num("constants.l0_sq", b.l0sq);
    num("constants.l1_sq", b.l1sq);
    num("constants.l2_sq", b.l2sq);
    num("constants.l3_sq", b.l3sq);
    num("constants.kappa0_required", b.kappa0_required);
    num("constants.c_st", b.c_st);
    num("constants.alpha_sq_threshold", b.alpha_sq_threshold);
    kv.emplace_back("constants.alpha_condition", b.alpha_condition ? "true" : "false");
    num("constants.c_st_tilde", b.c_st_tilde);
}

}  // namespace

MeasurementTrace synthesize_twin_data(const RunConfig& cfg, const std::string& origin_dir) {
    const unsigned rf = cfg.inverse.refine;
    const TimeGrid fine_grid(cfg.T, cfg.n_steps * rf);
    const SpaceMesh fine_mesh = SpaceMesh::uniform(cfg.beam.ell, cfg.n_elems * rf);
    const BeamSystem fine_sys = BeamSystem::build(cfg.beam, fine_mesh);

    const SourceSignal g_true = make_source(cfg.source, fine_grid, origin_dir);
    const ForwardSolution fwd = solve_direct(fine_sys, fine_grid, g_true.values);

    const MeasurementTrace& fine_trace =
        cfg.inverse.problem == InverseProblem::TipDeflection ? fwd.deflection : fwd.moment;

    MeasurementTrace coarse;
    coarse.grid = cfg.grid();
    coarse.kind = fine_trace.kind;
    coarse.values.resize(coarse.grid.size());
    for (std::size_t k = 0; k < coarse.values.size(); ++k)
        coarse.values[k] = fine_trace.values[k * rf];

    return add_noise(coarse, cfg.noise.delta, effective_seed(cfg.noise));
}

int cmd_simulate(const RunConfig& cfg, const std::string& outdir) {
    ensure_dir(outdir);
    const TimeGrid grid = cfg.grid();
    const BeamSystem sys = BeamSystem::build(cfg.beam, SpaceMesh::uniform(cfg.beam.ell, cfg.n_elems));
    const SourceSignal g = make_source(cfg.source, grid, "");

    const ForwardSolution fwd = solve_direct(sys, grid, g.values);
    const EnergyReport energy = energy_residual(sys, fwd, g.values);
    const TraceReport traces = trace_inequality_check(sys, fwd, g.values);

    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        rows.push_back({grid.t(k), fwd.deflection.values[k]});
    write_csv(join(outdir, "deflection.csv"), {"t", "nu"}, rows);

    rows.clear();
    for (std::size_t k = 0; k < grid.size(); ++k)
        rows.push_back({grid.t(k), fwd.moment.values[k], fwd.moment_direct.values[k]});
    write_csv(join(outdir, "moment.csv"), {"t", "omega", "omega_direct"}, rows);

    rows.clear();
    for (std::size_t k = 0; k < grid.size(); ++k)
        rows.push_back({grid.t(k), energy.energy[k], energy.dissipation[k], energy.work[k],
                        energy.residual[k]});
    write_csv(join(outdir, "energy.csv"), {"t", "energy", "dissipation", "work", "residual"},
              rows);

    rows.clear();
    std::vector<std::string> header{"t"};
    const std::size_t nn = sys.mesh.nodes.size();
    for (std::size_t i = 1; i < nn; ++i) {
        header.push_back("w" + std::to_string(i));
        header.push_back("th" + std::to_string(i));
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> row{grid.t(k)};
        const auto& u = fwd.traj.u[k];
        for (Eigen::Index j = 0; j < u.size(); ++j) row.push_back(u(j));
        rows.push_back(std::move(row));
    }
    write_csv(join(outdir, "trajectory.csv"), header, rows);

    auto kv = config_metadata(cfg);
    kv.emplace_back("energy.max_rel_residual", format_double(energy.max_rel_residual));
    kv.emplace_back("trace.tip_margin", format_double(traces.tip_margin));
    kv.emplace_back("trace.source_margin", format_double(traces.source_margin));
    write_kv_csv(join(outdir, "metadata.csv"), kv);

    std::cout << "simulate: " << grid.size() << " steps, max energy residual "
              << energy.max_rel_residual << "\n";
    return 0;
}

int cmd_invert(const RunConfig& cfg, const std::string& outdir, const std::string& origin_dir) {
    ensure_dir(outdir);
    const TimeGrid grid = cfg.grid();
    const BeamSystem sys = BeamSystem::build(cfg.beam, SpaceMesh::uniform(cfg.beam.ell, cfg.n_elems));

    const MeasurementTrace data = synthesize_twin_data(cfg, origin_dir);
    const SourceSignal g_true = make_source(cfg.source, grid, origin_dir);

    TikhonovConfig tc = cfg.tikhonov();
    if (tc.step_rule == StepRule::ConstantLipschitz && tc.step <= 0.0) {
        const ConstantBundle b =
            evaluate_constants(cfg.beam.ell, cfg.beam.bounds, cfg.T, cfg.constants.alpha);
        const double lsq = cfg.inverse.problem == InverseProblem::TipDeflection ? b.l2sq : b.l3sq;
        tc.step = 1.0 / std::sqrt(lsq);
    }

    SourceSignal g0(grid, std::vector<double>(grid.size(), 0.0), cfg.inverse_class());
    g0.ball_radius = cfg.inverse.ball_radius;
    const ReconstructionResult rec = landweber(sys, g0, data, tc);

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < grid.size(); ++k)
        rows.push_back({grid.t(k), rec.g.values[k], g_true.values[k]});
    write_csv(join(outdir, "reconstruction.csv"), {"t", "g_hat", "g_true"}, rows);

    rows.clear();
    for (const auto& h : rec.history)
        rows.push_back({static_cast<double>(h.iter), h.J, h.misfit, h.reg, h.grad_norm, h.step});
    write_csv(join(outdir, "history.csv"), {"iter", "J", "misfit", "reg", "grad_norm", "step"},
              rows);

    const double dt = grid.dt();
    const double true_norm = l2_norm(g_true.values, dt);
    std::vector<double> err(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) err[k] = rec.g.values[k] - g_true.values[k];
    const double rel_err = true_norm > 0 ? l2_norm(err, dt) / true_norm : l2_norm(err, dt);

    auto kv = config_metadata(cfg);
    append_bundle(kv, evaluate_constants(cfg.beam.ell, cfg.beam.bounds, cfg.T,
                                         cfg.constants.alpha));
    kv.emplace_back("result.stop_reason", stop_name(rec.stop));
    kv.emplace_back("result.iterations",
                    std::to_string(rec.history.empty() ? 0 : rec.history.back().iter));
    kv.emplace_back("result.final_misfit", format_double(rec.final_misfit));
    kv.emplace_back("result.final_residual_norm", format_double(rec.final_residual_norm));
    kv.emplace_back("result.rel_l2_error", format_double(rel_err));
    write_kv_csv(join(outdir, "metadata.csv"), kv);

    std::cout << "invert: stop=" << stop_name(rec.stop)
              << " iters=" << (rec.history.empty() ? 0 : rec.history.back().iter)
              << " residual=" << rec.final_residual_norm << " rel_error=" << rel_err << "\n";
    return rec.stop == StopReason::MaxIters ? 4 : 0;
}

int cmd_grad_check(const RunConfig& cfg, const std::string& outdir,
                   const std::string& origin_dir) {
    ensure_dir(outdir);
    const TimeGrid grid = cfg.grid();
    const BeamSystem sys = BeamSystem::build(cfg.beam, SpaceMesh::uniform(cfg.beam.ell, cfg.n_elems));

    const MeasurementTrace data = synthesize_twin_data(cfg, origin_dir);
    SourceSignal g = make_source(cfg.source, grid, origin_dir);
    g.klass = cfg.inverse_class();

    std::vector<std::vector<double>> dirs;
    const double T = grid.T;
    for (int j = 1; j <= 3; ++j) {
        std::vector<double> d(grid.size());
        for (std::size_t k = 0; k < d.size(); ++k)
            d[k] = std::sin(j * M_PI * grid.t(k) / T);
        dirs.push_back(std::move(d));
    }
    {
        std::vector<double> d(grid.size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = grid.t(k) / T;
        dirs.push_back(d);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] *= grid.t(k) / T;
        dirs.push_back(std::move(d));
    }

    const auto checks = fd_gradient_oracle(sys, g, data, cfg.tikhonov(), dirs);

    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        rows.push_back({static_cast<double>(i + 1), checks[i].fd, checks[i].adjoint,
                        checks[i].rel_error});
        worst = std::max(worst, checks[i].rel_error);
    }
    write_csv(join(outdir, "gradcheck.csv"), {"direction", "fd", "adjoint", "rel_error"}, rows);

    std::cout << "grad-check: " << checks.size() << " directions, worst rel error " << worst
              << "\n";
    return 0;
}

int cmd_constants(const RunConfig& cfg, const std::string& outdir) {
    ensure_dir(outdir);
    const ConstantBundle b =
        evaluate_constants(cfg.beam.ell, cfg.beam.bounds, cfg.T, cfg.constants.alpha);

    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("ell", format_double(b.ell));
    kv.emplace_back("T", format_double(b.T));
    append_bundle(kv, b);
    write_kv_csv(join(outdir, "constants.csv"), kv);

    std::cout << "constants: C*=" << b.c_star << " C0^2=" << b.c0sq << " L0^2=" << b.l0sq
              << " L2^2=" << b.l2sq << " L3^2=" << b.l3sq
              << " alpha_ok=" << (b.alpha_condition ? "yes" : "no") << "\n";
    return 0;
}

int cmd_stability_table(const RunConfig& cfg, const std::string& outdir) {
    ensure_dir(outdir);
    const auto table = stability_table(cfg.stability.rows, cfg.stability.ell, cfg.stability.r0);

    std::vector<std::vector<double>> rows;
    for (const auto& r : table) {
        rows.push_back({r.T, r.alpha, r.kappa0, r.c_st});
        std::cout << "T=" << r.T << " alpha=" << r.alpha << " kappa0=" << r.kappa0
                  << " C_ST=" << r.c_st << "\n";
    }
    write_csv(join(outdir, "stability.csv"), {"T", "alpha", "kappa0", "C_ST"}, rows);
    return 0;
}

}  // namespace kvbeam

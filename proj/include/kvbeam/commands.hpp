#pragma once

#include <string>

#include "kvbeam/config.hpp"
#include "kvbeam/constants.hpp"

namespace kvbeam {

/// Twin-experiment data for the configured problem: the true source is
/// solved on a refine-x finer mesh and time grid, the boundary trace is
/// restricted to the run grid (every refine-th sample) and noise is added.
/// The refinement keeps synthetic data off the inversion's own grid.
MeasurementTrace synthesize_twin_data(const RunConfig& cfg, const std::string& origin_dir);

/// Command entry points. Each writes CSV outputs into outdir and returns a
/// process exit code (0 success, 4 non-convergence; parse/solver failures
/// throw and the CLI maps them to 2/3).
int cmd_simulate(const RunConfig& cfg, const std::string& outdir);
int cmd_invert(const RunConfig& cfg, const std::string& outdir, const std::string& origin_dir);
int cmd_grad_check(const RunConfig& cfg, const std::string& outdir,
                   const std::string& origin_dir);
int cmd_constants(const RunConfig& cfg, const std::string& outdir);
int cmd_stability_table(const RunConfig& cfg, const std::string& outdir);

}  // namespace kvbeam

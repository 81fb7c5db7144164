#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kvbeam/inversion.hpp"

namespace kvbeam {

/// [source] section: which true source drives simulation and twin
/// experiments. Kinds: zero | ramp (a t) | sin2 (a sin^2(pi t / T)) |
/// tsin2 (a t sin^2(pi t / T)) | csv (table resampled onto the grid).
struct SourceSpec {
    std::string kind = "zero";
    double amplitude = 1.0;
    std::string path;
    std::optional<SignalClass> klass;  // override of the catalog default
};

/// [noise] section. The BEAM_SEED environment variable overrides seed.
struct NoiseSpec {
    double delta = 0.0;
    std::uint64_t seed = 0;
};

/// [inverse] section.
struct InverseSpec {
    InverseProblem problem = InverseProblem::TipDeflection;
    double alpha = 0.0;
    std::optional<unsigned> reg_order;  // defaults by problem: 1 or 3
    StepRule step_rule = StepRule::Backtracking;
    double step = 0.0;
    unsigned max_iters = 200;
    double morozov_tau = 1.2;
    double grad_tol = 0.0;
    unsigned smoothing_width = 5;
    unsigned smoothing_passes = 4;
    unsigned refine = 2;  // twin data refinement factor (space and time)
    bool enforce_ball = false;
    double ball_radius = std::numeric_limits<double>::infinity();
};

/// [constants] section.
struct ConstantsSpec {
    double alpha = 1e-3;
};

/// [stability] section. Rows default to the published six (T, alpha) pairs.
struct StabilitySpec {
    std::vector<std::pair<double, double>> rows;
    double ell = 0.5;
    double r0 = 1.0;
};

struct RunConfig {
    BeamCoefficients beam;
    std::size_t n_elems = 32;
    double T = 1.0;
    std::size_t n_steps = 2000;
    SourceSpec source;
    NoiseSpec noise;
    InverseSpec inverse;
    ConstantsSpec constants;
    StabilitySpec stability;

    TimeGrid grid() const { return TimeGrid(T, n_steps); }
    unsigned reg_order() const {
        if (inverse.reg_order) return *inverse.reg_order;
        return inverse.problem == InverseProblem::TipDeflection ? 1u : 3u;
    }
    SignalClass inverse_class() const {
        return inverse.problem == InverseProblem::TipDeflection ? SignalClass::G1
                                                                : SignalClass::G3;
    }
    TikhonovConfig tikhonov() const;
};

/// Parse an INI-style config file. Unknown sections or keys, malformed
/// values and violated constraints raise ConfigError naming section.key.
RunConfig parse_config(const std::string& path);

/// Same parser on in-memory text; origin_dir resolves csv: references.
RunConfig parse_config_text(const std::string& text, const std::string& origin_dir);

/// Materialize the configured source on a grid.
SourceSignal make_source(const SourceSpec& spec, const TimeGrid& grid,
                         const std::string& origin_dir);

/// noise.seed unless BEAM_SEED is set in the environment.
std::uint64_t effective_seed(const NoiseSpec& noise);

}  // namespace kvbeam

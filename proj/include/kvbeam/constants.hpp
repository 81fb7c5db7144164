#pragma once

#include <utility>
#include <vector>

#include "kvbeam/model.hpp"

namespace kvbeam {

/// Every constant in the stability/convergence analysis, evaluated from the
/// coefficient bounds, length, horizon and regularization weight. The R*
/// intermediates feeding c1sq are kept for auditability.
struct ConstantBundle {
    double ell = 0, T = 0, alpha = 0;

    double c_star = 0;  // 4 ell^2 (1 + 4 ell^2) + 1
    double c0sq = 0;    // e^T - 1

    double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
    double c1sq = 0;  // max(r2, r3, r4, kappa1 + 1)

    double c5sq = 0, c6sq = 0, c7sq = 0;
    double c9sq = 0, c10sq = 0;

    double l0sq = 0;  // deflection observation Lipschitz bound, H^1 -> L^2
    double l1sq = 0;  // moment observation Lipschitz bound
    double l2sq = 0;  // Lipschitz bound of the deflection misfit gradient
    double l3sq = 0;  // Lipschitz bound of the moment misfit gradient

    double kappa0_required = 0;    // damping floor making alpha admissible
    double c_st = 0;               // stability constant at that floor
    double alpha_sq_threshold = 0; // c9sq * c10sq; need alpha^2 above it
    bool alpha_condition = false;
    double c_st_tilde = 0;         // quadratic-data stability constant (NaN
                                   // when the alpha condition fails)
};

/// Evaluate the full bundle. Defaults mirror the worked examples: when a
/// bound pair is collapsed (lo == hi) the formulas use it directly.
ConstantBundle evaluate_constants(double ell, const CoefficientBounds& b, double T,
                                  double alpha);

/// Damping floor kappa0(alpha) = sqrt(2) T^2 ell^6 e^T (1+T) / (9 r0 alpha).
double kappa0_lower_bound(double ell, double r0, double T, double alpha);

/// Stability constant C_ST = 9 r0 kappa0 T^2 / (ell^6 e^T (1+T)).
double c_st(double ell, double r0, double T, double kappa0);

struct StabilityRow {
    double T = 0, alpha = 0;
    double kappa0 = 0, c_st = 0;
};

/// Tabulate (kappa0, C_ST) over (T, alpha) rows. Matches the published
/// table: the kappa0 coefficient sqrt(2) ell^6 / (9 r0) is rounded to two
/// significant figures (0.0025 at ell = 0.5, r0 = 1) before use, and C_ST
/// is evaluated from the resulting kappa0.
std::vector<StabilityRow> stability_table(const std::vector<std::pair<double, double>>& rows,
                                          double ell = 0.5, double r0 = 1.0);

/// The six (T, alpha) pairs of the published table.
std::vector<std::pair<double, double>> default_stability_rows();

}  // namespace kvbeam

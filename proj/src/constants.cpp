#include "kvbeam/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kvbeam {

ConstantBundle evaluate_constants(double ell, const CoefficientBounds& b, double T,
                                  double alpha) {
    if (!(ell > 0) || !(T > 0)) throw ConfigError("evaluate_constants: need ell > 0, T > 0");
    if (!(alpha >= 0)) throw ConfigError("evaluate_constants: alpha must be >= 0");
    if (!(b.rho0 > 0) || !(b.r0 > 0) || !(b.kappa0 > 0) || b.rho1 < b.rho0 ||
        b.r1 < b.r0 || b.kappa1 < b.kappa0 || b.mu1 < 0)
        throw ConfigError("evaluate_constants: invalid coefficient bounds");

    const double l2 = ell * ell;
    const double l3 = l2 * ell;
    const double l6 = l3 * l3;
    const double eT = std::exp(T);

    ConstantBundle k;
    k.ell = ell;
    k.T = T;
    k.alpha = alpha;

    k.c_star = 4.0 * l2 * (1.0 + 4.0 * l2) + 1.0;
    k.c0sq = eT - 1.0;

    const double l3p3 = l3 + 3.0;
    k.r1 = (4.0 * b.r1 * b.r1 * l3p3 / (3.0 * b.r0) + b.kappa0 * l3 / (4.0 * l3p3) + b.r1) *
           (k.c0sq + 1.0) / b.kappa0;
    k.r2 = 2.0 * k.r1 / (3.0 * b.r0) + 2.0 * l3p3 / (3.0 * l3 * b.kappa0);
    k.r3 = k.r1 * b.rho1 + b.mu1;
    k.r4 = k.r1 * b.r1 + b.r1 * b.r1;
    k.c1sq = std::max({k.r2, k.r3, k.r4, b.kappa1 + 1.0});

    k.c5sq = (2.0 / b.kappa0) *
             std::max(2.0 * (1.0 + T) * l3p3 / (3.0 * b.kappa0),
                      b.kappa0 * l3 / (2.0 * l3p3) + 2.0 * b.r1 +
                          2.0 * T * b.r1 * b.r1 * l3p3 / (3.0 * b.kappa0));
    k.c6sq = (2.0 * l3 / 3.0) *
             (std::max(b.mu1 * b.mu1, b.rho1 * b.rho1) +
              b.rho1 * std::max(1.0 / T, T / 3.0));
    k.c7sq = 2.0 * l2 * std::max(1.0, (2.0 * ell / 3.0) * (b.rho1 * b.rho1 + b.mu1 * b.mu1));
    k.c9sq = 1.0 + T * T + std::pow(T, 4) + std::pow(T, 6);

    const double expC5T = std::exp(k.c5sq * T);
    const double bracket = (1.0 / (2.0 * b.rho0)) *
                               (3.0 * k.c5sq * expC5T + k.c1sq * l3 * (1.0 + T)) +
                           1.0;
    k.c10sq = (2.0 * std::pow(T, 7) * l3 * k.c6sq / (3.0 * b.r0)) * std::exp(T / b.rho0) *
              k.c7sq * bracket;

    k.l0sq = 4.0 * l6 * (1.0 + T) * k.c0sq / (9.0 * b.r0 * b.r0);
    k.l1sq = k.c7sq * (1.0 + (k.c_star * (k.c0sq + 1.0) / (3.0 * b.kappa0 * b.r0) +
                              k.c1sq / (2.0 * b.rho0)) *
                               (1.0 + T) * l3);
    {
        const double s = 2.0 * l6 * (1.0 + T) / (9.0 * b.r0);
        k.l2sq = k.c0sq / (b.kappa0 * b.r0) * (k.c0sq + 1.0) * s * s;
    }
    k.l3sq = (k.c7sq * l3 * T * k.c6sq / (3.0 * b.r0)) * std::exp(T / b.rho0) * bracket;

    if (alpha > 0) {
        k.kappa0_required = kappa0_lower_bound(ell, b.r0, T, alpha);
        k.c_st = c_st(ell, b.r0, T, k.kappa0_required);
    }
    k.alpha_sq_threshold = k.c9sq * k.c10sq;
    k.alpha_condition = alpha * alpha > k.alpha_sq_threshold;
    if (k.alpha_condition) {
        k.c_st_tilde = 4.0 * std::pow(T, 13) * l3 * k.c6sq * std::exp(T / b.rho0) /
                       ((alpha * alpha - k.alpha_sq_threshold) * 3.0 * b.r0);
    } else {
        k.c_st_tilde = std::numeric_limits<double>::quiet_NaN();
    }
    return k;
}

double kappa0_lower_bound(double ell, double r0, double T, double alpha) {
    if (!(alpha > 0)) throw ConfigError("kappa0_lower_bound: alpha must be positive");
    if (!(r0 > 0) || !(ell > 0) || !(T > 0))
        throw ConfigError("kappa0_lower_bound: need ell, r0, T > 0");
    return std::sqrt(2.0) * T * T * std::pow(ell, 6) * std::exp(T) * (1.0 + T) /
           (9.0 * r0 * alpha);
}

double c_st(double ell, double r0, double T, double kappa0) {
    if (!(kappa0 > 0)) throw ConfigError("c_st: kappa0 must be positive");
    if (!(r0 > 0) || !(ell > 0) || !(T > 0)) throw ConfigError("c_st: need ell, r0, T > 0");
    return 9.0 * r0 * kappa0 * T * T / (std::pow(ell, 6) * std::exp(T) * (1.0 + T));
}

namespace {

double round_2_significant(double x) {
    if (x == 0.0) return 0.0;
    const double e = std::floor(std::log10(std::abs(x)));
    const double scale = std::pow(10.0, e - 1.0);
    return std::round(x / scale) * scale;
}

}  // namespace

std::vector<StabilityRow> stability_table(const std::vector<std::pair<double, double>>& rows,
                                          double ell, double r0) {
    const double coef = round_2_significant(std::sqrt(2.0) * std::pow(ell, 6) / (9.0 * r0));
    std::vector<StabilityRow> out;
    out.reserve(rows.size());
    for (auto [T, alpha] : rows) {
        if (!(T > 0) || !(alpha > 0))
            throw ConfigError("stability_table: rows need T > 0, alpha > 0");
        StabilityRow r;
        r.T = T;
        r.alpha = alpha;
        r.kappa0 = coef * T * T * std::exp(T) * (1.0 + T) / alpha;
        r.c_st = c_st(ell, r0, T, r.kappa0);
        out.push_back(r);
    }
    return out;
}

std::vector<std::pair<double, double>> default_stability_rows() {
    return {{0.1, 1e-3}, {0.5, 1e-2}, {0.5, 1e-3}, {0.5, 1e-4}, {0.75, 1e-3}, {1.0, 1e-3}};
}

}  // namespace kvbeam

#include "kvbeam/model.hpp"

#include <algorithm>
#include <cmath>

namespace kvbeam {

Coefficient Coefficient::table(std::vector<double> x, std::vector<double> v) {
    if (x.size() != v.size())
        throw ConfigError("coefficient table: column lengths differ");
    if (x.size() < 2)
        throw ConfigError("coefficient table: needs at least two rows");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw ConfigError("coefficient table: x not strictly increasing");
    Coefficient c;
    c.tabulated_ = true;
    c.value_ = 0.0;
    c.xs_ = std::move(x);
    c.vs_ = std::move(v);
    return c;
}

double Coefficient::operator()(double x) const {
    if (!tabulated_) return value_;
    if (x <= xs_.front()) return vs_.front();
    if (x >= xs_.back()) return vs_.back();
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return (1.0 - w) * vs_[i - 1] + w * vs_[i];
}

double Coefficient::min_value() const {
    if (!tabulated_) return value_;
    return *std::min_element(vs_.begin(), vs_.end());
}

double Coefficient::max_value() const {
    if (!tabulated_) return value_;
    return *std::max_element(vs_.begin(), vs_.end());
}

void BeamCoefficients::derive_missing_bounds() {
    auto fill = [](const Coefficient& c, double& lo, double& hi) {
        if (lo == 0.0 && hi == 0.0) {
            lo = c.min_value();
            hi = c.max_value();
        }
    };
    fill(rho, bounds.rho0, bounds.rho1);
    if (bounds.mu1 == 0.0 && mu.max_value() != 0.0) {
        bounds.mu0 = mu.min_value();
        bounds.mu1 = mu.max_value();
    }
    fill(r, bounds.r0, bounds.r1);
    fill(kappa, bounds.kappa0, bounds.kappa1);
}

std::vector<std::string> validate_coefficients(const BeamCoefficients& c) {
    std::vector<std::string> bad;
    if (!(c.ell > 0.0)) bad.push_back("ell must be positive");

    const auto& b = c.bounds;
    if (!(b.rho0 > 0.0 && b.rho0 <= b.rho1)) bad.push_back("need 0 < rho0 <= rho1");
    if (!(b.mu0 >= 0.0 && b.mu0 <= b.mu1)) bad.push_back("need 0 <= mu0 <= mu1");
    if (!(b.r0 > 0.0 && b.r0 <= b.r1)) bad.push_back("need 0 < r0 <= r1");
    if (!(b.kappa0 > 0.0 && b.kappa0 <= b.kappa1))
        bad.push_back("need 0 < kappa0 <= kappa1");

    auto coverage = [&](const Coefficient& co, const char* name) {
        if (!co.tabulated()) return;
        if (co.breakpoints().front() > 0.0 || co.breakpoints().back() < c.ell)
            bad.push_back(std::string(name) + " table does not cover [0, ell]");
    };
    coverage(c.rho, "rho");
    coverage(c.mu, "mu");
    coverage(c.r, "r");
    coverage(c.kappa, "kappa");

    auto in_range = [&](const Coefficient& co, double lo, double hi, const char* name) {
        const std::size_t samples = 1000;
        double worst_lo = std::numeric_limits<double>::infinity();
        double worst_hi = -worst_lo;
        for (std::size_t i = 0; i <= samples; ++i) {
            double v = co(c.ell * static_cast<double>(i) / samples);
            worst_lo = std::min(worst_lo, v);
            worst_hi = std::max(worst_hi, v);
        }
        for (double x : co.breakpoints()) {
            if (x < 0.0 || x > c.ell) continue;
            double v = co(x);
            worst_lo = std::min(worst_lo, v);
            worst_hi = std::max(worst_hi, v);
        }
        const double slack = 1e-12 * std::max(1.0, std::abs(hi));
        if (worst_lo < lo - slack)
            bad.push_back(std::string(name) + " drops below its lower bound");
        if (worst_hi > hi + slack)
            bad.push_back(std::string(name) + " exceeds its upper bound");
    };
    if (bad.empty()) {
        in_range(c.rho, b.rho0, b.rho1, "rho");
        in_range(c.mu, b.mu0, b.mu1, "mu");
        in_range(c.r, b.r0, b.r1, "r");
        in_range(c.kappa, b.kappa0, b.kappa1, "kappa");
    }
    return bad;
}

TimeGrid::TimeGrid(double T_, std::size_t n_steps_) : T(T_), n_steps(n_steps_) {
    if (!(T > 0.0)) throw ConfigError("time grid: T must be positive");
    if (n_steps < 1) throw ConfigError("time grid: n_steps must be >= 1");
}

SpaceMesh SpaceMesh::uniform(double ell, std::size_t n_elems) {
    if (!(ell > 0.0)) throw ConfigError("mesh: ell must be positive");
    if (n_elems < 1) throw ConfigError("mesh: n_elems must be >= 1");
    SpaceMesh m;
    m.ell = ell;
    m.nodes.resize(n_elems + 1);
    for (std::size_t i = 0; i <= n_elems; ++i)
        m.nodes[i] = ell * static_cast<double>(i) / static_cast<double>(n_elems);
    m.nodes.back() = ell;
    return m;
}

SourceSignal::SourceSignal(TimeGrid g, std::vector<double> v, SignalClass k)
    : grid(g), values(std::move(v)), klass(k) {
    if (values.size() != grid.size())
        throw ConfigError("source signal: sample count does not match time grid");
}

std::vector<double> trapezoid_weights(std::size_t n, double dt) {
    std::vector<double> w(n, dt);
    if (n == 0) return w;
    w.front() = 0.5 * dt;
    w.back() = 0.5 * dt;
    if (n == 1) w.front() = 0.0;
    return w;
}

double l2_inner(const std::vector<double>& a, const std::vector<double>& b, double dt) {
    if (a.size() != b.size()) throw std::invalid_argument("l2_inner: size mismatch");
    auto w = trapezoid_weights(a.size(), dt);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

double l2_norm(const std::vector<double>& values, double dt) {
    return std::sqrt(l2_inner(values, values, dt));
}

std::vector<double> forward_differences(const std::vector<double>& values, double dt,
                                        unsigned m) {
    std::vector<double> d = values;
    for (unsigned j = 0; j < m; ++j) {
        if (d.size() < 2)
            throw std::invalid_argument("forward_differences: too few samples");
        for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = (d[i + 1] - d[i]) / dt;
        d.pop_back();
    }
    return d;
}

double discrete_seminorm(const std::vector<double>& values, double dt, unsigned m) {
    return l2_norm(forward_differences(values, dt, m), dt);
}

double sobolev_norm(const std::vector<double>& values, double dt, unsigned m) {
    double s = 0.0;
    for (unsigned j = 0; j <= m; ++j) {
        double sn = discrete_seminorm(values, dt, j);
        s += sn * sn;
    }
    return std::sqrt(s);
}

void project_consistency(std::vector<double>& values, double dt, SignalClass klass) {
    const unsigned m = static_cast<unsigned>(klass) - 1;  // polynomial degree
    if (values.size() < m + 1)
        throw std::invalid_argument("project_consistency: too few samples");

    // Newton divided differences of the interpolant through the first m+1
    // samples at t_0..t_m.
    std::vector<double> coef(values.begin(), values.begin() + m + 1);
    for (unsigned level = 1; level <= m; ++level)
        for (unsigned i = m; i >= level; --i)
            coef[i] = (coef[i] - coef[i - 1]) / (static_cast<double>(level) * dt);

    for (std::size_t k = 0; k < values.size(); ++k) {
        double t = static_cast<double>(k) * dt;
        double p = coef[m];
        for (int j = static_cast<int>(m) - 1; j >= 0; --j)
            p = p * (t - static_cast<double>(j) * dt) + coef[j];
        values[k] -= p;
    }
    // The interpolant matches the leading samples by construction; pin them
    // to exact zeros so repeated projection is a bitwise no-op.
    for (unsigned i = 0; i <= m; ++i) values[i] = 0.0;
}

void project_consistency(SourceSignal& g) {
    project_consistency(g.values, g.grid.dt(), g.klass);
}

bool within_ball(const SourceSignal& g) {
    if (!std::isfinite(g.ball_radius)) return true;
    unsigned m = static_cast<unsigned>(g.klass);
    return sobolev_norm(g.values, g.grid.dt(), m) <= g.ball_radius;
}

}  // namespace kvbeam

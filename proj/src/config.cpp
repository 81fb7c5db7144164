#include "kvbeam/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "kvbeam/constants.hpp"
#include "kvbeam/csv.hpp"

namespace kvbeam {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

struct RawConfig {
    // section -> key -> value, plus consumption tracking for unknown-key
    // detection.
    std::map<std::string, std::map<std::string, std::string>> data;
    mutable std::map<std::string, std::map<std::string, bool>> used;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = data.find(sec);
        return s != data.end() && s->second.count(key) > 0;
    }
    std::optional<std::string> get(const std::string& sec, const std::string& key) const {
        auto s = data.find(sec);
        if (s == data.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        used[sec][key] = true;
        return k->second;
    }
};

RawConfig parse_ini(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty section name");
            if (raw.data.count(section))
                throw ConfigError("config line " + std::to_string(lineno) + ": duplicate section [" +
                                  section + "]");
            raw.data[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (raw.data[section].count(key))
            throw ConfigError("config: duplicate key " + section + "." + key);
        raw.data[section][key] = value;
    }
    return raw;
}

double to_double(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(sec + "." + key + ": not a number: '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        unsigned long long d = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(sec + "." + key + ": not a nonnegative integer: '" + v + "'");
    }
}

class Reader {
public:
    Reader(const RawConfig& raw, std::string origin_dir)
        : raw_(raw), origin_(std::move(origin_dir)) {}

    bool has_section(const std::string& sec) const { return raw_.data.count(sec) > 0; }

    double number(const std::string& sec, const std::string& key, double dflt) const {
        auto v = raw_.get(sec, key);
        return v ? to_double(sec, key, *v) : dflt;
    }
    std::optional<double> number_opt(const std::string& sec, const std::string& key) const {
        auto v = raw_.get(sec, key);
        if (!v) return std::nullopt;
        return to_double(sec, key, *v);
    }
    double number_req(const std::string& sec, const std::string& key) const {
        auto v = raw_.get(sec, key);
        if (!v) throw ConfigError("config: missing required key " + sec + "." + key);
        return to_double(sec, key, *v);
    }
    std::uint64_t uinteger(const std::string& sec, const std::string& key,
                           std::uint64_t dflt) const {
        auto v = raw_.get(sec, key);
        return v ? to_u64(sec, key, *v) : dflt;
    }
    std::string text(const std::string& sec, const std::string& key,
                     const std::string& dflt) const {
        auto v = raw_.get(sec, key);
        return v ? *v : dflt;
    }
    bool flag(const std::string& sec, const std::string& key, bool dflt) const {
        auto v = raw_.get(sec, key);
        if (!v) return dflt;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError(sec + "." + key + ": expected a boolean, got '" + *v + "'");
    }

    /// Coefficient value: a number, or csv:<path> with a two-column table.
    Coefficient coefficient(const std::string& sec, const std::string& key,
                            double dflt) const {
        auto v = raw_.get(sec, key);
        if (!v) return Coefficient(dflt);
        if (v->rfind("csv:", 0) == 0) {
            std::filesystem::path p(v->substr(4));
            if (p.is_relative() && !origin_.empty()) p = std::filesystem::path(origin_) / p;
            CsvTable t = read_csv(p.string());
            if (t.columns.size() != 2)
                throw ConfigError(sec + "." + key + ": coefficient table " + p.string() +
                                  " must have exactly two columns (x, value)");
            try {
                return Coefficient::table(t.columns[0], t.columns[1]);
            } catch (const ConfigError& e) {
                throw ConfigError(sec + "." + key + ": " + e.what());
            }
        }
        return Coefficient(to_double(sec, key, *v));
    }

    void check_all_consumed() const {
        static const std::map<std::string, bool> known_sections = {
            {"beam", true},   {"mesh", true},      {"time", true},
            {"source", true}, {"noise", true},     {"inverse", true},
            {"constants", true}, {"stability", true}};
        for (const auto& [sec, keys] : raw_.data) {
            if (!known_sections.count(sec))
                throw ConfigError("config: unknown section [" + sec + "]");
            for (const auto& [key, _] : keys)
                if (!raw_.used[sec][key])
                    throw ConfigError("config: unknown key " + sec + "." + key);
        }
    }

private:
    const RawConfig& raw_;
    std::string origin_;
};

SignalClass parse_class(const std::string& sec, const std::string& v) {
    if (v == "g1") return SignalClass::G1;
    if (v == "g2") return SignalClass::G2;
    if (v == "g3") return SignalClass::G3;
    throw ConfigError(sec + ".class: expected g1|g2|g3, got '" + v + "'");
}

std::vector<std::pair<double, double>> parse_rows(const std::string& raw) {
    // "T:alpha, T:alpha, ..."
    std::vector<std::pair<double, double>> rows;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("stability.rows: expected T:alpha entries, got '" + item + "'");
        rows.emplace_back(to_double("stability", "rows", trim(item.substr(0, colon))),
                          to_double("stability", "rows", trim(item.substr(colon + 1))));
    }
    if (rows.empty()) throw ConfigError("stability.rows: no entries");
    return rows;
}

}  // namespace

TikhonovConfig RunConfig::tikhonov() const {
    TikhonovConfig tc;
    tc.problem = inverse.problem;
    tc.alpha = inverse.alpha;
    tc.reg_order = reg_order();
    tc.step_rule = inverse.step_rule;
    tc.step = inverse.step;
    tc.max_iters = inverse.max_iters;
    tc.morozov_tau = inverse.morozov_tau;
    tc.grad_tol = inverse.grad_tol;
    tc.smoothing_width = inverse.smoothing_width;
    tc.smoothing_passes = inverse.smoothing_passes;
    tc.enforce_ball = inverse.enforce_ball;
    return tc;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin_dir) {
    RawConfig raw = parse_ini(text);
    Reader rd(raw, origin_dir);

    for (const char* sec : {"beam", "mesh", "time"})
        if (!rd.has_section(sec))
            throw ConfigError(std::string("config: missing required section [") + sec + "]");

    RunConfig cfg;

    cfg.beam.ell = rd.number_req("beam", "ell");
    cfg.beam.rho = rd.coefficient("beam", "rho", 1.0);
    cfg.beam.mu = rd.coefficient("beam", "mu", 0.0);
    cfg.beam.r = rd.coefficient("beam", "r", 1.0);
    cfg.beam.kappa = rd.coefficient("beam", "kappa", 1.0);
    auto bound = [&](const char* key, double dflt) { return rd.number("beam", key, dflt); };
    cfg.beam.bounds.rho0 = bound("rho0", 0.0);
    cfg.beam.bounds.rho1 = bound("rho1", 0.0);
    cfg.beam.bounds.mu0 = bound("mu0", 0.0);
    cfg.beam.bounds.mu1 = bound("mu1", 0.0);
    cfg.beam.bounds.r0 = bound("r0", 0.0);
    cfg.beam.bounds.r1 = bound("r1", 0.0);
    cfg.beam.bounds.kappa0 = bound("kappa0", 0.0);
    cfg.beam.bounds.kappa1 = bound("kappa1", 0.0);
    cfg.beam.derive_missing_bounds();
    {
        auto bad = validate_coefficients(cfg.beam);
        if (!bad.empty()) throw ConfigError("beam: " + bad.front());
    }

    const double ne = rd.number_req("mesh", "n_elems");
    if (!(ne >= 1) || ne != std::floor(ne))
        throw ConfigError("mesh.n_elems: must be a positive integer");
    cfg.n_elems = static_cast<std::size_t>(ne);

    cfg.T = rd.number_req("time", "T");
    if (!(cfg.T > 0)) throw ConfigError("time.T: must be positive");
    const double ns = rd.number_req("time", "n_steps");
    if (!(ns >= 1) || ns != std::floor(ns))
        throw ConfigError("time.n_steps: must be a positive integer");
    cfg.n_steps = static_cast<std::size_t>(ns);

    cfg.source.kind = rd.text("source", "kind", "zero");
    static const char* kinds[] = {"zero", "ramp", "sin2", "tsin2", "csv"};
    if (std::find_if(std::begin(kinds), std::end(kinds),
                     [&](const char* k) { return cfg.source.kind == k; }) == std::end(kinds))
        throw ConfigError("source.kind: expected zero|ramp|sin2|tsin2|csv, got '" +
                          cfg.source.kind + "'");
    cfg.source.amplitude = rd.number("source", "amplitude", 1.0);
    cfg.source.path = rd.text("source", "path", "");
    if (cfg.source.kind == "csv") {
        if (cfg.source.path.empty()) throw ConfigError("source.path: required for kind=csv");
        std::filesystem::path p(cfg.source.path);
        if (p.is_relative() && !origin_dir.empty())
            cfg.source.path = (std::filesystem::path(origin_dir) / p).string();
    }
    {
        const std::string cls = rd.text("source", "class", "");
        if (!cls.empty()) cfg.source.klass = parse_class("source", cls);
    }

    cfg.noise.delta = rd.number("noise", "delta", 0.0);
    if (cfg.noise.delta < 0) throw ConfigError("noise.delta: must be nonnegative");
    cfg.noise.seed = rd.uinteger("noise", "seed", 0);

    {
        const std::string p = rd.text("inverse", "problem", "ibvp1");
        if (p == "ibvp1")
            cfg.inverse.problem = InverseProblem::TipDeflection;
        else if (p == "ibvp2")
            cfg.inverse.problem = InverseProblem::RootMoment;
        else
            throw ConfigError("inverse.problem: expected ibvp1|ibvp2, got '" + p + "'");
    }
    cfg.inverse.alpha = rd.number("inverse", "alpha", 0.0);
    if (cfg.inverse.alpha < 0) throw ConfigError("inverse.alpha: must be nonnegative");
    if (auto ro = rd.number_opt("inverse", "reg_order")) {
        if (!(*ro >= 0) || *ro != std::floor(*ro) || *ro > 3)
            throw ConfigError("inverse.reg_order: must be an integer in [0, 3]");
        cfg.inverse.reg_order = static_cast<unsigned>(*ro);
    }
    {
        const std::string s = rd.text("inverse", "step_rule", "backtracking");
        if (s == "constant")
            cfg.inverse.step_rule = StepRule::ConstantLipschitz;
        else if (s == "fixed")
            cfg.inverse.step_rule = StepRule::Fixed;
        else if (s == "backtracking")
            cfg.inverse.step_rule = StepRule::Backtracking;
        else
            throw ConfigError("inverse.step_rule: expected constant|fixed|backtracking, got '" +
                              s + "'");
    }
    cfg.inverse.step = rd.number("inverse", "step", 0.0);
    if (cfg.inverse.step_rule == StepRule::Fixed && !(cfg.inverse.step > 0))
        throw ConfigError("inverse.step: must be positive for step_rule = fixed");
    {
        const double mi = rd.number("inverse", "max_iters", 200);
        if (!(mi >= 0) || mi != std::floor(mi))
            throw ConfigError("inverse.max_iters: must be a nonnegative integer");
        cfg.inverse.max_iters = static_cast<unsigned>(mi);
    }
    cfg.inverse.morozov_tau = rd.number("inverse", "morozov_tau", 1.2);
    if (!(cfg.inverse.morozov_tau >= 1.0))
        throw ConfigError("inverse.morozov_tau: must be >= 1");
    cfg.inverse.grad_tol = rd.number("inverse", "grad_tol", 0.0);
    if (cfg.inverse.grad_tol < 0) throw ConfigError("inverse.grad_tol: must be nonnegative");
    {
        const double w = rd.number("inverse", "smoothing_width", 5);
        if (!(w >= 1) || w != std::floor(w))
            throw ConfigError("inverse.smoothing_width: must be a positive integer");
        cfg.inverse.smoothing_width = static_cast<unsigned>(w);
        const double p = rd.number("inverse", "smoothing_passes", 4);
        if (!(p >= 0) || p != std::floor(p))
            throw ConfigError("inverse.smoothing_passes: must be a nonnegative integer");
        cfg.inverse.smoothing_passes = static_cast<unsigned>(p);
    }
    {
        const double rf = rd.number("inverse", "refine", 2);
        if (!(rf >= 1) || rf != std::floor(rf))
            throw ConfigError("inverse.refine: must be a positive integer");
        cfg.inverse.refine = static_cast<unsigned>(rf);
    }
    cfg.inverse.enforce_ball = rd.flag("inverse", "enforce_ball", false);
    cfg.inverse.ball_radius =
        rd.number("inverse", "ball_radius", std::numeric_limits<double>::infinity());

    cfg.constants.alpha = rd.number("constants", "alpha", 1e-3);
    if (!(cfg.constants.alpha > 0)) throw ConfigError("constants.alpha: must be positive");

    cfg.stability.ell = rd.number("stability", "ell", 0.5);
    cfg.stability.r0 = rd.number("stability", "r0", 1.0);
    {
        const std::string rows = rd.text("stability", "rows", "");
        cfg.stability.rows = rows.empty() ? default_stability_rows() : parse_rows(rows);
    }

    rd.check_all_consumed();
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

SourceSignal make_source(const SourceSpec& spec, const TimeGrid& grid,
                         const std::string& origin_dir) {
    std::vector<double> vals(grid.size(), 0.0);
    SignalClass klass = SignalClass::G3;
    const double a = spec.amplitude;
    const double T = grid.T;

    if (spec.kind == "zero") {
        klass = SignalClass::G3;
    } else if (spec.kind == "ramp") {
        for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = a * grid.t(k);
        klass = SignalClass::G1;
    } else if (spec.kind == "sin2") {
        for (std::size_t k = 0; k < vals.size(); ++k) {
            const double s = std::sin(M_PI * grid.t(k) / T);
            vals[k] = a * s * s;
        }
        klass = SignalClass::G2;
    } else if (spec.kind == "tsin2") {
        for (std::size_t k = 0; k < vals.size(); ++k) {
            const double s = std::sin(M_PI * grid.t(k) / T);
            vals[k] = a * grid.t(k) * s * s;
        }
        klass = SignalClass::G3;
    } else if (spec.kind == "csv") {
        std::filesystem::path p(spec.path);
        if (p.is_relative() && !origin_dir.empty()) p = std::filesystem::path(origin_dir) / p;
        CsvTable t = read_csv(p.string());
        if (t.columns.size() != 2)
            throw ConfigError("source table " + p.string() +
                              " must have exactly two columns (t, g)");
        Coefficient interp = Coefficient::table(t.columns[0], t.columns[1]);
        for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = a * interp(grid.t(k));
        klass = SignalClass::G1;
    } else {
        throw ConfigError("source.kind: unknown kind '" + spec.kind + "'");
    }

    SourceSignal g(grid, std::move(vals), spec.klass.value_or(klass));
    return g;
}

std::uint64_t effective_seed(const NoiseSpec& noise) {
    const char* env = std::getenv("BEAM_SEED");
    if (!env || !*env) return noise.seed;
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("BEAM_SEED: not a nonnegative integer: '") + env + "'");
    }
}

}  // namespace kvbeam

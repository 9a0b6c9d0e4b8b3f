// Run configuration: a flat-section key = value text format with strict
// unknown-key checking, plus builders for the named coefficient and
// initial-datum families.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chemofront/free_boundary.hpp"
#include "chemofront/grid.hpp"
#include "chemofront/params.hpp"
#include "chemofront/stepper.hpp"

namespace chemofront {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line_) + ": " + msg),
          line(line_) {}
};

enum class ProblemKind { half_line, whole_line, free_boundary_single, free_boundary_double };

inline const char* to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::half_line: return "half_line";
        case ProblemKind::whole_line: return "whole_line";
        case ProblemKind::free_boundary_single: return "free_boundary_single";
        default: return "free_boundary_double";
    }
}

enum class CoefficientKind { constant, sinusoidal_t, gaussian_x, product };

inline const char* to_string(CoefficientKind k) {
    switch (k) {
        case CoefficientKind::constant: return "constant";
        case CoefficientKind::sinusoidal_t: return "sinusoidal_t";
        case CoefficientKind::gaussian_x: return "gaussian_x";
        default: return "product";
    }
}

// base + amp*sin(2 pi t / period), optionally modulated by a Gaussian bump in x
struct CoefficientSpec {
    CoefficientKind kind = CoefficientKind::constant;
    double base = 1.0;
    double amp = 0.0;     // time amplitude
    double period = 1.0;  // time period of the sinusoid
    double amp_x = 0.0;   // space amplitude
    double center = 0.0;
    double width = 1.0;

    std::function<double(double, double)> make() const {
        const double b = base, a = amp, T = period, ax = amp_x, c = center, w = width;
        switch (kind) {
            case CoefficientKind::constant:
                return [b](double, double) { return b; };
            case CoefficientKind::sinusoidal_t:
                return [b, a, T](double t, double) {
                    return b + a * std::sin(2.0 * std::numbers::pi * t / T);
                };
            case CoefficientKind::gaussian_x:
                return [b, ax, c, w](double, double x) {
                    const double z = (x - c) / w;
                    return b + ax * std::exp(-0.5 * z * z);
                };
            default:
                return [b, a, T, ax, c, w](double t, double x) {
                    const double z = (x - c) / w;
                    return (b + a * std::sin(2.0 * std::numbers::pi * t / T)) *
                           (1.0 + ax * std::exp(-0.5 * z * z));
                };
        }
    }
    bool t_only() const {
        return kind == CoefficientKind::constant || kind == CoefficientKind::sinusoidal_t;
    }
    bool is_constant() const { return kind == CoefficientKind::constant; }
};

enum class InitialKind { constant, gaussian, cosine_bump, piecewise };

inline const char* to_string(InitialKind k) {
    switch (k) {
        case InitialKind::constant: return "constant";
        case InitialKind::gaussian: return "gaussian";
        case InitialKind::cosine_bump: return "cosine_bump";
        default: return "piecewise";
    }
}

struct InitialSpec {
    InitialKind kind = InitialKind::constant;
    double value = 1.0;  // constant level / piecewise left value
    double amplitude = 1.0;
    double center = 0.0;
    double width = 1.0;
    double floor = 0.0;
    double x_split = 0.0;
    double value_right = 0.0;

    std::function<double(double)> make() const {
        const InitialSpec s = *this;
        switch (kind) {
            case InitialKind::constant:
                return [s](double) { return s.value; };
            case InitialKind::gaussian:
                return [s](double x) {
                    const double z = (x - s.center) / s.width;
                    return s.floor + s.amplitude * std::exp(-0.5 * z * z);
                };
            case InitialKind::cosine_bump:
                return [s](double x) {
                    const double z = (x - s.center) / s.width;
                    if (std::abs(z) >= 1.0) return s.floor;
                    return s.floor +
                           s.amplitude * 0.5 * (1.0 + std::cos(std::numbers::pi * z));
                };
            default:
                return [s](double x) { return x < s.x_split ? s.value : s.value_right; };
        }
    }
};

struct SweepSpec {
    double h0_min = 0.1, h0_max = 5.0;
    int h0_count = 8;
    double u0_min = 0.1, u0_max = 2.0;
    int u0_count = 8;
    double t_end = 40.0;
};

struct RunConfig {
    ProblemKind problem = ProblemKind::half_line;
    double t0 = 0.0;
    double t_end = 50.0;
    std::int64_t seed = 0;

    ModelParams params;
    CoefficientSpec a_spec;
    CoefficientSpec b_spec;
    double period = 0.0;  // period_T when > 0

    InitialSpec initial;
    double h0 = 2.0;
    double g0 = -2.0;

    double x_max = 40.0;
    int n_cells = 400;

    StepConfig stepping;
    double probe_interval = 1.0;

    std::string series_path = "series.tsv";
    std::string report_path = "report.json";

    SweepSpec sweep;

    bool is_free_boundary() const {
        return problem == ProblemKind::free_boundary_single ||
               problem == ProblemKind::free_boundary_double;
    }
};

namespace detail {

struct RawEntry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

class RawConfig {
  public:
    std::map<std::string, RawEntry> entries;  // "section.key" -> value

    bool has(const std::string& key) const { return entries.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        it->second.consumed = true;
        return it->second.value;
    }

    double get_number(const std::string& key, double fallback) {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        it->second.consumed = true;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size())
                throw ConfigError(it->second.line, "expected a number for '" + key +
                                                       "', got '" + it->second.value + "'");
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError(it->second.line, "expected a number for '" + key +
                                                   "', got '" + it->second.value + "'");
        }
    }

    std::int64_t get_integer(const std::string& key, std::int64_t fallback) {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        const double v = get_number(key, 0.0);
        if (v != std::floor(v))
            throw ConfigError(it->second.line, "expected an integer for '" + key + "'");
        return std::int64_t(v);
    }

    bool get_bool(const std::string& key, bool fallback) {
        auto it = entries.find(key);
        if (it == entries.end()) return fallback;
        it->second.consumed = true;
        if (it->second.value == "true") return true;
        if (it->second.value == "false") return false;
        throw ConfigError(it->second.line,
                          "expected true/false for '" + key + "', got '" +
                              it->second.value + "'");
    }

    int line_of(const std::string& key) const {
        auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.line;
    }

    void fail_on_unconsumed() const {
        for (const auto& [key, e] : entries)
            if (!e.consumed) throw ConfigError(e.line, "unknown key '" + key + "'");
    }
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline RawConfig tokenize(std::string_view text) {
    RawConfig raw;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line_view =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string line = trim(line_view);
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(line_no, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line_no, "expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        if (section.empty()) throw ConfigError(line_no, "key '" + key + "' outside any section");
        const std::string full = section + "." + key;
        if (raw.entries.count(full))
            throw ConfigError(line_no, "duplicate key '" + full + "'");
        raw.entries[full] = RawEntry{value, line_no, false};
    }
    return raw;
}

inline CoefficientKind parse_coefficient_kind(const std::string& s, int line) {
    if (s == "constant") return CoefficientKind::constant;
    if (s == "sinusoidal_t") return CoefficientKind::sinusoidal_t;
    if (s == "gaussian_x") return CoefficientKind::gaussian_x;
    if (s == "product") return CoefficientKind::product;
    throw ConfigError(line, "unknown coefficient kind '" + s + "'");
}

inline CoefficientSpec parse_coefficient(RawConfig& raw, const std::string& prefix,
                                         double default_base) {
    CoefficientSpec c;
    c.base = default_base;
    const std::string key = "coefficients." + prefix;
    const int line = raw.line_of(key + "_kind");
    c.kind = parse_coefficient_kind(raw.get_string(key + "_kind", "constant"), line);
    c.base = raw.get_number(key + "_base", c.base);
    c.amp = raw.get_number(key + "_amp", c.amp);
    c.period = raw.get_number(key + "_period", c.period);
    c.amp_x = raw.get_number(key + "_amp_x", c.amp_x);
    c.center = raw.get_number(key + "_center", c.center);
    c.width = raw.get_number(key + "_width", c.width);
    return c;
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
    detail::RawConfig raw = detail::tokenize(text);
    RunConfig cfg;

    {
        const int line = raw.line_of("problem.kind");
        const std::string kind = raw.get_string("problem.kind", "half_line");
        if (kind == "half_line")
            cfg.problem = ProblemKind::half_line;
        else if (kind == "whole_line")
            cfg.problem = ProblemKind::whole_line;
        else if (kind == "free_boundary_single")
            cfg.problem = ProblemKind::free_boundary_single;
        else if (kind == "free_boundary_double")
            cfg.problem = ProblemKind::free_boundary_double;
        else
            throw ConfigError(line, "unknown problem kind '" + kind + "'");
        cfg.t0 = raw.get_number("problem.t0", cfg.t0);
        cfg.t_end = raw.get_number("problem.t_end", cfg.t_end);
        cfg.seed = raw.get_integer("problem.seed", cfg.seed);
    }

    cfg.params.chi1 = raw.get_number("params.chi1", cfg.params.chi1);
    cfg.params.chi2 = raw.get_number("params.chi2", cfg.params.chi2);
    cfg.params.lambda1 = raw.get_number("params.lambda1", cfg.params.lambda1);
    cfg.params.lambda2 = raw.get_number("params.lambda2", cfg.params.lambda2);
    cfg.params.mu1 = raw.get_number("params.mu1", cfg.params.mu1);
    cfg.params.mu2 = raw.get_number("params.mu2", cfg.params.mu2);
    cfg.params.nu = raw.get_number("params.nu", cfg.params.nu);

    cfg.a_spec = detail::parse_coefficient(raw, "a", 1.0);
    cfg.b_spec = detail::parse_coefficient(raw, "b", 1.0);
    cfg.period = raw.get_number("coefficients.period", 0.0);

    {
        const int line = raw.line_of("initial.kind");
        const std::string kind = raw.get_string("initial.kind", "constant");
        if (kind == "constant")
            cfg.initial.kind = InitialKind::constant;
        else if (kind == "gaussian")
            cfg.initial.kind = InitialKind::gaussian;
        else if (kind == "cosine_bump")
            cfg.initial.kind = InitialKind::cosine_bump;
        else if (kind == "piecewise")
            cfg.initial.kind = InitialKind::piecewise;
        else
            throw ConfigError(line, "unknown initial kind '" + kind + "'");
        cfg.initial.value = raw.get_number("initial.value", cfg.initial.value);
        cfg.initial.amplitude = raw.get_number("initial.amplitude", cfg.initial.amplitude);
        cfg.initial.center = raw.get_number("initial.center", cfg.initial.center);
        cfg.initial.width = raw.get_number("initial.width", cfg.initial.width);
        cfg.initial.floor = raw.get_number("initial.floor", cfg.initial.floor);
        cfg.initial.x_split = raw.get_number("initial.x_split", cfg.initial.x_split);
        cfg.initial.value_right = raw.get_number("initial.value_right", cfg.initial.value_right);
        cfg.h0 = raw.get_number("initial.h0", cfg.h0);
        cfg.g0 = raw.get_number("initial.g0", cfg.g0);
    }

    cfg.x_max = raw.get_number("grid.x_max", cfg.x_max);
    cfg.n_cells = int(raw.get_integer("grid.n_cells", cfg.n_cells));

    cfg.stepping.dt = raw.get_number("stepping.dt", cfg.stepping.dt);
    {
        const int line = raw.line_of("stepping.scheme");
        const std::string s = raw.get_string("stepping.scheme", "imex");
        if (s == "imex")
            cfg.stepping.scheme = Scheme::imex;
        else if (s == "explicit")
            cfg.stepping.scheme = Scheme::explicit_euler;
        else
            throw ConfigError(line, "unknown scheme '" + s + "'");
    }
    cfg.stepping.cfl_safety = raw.get_number("stepping.cfl_safety", cfg.stepping.cfl_safety);
    cfg.stepping.clip_negative = raw.get_bool("stepping.clip_negative", cfg.stepping.clip_negative);
    cfg.stepping.t_end = cfg.t_end;

    cfg.probe_interval = raw.get_number("probes.interval", cfg.probe_interval);

    cfg.series_path = raw.get_string("output.series", cfg.series_path);
    cfg.report_path = raw.get_string("output.report", cfg.report_path);

    cfg.sweep.h0_min = raw.get_number("sweep.h0_min", cfg.sweep.h0_min);
    cfg.sweep.h0_max = raw.get_number("sweep.h0_max", cfg.sweep.h0_max);
    cfg.sweep.h0_count = int(raw.get_integer("sweep.h0_count", cfg.sweep.h0_count));
    cfg.sweep.u0_min = raw.get_number("sweep.u0_min", cfg.sweep.u0_min);
    cfg.sweep.u0_max = raw.get_number("sweep.u0_max", cfg.sweep.u0_max);
    cfg.sweep.u0_count = int(raw.get_integer("sweep.u0_count", cfg.sweep.u0_count));
    cfg.sweep.t_end = raw.get_number("sweep.t_end", cfg.sweep.t_end);

    raw.fail_on_unconsumed();

    // validation
    cfg.params.validate();
    if (!(cfg.t_end > cfg.t0)) throw ConfigError(0, "t_end must exceed t0");
    if (cfg.n_cells < 8) throw ConfigError(0, "grid.n_cells must be >= 8");
    if (!(cfg.x_max > 0.0)) throw ConfigError(0, "grid.x_max must be > 0");
    if (!(cfg.probe_interval > 0.0)) throw ConfigError(0, "probes.interval must be > 0");
    if (cfg.is_free_boundary() && !(cfg.h0 > 0.0))
        throw ConfigError(0, "initial.h0 must be > 0");
    if (cfg.problem == ProblemKind::free_boundary_double && !(cfg.g0 < cfg.h0))
        throw ConfigError(0, "initial.g0 must be < h0");
    for (const CoefficientSpec* s : {&cfg.a_spec, &cfg.b_spec}) {
        if ((s->kind == CoefficientKind::sinusoidal_t || s->kind == CoefficientKind::product) &&
            !(s->period > 0.0))
            throw ConfigError(0, "sinusoidal coefficients need a positive period");
        if ((s->kind == CoefficientKind::gaussian_x || s->kind == CoefficientKind::product) &&
            !(s->width > 0.0))
            throw ConfigError(0, "gaussian coefficients need a positive width");
    }
    if (cfg.period < 0.0) throw ConfigError(0, "coefficients.period must be >= 0");
    return cfg;
}

// Canonical serialization; parse(serialize(parse(text))) == parse(text).
inline std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "[problem]\n";
    os << "kind = " << to_string(c.problem) << "\n";
    os << "t0 = " << num(c.t0) << "\n";
    os << "t_end = " << num(c.t_end) << "\n";
    os << "seed = " << c.seed << "\n\n";
    os << "[params]\n";
    os << "chi1 = " << num(c.params.chi1) << "\n";
    os << "chi2 = " << num(c.params.chi2) << "\n";
    os << "lambda1 = " << num(c.params.lambda1) << "\n";
    os << "lambda2 = " << num(c.params.lambda2) << "\n";
    os << "mu1 = " << num(c.params.mu1) << "\n";
    os << "mu2 = " << num(c.params.mu2) << "\n";
    os << "nu = " << num(c.params.nu) << "\n\n";
    os << "[coefficients]\n";
    for (const auto& [prefix, s] :
         {std::pair<const char*, const CoefficientSpec&>{"a", c.a_spec},
          std::pair<const char*, const CoefficientSpec&>{"b", c.b_spec}}) {
        os << prefix << "_kind = " << to_string(s.kind) << "\n";
        os << prefix << "_base = " << num(s.base) << "\n";
        os << prefix << "_amp = " << num(s.amp) << "\n";
        os << prefix << "_period = " << num(s.period) << "\n";
        os << prefix << "_amp_x = " << num(s.amp_x) << "\n";
        os << prefix << "_center = " << num(s.center) << "\n";
        os << prefix << "_width = " << num(s.width) << "\n";
    }
    os << "period = " << num(c.period) << "\n\n";
    os << "[initial]\n";
    os << "kind = " << to_string(c.initial.kind) << "\n";
    os << "value = " << num(c.initial.value) << "\n";
    os << "amplitude = " << num(c.initial.amplitude) << "\n";
    os << "center = " << num(c.initial.center) << "\n";
    os << "width = " << num(c.initial.width) << "\n";
    os << "floor = " << num(c.initial.floor) << "\n";
    os << "x_split = " << num(c.initial.x_split) << "\n";
    os << "value_right = " << num(c.initial.value_right) << "\n";
    os << "h0 = " << num(c.h0) << "\n";
    os << "g0 = " << num(c.g0) << "\n\n";
    os << "[grid]\n";
    os << "x_max = " << num(c.x_max) << "\n";
    os << "n_cells = " << c.n_cells << "\n\n";
    os << "[stepping]\n";
    os << "dt = " << num(c.stepping.dt) << "\n";
    os << "scheme = " << (c.stepping.scheme == Scheme::imex ? "imex" : "explicit") << "\n";
    os << "cfl_safety = " << num(c.stepping.cfl_safety) << "\n";
    os << "clip_negative = " << (c.stepping.clip_negative ? "true" : "false") << "\n\n";
    os << "[probes]\n";
    os << "interval = " << num(c.probe_interval) << "\n\n";
    os << "[output]\n";
    os << "series = " << c.series_path << "\n";
    os << "report = " << c.report_path << "\n\n";
    os << "[sweep]\n";
    os << "h0_min = " << num(c.sweep.h0_min) << "\n";
    os << "h0_max = " << num(c.sweep.h0_max) << "\n";
    os << "h0_count = " << c.sweep.h0_count << "\n";
    os << "u0_min = " << num(c.sweep.u0_min) << "\n";
    os << "u0_max = " << num(c.sweep.u0_max) << "\n";
    os << "u0_count = " << c.sweep.u0_count << "\n";
    os << "t_end = " << num(c.sweep.t_end) << "\n";
    return os.str();
}

// The (t, x) window used for lattice sampling of coefficient extrema.
inline CoefficientField build_coefficients(const RunConfig& cfg) {
    const bool t_only = cfg.a_spec.t_only() && cfg.b_spec.t_only();
    std::optional<double> period;
    if (cfg.period > 0.0) {
        period = cfg.period;
    } else if (cfg.a_spec.kind == CoefficientKind::sinusoidal_t &&
               cfg.b_spec.is_constant()) {
        period = cfg.a_spec.period;
    } else if (cfg.b_spec.kind == CoefficientKind::sinusoidal_t &&
               cfg.a_spec.is_constant()) {
        period = cfg.b_spec.period;
    } else if (cfg.a_spec.kind == CoefficientKind::sinusoidal_t &&
               cfg.b_spec.kind == CoefficientKind::sinusoidal_t &&
               cfg.a_spec.period == cfg.b_spec.period) {
        period = cfg.a_spec.period;
    }

    if (cfg.a_spec.is_constant() && cfg.b_spec.is_constant()) {
        CoefficientField c = CoefficientField::constants(cfg.a_spec.base, cfg.b_spec.base);
        c.period_T = period;
        return c;
    }

    double x_lo, x_hi;
    if (cfg.is_free_boundary()) {
        const double reach = 10.0 * cfg.h0;
        x_lo = (cfg.problem == ProblemKind::free_boundary_double ? cfg.g0 - reach : 0.0);
        x_hi = cfg.h0 + reach;
    } else {
        x_lo = cfg.problem == ProblemKind::whole_line ? -cfg.x_max : 0.0;
        x_hi = cfg.x_max;
    }
    for (const CoefficientSpec* s : {&cfg.a_spec, &cfg.b_spec}) {
        if (s->kind == CoefficientKind::gaussian_x || s->kind == CoefficientKind::product) {
            x_lo = std::min(x_lo, s->center - 6.0 * s->width);
            x_hi = std::max(x_hi, s->center + 6.0 * s->width);
        }
    }
    double t_hi = cfg.t_end;
    if (period) t_hi = std::max(t_hi, cfg.t0 + *period);
    return CoefficientField::sampled(cfg.a_spec.make(), cfg.b_spec.make(), cfg.t0, t_hi,
                                     x_lo, x_hi, 2048, 256, period, t_only);
}

inline std::function<double(double)> build_initial(const RunConfig& cfg) {
    return cfg.initial.make();
}

}  // namespace chemofront

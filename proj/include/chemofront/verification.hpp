// Quantitative checks of the global-existence ceiling, the persistence
// corridor, and convergence to the positive periodic orbit, plus the
// supporting periodic-orbit solver and the principal eigenpair of the
// Dirichlet interval problem.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemofront/params.hpp"
#include "chemofront/stepper.hpp"

namespace chemofront {

struct NoConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Positive T-periodic solution of u' = (a(t) - b(t) u) u, found as the fixed
// point of the period map. Samples cover one period on a uniform lattice.
struct PeriodicOrbit {
    double period_T = 0.0;
    std::vector<double> samples;  // values at k * period_T / (n-1), k = 0..n-1
    double u_star_inf = 0.0;

    double at(double t) const {
        const int n = int(samples.size());
        double s = std::fmod(t, period_T);
        if (s < 0.0) s += period_T;
        const double pos = s / period_T * double(n - 1);
        const int j = std::min(int(pos), n - 2);
        const double frac = pos - double(j);
        return (1.0 - frac) * samples[j] + frac * samples[j + 1];
    }
};

namespace detail {

inline double logistic_rhs(const CoefficientField& c, double t, double u) {
    return (c.a(t, 0.0) - c.b(t, 0.0) * u) * u;
}

// classical fourth-order step
inline double rk4_step(const CoefficientField& c, double t, double u, double dt) {
    const double k1 = logistic_rhs(c, t, u);
    const double k2 = logistic_rhs(c, t + 0.5 * dt, u + 0.5 * dt * k1);
    const double k3 = logistic_rhs(c, t + 0.5 * dt, u + 0.5 * dt * k2);
    const double k4 = logistic_rhs(c, t + dt, u + dt * k3);
    return u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double integrate_period(const CoefficientField& c, double u0, double T, int n) {
    const double dt = T / double(n);
    double u = u0;
    for (int i = 0; i < n; ++i) u = rk4_step(c, double(i) * dt, u, dt);
    return u;
}

}  // namespace detail

inline PeriodicOrbit solve_periodic_orbit(const CoefficientField& coeffs,
                                          int steps_per_period = 20000,
                                          double fixed_point_tol = 1e-12,
                                          int max_iterations = 1000,
                                          std::optional<double> start = std::nullopt) {
    if (!coeffs.period_T)
        throw std::invalid_argument("solve_periodic_orbit: coefficients need period_T");
    if (!coeffs.t_only)
        throw std::invalid_argument("solve_periodic_orbit: coefficients must be t-only");
    const double T = *coeffs.period_T;
    double u = start.value_or(coeffs.a_sup / coeffs.b_inf);
    if (!(u > 0.0))
        throw std::invalid_argument("solve_periodic_orbit: start must be positive");
    bool converged = false;
    for (int it = 0; it < max_iterations; ++it) {
        const double next = detail::integrate_period(coeffs, u, T, steps_per_period);
        if (std::abs(next - u) < fixed_point_tol) {
            u = next;
            converged = true;
            break;
        }
        u = next;
    }
    if (!converged)
        throw NoConvergenceError("no-convergence: period map did not settle");

    PeriodicOrbit orbit;
    orbit.period_T = T;
    orbit.samples.resize(steps_per_period + 1);
    orbit.u_star_inf = std::numeric_limits<double>::infinity();
    const double dt = T / double(steps_per_period);
    double v = u;
    for (int i = 0; i <= steps_per_period; ++i) {
        orbit.samples[i] = v;
        orbit.u_star_inf = std::min(orbit.u_star_inf, v);
        if (i < steps_per_period) v = detail::rk4_step(coeffs, double(i) * dt, v, dt);
    }
    if (!(orbit.u_star_inf > 0.0))
        throw NoConvergenceError("no-convergence: orbit lost positivity");
    return orbit;
}

// Principal eigenpair of u_xx + a0 u = sigma u on (-L, L) with zero Dirichlet
// ends, a0 = a_inf / 3: sigma_L = -pi^2/(4 L^2) + a0, phi_L = cos(pi x / 2L).
struct EigenPair {
    double L = 0.0;
    double a0 = 0.0;
    double sigma_L = 0.0;
    double phi(double x) const { return std::cos(std::numbers::pi * x / (2.0 * L)); }
};

inline EigenPair principal_eigenpair(double a_inf, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("principal_eigenpair: L must be > 0");
    EigenPair e;
    e.L = L;
    e.a0 = a_inf / 3.0;
    e.sigma_L = -std::numbers::pi * std::numbers::pi / (4.0 * L * L) + e.a0;
    return e;
}

// Artificial-boundary health: doubling the truncated domain (same spacing)
// must leave the reported sup/inf statistics unchanged to tol before a run's
// statistics are trusted.
struct TruncationCheck {
    bool trusted = false;
    double sup_shift = 0.0;
    double inf_shift = 0.0;
    double tol = 1e-3;
};

inline TruncationCheck truncation_doubling_check(
    GridKind kind, double x_max, int n_cells, const std::function<double(double)>& u0,
    const CoefficientField& coeffs, const ModelParams& p, StepConfig cfg,
    double tol = 1e-3) {
    TruncationCheck out;
    out.tol = tol;
    TimeSeries base_series, wide_series;
    for (int pass = 0; pass < 2; ++pass) {
        const double xm = pass == 0 ? x_max : 2.0 * x_max;
        const int nc = pass == 0 ? n_cells : 2 * n_cells;
        const Grid g = make_grid(kind, xm, nc);
        std::vector<double> u(g.n_nodes());
        for (int i = 0; i < g.n_nodes(); ++i) u[i] = u0(g.node(i));
        Probes probes;
        probes.interval = std::max(1.0, (cfg.t_end) / 50.0);
        auto run = run_fixed(g, std::move(u), coeffs, p, cfg, probes);
        (pass == 0 ? base_series : wide_series) = std::move(run.series);
    }
    out.sup_shift = std::abs(base_series.max_sup_u - wide_series.max_sup_u);
    out.inf_shift = std::abs(base_series.min_inf_u - wide_series.min_inf_u);
    const double final_sup_shift =
        std::abs(base_series.final_sup_u() - wide_series.final_sup_u());
    out.sup_shift = std::max(out.sup_shift, final_sup_shift);
    out.trusted = out.sup_shift < tol && out.inf_shift < tol;
    return out;
}

// Empirical lower-barrier probe: data pinched between delta and
// M+ = limsup_bound + 1 must still be there at t0 + T0.
struct BarrierProbe {
    bool held = false;
    double delta = 0.0;
    double M_plus = 0.0;
    double inf_at_T0 = 0.0;
    double sup_at_T0 = 0.0;
};

inline BarrierProbe lower_barrier_probe(const Grid& g, const CoefficientField& coeffs,
                                        const ModelParams& p, const BoundSet& bounds,
                                        double delta, double T0,
                                        double tol = 1e-3) {
    BarrierProbe probe;
    probe.delta = delta;
    if (!bounds.limsup_bound) return probe;
    probe.M_plus = *bounds.limsup_bound + 1.0;
    std::vector<double> u0(g.n_nodes());
    const double mid = 0.5 * (g.x_min + g.x_max);
    const double width = 0.25 * (g.x_max - g.x_min);
    for (int i = 0; i < g.n_nodes(); ++i) {
        const double z = (g.node(i) - mid) / width;
        const double bump = std::abs(z) >= 1.0
                                ? 0.0
                                : 0.5 * (1.0 + std::cos(std::numbers::pi * z));
        u0[i] = delta + (probe.M_plus - delta) * bump;
    }
    StepConfig cfg;
    cfg.t_end = T0;
    auto run = run_fixed(g, std::move(u0), coeffs, p, cfg, Probes{}, 0.0, probe.M_plus);
    probe.inf_at_T0 = *std::min_element(run.final_state.u.begin(), run.final_state.u.end());
    probe.sup_at_T0 = *std::max_element(run.final_state.u.begin(), run.final_state.u.end());
    probe.held = probe.inf_at_T0 >= delta * (1.0 - tol) &&
                 probe.sup_at_T0 <= probe.M_plus * (1.0 + tol);
    return probe;
}

struct Theorem11Report {
    bool applicable = false;
    bool global_ok = false;
    bool limsup_ok = false;
    bool passed = false;
    double C_u0 = 0.0, limsup_bound = 0.0;
    double max_sup_u = 0.0;        // over every step of the run
    double final_window_sup = 0.0; // over the final 10% of probes
    double tol = 0.0;
};

inline Theorem11Report check_theorem_1_1(const TimeSeries& ts, const BoundSet& bounds,
                                         double tol = 1e-2) {
    Theorem11Report r;
    r.tol = tol;
    if (!bounds.C_u0 || !bounds.limsup_bound) return r;
    r.applicable = true;
    r.C_u0 = *bounds.C_u0;
    r.limsup_bound = *bounds.limsup_bound;
    r.max_sup_u = ts.max_sup_u;
    r.global_ok = ts.max_sup_u <= r.C_u0 * (1.0 + tol);

    const double window_start = ts.t0 + 0.9 * (ts.t_end - ts.t0);
    double sup = 0.0;
    for (const ProbeRow& row : ts.rows)
        if (row.t >= window_start) sup = std::max(sup, row.sup_u);
    r.final_window_sup = sup;
    r.limsup_ok = sup <= r.limsup_bound * (1.0 + tol);
    r.passed = r.global_ok && r.limsup_ok;
    return r;
}

struct Theorem12Report {
    bool applicable = false;
    bool entered = false;   // corridor reached before t_end
    bool held = false;      // stayed inside through t_end
    bool passed = false;
    double m0 = 0.0, M0 = 0.0;
    std::optional<double> t_star;  // earliest probe time after which the corridor holds
    double final_inf = 0.0, final_sup = 0.0;
    double tol = 0.0;
};

inline Theorem12Report check_theorem_1_2(const TimeSeries& ts, const BoundSet& bounds,
                                         double tol = 1e-2) {
    Theorem12Report r;
    r.tol = tol;
    if (!bounds.m0 || !bounds.M0) return r;
    r.applicable = true;
    r.m0 = *bounds.m0;
    r.M0 = *bounds.M0;
    const double lo = r.m0 * (1.0 - tol);
    const double hi = r.M0 * (1.0 + tol);

    // earliest probe from which every later probe stays inside
    std::optional<double> t_star;
    for (auto it = ts.rows.rbegin(); it != ts.rows.rend(); ++it) {
        if (it->inf_u >= lo && it->sup_u <= hi)
            t_star = it->t;
        else
            break;
    }
    r.t_star = t_star;
    if (!ts.rows.empty()) {
        r.final_inf = ts.rows.back().inf_u;
        r.final_sup = ts.rows.back().sup_u;
    }
    r.entered = t_star.has_value();
    r.held = t_star.has_value() && *t_star < ts.t_end;
    r.passed = r.entered && r.held;
    return r;
}

struct Theorem13Report {
    bool applicable = false;
    bool converged = false;
    bool envelope_ok = false;
    bool passed = false;
    double e_end = 0.0;
    double tol_abs = 0.0;
    double rho = 0.0;
    double ratio_limit = 0.0;
    std::vector<double> plateaus;  // sup of e over consecutive epochs
    std::vector<double> ratios;    // successive plateau ratios above the floor
};

// e(t) must reach tol_abs by t_end, and successive error plateaus (epoch sups)
// must shrink by at most ratio_limit = rho + margin while above the floor.
inline Theorem13Report check_theorem_1_3(const TimeSeries& ts, double rho,
                                         double tol_abs = 1e-4,
                                         double ratio_margin = 0.1,
                                         double epoch_length = 2.0,
                                         double transient_skip = 0.0) {
    Theorem13Report r;
    r.tol_abs = tol_abs;
    r.rho = rho;
    r.ratio_limit = rho + ratio_margin;
    if (!ts.has_target || ts.rows.empty()) return r;
    r.applicable = true;

    r.e_end = ts.rows.back().err_to_target;
    r.converged = r.e_end < tol_abs;

    double epoch_start = ts.t0 + transient_skip;
    double sup = 0.0;
    bool any = false;
    for (const ProbeRow& row : ts.rows) {
        if (row.t < epoch_start) continue;
        if (row.t >= epoch_start + epoch_length) {
            if (any) r.plateaus.push_back(sup);
            while (row.t >= epoch_start + epoch_length) epoch_start += epoch_length;
            sup = 0.0;
            any = false;
        }
        sup = std::max(sup, row.err_to_target);
        any = true;
    }
    if (any) r.plateaus.push_back(sup);

    r.envelope_ok = true;
    for (std::size_t i = 0; i + 1 < r.plateaus.size(); ++i) {
        if (r.plateaus[i + 1] <= tol_abs) break;  // inside the convergence tolerance
        const double ratio = r.plateaus[i + 1] / r.plateaus[i];
        r.ratios.push_back(ratio);
        if (ratio > r.ratio_limit) r.envelope_ok = false;
    }
    r.passed = r.converged && r.envelope_ok;
    return r;
}

}  // namespace chemofront

// Time integration of u_t = u_xx - chi1 (u v1_x)_x + chi2 (u v2_x)_x
// + u(a - b u) on a fixed grid. Chemicals are re-solved from u at the start
// of every step; the chemotactic term is a conservative face flux with
// first-order upwinding; diffusion is implicit (imex) or explicit; the
// reaction is explicit at the step's start time.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemofront/elliptic.hpp"
#include "chemofront/grid.hpp"
#include "chemofront/params.hpp"
#include "chemofront/tridiag.hpp"

namespace chemofront {

enum class Scheme { imex, explicit_euler };

enum class FailureKind { cfl_violation, blowup, front_collapse };

struct NumericalError : std::runtime_error {
    FailureKind kind;
    double t;
    NumericalError(FailureKind k, double when, const std::string& msg)
        : std::runtime_error(msg + " (t = " + std::to_string(when) + ")"),
          kind(k),
          t(when) {}
};

struct StepConfig {
    double dt = 0.0;  // 0 selects dt from the CFL bounds at run start
    double t_end = 10.0;
    Scheme scheme = Scheme::imex;
    double cfl_safety = 0.45;
    bool clip_negative = true;
    double blowup_factor = 1e3;  // times the run's density ceiling
};

struct Probes {
    double interval = 1.0;
    // x-uniform target value at time t; enables the err_to_target column
    std::function<double(double)> target;
};

struct ProbeRow {
    double t = 0.0;
    double sup_u = 0.0, inf_u = 0.0;
    double err_to_target = std::numeric_limits<double>::quiet_NaN();
    double h = std::numeric_limits<double>::quiet_NaN();
    double g = std::numeric_limits<double>::quiet_NaN();
    double ux_front = std::numeric_limits<double>::quiet_NaN();
    double clip_mass = 0.0;  // cumulative
};

struct TimeSeries {
    bool has_target = false;
    bool has_front = false;
    bool has_g = false;
    std::vector<ProbeRow> rows;
    // per-step aggregates (every step, not just probe times)
    double max_sup_u = -std::numeric_limits<double>::infinity();
    double min_inf_u = std::numeric_limits<double>::infinity();
    double clip_total = 0.0;
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double t0 = 0.0;
    double t_end = 0.0;

    double final_sup_u() const { return rows.empty() ? 0.0 : rows.back().sup_u; }
};

inline double trapezoid_mass(const Grid& g, std::span<const double> u) {
    double m = 0.5 * (u.front() + u.back());
    for (int i = 1; i + 1 < int(u.size()); ++i) m += u[i];
    return m * g.dx;
}

class Stepper {
  public:
    Stepper(const Grid& grid, CoefficientField coeffs, ModelParams params,
            StepConfig cfg, double density_ceiling = 1.0)
        : grid_(grid),
          coeffs_(std::move(coeffs)),
          p_(params),
          cfg_(cfg),
          blowup_threshold_(cfg.blowup_factor * std::max(density_ceiling, 1e-12)) {
        p_.validate();
        const int n = grid_.n_nodes();
        face_vel_.assign(n - 1, 0.0);
        adv_.assign(n, 0.0);
        a_nodes_.assign(n, 0.0);
        b_nodes_.assign(n, 0.0);
        lo_.assign(n, 0.0);
        di_.assign(n, 0.0);
        up_.assign(n, 0.0);
        rhs_.assign(n, 0.0);
    }

    const Grid& grid() const { return grid_; }
    double clip_total() const { return clip_total_; }

    // Largest admissible dt for the configured scheme given the current
    // chemotactic velocities.
    double cfl_limit(double face_vel_max) const {
        const double adv = cfg_.cfl_safety * grid_.dx / std::max(1.0, face_vel_max);
        if (cfg_.scheme == Scheme::explicit_euler)
            return std::min(adv, cfg_.cfl_safety * grid_.dx * grid_.dx / 2.0);
        return adv;
    }

    double pick_dt(StateField& state) {
        solve_chemicals(state.u, state.v1, state.v2);
        const double vmax = update_face_velocities(state);
        // headroom for velocity growth over the run, plus an explicit-reaction
        // accuracy/positivity cap
        const double u_ceil = std::max({max_of(state.u), coeffs_.a_sup / std::max(coeffs_.b_inf, 1e-12), 1.0});
        const double react_cap = 0.2 / std::max(1.0, coeffs_.a_sup + coeffs_.b_sup * u_ceil);
        return std::min(cfl_limit(2.0 * vmax), react_cap);
    }

    // Advance state by dt in place. state.v1/v2 hold the chemicals used for
    // the step (solved from the incoming u); chemicals_fresh skips the solve
    // when pick_dt already ran on this exact state.
    void step(StateField& state, double dt, bool chemicals_fresh = false) {
        const int n = grid_.n_nodes();
        if (!chemicals_fresh) solve_chemicals(state.u, state.v1, state.v2);
        const double vmax = update_face_velocities(state);
        if (dt > cfl_limit(vmax) * (1.0 + 1e-9))
            throw NumericalError(FailureKind::cfl_violation, state.t,
                                 "cfl-violation: dt " + std::to_string(dt) +
                                     " exceeds limit " + std::to_string(cfl_limit(vmax)));
        eval_coefficients(state.t);
        compute_advection(state.u);

        const double inv_dx2 = 1.0 / (grid_.dx * grid_.dx);
        if (cfg_.scheme == Scheme::imex) {
            for (int i = 0; i < n; ++i) {
                const double react = state.u[i] * (a_nodes_[i] - b_nodes_[i] * state.u[i]);
                rhs_[i] = state.u[i] + dt * (adv_[i] + react);
                lo_[i] = -dt * inv_dx2;
                di_[i] = 1.0 + 2.0 * dt * inv_dx2;
                up_[i] = -dt * inv_dx2;
            }
            if (grid_.left_is_flux_free()) {
                up_[0] = -2.0 * dt * inv_dx2;
            } else {
                di_[0] = 1.0;
                up_[0] = 0.0;
                rhs_[0] = 0.0;
            }
            if (grid_.right_is_flux_free()) {
                lo_[n - 1] = -2.0 * dt * inv_dx2;
            } else {
                di_[n - 1] = 1.0;
                lo_[n - 1] = 0.0;
                rhs_[n - 1] = 0.0;
            }
            thomas_.solve(lo_, di_, up_, rhs_, state.u);
        } else {
            rhs_ = state.u;
            for (int i = 0; i < n; ++i) {
                double diff;
                if (i == 0)
                    diff = grid_.left_is_flux_free()
                               ? 2.0 * (rhs_[1] - rhs_[0]) * inv_dx2
                               : 0.0;
                else if (i == n - 1)
                    diff = grid_.right_is_flux_free()
                               ? 2.0 * (rhs_[n - 2] - rhs_[n - 1]) * inv_dx2
                               : 0.0;
                else
                    diff = (rhs_[i - 1] - 2.0 * rhs_[i] + rhs_[i + 1]) * inv_dx2;
                const double react = rhs_[i] * (a_nodes_[i] - b_nodes_[i] * rhs_[i]);
                state.u[i] = rhs_[i] + dt * (diff + adv_[i] + react);
            }
            if (!grid_.left_is_flux_free()) state.u[0] = 0.0;
            if (!grid_.right_is_flux_free()) state.u[n - 1] = 0.0;
        }

        clip_and_check(state, dt);
        state.t += dt;
    }

    double face_velocity_max(const StateField& state) const {
        double vmax = 0.0;
        const int n = grid_.n_nodes();
        const double inv_dx = 1.0 / grid_.dx;
        for (int i = 0; i + 1 < n; ++i) {
            const double w = (p_.chi1 * (state.v1[i + 1] - state.v1[i]) -
                              p_.chi2 * (state.v2[i + 1] - state.v2[i])) *
                             inv_dx;
            vmax = std::max(vmax, std::abs(w));
        }
        return vmax;
    }

    void solve_chemicals(std::span<const double> u, std::vector<double>& v1,
                         std::vector<double>& v2) {
        elliptic_.solve(grid_, u, p_.lambda1, p_.mu1, v1, ChemicalBc::flux_free());
        elliptic_.solve(grid_, u, p_.lambda2, p_.mu2, v2, ChemicalBc::flux_free());
    }

  private:
    static double max_of(const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end());
    }

    double update_face_velocities(const StateField& state) {
        const int n = grid_.n_nodes();
        const double inv_dx = 1.0 / grid_.dx;
        double vmax = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            face_vel_[i] = (p_.chi1 * (state.v1[i + 1] - state.v1[i]) -
                            p_.chi2 * (state.v2[i + 1] - state.v2[i])) *
                           inv_dx;
            vmax = std::max(vmax, std::abs(face_vel_[i]));
        }
        return vmax;
    }

    void eval_coefficients(double t) {
        const int n = grid_.n_nodes();
        if (coeffs_.t_only) {
            const double av = coeffs_.a(t, grid_.x_min);
            const double bv = coeffs_.b(t, grid_.x_min);
            std::fill(a_nodes_.begin(), a_nodes_.end(), av);
            std::fill(b_nodes_.begin(), b_nodes_.end(), bv);
        } else {
            for (int i = 0; i < n; ++i) {
                const double x = grid_.node(i);
                a_nodes_[i] = coeffs_.a(t, x);
                b_nodes_[i] = coeffs_.b(t, x);
            }
        }
    }

    // adv_ = -d/dx of the upwind face flux u * w, with zero flux through
    // flux-free boundaries (half-cell update at boundary nodes).
    void compute_advection(const std::vector<double>& u) {
        const int n = grid_.n_nodes();
        const double inv_dx = 1.0 / grid_.dx;
        double flux_left = 0.0;  // boundary face
        for (int i = 0; i < n; ++i) {
            double flux_right = 0.0;
            if (i + 1 < n) {
                const double w = face_vel_[i];
                flux_right = (w >= 0.0 ? u[i] : u[i + 1]) * w;
            }
            if (i == 0)
                adv_[i] = grid_.left_is_flux_free() ? -2.0 * flux_right * inv_dx : 0.0;
            else if (i == n - 1)
                adv_[i] = grid_.right_is_flux_free() ? 2.0 * flux_left * inv_dx : 0.0;
            else
                adv_[i] = -(flux_right - flux_left) * inv_dx;
            flux_left = flux_right;
        }
    }

    void clip_and_check(StateField& state, double /*dt*/) {
        const int n = grid_.n_nodes();
        double umax = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (cfg_.clip_negative && state.u[i] < 0.0) {
                const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                clip_total_ += -state.u[i] * w * grid_.dx;
                state.u[i] = 0.0;
            }
            umax = std::max(umax, state.u[i]);
        }
        if (!(umax < blowup_threshold_))
            throw NumericalError(FailureKind::blowup, state.t,
                                 "blowup-detected: max u = " + std::to_string(umax));
    }

    Grid grid_;
    CoefficientField coeffs_;
    ModelParams p_;
    StepConfig cfg_;
    double blowup_threshold_;
    double clip_total_ = 0.0;

    EllipticSolver elliptic_;
    TridiagonalSolver thomas_;
    std::vector<double> face_vel_, adv_, a_nodes_, b_nodes_;
    std::vector<double> lo_, di_, up_, rhs_;
};

// Single-step convenience on a value: returns the advanced state.
inline StateField step(const Grid& grid, const StateField& state,
                       const CoefficientField& coeffs, const ModelParams& p,
                       const StepConfig& cfg, double density_ceiling = 1.0) {
    Stepper s(grid, coeffs, p, cfg, density_ceiling);
    StateField out = state;
    const double dt = cfg.dt > 0.0 ? cfg.dt : s.pick_dt(out);
    s.step(out, dt);
    return out;
}

struct RunOutput {
    TimeSeries series;
    StateField final_state;
};

// Iterate the stepper to t_end, recording probe rows and per-step aggregates.
inline RunOutput run_fixed(const Grid& grid, std::vector<double> u0,
                           const CoefficientField& coeffs, const ModelParams& p,
                           StepConfig cfg, const Probes& probes, double t0 = 0.0,
                           double density_ceiling = 0.0) {
    for (double v : u0)
        if (v < 0.0) throw std::invalid_argument("run_fixed: u0 must be nonnegative");
    const double u0_sup = *std::max_element(u0.begin(), u0.end());
    if (density_ceiling <= 0.0)
        density_ceiling =
            std::max({u0_sup, coeffs.a_sup / std::max(coeffs.b_inf, 1e-12), 1.0});

    Stepper stepper(grid, coeffs, p, cfg, density_ceiling);
    StateField state;
    state.t = t0;
    state.u = std::move(u0);
    stepper.solve_chemicals(state.u, state.v1, state.v2);

    // a fixed dt is validated every step and fails loudly; dt = 0 re-picks
    // from the CFL bound each step
    const bool adaptive = cfg.dt <= 0.0;

    TimeSeries ts;
    ts.t0 = t0;
    ts.t_end = cfg.t_end;
    ts.has_target = bool(probes.target);
    ts.initial_mass = trapezoid_mass(grid, state.u);

    auto record = [&](const StateField& s) {
        ProbeRow row;
        row.t = s.t;
        row.sup_u = *std::max_element(s.u.begin(), s.u.end());
        row.inf_u = *std::min_element(s.u.begin(), s.u.end());
        if (probes.target) {
            const double tgt = probes.target(s.t);
            double err = 0.0;
            for (double v : s.u) err = std::max(err, std::abs(v - tgt));
            row.err_to_target = err;
        }
        row.clip_mass = stepper.clip_total();
        ts.rows.push_back(row);
    };

    auto aggregate = [&](const StateField& s) {
        const double mx = *std::max_element(s.u.begin(), s.u.end());
        const double mn = *std::min_element(s.u.begin(), s.u.end());
        ts.max_sup_u = std::max(ts.max_sup_u, mx);
        ts.min_inf_u = std::min(ts.min_inf_u, mn);
    };

    aggregate(state);
    record(state);
    double next_probe = t0 + probes.interval;
    const double eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
    while (state.t < cfg.t_end - eps) {
        const double dt = adaptive ? stepper.pick_dt(state) : cfg.dt;
        const double step_dt = std::min(dt, cfg.t_end - state.t);
        stepper.step(state, step_dt, adaptive);
        aggregate(state);
        if (state.t >= next_probe - eps || state.t >= cfg.t_end - eps) {
            record(state);
            while (next_probe <= state.t + eps) next_probe += probes.interval;
        }
    }
    ts.clip_total = stepper.clip_total();
    ts.final_mass = trapezoid_mass(grid, state.u);
    return {std::move(ts), std::move(state)};
}

}  // namespace chemofront

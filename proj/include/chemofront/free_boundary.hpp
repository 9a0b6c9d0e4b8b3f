// Single and double free-boundary problems solved by front-fixing onto the
// unit reference interval. The transformed density obeys
//   w_t = w_xixi / L^2 + c(xi) w_xi - (chi1/L^2)(w V1_xi)_xi
//         + (chi2/L^2)(w V2_xi)_xi + w(a - b w)
// with L = h (single) or h - g (double), mesh velocity c from the front
// motion, and chemicals solved on the reference grid via the scaled operator
// V_xixi - lambda L^2 V + mu L^2 w = 0. Fronts follow the Stefan law
// h' = -nu u_x(t, h), front derivatives from 3-point one-sided stencils.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chemofront/elliptic.hpp"
#include "chemofront/grid.hpp"
#include "chemofront/params.hpp"
#include "chemofront/stepper.hpp"
#include "chemofront/tridiag.hpp"

namespace chemofront {

struct FreeBoundaryState {
    double t = 0.0;
    double h = 0.0;
    std::optional<double> g;  // left front; absent for the single-front problem
    std::vector<double> w;    // density on the reference grid
    std::vector<double> v1w, v2w;
    double ux_right = 0.0;  // last u_x at the right front
    double ux_left = 0.0;   // last u_x at the left front (double-front)
    std::vector<std::pair<double, double>> h_history;  // sampled (t, h)
    std::vector<std::pair<double, double>> g_history;

    double length() const { return g ? h - *g : h; }
    double physical_x(const Grid& ref, int i) const {
        const double xi = ref.node(i);
        return g ? *g + xi * (h - *g) : xi * h;
    }
};

// w(xi) = u(xi * h); linear interpolation where grids mismatch.
inline std::vector<double> to_reference(const Grid& phys, std::span<const double> u,
                                        double h, const Grid& ref) {
    if (!(h > 0.0)) throw std::invalid_argument("to_reference: h must be > 0");
    if (int(u.size()) != phys.n_nodes())
        throw std::invalid_argument("to_reference: size mismatch");
    std::vector<double> w(ref.n_nodes());
    for (int i = 0; i < ref.n_nodes(); ++i) {
        const double x = ref.node(i) * h;
        const double s = (x - phys.x_min) / phys.dx;
        const int j = std::clamp(int(std::floor(s)), 0, phys.n_cells - 1);
        const double frac = std::clamp(s - double(j), 0.0, 1.0);
        w[i] = (1.0 - frac) * u[j] + frac * u[j + 1];
    }
    return w;
}

inline std::vector<double> from_reference(const Grid& ref, std::span<const double> w,
                                          double h, const Grid& phys) {
    if (!(h > 0.0)) throw std::invalid_argument("from_reference: h must be > 0");
    if (int(w.size()) != ref.n_nodes())
        throw std::invalid_argument("from_reference: size mismatch");
    std::vector<double> u(phys.n_nodes());
    for (int i = 0; i < phys.n_nodes(); ++i) {
        const double xi = phys.node(i) / h;
        const double s = (xi - ref.x_min) / ref.dx;
        const int j = std::clamp(int(std::floor(s)), 0, ref.n_cells - 1);
        const double frac = std::clamp(s - double(j), 0.0, 1.0);
        u[i] = (1.0 - frac) * w[j] + frac * w[j + 1];
    }
    return u;
}

// Linear sample of the transformed density at a physical position.
inline double sample_physical(const Grid& ref, const FreeBoundaryState& st, double x) {
    const double lo = st.g ? *st.g : 0.0;
    const double xi = (x - lo) / st.length();
    const double s = std::clamp((xi - ref.x_min) / ref.dx, 0.0, double(ref.n_cells));
    const int j = std::min(int(std::floor(s)), ref.n_cells - 1);
    const double frac = s - double(j);
    return (1.0 - frac) * st.w[j] + frac * st.w[j + 1];
}

struct FrontThresholds {
    double collapse_cells = 4.0;    // front-collapse when L < collapse_cells*dxi*h0
    double spread_h_factor = 10.0;  // spreading when h(t_end) > factor*h0
    double spread_floor_fraction = 0.5;  // times m0 (or the fallback floor)
    double vanish_sup = 1e-4;
    double vanish_growth = 1e-6;  // relative front growth per unit time
};

class FreeBoundaryStepper {
  public:
    FreeBoundaryStepper(const Grid& ref, CoefficientField coeffs, ModelParams params,
                        StepConfig cfg, bool double_front, double h0,
                        double density_ceiling = 1.0,
                        FrontThresholds thresholds = {})
        : ref_(ref),
          coeffs_(std::move(coeffs)),
          p_(params),
          cfg_(cfg),
          double_front_(double_front),
          h0_(h0),
          thresholds_(thresholds),
          blowup_threshold_(cfg.blowup_factor * std::max(density_ceiling, 1e-12)) {
        p_.validate();
        if (double_front_ && ref_.left_bc != BoundaryKind::dirichlet_zero)
            throw std::invalid_argument("double-front reference grid needs Dirichlet left");
        const int n = ref_.n_nodes();
        adv_.assign(n, 0.0);
        mesh_.assign(n, 0.0);
        a_nodes_.assign(n, 0.0);
        b_nodes_.assign(n, 0.0);
        face_vel_.assign(n - 1, 0.0);
        lo_.assign(n, 0.0);
        di_.assign(n, 0.0);
        up_.assign(n, 0.0);
        rhs_.assign(n, 0.0);
    }

    double clip_total() const { return clip_total_; }

    double right_front_gradient(const FreeBoundaryState& st) const {
        const int n = ref_.n_nodes();
        const double wxi =
            (3.0 * st.w[n - 1] - 4.0 * st.w[n - 2] + st.w[n - 3]) / (2.0 * ref_.dx);
        return wxi / st.length();
    }

    double left_front_gradient(const FreeBoundaryState& st) const {
        const double wxi =
            (-3.0 * st.w[0] + 4.0 * st.w[1] - st.w[2]) / (2.0 * ref_.dx);
        return wxi / st.length();
    }

    void solve_chemicals(FreeBoundaryState& st) {
        const double L2 = st.length() * st.length();
        elliptic_.solve(ref_, st.w, p_.lambda1 * L2, p_.mu1 * L2, st.v1w,
                        ChemicalBc::flux_free());
        elliptic_.solve(ref_, st.w, p_.lambda2 * L2, p_.mu2 * L2, st.v2w,
                        ChemicalBc::flux_free());
    }

    double cfl_limit(double vel_max) const {
        return cfg_.cfl_safety * ref_.dx / std::max(1.0, vel_max);
    }

    double pick_dt(FreeBoundaryState& st) {
        solve_chemicals(st);
        const double h_rate = -p_.nu * right_front_gradient(st);
        const double g_rate = double_front_ ? -p_.nu * left_front_gradient(st) : 0.0;
        const double vmax = velocities(st, h_rate, g_rate);
        double dt = cfl_limit(2.0 * vmax);
        if (cfg_.scheme == Scheme::explicit_euler) {
            const double L = st.length();
            dt = std::min(dt, cfg_.cfl_safety * ref_.dx * ref_.dx * L * L / 2.0);
        }
        const double u_ceil =
            std::max({*std::max_element(st.w.begin(), st.w.end()),
                      coeffs_.a_sup / std::max(coeffs_.b_inf, 1e-12), 1.0});
        dt = std::min(dt, 0.2 / std::max(1.0, coeffs_.a_sup + coeffs_.b_sup * u_ceil));
        return dt;
    }

    void step(FreeBoundaryState& st, double dt, bool chemicals_fresh = false) {
        const int n = ref_.n_nodes();
        const double L = st.length();
        if (L < thresholds_.collapse_cells * ref_.dx * h0_)
            throw NumericalError(FailureKind::front_collapse, st.t,
                                 "front-collapse: domain length " + std::to_string(L));

        if (!chemicals_fresh) solve_chemicals(st);
        st.ux_right = right_front_gradient(st);
        const double h_rate = -p_.nu * st.ux_right;
        double g_rate = 0.0;
        if (double_front_) {
            st.ux_left = left_front_gradient(st);
            g_rate = -p_.nu * st.ux_left;
        }

        const double vmax = velocities(st, h_rate, g_rate);
        double limit = cfl_limit(vmax);
        if (cfg_.scheme == Scheme::explicit_euler)
            limit = std::min(limit, cfg_.cfl_safety * ref_.dx * ref_.dx * L * L / 2.0);
        if (dt > limit * (1.0 + 1e-9))
            throw NumericalError(FailureKind::cfl_violation, st.t,
                                 "cfl-violation: dt " + std::to_string(dt) +
                                     " exceeds limit " + std::to_string(limit));

        eval_coefficients(st);
        compute_advection(st.w);

        const double inv_dx = 1.0 / ref_.dx;
        const double inv_dx2_L2 = 1.0 / (ref_.dx * ref_.dx * L * L);
        if (cfg_.scheme == Scheme::imex) {
            for (int i = 0; i < n; ++i) {
                const double react = st.w[i] * (a_nodes_[i] - b_nodes_[i] * st.w[i]);
                double mesh = 0.0;
                if (i > 0 && i + 1 < n) {
                    const double c = mesh_[i];
                    mesh = c >= 0.0 ? c * (st.w[i + 1] - st.w[i]) * inv_dx
                                    : c * (st.w[i] - st.w[i - 1]) * inv_dx;
                }
                rhs_[i] = st.w[i] + dt * (adv_[i] + mesh + react);
                lo_[i] = -dt * inv_dx2_L2;
                di_[i] = 1.0 + 2.0 * dt * inv_dx2_L2;
                up_[i] = -dt * inv_dx2_L2;
            }
            if (ref_.left_is_flux_free()) {
                up_[0] = -2.0 * dt * inv_dx2_L2;
            } else {
                di_[0] = 1.0;
                up_[0] = 0.0;
                rhs_[0] = 0.0;
            }
            di_[n - 1] = 1.0;
            lo_[n - 1] = 0.0;
            rhs_[n - 1] = 0.0;  // w(1) = 0 exactly
            thomas_.solve(lo_, di_, up_, rhs_, st.w);
        } else {
            rhs_ = st.w;
            for (int i = 0; i < n; ++i) {
                double diff;
                if (i == 0)
                    diff = ref_.left_is_flux_free()
                               ? 2.0 * (rhs_[1] - rhs_[0]) * inv_dx2_L2
                               : 0.0;
                else if (i == n - 1)
                    diff = 0.0;
                else
                    diff = (rhs_[i - 1] - 2.0 * rhs_[i] + rhs_[i + 1]) * inv_dx2_L2;
                double mesh = 0.0;
                if (i > 0 && i + 1 < n) {
                    const double c = mesh_[i];
                    mesh = c >= 0.0 ? c * (rhs_[i + 1] - rhs_[i]) * inv_dx
                                    : c * (rhs_[i] - rhs_[i - 1]) * inv_dx;
                }
                const double react = rhs_[i] * (a_nodes_[i] - b_nodes_[i] * rhs_[i]);
                st.w[i] = rhs_[i] + dt * (diff + adv_[i] + mesh + react);
            }
            if (!ref_.left_is_flux_free()) st.w[0] = 0.0;
            st.w[n - 1] = 0.0;
        }

        clip_and_check(st);

        st.h += dt * h_rate;
        if (double_front_) *st.g += dt * g_rate;
        st.t += dt;
    }

  private:
    double velocities(const FreeBoundaryState& st, double h_rate = 0.0,
                      double g_rate = 0.0) {
        const int n = ref_.n_nodes();
        const double L = st.length();
        const double inv = 1.0 / (ref_.dx * L * L);
        double vmax = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            face_vel_[i] = (p_.chi1 * (st.v1w[i + 1] - st.v1w[i]) -
                            p_.chi2 * (st.v2w[i + 1] - st.v2w[i])) *
                           inv;
            vmax = std::max(vmax, std::abs(face_vel_[i]));
        }
        for (int i = 0; i < n; ++i) {
            const double xi = ref_.node(i);
            mesh_[i] = double_front_ ? (g_rate + xi * (h_rate - g_rate)) / L
                                     : xi * h_rate / st.h;
            vmax = std::max(vmax, std::abs(mesh_[i]));
        }
        return vmax;
    }

    void eval_coefficients(const FreeBoundaryState& st) {
        const int n = ref_.n_nodes();
        if (coeffs_.t_only) {
            const double av = coeffs_.a(st.t, 0.0);
            const double bv = coeffs_.b(st.t, 0.0);
            std::fill(a_nodes_.begin(), a_nodes_.end(), av);
            std::fill(b_nodes_.begin(), b_nodes_.end(), bv);
        } else {
            for (int i = 0; i < n; ++i) {
                const double x = st.physical_x(ref_, i);
                a_nodes_[i] = coeffs_.a(st.t, x);
                b_nodes_[i] = coeffs_.b(st.t, x);
            }
        }
    }

    void compute_advection(const std::vector<double>& w) {
        const int n = ref_.n_nodes();
        const double inv_dx = 1.0 / ref_.dx;
        double flux_left = 0.0;
        for (int i = 0; i < n; ++i) {
            double flux_right = 0.0;
            if (i + 1 < n) {
                const double vel = face_vel_[i];
                flux_right = (vel >= 0.0 ? w[i] : w[i + 1]) * vel;
            }
            if (i == 0)
                adv_[i] = ref_.left_is_flux_free() ? -2.0 * flux_right * inv_dx : 0.0;
            else if (i == n - 1)
                adv_[i] = 0.0;  // Dirichlet front node
            else
                adv_[i] = -(flux_right - flux_left) * inv_dx;
            flux_left = flux_right;
        }
    }

    void clip_and_check(FreeBoundaryState& st) {
        const int n = ref_.n_nodes();
        const double L = st.length();
        double wmax = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (cfg_.clip_negative && st.w[i] < 0.0) {
                const double wt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                clip_total_ += -st.w[i] * wt * ref_.dx * L;
                st.w[i] = 0.0;
            }
            wmax = std::max(wmax, st.w[i]);
        }
        if (!(wmax < blowup_threshold_))
            throw NumericalError(FailureKind::blowup, st.t,
                                 "blowup-detected: max u = " + std::to_string(wmax));
    }

    Grid ref_;
    CoefficientField coeffs_;
    ModelParams p_;
    StepConfig cfg_;
    bool double_front_;
    double h0_;
    FrontThresholds thresholds_;
    double blowup_threshold_;
    double clip_total_ = 0.0;

    EllipticSolver elliptic_;
    TridiagonalSolver thomas_;
    std::vector<double> adv_, mesh_, a_nodes_, b_nodes_, face_vel_;
    std::vector<double> lo_, di_, up_, rhs_;
};

// single-step convenience on a value
inline FreeBoundaryState stefan_step(const FreeBoundaryState& st, const Grid& ref,
                                     const CoefficientField& coeffs,
                                     const ModelParams& p, const StepConfig& cfg) {
    FreeBoundaryStepper stepper(ref, coeffs, p, cfg, st.g.has_value(), st.h,
                                std::max(1.0, *std::max_element(st.w.begin(), st.w.end())));
    FreeBoundaryState out = st;
    const double dt = cfg.dt > 0.0 ? cfg.dt : stepper.pick_dt(out);
    stepper.step(out, dt);
    return out;
}

struct FreeBoundaryRun {
    TimeSeries series;
    FreeBoundaryState final_state;
    Grid ref;
};

// Initial data must satisfy u0(h0) = 0 (and u0(g0) = 0 for double fronts);
// violating data is projected by zeroing the front node and one smoothing
// pass.
inline FreeBoundaryRun run_free(int n_cells, double h0, std::optional<double> g0,
                                const std::function<double(double)>& u0,
                                const CoefficientField& coeffs, const ModelParams& p,
                                StepConfig cfg, const Probes& probes, double t0 = 0.0,
                                FrontThresholds thresholds = {}) {
    if (!(h0 > 0.0)) throw std::invalid_argument("run_free: h0 must be > 0");
    if (g0 && !(*g0 < h0)) throw std::invalid_argument("run_free: g0 must be < h0");
    const bool double_front = g0.has_value();
    const Grid ref = make_reference_grid(
        n_cells,
        double_front ? BoundaryKind::dirichlet_zero : BoundaryKind::neumann_zero,
        BoundaryKind::dirichlet_zero);

    FreeBoundaryState st;
    st.t = t0;
    st.h = h0;
    st.g = g0;
    const double L0 = st.length();
    st.w.resize(ref.n_nodes());
    for (int i = 0; i < ref.n_nodes(); ++i) {
        const double x = (g0 ? *g0 : 0.0) + ref.node(i) * L0;
        st.w[i] = u0(x);
        if (st.w[i] < 0.0) throw std::invalid_argument("run_free: u0 must be nonnegative");
    }
    bool projected = false;
    if (st.w.back() != 0.0) {
        st.w.back() = 0.0;
        projected = true;
    }
    if (double_front && st.w.front() != 0.0) {
        st.w.front() = 0.0;
        projected = true;
    }
    if (projected) {
        std::vector<double> s = st.w;
        for (int i = 1; i + 1 < ref.n_nodes(); ++i)
            st.w[i] = 0.25 * (s[i - 1] + 2.0 * s[i] + s[i + 1]);
    }

    const double u0_sup = *std::max_element(st.w.begin(), st.w.end());
    const double ceiling =
        std::max({u0_sup, coeffs.a_sup / std::max(coeffs.b_inf, 1e-12), 1.0});
    FreeBoundaryStepper stepper(ref, coeffs, p, cfg, double_front, h0, ceiling,
                                thresholds);
    stepper.solve_chemicals(st);
    const bool adaptive = cfg.dt <= 0.0;

    TimeSeries ts;
    ts.t0 = t0;
    ts.t_end = cfg.t_end;
    ts.has_target = bool(probes.target);
    ts.has_front = true;
    ts.has_g = double_front;
    ts.initial_mass = trapezoid_mass(ref, st.w) * st.length();

    auto record = [&](FreeBoundaryState& s) {
        ProbeRow row;
        row.t = s.t;
        row.sup_u = *std::max_element(s.w.begin(), s.w.end());
        row.inf_u = *std::min_element(s.w.begin(), s.w.end());
        if (probes.target) {
            const double tgt = probes.target(s.t);
            double err = 0.0;
            for (double v : s.w) err = std::max(err, std::abs(v - tgt));
            row.err_to_target = err;
        }
        row.h = s.h;
        if (double_front) row.g = *s.g;
        row.ux_front = s.ux_right;
        row.clip_mass = stepper.clip_total();
        ts.rows.push_back(row);
        s.h_history.emplace_back(s.t, s.h);
        if (double_front) s.g_history.emplace_back(s.t, *s.g);
    };

    auto aggregate = [&](const FreeBoundaryState& s) {
        ts.max_sup_u =
            std::max(ts.max_sup_u, *std::max_element(s.w.begin(), s.w.end()));
        ts.min_inf_u =
            std::min(ts.min_inf_u, *std::min_element(s.w.begin(), s.w.end()));
    };

    aggregate(st);
    record(st);
    double next_probe = t0 + probes.interval;
    const double eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
    double h_prev = st.h, g_prev = g0 ? *g0 : 0.0;
    bool h_monotone = true, g_monotone = true;
    while (st.t < cfg.t_end - eps) {
        const double dt = adaptive ? stepper.pick_dt(st) : cfg.dt;
        const double step_dt = std::min(dt, cfg.t_end - st.t);
        stepper.step(st, step_dt, adaptive);
        h_monotone = h_monotone && st.h >= h_prev;
        if (double_front) g_monotone = g_monotone && *st.g <= g_prev;
        h_prev = st.h;
        if (double_front) g_prev = *st.g;
        aggregate(st);
        if (st.t >= next_probe - eps || st.t >= cfg.t_end - eps) {
            record(st);
            while (next_probe <= st.t + eps) next_probe += probes.interval;
        }
    }
    if (!h_monotone || !g_monotone)
        throw NumericalError(FailureKind::front_collapse, st.t,
                             "front monotonicity violated");
    ts.clip_total = stepper.clip_total();
    ts.final_mass = trapezoid_mass(ref, st.w) * st.length();
    return {std::move(ts), std::move(st), ref};
}

enum class Outcome { spreading, vanishing, undecided };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::spreading: return "spreading";
        case Outcome::vanishing: return "vanishing";
        default: return "undecided";
    }
}

// Heuristic classifier over a completed free-boundary run. The rigorous
// dichotomy is out of scope; thresholds are config-exposed.
inline Outcome detect_outcome(const TimeSeries& ts, double h0,
                              std::optional<double> m0,
                              FrontThresholds thr = {}) {
    if (ts.rows.empty()) return Outcome::undecided;
    const double t_quarter = ts.t0 + 0.75 * (ts.t_end - ts.t0);
    const ProbeRow& last = ts.rows.back();

    double min_sup_tail = std::numeric_limits<double>::infinity();
    double h_at_quarter = last.h;
    double t_at_quarter = t_quarter;
    for (const ProbeRow& r : ts.rows) {
        if (r.t >= t_quarter) {
            min_sup_tail = std::min(min_sup_tail, r.sup_u);
        } else {
            h_at_quarter = r.h;
            t_at_quarter = r.t;
        }
    }

    const double floor = thr.spread_floor_fraction * m0.value_or(1e-2);
    if (last.h > thr.spread_h_factor * h0 && min_sup_tail >= floor)
        return Outcome::spreading;

    const double dt_tail = std::max(last.t - t_at_quarter, 1e-300);
    const double rel_growth = (last.h - h_at_quarter) / (h_at_quarter * dt_tail);
    if (last.sup_u < thr.vanish_sup && rel_growth < thr.vanish_growth)
        return Outcome::vanishing;
    return Outcome::undecided;
}

}  // namespace chemofront

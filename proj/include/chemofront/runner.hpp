// Dispatch a parsed RunConfig to the fixed-domain or free-boundary solver.
#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "chemofront/config.hpp"
#include "chemofront/free_boundary.hpp"
#include "chemofront/grid.hpp"
#include "chemofront/stepper.hpp"

namespace chemofront {

struct RunResult {
    Grid grid;  // fixed-domain grid or the reference grid
    TimeSeries series;
    StateField final_state;                      // fixed domains
    std::optional<FreeBoundaryState> fb_final;   // free boundaries
    HypothesisReport hypotheses;
    BoundSet bounds;
    double u0_inf = 0.0, u0_sup = 0.0;
    std::optional<Outcome> outcome;
};

inline RunResult run_config(const RunConfig& cfg,
                            const std::function<double(double)>& target = {}) {
    RunResult out;
    const CoefficientField coeffs = build_coefficients(cfg);
    const auto u0_fn = build_initial(cfg);

    StepConfig stepping = cfg.stepping;
    stepping.t_end = cfg.t_end;

    Probes probes;
    probes.interval = cfg.probe_interval;
    probes.target = target;

    if (cfg.is_free_boundary()) {
        const std::optional<double> g0 =
            cfg.problem == ProblemKind::free_boundary_double ? std::optional<double>(cfg.g0)
                                                             : std::nullopt;
        FreeBoundaryRun run = run_free(cfg.n_cells, cfg.h0, g0, u0_fn, coeffs, cfg.params,
                                       stepping, probes, cfg.t0);
        out.grid = run.ref;
        out.series = std::move(run.series);
        out.fb_final = std::move(run.final_state);
        out.u0_sup = out.series.rows.front().sup_u;
        out.u0_inf = out.series.rows.front().inf_u;
        out.hypotheses = check_hypotheses(cfg.params, coeffs);
        out.bounds = derive_bounds(cfg.params, coeffs, out.u0_sup);
        out.outcome = detect_outcome(out.series, cfg.h0, out.bounds.m0);
        return out;
    }

    const GridKind gk =
        cfg.problem == ProblemKind::half_line ? GridKind::half_line : GridKind::whole_line;
    out.grid = make_grid(gk, cfg.x_max, cfg.n_cells);
    std::vector<double> u0(out.grid.n_nodes());
    for (int i = 0; i < out.grid.n_nodes(); ++i) u0[i] = u0_fn(out.grid.node(i));
    out.u0_sup = *std::max_element(u0.begin(), u0.end());
    out.u0_inf = *std::min_element(u0.begin(), u0.end());
    out.hypotheses = check_hypotheses(cfg.params, coeffs);
    out.bounds = derive_bounds(cfg.params, coeffs, out.u0_sup);

    const double ceiling = out.bounds.C_u0.value_or(
        std::max({out.u0_sup, coeffs.a_sup / std::max(coeffs.b_inf, 1e-12), 1.0}));
    RunOutput run =
        run_fixed(out.grid, std::move(u0), coeffs, cfg.params, stepping, probes, cfg.t0, ceiling);
    out.series = std::move(run.series);
    out.final_state = std::move(run.final_state);
    return out;
}

}  // namespace chemofront

// Model constants for the 1-D attraction-repulsion chemotaxis system and the
// derived quantities (M, K, hypothesis margins, a-priori bounds) that the
// verification harness checks against simulation runs.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace chemofront {

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// chi1/chi2: attraction/repulsion sensitivities, lambda_i: chemical decay,
// mu_i: chemical production, nu: free-boundary expansion coefficient.
struct ModelParams {
    double chi1 = 0.0;
    double chi2 = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double nu = 1.0;

    void validate() const {
        if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
            throw std::invalid_argument("ModelParams: lambda1, lambda2 must be > 0");
        if (chi1 < 0.0 || chi2 < 0.0 || mu1 < 0.0 || mu2 < 0.0)
            throw std::invalid_argument("ModelParams: chi, mu must be >= 0");
        if (!(nu > 0.0))
            throw std::invalid_argument("ModelParams: nu must be > 0");
    }

    // Attraction-only model. The repellent channel still needs a decay rate;
    // this constructor makes the conventional choice lambda2 = lambda1
    // explicit instead of re-binding it silently.
    static ModelParams attraction_only(double chi1, double mu1, double lambda1,
                                       double nu = 1.0) {
        ModelParams p;
        p.chi1 = chi1;
        p.mu1 = mu1;
        p.lambda1 = lambda1;
        p.chi2 = 0.0;
        p.mu2 = 0.0;
        p.lambda2 = lambda1;
        p.nu = nu;
        return p;
    }
};

// Logistic coefficients a(t,x), b(t,x) with their extrema over the run's
// time-space window. Extrema are obtained by lattice sampling (coefficients
// are caller-supplied callables), except for constants where they are exact.
struct CoefficientField {
    std::function<double(double, double)> a;
    std::function<double(double, double)> b;
    double a_inf = 0.0, a_sup = 0.0;
    double b_inf = 0.0, b_sup = 0.0;
    std::optional<double> period_T;
    bool t_only = false;  // true when a, b do not depend on x

    bool h0_ok() const { return a_inf > 0.0 && b_inf > 0.0; }

    static CoefficientField constants(double a_val, double b_val) {
        CoefficientField c;
        c.a = [a_val](double, double) { return a_val; };
        c.b = [b_val](double, double) { return b_val; };
        c.a_inf = c.a_sup = a_val;
        c.b_inf = c.b_sup = b_val;
        c.t_only = true;
        return c;
    }

    // Extrema by sampling the (t, x) lattice of the run window.
    static CoefficientField sampled(std::function<double(double, double)> a_fn,
                                    std::function<double(double, double)> b_fn,
                                    double t0, double t1, double x0, double x1,
                                    int nt = 2048, int nx = 256,
                                    std::optional<double> period = std::nullopt,
                                    bool t_only = false) {
        CoefficientField c;
        c.a = std::move(a_fn);
        c.b = std::move(b_fn);
        c.period_T = period;
        c.t_only = t_only;
        c.a_inf = c.b_inf = std::numeric_limits<double>::infinity();
        c.a_sup = c.b_sup = -std::numeric_limits<double>::infinity();
        const int mx = t_only ? 0 : nx;
        for (int i = 0; i <= nt; ++i) {
            const double t = t0 + (t1 - t0) * double(i) / double(nt);
            for (int j = 0; j <= mx; ++j) {
                const double x = mx == 0 ? x0 : x0 + (x1 - x0) * double(j) / double(mx);
                const double av = c.a(t, x);
                const double bv = c.b(t, x);
                c.a_inf = std::min(c.a_inf, av);
                c.a_sup = std::max(c.a_sup, av);
                c.b_inf = std::min(c.b_inf, bv);
                c.b_sup = std::max(c.b_sup, bv);
            }
        }
        return c;
    }
};

// Chemical-imbalance constant M: min of the two branch values, positive parts.
inline double compute_M(const ModelParams& p) {
    const double cross = positive_part(p.chi2 * p.mu2 * p.lambda2 - p.chi1 * p.mu1 * p.lambda1);
    const double branch1 =
        (cross + p.chi1 * p.mu1 * positive_part(p.lambda1 - p.lambda2)) / p.lambda2;
    const double branch2 =
        (cross + p.chi2 * p.mu2 * positive_part(p.lambda1 - p.lambda2)) / p.lambda1;
    return std::min(branch1, branch2);
}

// Chemical-difference constant K: as M with absolute values.
inline double compute_K(const ModelParams& p) {
    const double cross = std::abs(p.chi1 * p.mu1 * p.lambda1 - p.chi2 * p.mu2 * p.lambda2);
    const double gap = std::abs(p.lambda1 - p.lambda2);
    const double branch1 = (cross + p.chi1 * p.mu1 * gap) / p.lambda2;
    const double branch2 = (cross + p.chi2 * p.mu2 * gap) / p.lambda1;
    return std::min(branch1, branch2);
}

// margins[i] = signed slack of hypothesis (Hi): b_inf minus the right-hand
// side (for (H0), the smaller of a_inf and b_inf).
struct HypothesisReport {
    double M = 0.0;
    double K = 0.0;
    bool h0_ok = false, h1_ok = false, h2_ok = false, h3_ok = false;
    std::array<double, 4> margins{};
};

inline HypothesisReport check_hypotheses(const ModelParams& p, const CoefficientField& c) {
    HypothesisReport r;
    r.M = compute_M(p);
    r.K = compute_K(p);
    const double drift = p.chi1 * p.mu1 - p.chi2 * p.mu2;

    r.margins[0] = std::min(c.a_inf, c.b_inf);
    r.h0_ok = c.h0_ok();

    r.margins[1] = c.b_inf - (drift + r.M);
    r.h1_ok = r.margins[1] > 0.0;

    if (c.a_inf > 0.0) {
        r.margins[2] =
            c.b_inf - ((1.0 + c.a_sup / c.a_inf) * p.chi1 * p.mu1 - p.chi2 * p.mu2 + r.M);
    } else {
        r.margins[2] = -std::numeric_limits<double>::infinity();
    }
    r.h2_ok = r.margins[2] > 0.0;

    r.margins[3] = c.b_inf - (drift + r.K);
    r.h3_ok = r.margins[3] > 0.0;
    return r;
}

// Theorem bounds. Fields are empty when the governing hypothesis fails
// (denominator not positive), never returned as negative numbers.
struct BoundSet {
    std::optional<double> C_u0;
    std::optional<double> limsup_bound;
    std::optional<double> M0;
    std::optional<double> m0;
    std::optional<double> rho;
};

inline BoundSet derive_bounds(const ModelParams& p, const CoefficientField& c,
                              double u0_sup) {
    BoundSet b;
    const double M = compute_M(p);
    const double K = compute_K(p);
    const double den1 = c.b_inf + p.chi2 * p.mu2 - p.chi1 * p.mu1 - M;
    if (den1 > 0.0) {
        const double limsup = c.a_sup / den1;
        b.limsup_bound = limsup;
        b.M0 = limsup;
        b.C_u0 = std::max(u0_sup, limsup);
    }
    const double den2 = c.b_sup - p.chi1 * p.mu1 + p.chi2 * p.mu2;
    if (c.a_inf > 0.0 && den1 > 0.0 && den2 > 0.0) {
        const double num =
            c.b_inf - (1.0 + c.a_sup / c.a_inf) * p.chi1 * p.mu1 + p.chi2 * p.mu2 - M;
        if (num > 0.0) b.m0 = c.a_inf * num / (den1 * den2);
    }
    const double den3 = c.b_inf + p.chi2 * p.mu2 - p.chi1 * p.mu1;
    if (den3 > 0.0) b.rho = K / den3;
    return b;
}

}  // namespace chemofront

// Screened-Poisson solves 0 = v_xx - lambda v + mu u for the quasi-steady
// chemicals, plus an independent Green's-kernel oracle used by the tests.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "chemofront/grid.hpp"
#include "chemofront/tridiag.hpp"

namespace chemofront {

// Chemicals carry their own boundary conditions: at a moving front u is
// Dirichlet but the chemical flux is zero, so the pair can differ from the
// grid's u conditions.
struct ChemicalBc {
    BoundaryKind left;
    BoundaryKind right;
    static ChemicalBc of_grid(const Grid& g) { return {g.left_bc, g.right_bc}; }
    static ChemicalBc flux_free() {
        return {BoundaryKind::neumann_zero, BoundaryKind::neumann_zero};
    }
};

class EllipticSolver {
  public:
    // Central differences with ghost-node reflection at flux-free edges
    // (second order); Dirichlet edges pin v = 0. One tridiagonal pass.
    void solve(const Grid& g, std::span<const double> u, double lambda, double mu,
               std::vector<double>& v, ChemicalBc bc) {
        if (!(lambda > 0.0)) throw std::invalid_argument("solve_chemical: lambda must be > 0");
        const int n = g.n_nodes();
        if (int(u.size()) != n) throw std::invalid_argument("solve_chemical: size mismatch");
        const double inv_dx2 = 1.0 / (g.dx * g.dx);
        lo_.assign(n, -inv_dx2);
        di_.assign(n, lambda + 2.0 * inv_dx2);
        up_.assign(n, -inv_dx2);
        rhs_.resize(n);
        for (int i = 0; i < n; ++i) rhs_[i] = mu * u[i];
        if (bc.left == BoundaryKind::dirichlet_zero) {
            di_[0] = 1.0;
            up_[0] = 0.0;
            rhs_[0] = 0.0;
        } else {
            up_[0] = -2.0 * inv_dx2;
        }
        if (bc.right == BoundaryKind::dirichlet_zero) {
            di_[n - 1] = 1.0;
            lo_[n - 1] = 0.0;
            rhs_[n - 1] = 0.0;
        } else {
            lo_[n - 1] = -2.0 * inv_dx2;
        }
        thomas_.solve(lo_, di_, up_, rhs_, v);

        // discrete maximum principle: nonnegative forcing gives a nonnegative
        // chemical, and lambda * max v cannot exceed mu * max u
        double u_min = u[0], u_max = u[0], v_min = v[0], v_max = v[0];
        for (int i = 1; i < n; ++i) {
            u_min = std::min(u_min, u[i]);
            u_max = std::max(u_max, u[i]);
            v_min = std::min(v_min, v[i]);
            v_max = std::max(v_max, v[i]);
        }
        const double scale = mu * std::abs(u_max) / lambda + 1e-30;
        if (u_min >= 0.0 && mu >= 0.0 &&
            (v_min < -1e-12 * scale || lambda * v_max > mu * u_max + 1e-12 * lambda * scale))
            throw SingularSystemError("elliptic solve violated the maximum principle");
    }

    void solve(const Grid& g, std::span<const double> u, double lambda, double mu,
               std::vector<double>& v) {
        solve(g, u, lambda, mu, v, ChemicalBc::of_grid(g));
    }

  private:
    TridiagonalSolver thomas_;
    std::vector<double> lo_, di_, up_, rhs_;
};

inline std::vector<double> solve_chemical(const Grid& g, std::span<const double> u,
                                          double lambda, double mu) {
    EllipticSolver s;
    std::vector<double> v;
    s.solve(g, u, lambda, mu, v);
    return v;
}

inline std::vector<double> solve_chemical(const Grid& g, std::span<const double> u,
                                          double lambda, double mu, ChemicalBc bc) {
    EllipticSolver s;
    std::vector<double> v;
    s.solve(g, u, lambda, mu, v, bc);
    return v;
}

namespace detail {

// Per-cell integrals of the resolvent kernel against a linear segment.
// E = exp(-kappa*dx). j_toward_right weights the cell as seen from a point at
// its right end; j_toward_left as seen from its left end.
struct KernelCell {
    double one_minus_E;       // -expm1(-kappa dx)
    double tail;              // 1 - E(1 + kappa dx)
    double kappa, dx, E;
    explicit KernelCell(double kappa_, double dx_) : kappa(kappa_), dx(dx_) {
        E = std::exp(-kappa * dx);
        one_minus_E = -std::expm1(-kappa * dx);
        tail = one_minus_E - E * kappa * dx;
    }
    double j_from_right(double ua, double ub) const {
        const double s = (ub - ua) / dx;
        return ub * one_minus_E / kappa - s * tail / (kappa * kappa);
    }
    double j_from_left(double ua, double ub) const {
        const double s = (ub - ua) / dx;
        return ua * one_minus_E / kappa + s * tail / (kappa * kappa);
    }
};

}  // namespace detail

// Resolvent-kernel oracle: v(x) = mu * Int e^{-sqrt(lambda)|x-z|}/(2 sqrt(lambda))
// over the reflected extension of the piecewise-linear interpolant of u.
// Flux-free edges reflect evenly, Dirichlet edges oddly; reflections are
// iterated until the kernel tail is below 1e-12 of the declared 1e-6
// quadrature tolerance. Cell integrals are closed-form, accumulated by a
// two-sided exponential scan (O(n), no improper integral).
inline std::vector<double> greens_oracle(const Grid& g, std::span<const double> u,
                                         double lambda, double mu, ChemicalBc bc) {
    if (!(lambda > 0.0)) throw std::invalid_argument("greens_oracle: lambda must be > 0");
    const int n = g.n_nodes();
    if (int(u.size()) != n) throw std::invalid_argument("greens_oracle: size mismatch");
    const double kappa = std::sqrt(lambda);
    const double span_x = g.x_max - g.x_min;
    // periods of the reflected extension needed on each side of the base copy
    const int periods = int(std::ceil(42.0 / (kappa * 2.0 * span_x))) + 1;
    const int seg_lo = -2 * periods;
    const int seg_hi = 2 * periods;  // segments m in [seg_lo, seg_hi)

    const double sign_left = bc.left == BoundaryKind::dirichlet_zero ? -1.0 : 1.0;
    const double sign_right = bc.right == BoundaryKind::dirichlet_zero ? -1.0 : 1.0;
    auto segment_sign = [&](int m) {
        // crossing boundary at j*span: even j reflects at the left end, odd at
        // the right end
        double s = 1.0;
        if (m > 0)
            for (int j = 1; j <= m; ++j) s *= (j % 2 == 1) ? sign_right : sign_left;
        else
            for (int j = 0; j > m; --j) s *= ((-j) % 2 == 0) ? sign_left : sign_right;
        return s;
    };

    // cell values of the extended source, enumerated left to right
    const int total_cells = (seg_hi - seg_lo) * g.n_cells;
    std::vector<double> ua(total_cells), ub(total_cells);
    int c = 0;
    for (int m = seg_lo; m < seg_hi; ++m) {
        const double s = segment_sign(m);
        const bool mirrored = ((m % 2) + 2) % 2 == 1;
        for (int j = 0; j < g.n_cells; ++j, ++c) {
            if (!mirrored) {
                ua[c] = s * u[j];
                ub[c] = s * u[j + 1];
            } else {
                ua[c] = s * u[g.n_cells - j];
                ub[c] = s * u[g.n_cells - j - 1];
            }
        }
    }

    const detail::KernelCell kc(kappa, g.dx);
    const int base_first_cell = (-seg_lo) * g.n_cells;

    std::vector<double> v(n, 0.0);
    // left scan: mass to the left of each base node
    double acc = 0.0;
    for (int cell = 0; cell < total_cells; ++cell) {
        acc = acc * kc.E + kc.j_from_right(ua[cell], ub[cell]);
        const int node = cell + 1 - base_first_cell;
        if (node >= 0 && node <= g.n_cells) v[node] += acc;
        if (node > g.n_cells) break;
    }
    // right scan
    acc = 0.0;
    for (int cell = total_cells - 1; cell >= 0; --cell) {
        acc = acc * kc.E + kc.j_from_left(ua[cell], ub[cell]);
        const int node = cell - base_first_cell;
        if (node >= 0 && node <= g.n_cells) v[node] += acc;
        if (node < 0) break;
    }
    for (int i = 0; i < n; ++i) v[i] *= mu / (2.0 * kappa);
    return v;
}

inline std::vector<double> greens_oracle(const Grid& g, std::span<const double> u,
                                         double lambda, double mu) {
    return greens_oracle(g, u, lambda, mu, ChemicalBc::of_grid(g));
}

// Nodal gradient: central differences in the interior, second-order one-sided
// at edges; exactly zero at a neumann_zero edge.
inline std::vector<double> chemical_gradient(const Grid& g, std::span<const double> v) {
    const int n = g.n_nodes();
    if (int(v.size()) != n) throw std::invalid_argument("chemical_gradient: size mismatch");
    std::vector<double> dv(n);
    const double inv2dx = 1.0 / (2.0 * g.dx);
    for (int i = 1; i + 1 < n; ++i) dv[i] = (v[i + 1] - v[i - 1]) * inv2dx;
    dv[0] = g.left_bc == BoundaryKind::neumann_zero
                ? 0.0
                : (-3.0 * v[0] + 4.0 * v[1] - v[2]) * inv2dx;
    dv[n - 1] = g.right_bc == BoundaryKind::neumann_zero
                    ? 0.0
                    : (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) * inv2dx;
    return dv;
}

}  // namespace chemofront

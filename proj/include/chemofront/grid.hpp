// Truncated computational domains: half-line, whole-line, and the fixed
// reference interval used by the front-fixing transform.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemofront {

enum class GridKind { half_line, whole_line, reference_unit };
enum class BoundaryKind { neumann_zero, dirichlet_zero, artificial_neumann };

struct Grid {
    GridKind kind = GridKind::half_line;
    double x_min = 0.0;
    double x_max = 0.0;
    int n_cells = 0;
    double dx = 0.0;
    BoundaryKind left_bc = BoundaryKind::neumann_zero;
    BoundaryKind right_bc = BoundaryKind::artificial_neumann;

    int n_nodes() const { return n_cells + 1; }
    // Node positions are computed per index so they are exactly reproducible.
    double node(int i) const { return x_min + double(i) * dx; }

    bool left_is_flux_free() const { return left_bc != BoundaryKind::dirichlet_zero; }
    bool right_is_flux_free() const { return right_bc != BoundaryKind::dirichlet_zero; }
};

inline Grid make_grid(GridKind kind, double x_max, int n_cells) {
    if (n_cells < 8) throw std::invalid_argument("make_grid: n_cells must be >= 8");
    Grid g;
    g.kind = kind;
    g.n_cells = n_cells;
    switch (kind) {
        case GridKind::half_line:
            if (!(x_max > 0.0)) throw std::invalid_argument("make_grid: x_max must be > 0");
            g.x_min = 0.0;
            g.x_max = x_max;
            g.left_bc = BoundaryKind::neumann_zero;
            g.right_bc = BoundaryKind::artificial_neumann;
            break;
        case GridKind::whole_line:
            if (!(x_max > 0.0)) throw std::invalid_argument("make_grid: x_max must be > 0");
            if (n_cells % 2 != 0)
                throw std::invalid_argument("make_grid: whole_line needs even n_cells");
            g.x_min = -x_max;
            g.x_max = x_max;
            g.left_bc = BoundaryKind::artificial_neumann;
            g.right_bc = BoundaryKind::artificial_neumann;
            break;
        case GridKind::reference_unit:
            g.x_min = 0.0;
            g.x_max = 1.0;
            g.left_bc = BoundaryKind::neumann_zero;
            g.right_bc = BoundaryKind::dirichlet_zero;
            break;
    }
    g.dx = (g.x_max - g.x_min) / double(n_cells);
    return g;
}

inline Grid make_reference_grid(int n_cells,
                                BoundaryKind left = BoundaryKind::neumann_zero,
                                BoundaryKind right = BoundaryKind::dirichlet_zero) {
    Grid g = make_grid(GridKind::reference_unit, 1.0, n_cells);
    g.left_bc = left;
    g.right_bc = right;
    return g;
}

// Discrete (u, v1, v2) at one time instant on a grid's nodes.
struct StateField {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v1;
    std::vector<double> v2;
};

struct NotEvenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline double evenness_defect(const std::vector<double>& f, int center) {
    double worst = 0.0;
    const int n = int(f.size());
    for (int i = 1; center - i >= 0 && center + i < n; ++i)
        worst = std::max(worst, std::abs(f[center + i] - f[center - i]));
    return worst;
}
}  // namespace detail

// The half-line grid a whole-line grid restricts onto.
inline Grid half_of(const Grid& whole) {
    if (whole.kind != GridKind::whole_line)
        throw std::invalid_argument("half_of: expects a whole_line grid");
    return make_grid(GridKind::half_line, whole.x_max, whole.n_cells / 2);
}

// Restriction of an even-symmetric whole-line field to x >= 0.
inline StateField restrict_even(const Grid& whole, const StateField& f,
                                double tol = 1e-10) {
    if (whole.kind != GridKind::whole_line)
        throw std::invalid_argument("restrict_even: expects a whole_line grid");
    const int center = whole.n_cells / 2;
    for (const auto* arr : {&f.u, &f.v1, &f.v2}) {
        if (arr->empty()) continue;
        if (int(arr->size()) != whole.n_nodes())
            throw std::invalid_argument("restrict_even: field size mismatch");
        const double defect = detail::evenness_defect(*arr, center);
        if (defect > tol)
            throw NotEvenError("not-even: symmetry defect " + std::to_string(defect) +
                               " exceeds tolerance");
    }
    StateField out;
    out.t = f.t;
    auto take = [&](const std::vector<double>& src, std::vector<double>& dst) {
        if (src.empty()) return;
        dst.assign(src.begin() + center, src.end());
    };
    take(f.u, out.u);
    take(f.v1, out.v1);
    take(f.v2, out.v2);
    return out;
}

// Even extension of half-line nodal values onto the matching whole-line grid.
inline std::vector<double> even_extension(const std::vector<double>& half) {
    if (half.empty()) return {};
    const int n = int(half.size());
    std::vector<double> out(2 * n - 1);
    for (int i = 0; i < n; ++i) {
        out[n - 1 - i] = half[i];
        out[n - 1 + i] = half[i];
    }
    return out;
}

}  // namespace chemofront

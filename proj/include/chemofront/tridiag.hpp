#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace chemofront {

struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thomas elimination. lower[i] multiplies x[i-1], upper[i] multiplies x[i+1];
// lower[0] and upper[n-1] are ignored. Scratch is reused across solves.
class TridiagonalSolver {
  public:
    void solve(const std::vector<double>& lower, const std::vector<double>& diag,
               const std::vector<double>& upper, const std::vector<double>& rhs,
               std::vector<double>& x) {
        const std::size_t n = diag.size();
        c_.resize(n);
        d_.resize(n);
        x.resize(n);
        if (diag[0] == 0.0) throw SingularSystemError("singular-system: zero pivot at row 0");
        c_[0] = upper[0] / diag[0];
        d_[0] = rhs[0] / diag[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = diag[i] - lower[i] * c_[i - 1];
            if (m == 0.0)
                throw SingularSystemError("singular-system: zero pivot during elimination");
            c_[i] = (i + 1 < n ? upper[i] : 0.0) / m;
            d_[i] = (rhs[i] - lower[i] * d_[i - 1]) / m;
        }
        x[n - 1] = d_[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) x[i] = d_[i] - c_[i] * x[i + 1];
    }

  private:
    std::vector<double> c_, d_;
};

}  // namespace chemofront

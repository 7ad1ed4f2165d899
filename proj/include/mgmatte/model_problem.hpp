#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "mgmatte/grid.hpp"
#include "mgmatte/stencil.hpp"

namespace mgmatte {

// 1D Laplace equation with homogeneous Dirichlet ends, the [-1, 2, -1]
// convolution on n free variables spaced h = 1/(n+1) apart. The boundary
// values are eliminated into the stencil, so the unique solution is u = 0.
// Its closed-form eigenpairs are the analytic ground truth for the
// relaxation and multigrid tests.
struct ModelProblem1D {
    int n = 0;
    double h = 0.0;
    StencilMatrix a;   // 1 x n grid, bands {-1, 0, +1}
    GridField f;       // all zeros
};

inline ModelProblem1D laplace_1d(int n) {
    if (n < 1) throw std::invalid_argument("laplace_1d: n must be >= 1");
    ModelProblem1D mp;
    mp.n = n;
    mp.h = 1.0 / (n + 1);
    mp.a = StencilMatrix(n, 1, {{-1, 0}, {0, 0}, {1, 0}});
    for (int x = 0; x < n; ++x) {
        mp.a.diagonal()[x] = 2.0;
        if (x > 0) mp.a.band(static_cast<std::size_t>(mp.a.find_band({-1, 0})))[x] = -1.0;
        if (x < n - 1) mp.a.band(static_cast<std::size_t>(mp.a.find_band({1, 0})))[x] = -1.0;
    }
    mp.f = GridField(n, 1);
    return mp;
}

inline double laplace_1d_eigenvalue(int n, int mode) {
    const double h = 1.0 / (n + 1);
    return 2.0 - 2.0 * std::cos(std::numbers::pi * mode * h);
}

// Mode i of laplace_1d(n): eigenvalue 2 - 2cos(pi i h) and eigenvector
// v_j = sin(i pi j h) / h (1-based position j), kept in this scaling so the
// vectors match the closed form verbatim.
inline std::pair<double, GridField> analytic_eigenpair(int n, int mode) {
    if (n < 1) throw std::invalid_argument("analytic_eigenpair: n must be >= 1");
    if (mode < 1 || mode > n) throw std::invalid_argument("analytic_eigenpair: mode index out of range");
    const double h = 1.0 / (n + 1);
    GridField v(n, 1);
    for (int j = 1; j <= n; ++j) v[static_cast<std::size_t>(j - 1)] = std::sin(mode * std::numbers::pi * j * h) / h;
    return {laplace_1d_eigenvalue(n, mode), std::move(v)};
}

// kappa(A) = lambda_n / lambda_1 from the closed forms; approaches
// 4(n+1)^2 / pi^2 as n grows.
inline double condition_number_estimate(int n) {
    if (n < 1) throw std::invalid_argument("condition_number_estimate: n must be >= 1");
    if (n == 1) return 1.0;
    return laplace_1d_eigenvalue(n, n) / laplace_1d_eigenvalue(n, 1);
}

}  // namespace mgmatte

#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "mgmatte/dense.hpp"
#include "mgmatte/grid.hpp"
#include "mgmatte/runtime.hpp"
#include "mgmatte/stencil.hpp"
#include "mgmatte/work.hpp"

namespace mgmatte {

enum class SmootherVariant { jacobi, damped_jacobi, gauss_seidel };

struct SmootherKind {
    SmootherVariant variant = SmootherVariant::gauss_seidel;
    double omega = 2.0 / 3.0;  // damping, used by damped_jacobi only
    int sweeps = 1;
};

// One (damped) Jacobi sweep: u <- (1-w) u + w D^-1 (f - (A - D) u).
// w = 1 gives the plain Jacobi iteration.
inline void jacobi_sweep(const StencilMatrix& a, GridField& u, const GridField& f,
                         double omega = 1.0) {
    if (a.width() != u.width || a.height() != u.height || !u.same_dims(f))
        throw std::invalid_argument("jacobi_sweep: dimension mismatch");
    if (!(omega > 0.0) || omega > 1.0)
        throw std::invalid_argument("jacobi_sweep: omega must be in (0, 1]");
    const auto& diag = a.diagonal();
    for (double d : diag)
        if (d == 0.0) throw std::domain_error("jacobi_sweep: zero diagonal entry");
    GridField au(u.width, u.height);
    spmv_into(a, u, au, WorkKind::smooth);
    parallel_for_rows(u.height, [&](int y0, int y1) {
        const std::size_t p0 = static_cast<std::size_t>(y0) * u.width;
        const std::size_t p1 = static_cast<std::size_t>(y1) * u.width;
        for (std::size_t p = p0; p < p1; ++p)
            u[p] = (1.0 - omega) * u[p] + omega * (f[p] - au[p] + diag[p] * u[p]) / diag[p];
    });
    tally_work(WorkKind::smooth, 3 * static_cast<std::uint64_t>(u.size()));
}

// One forward Gauss-Seidel sweep in row-major pixel order, in place.
// The fixed ordering is part of the contract; there is no parallel variant.
inline void gauss_seidel_sweep(const StencilMatrix& a, GridField& u, const GridField& f,
                               WorkKind kind = WorkKind::smooth) {
    if (a.width() != u.width || a.height() != u.height || !u.same_dims(f))
        throw std::invalid_argument("gauss_seidel_sweep: dimension mismatch");
    const int w = a.width(), h = a.height();
    const auto& diag = a.diagonal();
    const std::size_t nbands = a.band_count();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t p = a.index(x, y);
            double s = f[p];
            for (std::size_t b = 0; b < nbands; ++b) {
                const BandOffset o = a.band_offset(b);
                if (o.dx == 0 && o.dy == 0) continue;
                const int qx = x + o.dx, qy = y + o.dy;
                if (qx < 0 || qx >= w || qy < 0 || qy >= h) continue;
                s -= a.band(b)[p] * u[a.index(qx, qy)];
            }
            const double d = diag[p];
            if (d == 0.0) throw std::domain_error("gauss_seidel_sweep: zero diagonal entry");
            u[p] = s / d;
        }
    tally_work(kind, a.nnz());
}

inline void apply_smoother(const StencilMatrix& a, GridField& u, const GridField& f,
                           const SmootherKind& kind) {
    for (int s = 0; s < kind.sweeps; ++s) {
        switch (kind.variant) {
            case SmootherVariant::jacobi: jacobi_sweep(a, u, f, 1.0); break;
            case SmootherVariant::damped_jacobi: jacobi_sweep(a, u, f, kind.omega); break;
            case SmootherVariant::gauss_seidel: gauss_seidel_sweep(a, u, f); break;
        }
    }
}

// Dense iteration matrix of the smoother: R_J(w) = I - w D^-1 A, and
// R_G = (D - L)^-1 U built by forward substitution column by column.
inline DenseMatrix iteration_matrix(const StencilMatrix& a, const SmootherKind& kind) {
    const DenseMatrix ad = to_dense(a);  // applies the size guard
    const std::size_t n = ad.rows;
    DenseMatrix r(n, n);
    if (kind.variant == SmootherVariant::jacobi || kind.variant == SmootherVariant::damped_jacobi) {
        const double omega = kind.variant == SmootherVariant::jacobi ? 1.0 : kind.omega;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ad.at(i, i);
            if (d == 0.0) throw std::domain_error("iteration_matrix: zero diagonal entry");
            for (std::size_t j = 0; j < n; ++j)
                r.at(i, j) = (i == j ? 1.0 : 0.0) - omega * ad.at(i, j) / d;
        }
        return r;
    }
    // Gauss-Seidel: solve (lower triangle of A) X = -strict_upper(A).
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = i < j ? -ad.at(i, j) : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= ad.at(i, k) * r.at(k, j);
            const double d = ad.at(i, i);
            if (d == 0.0) throw std::domain_error("iteration_matrix: zero diagonal entry");
            r.at(i, j) = s / d;
        }
    }
    return r;
}

// Largest eigenvalue magnitude by power iteration with a fixed-seed start.
inline double power_iteration_spectral_radius(const DenseMatrix& r, std::size_t max_iters = 1000000) {
    if (r.rows != r.cols) throw std::invalid_argument("power_iteration: matrix not square");
    std::mt19937 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(r.rows);
    for (double& x : v) x = dist(rng);
    double vn = 0.0;
    for (double x : v) vn += x * x;
    vn = std::sqrt(vn);
    for (double& x : v) x /= vn;

    double est = 0.0;
    int stable = 0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        std::vector<double> w = matvec(r, v);
        double wn = 0.0;
        for (double x : w) wn += x * x;
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        const double prev = est;
        est = wn;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / wn;
        if (std::abs(est - prev) <= 1e-12 * std::max(est, 1e-30)) {
            if (++stable >= 5) break;
        } else {
            stable = 0;
        }
    }
    return est;
}

// rho(R) of the smoother's dense iteration matrix (size-guarded).
inline double smoother_spectral_radius(const StencilMatrix& a, const SmootherKind& kind) {
    return power_iteration_spectral_radius(iteration_matrix(a, kind));
}

}  // namespace mgmatte

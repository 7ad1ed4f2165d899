#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mgmatte/grid.hpp"
#include "mgmatte/stencil.hpp"
#include "mgmatte/work.hpp"

namespace mgmatte {

// Vertex-centered coarsening: coarse points sit on even fine indices, odd
// sizes keep their last point.
inline int coarse_extent(int fine) { return (fine + 1) / 2; }

// Interpolation weight renormalization along one axis: an odd fine index on
// an even-sized grid has no second coarse neighbor, and its surviving
// weights are rescaled so interpolation still reproduces constants there.
// This keeps the coarse-operator null space exact (P 1 = 1 everywhere) while
// the interior stencils stay the literal 1/4-1/2-1 and 1/16-1/8-1/4 forms
// and restriction remains exactly P^T / 4.
inline double boundary_scale(int fine_index, int fine_extent) {
    return (fine_index % 2 != 0 && fine_index == fine_extent - 1) ? 2.0 : 1.0;
}

// Full-weighting restriction, stencil [1/16 1/8 1/16; 1/8 1/4 1/8; ...]
// centered on fine point (2X, 2Y). Out-of-bounds fine neighbors contribute
// zero; entries at boundary fine points carry the transpose of the
// prolongation renormalization.
inline GridField restrict_full_weighting(const GridField& fine) {
    if (fine.width < 2 || fine.height < 2)
        throw std::invalid_argument("restrict_full_weighting: fine grid must be at least 2x2");
    static constexpr double w1d[3] = {0.25, 0.5, 0.25};
    GridField coarse(coarse_extent(fine.width), coarse_extent(fine.height));
    std::uint64_t mults = 0;
    for (int Y = 0; Y < coarse.height; ++Y)
        for (int X = 0; X < coarse.width; ++X) {
            double s = 0.0;
            for (int ay = -1; ay <= 1; ++ay) {
                const int fy = 2 * Y + ay;
                if (fy < 0 || fy >= fine.height) continue;
                const double wy = w1d[ay + 1] * boundary_scale(fy, fine.height);
                for (int ax = -1; ax <= 1; ++ax) {
                    const int fx = 2 * X + ax;
                    if (fx < 0 || fx >= fine.width) continue;
                    s += w1d[ax + 1] * boundary_scale(fx, fine.width) * wy * fine.at(fx, fy);
                    ++mults;
                }
            }
            coarse.at(X, Y) = s;
        }
    tally_work(WorkKind::transfer, mults);
    return coarse;
}

// Bilinear prolongation, stencil [1/4 1/2 1/4; 1/2 1 1/2; ...]: each coarse
// value contributes to the 9 surrounding fine points. Equals 4x the
// transpose of restrict_full_weighting and reproduces constants everywhere.
inline GridField prolong_bilinear(const GridField& coarse, int fine_width, int fine_height) {
    if (coarse_extent(fine_width) != coarse.width || coarse_extent(fine_height) != coarse.height)
        throw std::invalid_argument("prolong_bilinear: coarse/fine dimensions inconsistent");
    GridField fine(fine_width, fine_height);
    std::uint64_t mults = 0;
    for (int y = 0; y < fine_height; ++y) {
        const int Y0 = y / 2;
        const bool y_odd = (y % 2) != 0;
        const double sy = boundary_scale(y, fine_height);
        for (int x = 0; x < fine_width; ++x) {
            const int X0 = x / 2;
            const bool x_odd = (x % 2) != 0;
            const double sxy = boundary_scale(x, fine_width) * sy;
            double s = 0.0;
            if (!x_odd && !y_odd) {
                s = coarse.at(X0, Y0);
                ++mults;
            } else if (x_odd && !y_odd) {
                s = 0.5 * sxy * coarse.at(X0, Y0);
                ++mults;
                if (X0 + 1 < coarse.width) { s += 0.5 * sxy * coarse.at(X0 + 1, Y0); ++mults; }
            } else if (!x_odd && y_odd) {
                s = 0.5 * sxy * coarse.at(X0, Y0);
                ++mults;
                if (Y0 + 1 < coarse.height) { s += 0.5 * sxy * coarse.at(X0, Y0 + 1); ++mults; }
            } else {
                for (int by = 0; by <= 1; ++by)
                    for (int bx = 0; bx <= 1; ++bx) {
                        const int X = X0 + bx, Y = Y0 + by;
                        if (X < coarse.width && Y < coarse.height) {
                            s += 0.25 * sxy * coarse.at(X, Y);
                            ++mults;
                        }
                    }
            }
            fine.at(x, y) = s;
        }
    }
    tally_work(WorkKind::transfer, mults);
    return fine;
}

// Galerkin coarse operator A_c = R A P with the two stencils above
// (P = 4 R^T, so A_c is symmetric whenever A is). Band support is capped at
// the 5x5 neighborhood by construction.
inline StencilMatrix galerkin_coarsen(const StencilMatrix& a_fine) {
    if (!a_fine.symmetric())
        throw std::invalid_argument("galerkin_coarsen: operator must be symmetric");
    for (const BandOffset o : a_fine.band_offsets())
        if (std::abs(o.dx) > 2 || std::abs(o.dy) > 2)
            throw std::invalid_argument("galerkin_coarsen: band support exceeds the 5x5 neighborhood");

    static constexpr double rw[3] = {0.25, 0.5, 0.25};   // restriction, 1D factors
    static constexpr double pw[3] = {0.5, 1.0, 0.5};     // prolongation, 1D factors

    const int fw = a_fine.width(), fh = a_fine.height();
    const int cw = coarse_extent(fw), ch = coarse_extent(fh);
    StencilMatrix a_coarse(cw, ch, square_band_offsets(2));

    // Fine-band index by displacement in [-6, 6]^2 (-1 where absent).
    constexpr int span = 6;
    int fine_band[2 * span + 1][2 * span + 1];
    for (int dy = -span; dy <= span; ++dy)
        for (int dx = -span; dx <= span; ++dx)
            fine_band[dy + span][dx + span] =
                (std::abs(dx) <= 2 && std::abs(dy) <= 2) ? a_fine.find_band({dx, dy}) : -1;

    for (std::size_t cb = 0; cb < a_coarse.band_count(); ++cb) {
        const BandOffset co = a_coarse.band_offset(cb);
        auto& out = a_coarse.band(cb);
        for (int Y = 0; Y < ch; ++Y) {
            const int Yq = Y + co.dy;
            if (Yq < 0 || Yq >= ch) continue;
            for (int X = 0; X < cw; ++X) {
                const int Xq = X + co.dx;
                if (Xq < 0 || Xq >= cw) continue;
                double s = 0.0;
                for (int ay = -1; ay <= 1; ++ay) {
                    const int py = 2 * Y + ay;
                    if (py < 0 || py >= fh) continue;
                    for (int ax = -1; ax <= 1; ++ax) {
                        const int px = 2 * X + ax;
                        if (px < 0 || px >= fw) continue;
                        const double ra = rw[ax + 1] * boundary_scale(px, fw) * rw[ay + 1] *
                                          boundary_scale(py, fh);
                        const std::size_t pidx = a_fine.index(px, py);
                        for (int by = -1; by <= 1; ++by) {
                            const int qy = 2 * Yq + by;
                            if (qy < 0 || qy >= fh) continue;
                            for (int bx = -1; bx <= 1; ++bx) {
                                const int qx = 2 * Xq + bx;
                                if (qx < 0 || qx >= fw) continue;
                                const int fb = fine_band[qy - py + span][qx - px + span];
                                if (fb < 0) continue;
                                const double aval = a_fine.band(static_cast<std::size_t>(fb))[pidx];
                                if (aval == 0.0) continue;
                                s += ra * aval * pw[bx + 1] * boundary_scale(qx, fw) * pw[by + 1] *
                                     boundary_scale(qy, fh);
                            }
                        }
                    }
                }
                out[a_coarse.index(X, Y)] = s;
            }
        }
    }
    return a_coarse;
}

// Ladder of Galerkin-coarsened operators, finest level first.
struct GridHierarchy {
    struct Level {
        StencilMatrix a;
        int width = 0;
        int height = 0;
        std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
    };

    std::vector<Level> levels;  // levels[0] = finest

    std::size_t level_count() const { return levels.size(); }
    const Level& finest() const { return levels.front(); }
    const Level& coarsest() const { return levels.back(); }

    // Levels by the ladder convention used in the descent algorithms:
    // index 1 = coarsest, index level_count() = finest.
    const Level& by_ladder_index(std::size_t i) const { return levels[levels.size() - i]; }

    // Total stored band values across levels relative to the finest level.
    double storage_ratio() const {
        std::uint64_t fine = 0, total = 0;
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto vals = static_cast<std::uint64_t>(levels[l].a.band_count()) * levels[l].pixels();
            total += vals;
            if (l == 0) fine = vals;
        }
        return static_cast<double>(total) / static_cast<double>(fine);
    }
};

inline GridHierarchy build_hierarchy(const StencilMatrix& a, std::size_t coarse_threshold = 1024) {
    if (!a.symmetric()) throw std::invalid_argument("build_hierarchy: operator must be symmetric");
    if (coarse_threshold < 1) throw std::invalid_argument("build_hierarchy: threshold must be >= 1");
    GridHierarchy hier;
    hier.levels.push_back({a, a.width(), a.height()});
    while (hier.levels.back().pixels() > coarse_threshold &&
           hier.levels.back().width >= 2 && hier.levels.back().height >= 2) {
        StencilMatrix coarse = galerkin_coarsen(hier.levels.back().a);
        const int w = coarse.width(), h = coarse.height();
        hier.levels.push_back({std::move(coarse), w, h});
    }
    return hier;
}

}  // namespace mgmatte

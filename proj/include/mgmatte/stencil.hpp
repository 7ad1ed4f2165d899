#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgmatte/dense.hpp"
#include "mgmatte/grid.hpp"
#include "mgmatte/runtime.hpp"
#include "mgmatte/work.hpp"

namespace mgmatte {

// Grid displacement of a matrix band. (0,0) is the diagonal.
struct BandOffset {
    int dx = 0;
    int dy = 0;

    friend bool operator==(const BandOffset&, const BandOffset&) = default;
    BandOffset negated() const { return {-dx, -dy}; }
};

// Symmetric banded sparse matrix on a rectangular pixel grid: one contiguous
// coefficient array per diagonal band. Entry (p, p+off) is band_values[off][p].
// Coefficients whose neighbor p+off falls outside the grid are stored as
// explicit zeros and never touched by products.
class StencilMatrix {
public:
    StencilMatrix() = default;

    StencilMatrix(int width, int height, std::vector<BandOffset> offsets, bool symmetric = true)
        : width_(width), height_(height), offsets_(std::move(offsets)), symmetric_(symmetric) {
        if (width_ <= 0 || height_ <= 0)
            throw std::invalid_argument("StencilMatrix: dimensions must be positive");
        diag_band_ = -1;
        for (std::size_t b = 0; b < offsets_.size(); ++b) {
            const BandOffset o = offsets_[b];
            if (o == BandOffset{0, 0}) diag_band_ = static_cast<int>(b);
            if (std::count(offsets_.begin(), offsets_.end(), o) != 1)
                throw std::invalid_argument("StencilMatrix: duplicate band offset");
            if (std::find(offsets_.begin(), offsets_.end(), o.negated()) == offsets_.end())
                throw std::invalid_argument("StencilMatrix: band set not closed under negation");
        }
        if (diag_band_ < 0) throw std::invalid_argument("StencilMatrix: missing (0,0) band");
        bands_.assign(offsets_.size(), std::vector<double>(pixels(), 0.0));
        nnz_ = 0;
        for (const BandOffset o : offsets_)
            nnz_ += static_cast<std::uint64_t>(std::max(0, width_ - std::abs(o.dx))) *
                    static_cast<std::uint64_t>(std::max(0, height_ - std::abs(o.dy)));
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixels() const { return static_cast<std::size_t>(width_) * height_; }
    bool symmetric() const { return symmetric_; }
    std::size_t band_count() const { return offsets_.size(); }
    const std::vector<BandOffset>& band_offsets() const { return offsets_; }
    BandOffset band_offset(std::size_t b) const { return offsets_[b]; }
    int diagonal_band() const { return diag_band_; }

    // Structural nonzeros: stored entries whose neighbor is in bounds.
    std::uint64_t nnz() const { return nnz_; }

    std::vector<double>& band(std::size_t b) { return bands_[b]; }
    const std::vector<double>& band(std::size_t b) const { return bands_[b]; }
    std::vector<double>& diagonal() { return bands_[static_cast<std::size_t>(diag_band_)]; }
    const std::vector<double>& diagonal() const { return bands_[static_cast<std::size_t>(diag_band_)]; }

    int find_band(BandOffset o) const {
        for (std::size_t b = 0; b < offsets_.size(); ++b)
            if (offsets_[b] == o) return static_cast<int>(b);
        return -1;
    }

    // A(p, q) with p=(x,y), q=p+off; zero when the band is absent.
    double coeff(int x, int y, BandOffset off) const {
        const int b = find_band(off);
        if (b < 0) return 0.0;
        return bands_[static_cast<std::size_t>(b)][index(x, y)];
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    // Zeroes every coefficient whose neighbor is out of bounds.
    void enforce_boundary_zeros() {
        for (std::size_t b = 0; b < offsets_.size(); ++b) {
            const BandOffset o = offsets_[b];
            if (o.dx == 0 && o.dy == 0) continue;
            for (int y = 0; y < height_; ++y)
                for (int x = 0; x < width_; ++x)
                    if (!in_bounds(x + o.dx, y + o.dy)) bands_[b][index(x, y)] = 0.0;
        }
    }

    // Structural symmetry: value(p, off) == value(p+off, -off) for in-bounds pairs.
    double max_symmetry_violation() const {
        double worst = 0.0;
        for (std::size_t b = 0; b < offsets_.size(); ++b) {
            const BandOffset o = offsets_[b];
            const int nb = find_band(o.negated());
            for (int y = 0; y < height_; ++y)
                for (int x = 0; x < width_; ++x) {
                    const int qx = x + o.dx, qy = y + o.dy;
                    if (!in_bounds(qx, qy)) continue;
                    const double d = bands_[b][index(x, y)] -
                                     bands_[static_cast<std::size_t>(nb)][index(qx, qy)];
                    worst = std::max(worst, std::abs(d));
                }
        }
        return worst;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<BandOffset> offsets_;
    std::vector<std::vector<double>> bands_;
    std::uint64_t nnz_ = 0;
    bool symmetric_ = true;
    int diag_band_ = -1;
};

// All 25 offsets with |dx|,|dy| <= radius (radius 2 for the matting Laplacian).
inline std::vector<BandOffset> square_band_offsets(int radius) {
    std::vector<BandOffset> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) offs.push_back({dx, dy});
    return offs;
}

inline StencilMatrix identity_stencil(int width, int height) {
    StencilMatrix m(width, height, {{0, 0}});
    std::fill(m.diagonal().begin(), m.diagonal().end(), 1.0);
    return m;
}

// y = A x. Band-outer loops over the in-bounds rectangle of each band, so the
// inner loops are branch-free and stored boundary zeros are never read.
inline void spmv_into(const StencilMatrix& a, const GridField& x, GridField& y,
                      WorkKind kind = WorkKind::spmv) {
    if (a.width() != x.width || a.height() != x.height)
        throw std::invalid_argument("spmv: dimension mismatch");
    if (!y.same_dims(x)) y = GridField(x.width, x.height);
    y.fill(0.0);
    const int w = a.width(), h = a.height();
    parallel_for_rows(h, [&](int y0, int y1) {
        for (std::size_t b = 0; b < a.band_count(); ++b) {
            const BandOffset o = a.band_offset(b);
            const double* band = a.band(b).data();
            const int ry0 = std::max(y0, std::max(0, -o.dy));
            const int ry1 = std::min(y1, std::min(h, h - o.dy));
            const int rx0 = std::max(0, -o.dx);
            const int rx1 = std::min(w, w - o.dx);
            for (int yy = ry0; yy < ry1; ++yy) {
                const std::size_t row = static_cast<std::size_t>(yy) * w;
                const std::size_t nrow = static_cast<std::size_t>(yy + o.dy) * w + o.dx;
                for (int xx = rx0; xx < rx1; ++xx)
                    y.values[row + xx] += band[row + xx] * x.values[nrow + xx];
            }
        }
    });
    tally_work(kind, a.nnz());
}

inline GridField spmv(const StencilMatrix& a, const GridField& x, WorkKind kind = WorkKind::spmv) {
    GridField y(x.width, x.height);
    spmv_into(a, x, y, kind);
    return y;
}

// r = f - A u
inline GridField residual(const StencilMatrix& a, const GridField& u, const GridField& f) {
    require_same_dims(u, f, "residual");
    GridField r = spmv(a, u);
    for (std::size_t p = 0; p < r.size(); ++p) r[p] = f[p] - r[p];
    return r;
}

inline constexpr std::size_t kDenseGuardPixels = 4096;

// Dense conversion for oracles and the coarse-level direct solve;
// guarded because dense storage blows up quadratically.
inline DenseMatrix to_dense(const StencilMatrix& a) {
    if (a.pixels() > kDenseGuardPixels)
        throw std::length_error("to_dense: grid exceeds " + std::to_string(kDenseGuardPixels) +
                                " pixels");
    const std::size_t n = a.pixels();
    DenseMatrix d(n, n);
    const int w = a.width(), h = a.height();
    for (std::size_t b = 0; b < a.band_count(); ++b) {
        const BandOffset o = a.band_offset(b);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!a.in_bounds(x + o.dx, y + o.dy)) continue;
                d.at(a.index(x, y), a.index(x + o.dx, y + o.dy)) = a.band(b)[a.index(x, y)];
            }
    }
    return d;
}

}  // namespace mgmatte

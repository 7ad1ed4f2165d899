#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mgmatte/grid.hpp"
#include "mgmatte/runtime.hpp"
#include "mgmatte/stencil.hpp"

namespace mgmatte {

// Planar image with values in [0, 1]. plane(c)[p] is channel c at pixel p.
struct ImagePlane {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;  // channel-major planes

    ImagePlane() = default;
    ImagePlane(int w, int h, int c) : width(w), height(h), channels(c) {
        if (w <= 0 || h <= 0 || (c != 1 && c != 3))
            throw std::invalid_argument("ImagePlane: bad dimensions or channel count");
        data.assign(static_cast<std::size_t>(w) * h * c, 0.0);
    }

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
    double* plane(int c) { return data.data() + static_cast<std::size_t>(c) * pixels(); }
    const double* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * pixels(); }
    double at(int c, int x, int y) const { return plane(c)[static_cast<std::size_t>(y) * width + x]; }
    double& at(int c, int x, int y) { return plane(c)[static_cast<std::size_t>(y) * width + x]; }

    ImagePlane to_rgb() const {
        if (channels == 3) return *this;
        ImagePlane out(width, height, 3);
        for (int c = 0; c < 3; ++c)
            std::copy(plane(0), plane(0) + pixels(), out.plane(c));
        return out;
    }
};

// Where the covariance regularizer sits. The affinity formula writes
// (Sigma + eps I)^-1; Levin's released code uses eps/|w| instead. Both give
// a PSD Laplacian with the constant null vector.
enum class CovRegularization { plain_epsilon, epsilon_over_window };

// Per-window color statistics: mean, regularized inverse covariance, size.
struct WindowStats {
    std::array<double, 3> mean{};
    std::array<double, 9> inv_cov{};  // row-major 3x3, symmetric positive definite
    int window_size = 0;
};

namespace detail {

// Inverse of a symmetric positive definite 3x3 via the adjugate.
inline std::array<double, 9> invert_sym3(const std::array<double, 9>& m) {
    const double a = m[0], b = m[1], c = m[2], d = m[4], e = m[5], f = m[8];
    const double A = d * f - e * e;
    const double B = c * e - b * f;
    const double C = b * e - c * d;
    const double det = a * A + b * B + c * C;
    if (!(det > 0.0)) throw std::domain_error("invert_sym3: matrix not positive definite");
    const double inv = 1.0 / det;
    return {A * inv, B * inv, C * inv,
            B * inv, (a * f - c * c) * inv, (c * b - a * e) * inv,
            C * inv, (c * b - a * e) * inv, (a * d - b * b) * inv};
}

}  // namespace detail

// Statistics of the (2r+1)x(2r+1) window centered at (cx, cy); epsilon is
// added to the biased sample covariance before inversion.
inline WindowStats compute_window_stats(const ImagePlane& img, int cx, int cy, int radius,
                                        double epsilon,
                                        CovRegularization reg = CovRegularization::plain_epsilon) {
    WindowStats ws;
    const int size = (2 * radius + 1) * (2 * radius + 1);
    ws.window_size = size;
    std::array<double, 3> mean{};
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            for (int c = 0; c < 3; ++c) mean[static_cast<std::size_t>(c)] += img.at(c, cx + dx, cy + dy);
    for (double& m : mean) m /= size;
    ws.mean = mean;

    std::array<double, 9> cov{};
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            std::array<double, 3> v{};
            for (int c = 0; c < 3; ++c)
                v[static_cast<std::size_t>(c)] = img.at(c, cx + dx, cy + dy) - mean[static_cast<std::size_t>(c)];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    cov[static_cast<std::size_t>(3 * i + j)] += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
        }
    for (double& c : cov) c /= size;
    const double reg_eps = reg == CovRegularization::plain_epsilon ? epsilon : epsilon / size;
    cov[0] += reg_eps;
    cov[4] += reg_eps;
    cov[8] += reg_eps;
    ws.inv_cov = detail::invert_sym3(cov);
    return ws;
}

// Color-affinity matting Laplacian: affinity between pixels i, j is summed
// over every full window containing both,
//   (1/|w|) (1 + <I_i - mu, I_j - mu>_{(Sigma + eps I)^-1}),
// and L = D - A with D the degree matrix. Windows are only those fully
// inside the image, so |w| stays constant and border pixels just belong to
// fewer windows. Result: 25 bands, symmetric, PSD, L 1 = 0.
inline StencilMatrix levin_laplacian(const ImagePlane& img, double epsilon, int window_radius = 1,
                                     CovRegularization reg = CovRegularization::plain_epsilon) {
    if (img.channels != 3) throw std::invalid_argument("levin_laplacian: image must have 3 channels");
    if (!(epsilon > 0.0)) throw std::invalid_argument("levin_laplacian: epsilon must be positive");
    if (window_radius < 1) throw std::invalid_argument("levin_laplacian: window radius must be >= 1");
    const int r = window_radius;
    const int w = img.width, h = img.height;
    if (w < 2 * r + 1 || h < 2 * r + 1)
        throw std::invalid_argument("levin_laplacian: image smaller than the window");

    const int band_radius = 2 * r;
    StencilMatrix lap(w, h, square_band_offsets(band_radius));
    // Band index by displacement, [dy + 2r][dx + 2r].
    std::vector<int> band_of((2 * band_radius + 1) * (2 * band_radius + 1));
    for (int dy = -band_radius; dy <= band_radius; ++dy)
        for (int dx = -band_radius; dx <= band_radius; ++dx)
            band_of[static_cast<std::size_t>((dy + band_radius) * (2 * band_radius + 1) + dx + band_radius)] =
                lap.find_band({dx, dy});

    const int wx0 = r, wx1 = w - r;  // window center range
    const int wy0 = r, wy1 = h - r;
    const int wcols = wx1 - wx0, wrows = wy1 - wy0;
    std::vector<WindowStats> stats(static_cast<std::size_t>(wcols) * wrows);
    parallel_for_rows(wrows, [&](int row0, int row1) {
        for (int row = row0; row < row1; ++row)
            for (int col = 0; col < wcols; ++col)
                stats[static_cast<std::size_t>(row) * wcols + col] =
                    compute_window_stats(img, wx0 + col, wy0 + row, r, epsilon, reg);
    });

    // Accumulation runs sequentially so the band arrays are written in one
    // deterministic order regardless of thread count.
    const int side = 2 * r + 1;
    const int npix = side * side;
    std::vector<std::array<double, 3>> centered(static_cast<std::size_t>(npix));
    std::vector<std::array<double, 3>> mv(static_cast<std::size_t>(npix));
    std::vector<std::size_t> pix(static_cast<std::size_t>(npix));
    for (int row = 0; row < wrows; ++row) {
        for (int col = 0; col < wcols; ++col) {
            const WindowStats& ws = stats[static_cast<std::size_t>(row) * wcols + col];
            const int cx = wx0 + col, cy = wy0 + row;
            int k = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx, ++k) {
                    pix[static_cast<std::size_t>(k)] = lap.index(cx + dx, cy + dy);
                    for (int c = 0; c < 3; ++c)
                        centered[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] =
                            img.at(c, cx + dx, cy + dy) - ws.mean[static_cast<std::size_t>(c)];
                }
            // M v_j for every window pixel, then all ordered pairs.
            for (int j = 0; j < npix; ++j)
                for (int i = 0; i < 3; ++i)
                    mv[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                        ws.inv_cov[static_cast<std::size_t>(3 * i)] * centered[static_cast<std::size_t>(j)][0] +
                        ws.inv_cov[static_cast<std::size_t>(3 * i + 1)] * centered[static_cast<std::size_t>(j)][1] +
                        ws.inv_cov[static_cast<std::size_t>(3 * i + 2)] * centered[static_cast<std::size_t>(j)][2];
            const double inv_size = 1.0 / npix;
            int ka = 0;
            for (int ay = -r; ay <= r; ++ay)
                for (int ax = -r; ax <= r; ++ax, ++ka) {
                    int kb = 0;
                    for (int by = -r; by <= r; ++by)
                        for (int bx = -r; bx <= r; ++bx, ++kb) {
                            const double c_ab =
                                inv_size * (1.0 + centered[static_cast<std::size_t>(ka)][0] * mv[static_cast<std::size_t>(kb)][0] +
                                            centered[static_cast<std::size_t>(ka)][1] * mv[static_cast<std::size_t>(kb)][1] +
                                            centered[static_cast<std::size_t>(ka)][2] * mv[static_cast<std::size_t>(kb)][2]);
                            const int b = band_of[static_cast<std::size_t>(
                                (by - ay + band_radius) * (2 * band_radius + 1) + (bx - ax + band_radius))];
                            lap.band(static_cast<std::size_t>(b))[pix[static_cast<std::size_t>(ka)]] +=
                                (ka == kb ? 1.0 : 0.0) - c_ab;
                        }
                }
        }
    }
    return lap;
}

// Graph Laplacian of the 4-neighbor grid with unit edge weights:
// off-diagonals -1 where a neighbor exists, diagonal = vertex degree.
inline StencilMatrix poisson_laplacian(int width, int height) {
    if (width < 1 || height < 1 || static_cast<std::int64_t>(width) * height < 2)
        throw std::invalid_argument("poisson_laplacian: degenerate dimensions");
    StencilMatrix lap(width, height, {{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}});
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const std::size_t p = lap.index(x, y);
            int degree = 0;
            for (std::size_t b = 0; b < lap.band_count(); ++b) {
                const BandOffset o = lap.band_offset(b);
                if (o.dx == 0 && o.dy == 0) continue;
                if (!lap.in_bounds(x + o.dx, y + o.dy)) continue;
                lap.band(b)[p] = -1.0;
                ++degree;
            }
            lap.diagonal()[p] = degree;
        }
    return lap;
}

// <x, L x>; non-negative for any graph Laplacian.
inline double quadratic_form(const StencilMatrix& l, const GridField& x) {
    if (l.width() != x.width || l.height() != x.height)
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    return dot(x, spmv(l, x));
}

}  // namespace mgmatte

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mgmatte/work.hpp"

namespace mgmatte {

// Scalar field on a rectangular pixel grid, row-major with p = y*width + x.
// Used for solutions, right-hand sides, residuals and correction directions.
struct GridField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    GridField() = default;
    GridField(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("GridField: dimensions must be positive");
    }

    static GridField zeros(int w, int h) { return GridField(w, h); }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t p) { return values[p]; }
    double operator[](std::size_t p) const { return values[p]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    bool same_dims(const GridField& o) const { return width == o.width && height == o.height; }

    void fill(double v) { std::fill(values.begin(), values.end(), v); }
};

inline void require_same_dims(const GridField& a, const GridField& b, const char* what) {
    if (!a.same_dims(b)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

inline double dot(const GridField& a, const GridField& b) {
    require_same_dims(a, b, "dot");
    double s = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) s += a[p] * b[p];
    tally_work(WorkKind::vec, a.size());
    return s;
}

inline double norm2(const GridField& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const GridField& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

// y += alpha * x
inline void axpy(double alpha, const GridField& x, GridField& y) {
    require_same_dims(x, y, "axpy");
    for (std::size_t p = 0; p < x.size(); ++p) y[p] += alpha * x[p];
    tally_work(WorkKind::vec, x.size());
}

inline void scale(GridField& x, double alpha) {
    for (double& v : x.values) v *= alpha;
    tally_work(WorkKind::vec, x.size());
}

// a - b
inline GridField subtract(const GridField& a, const GridField& b) {
    require_same_dims(a, b, "subtract");
    GridField r(a.width, a.height);
    for (std::size_t p = 0; p < a.size(); ++p) r[p] = a[p] - b[p];
    return r;
}

}  // namespace mgmatte

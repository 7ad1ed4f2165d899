#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mgmatte/work.hpp"

namespace mgmatte {

// Small row-major dense matrix. Only an escape hatch: stencil matrices are
// converted to dense form for oracles, spectral probes and the coarsest
// multigrid level, all of which are size-guarded.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& x) {
    if (x.size() != m.cols) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        const double* row = &m.a[i * m.cols];
        for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

// Cholesky factorization/solve for SPD systems. Kept dependency-free so the
// coarse-level exact solve stays inside the library; test oracles solve the
// same systems through an unrelated code path.
class DenseCholesky {
public:
    explicit DenseCholesky(const DenseMatrix& m, WorkKind kind = WorkKind::coarse_solve) {
        if (m.rows != m.cols) throw std::invalid_argument("DenseCholesky: matrix not square");
        n_ = m.rows;
        lower_ = m.a;
        for (std::size_t j = 0; j < n_; ++j) {
            double d = lower_[j * n_ + j];
            for (std::size_t k = 0; k < j; ++k) d -= lower_[j * n_ + k] * lower_[j * n_ + k];
            if (!(d > 0.0)) throw std::domain_error("DenseCholesky: matrix not positive definite");
            const double ljj = std::sqrt(d);
            lower_[j * n_ + j] = ljj;
            for (std::size_t i = j + 1; i < n_; ++i) {
                double s = lower_[i * n_ + j];
                for (std::size_t k = 0; k < j; ++k) s -= lower_[i * n_ + k] * lower_[j * n_ + k];
                lower_[i * n_ + j] = s / ljj;
            }
        }
        // n^3/6 multiply count for the factorization, tallied up front.
        tally_work(kind, static_cast<std::uint64_t>(n_) * n_ * n_ / 6 + n_ * n_ / 2);
    }

    std::size_t size() const { return n_; }

    std::vector<double> solve(const std::vector<double>& b, WorkKind kind = WorkKind::coarse_solve) const {
        if (b.size() != n_) throw std::invalid_argument("DenseCholesky::solve: dimension mismatch");
        std::vector<double> x = b;
        for (std::size_t i = 0; i < n_; ++i) {
            double s = x[i];
            for (std::size_t k = 0; k < i; ++k) s -= lower_[i * n_ + k] * x[k];
            x[i] = s / lower_[i * n_ + i];
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = x[ii];
            for (std::size_t k = ii + 1; k < n_; ++k) s -= lower_[k * n_ + ii] * x[k];
            x[ii] = s / lower_[ii * n_ + ii];
        }
        tally_work(kind, static_cast<std::uint64_t>(n_) * n_);
        return x;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> lower_;
};

}  // namespace mgmatte

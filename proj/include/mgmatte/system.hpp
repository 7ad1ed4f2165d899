#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mgmatte/grid.hpp"
#include "mgmatte/stencil.hpp"
#include "mgmatte/trace.hpp"

namespace mgmatte {

// User constraints: per-pixel flag plus target value (meaningful only where
// constrained). Scribble targets are 0 or 1; fractional targets are legal
// but flagged so the CLI can warn.
struct ConstraintMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> constrained;
    std::vector<double> target;

    ConstraintMap() = default;
    ConstraintMap(int w, int h)
        : width(w), height(h),
          constrained(static_cast<std::size_t>(w) * h, 0),
          target(static_cast<std::size_t>(w) * h, 0.0) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("ConstraintMap: dimensions must be positive");
    }

    std::size_t size() const { return constrained.size(); }

    void constrain(int x, int y, double value) {
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        constrained[p] = 1;
        target[p] = value;
    }

    std::size_t count_constrained() const {
        std::size_t n = 0;
        for (auto c : constrained) n += c;
        return n;
    }

    bool has_fractional_targets() const {
        for (std::size_t p = 0; p < size(); ++p)
            if (constrained[p] && target[p] != 0.0 && target[p] != 1.0) return true;
        return false;
    }

    // A well-posed matte needs at least one pixel pinned to each polarity.
    bool has_both_polarities() const {
        bool lo = false, hi = false;
        for (std::size_t p = 0; p < size(); ++p) {
            if (!constrained[p]) continue;
            if (target[p] <= 0.5) lo = true; else hi = true;
        }
        return lo && hi;
    }
};

// The constrained linear system A = L + gamma*C, f = gamma*g. With zero
// constraints A is singular (the Laplacian keeps its null space), which the
// caller must treat as a warning condition; constraint_count exposes it.
struct MattingSystem {
    StencilMatrix a;
    GridField f;
    double gamma = 1.0;
    std::size_t constraint_count = 0;

    int width() const { return a.width(); }
    int height() const { return a.height(); }
    std::size_t pixels() const { return a.pixels(); }
};

inline MattingSystem assemble(const StencilMatrix& laplacian, const ConstraintMap& constraints,
                              double gamma) {
    if (laplacian.width() != constraints.width || laplacian.height() != constraints.height)
        throw std::invalid_argument("assemble: Laplacian/constraint dimension mismatch");
    if (!(gamma > 0.0)) throw std::invalid_argument("assemble: gamma must be positive");
    MattingSystem sys;
    sys.a = laplacian;
    sys.gamma = gamma;
    sys.f = GridField(laplacian.width(), laplacian.height());
    auto& diag = sys.a.diagonal();
    for (std::size_t p = 0; p < constraints.size(); ++p) {
        if (!constraints.constrained[p]) continue;
        diag[p] += gamma;
        sys.f[p] = gamma * constraints.target[p];
        ++sys.constraint_count;
    }
    return sys;
}

// ||f - A alpha||_2 / ||f||_2; exactly 1 at the zero initial guess.
inline double normalized_residual(const MattingSystem& sys, const GridField& alpha) {
    const double fn = norm2(sys.f);
    if (fn == 0.0)
        throw std::invalid_argument("normalized_residual: zero right-hand side (no constraints)");
    return norm2(residual(sys.a, alpha, sys.f)) / fn;
}

enum class Termination { converged, max_iterations, diverged };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_iterations: return "max_iterations";
        case Termination::diverged: return "diverged";
    }
    return "unknown";
}

struct SolveReport {
    GridField alpha;
    std::size_t iterations = 0;
    Termination terminated = Termination::converged;
    ConvergenceTrace trace;
};

}  // namespace mgmatte

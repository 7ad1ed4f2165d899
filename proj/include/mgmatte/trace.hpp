#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mgmatte {

// Per-iteration normalized residuals plus cumulative scalar-multiply counts.
// Entry 0 is the starting state (residual 1.0 for the zero initial guess).
struct ConvergenceTrace {
    std::vector<double> residuals;
    std::vector<std::uint64_t> work_units;

    std::size_t iterations() const { return residuals.empty() ? 0 : residuals.size() - 1; }

    void record(double residual, std::uint64_t cumulative_work) {
        residuals.push_back(residual);
        work_units.push_back(cumulative_work);
    }
};

// Geometric-mean residual reduction over the first k iterations,
// (r_k / r_0)^(1/k).
inline double initial_convergence_rate(const ConvergenceTrace& trace, std::size_t k = 5) {
    if (k < 1) throw std::invalid_argument("initial_convergence_rate: k must be >= 1");
    if (trace.residuals.size() <= k)
        throw std::invalid_argument("initial_convergence_rate: trace has fewer than k iterations");
    return std::pow(trace.residuals[k] / trace.residuals[0], 1.0 / static_cast<double>(k));
}

}  // namespace mgmatte

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mgmatte/laplacian.hpp"
#include "mgmatte/solvers.hpp"
#include "mgmatte/system.hpp"
#include "mgmatte/trace.hpp"
#include "mgmatte/transfer.hpp"

namespace mgmatte {

// iterations ~ a * size^p, fitted by least squares in log-log space.
struct PowerLawFit {
    double a = 0.0;
    double p = 0.0;
    double r_squared = 0.0;
};

inline PowerLawFit power_law_fit(const std::vector<double>& sizes,
                                 const std::vector<double>& iterations) {
    if (sizes.size() != iterations.size())
        throw std::invalid_argument("power_law_fit: size/iteration count mismatch");
    if (sizes.size() < 2) throw std::invalid_argument("power_law_fit: need at least 2 points");
    std::vector<double> lx(sizes.size()), ly(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!(sizes[i] > 0.0)) throw std::invalid_argument("power_law_fit: sizes must be positive");
        if (!(iterations[i] >= 1.0))
            throw std::invalid_argument("power_law_fit: iteration counts must be >= 1");
        lx[i] = std::log(sizes[i]);
        ly[i] = std::log(iterations[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(ly.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("power_law_fit: need at least 2 distinct sizes");
    PowerLawFit fit;
    fit.p = sxy / sxx;
    fit.a = std::exp(my - fit.p * mx);
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double pred = (my - fit.p * mx) + fit.p * lx[i];
            ss_res += (ly[i] - pred) * (ly[i] - pred);
        }
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

// Parameters of the continuous disk scene. The scene is defined on the unit
// square and only sampled per resolution, so every resolution sees the same
// underlying image content: a colored disk over a differently colored
// background, both carrying mild gradients and fixed-seed band-limited
// noise; the scribbles are a dot of 1s in the disk and a frame of 0s.
struct SceneParams {
    unsigned seed = 7;
    double disk_radius = 0.3;
    double edge_width = 0.04;  // smooth transition band; fixes the edge's information content
    double dot_radius = 0.24;
    double frame_thickness = 0.08;
    int noise_terms = 12;
    double noise_amplitude = 0.01;
    double max_frequency = 3.0;
};

struct SyntheticScene {
    int resolution = 0;
    ImagePlane image;
    ConstraintMap scribbles;
};

namespace detail {

struct NoiseTerm {
    double amp, fx, fy, phase;
};

struct RegionColor {
    double base[3];
    double gx[3], gy[3];
    std::vector<NoiseTerm> noise[3];

    double eval(int c, double x, double y) const {
        double v = base[c] + gx[c] * x + gy[c] * y;
        for (const NoiseTerm& t : noise[c])
            v += t.amp * std::sin(2.0 * std::numbers::pi * (t.fx * x + t.fy * y) + t.phase);
        return std::clamp(v, 0.0, 1.0);
    }
};

inline RegionColor make_region(std::mt19937& rng, const double base[3], const SceneParams& prm) {
    std::uniform_real_distribution<double> grad(-0.15, 0.15);
    std::uniform_real_distribution<double> freq(1.0, prm.max_frequency);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> amp(0.3, 1.0);
    RegionColor rc{};
    for (int c = 0; c < 3; ++c) {
        rc.base[c] = base[c];
        rc.gx[c] = grad(rng);
        rc.gy[c] = grad(rng);
        for (int t = 0; t < prm.noise_terms; ++t)
            rc.noise[c].push_back({prm.noise_amplitude * amp(rng), freq(rng), freq(rng), phase(rng)});
    }
    return rc;
}

}  // namespace detail

inline SyntheticScene make_disk_scene(int resolution, const SceneParams& prm = {}) {
    if (resolution < 8) throw std::invalid_argument("make_disk_scene: resolution too small");
    std::mt19937 rng(prm.seed);
    static constexpr double kBackgroundBase[3] = {0.25, 0.40, 0.70};
    static constexpr double kDiskBase[3] = {0.75, 0.45, 0.30};
    const detail::RegionColor background = detail::make_region(rng, kBackgroundBase, prm);
    const detail::RegionColor disk = detail::make_region(rng, kDiskBase, prm);

    SyntheticScene scene;
    scene.resolution = resolution;
    scene.image = ImagePlane(resolution, resolution, 3);
    scene.scribbles = ConstraintMap(resolution, resolution);
    const double dot2 = prm.dot_radius * prm.dot_radius;
    for (int py = 0; py < resolution; ++py) {
        const double y = (py + 0.5) / resolution;
        for (int px = 0; px < resolution; ++px) {
            const double x = (px + 0.5) / resolution;
            const double dx = x - 0.5, dy = y - 0.5;
            const double dist2 = dx * dx + dy * dy;
            // Smoothstep blend across a fixed-width band around the disk
            // edge, so the edge is equally resolvable at every sampling.
            const double dist = std::sqrt(dist2);
            double t = 1.0;
            if (prm.edge_width > 0.0) {
                const double s =
                    std::clamp((prm.disk_radius - dist) / prm.edge_width * 0.5 + 0.5, 0.0, 1.0);
                t = s * s * (3.0 - 2.0 * s);
            } else {
                t = dist < prm.disk_radius ? 1.0 : 0.0;
            }
            for (int c = 0; c < 3; ++c)
                scene.image.at(c, px, py) =
                    background.eval(c, x, y) + (disk.eval(c, x, y) - background.eval(c, x, y)) * t;
            // The outermost ring and the central pixel are always pinned so
            // the system stays well posed at every sampling resolution.
            const bool on_ring = px == 0 || py == 0 || px == resolution - 1 || py == resolution - 1;
            const bool center = px == resolution / 2 && py == resolution / 2;
            if (dist2 < dot2 || center) {
                scene.scribbles.constrain(px, py, 1.0);
            } else if (on_ring ||
                       std::min(std::min(x, 1.0 - x), std::min(y, 1.0 - y)) < prm.frame_thickness) {
                scene.scribbles.constrain(px, py, 0.0);
            }
        }
    }
    return scene;
}

struct SweepRow {
    int resolution = 0;
    std::size_t pixels = 0;
    std::size_t iterations = 0;
    double rho0 = 0.0;
    std::uint64_t work_per_iteration = 0;
    Termination terminated = Termination::converged;
    bool flagged = false;  // solver did not converge at this resolution
};

// Builds the scene, Laplacian, system and hierarchy at each resolution and
// runs the chosen solver to tolerance. Deterministic given the scene seed.
inline std::vector<SweepRow> resolution_sweep(const std::vector<int>& resolutions, SolverId solver,
                                              const SolverConfig& cfg,
                                              const SceneParams& scene_params = {},
                                              double epsilon = 1e-3, double gamma = 1.0) {
    if (resolutions.empty()) throw std::invalid_argument("resolution_sweep: no resolutions");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (resolutions[i] <= resolutions[i - 1])
            throw std::invalid_argument("resolution_sweep: resolutions must be ascending");

    std::vector<SweepRow> rows;
    for (int res : resolutions) {
        const SyntheticScene scene = make_disk_scene(res, scene_params);
        const StencilMatrix lap = levin_laplacian(scene.image, epsilon);
        const MattingSystem sys = assemble(lap, scene.scribbles, gamma);
        GridHierarchy hier;
        const GridHierarchy* hier_ptr = nullptr;
        if (solver != SolverId::cg) {
            hier = build_hierarchy(sys.a, cfg.coarse_threshold);
            hier_ptr = &hier;
        }
        const SolveReport report = run_solver(solver, sys, hier_ptr, cfg);
        SweepRow row;
        row.resolution = res;
        row.pixels = sys.pixels();
        row.iterations = report.iterations;
        row.terminated = report.terminated;
        row.flagged = report.terminated == Termination::diverged;
        if (report.iterations >= 1) {
            const std::size_t k = std::min<std::size_t>(5, report.iterations);
            row.rho0 = initial_convergence_rate(report.trace, k);
            row.work_per_iteration =
                (report.trace.work_units.back() - report.trace.work_units.front()) / report.iterations;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace mgmatte

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgmatte/dense.hpp"
#include "mgmatte/grid.hpp"
#include "mgmatte/relaxation.hpp"
#include "mgmatte/system.hpp"
#include "mgmatte/transfer.hpp"
#include "mgmatte/work.hpp"

namespace mgmatte {

enum class SolverId { cg, vcycle, mggd, mgcg };

inline const char* to_string(SolverId id) {
    switch (id) {
        case SolverId::cg: return "cg";
        case SolverId::vcycle: return "vcycle";
        case SolverId::mggd: return "mggd";
        case SolverId::mgcg: return "mgcg";
    }
    return "unknown";
}

inline SolverId solver_from_string(const std::string& s) {
    if (s == "cg") return SolverId::cg;
    if (s == "vcycle") return SolverId::vcycle;
    if (s == "mggd") return SolverId::mggd;
    if (s == "mgcg") return SolverId::mgcg;
    throw std::invalid_argument("unknown solver id: " + s);
}

enum class CoarseSolverKind { dense_direct, gs_sweeps };

struct SolverConfig {
    double tolerance = 1e-4;           // on the normalized residual
    std::size_t max_iterations = 1000;
    SmootherKind smoother{SmootherVariant::gauss_seidel, 2.0 / 3.0, 1};
    int pre_sweeps = 1;
    int post_sweeps = 1;
    // Deeper ladders than the 1024-pixel hierarchy default: at desk scale
    // the residuum-space methods need several coarse levels to pay off.
    std::size_t coarse_threshold = 128;
    CoarseSolverKind coarse_solver = CoarseSolverKind::dense_direct;
    std::size_t coarse_gs_sweeps = 100;
    double mgcg_restart_epsilon = 1e-3;       // dependence test threshold
    double divergence_threshold = 1e4;        // on the normalized residual

    void validate() const {
        if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be positive");
        if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
    }
};

namespace detail {

// A direction whose A-norm underflows this is dropped for the iteration.
inline constexpr double kDegenerateDirection = 1e-280;

// Shared outer loop: explicit residual per iteration, trace bookkeeping,
// convergence / divergence / iteration-cap termination.
template <typename StepFn>
SolveReport run_iterative(const MattingSystem& sys, const SolverConfig& cfg, StepFn&& step,
                          const GridField* initial) {
    cfg.validate();
    const double fn = norm2(sys.f);
    if (fn == 0.0) throw std::invalid_argument("solve: zero right-hand side (no constraints)");

    SolveReport report;
    report.alpha = initial ? *initial : GridField(sys.width(), sys.height());
    if (initial && !initial->same_dims(sys.f))
        throw std::invalid_argument("solve: initial guess dimension mismatch");

    WorkCounters work;
    ScopedWorkTally tally(work);
    GridField r = residual(sys.a, report.alpha, sys.f);
    double res = norm2(r) / fn;
    report.trace.record(res, work.total());
    if (res < cfg.tolerance) {
        report.terminated = Termination::converged;
        return report;
    }
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        step(report.alpha, r);
        r = residual(sys.a, report.alpha, sys.f);
        res = norm2(r) / fn;
        report.trace.record(res, work.total());
        report.iterations = it;
        if (res < cfg.tolerance) {
            report.terminated = Termination::converged;
            return report;
        }
        if (!std::isfinite(res) || res > cfg.divergence_threshold) {
            report.terminated = Termination::diverged;
            return report;
        }
    }
    report.terminated = Termination::max_iterations;
    return report;
}

}  // namespace detail

// Classic conjugate gradient from the zero initial guess, recursive residual.
inline SolveReport cg_solve(const MattingSystem& sys, const SolverConfig& cfg,
                            const GridField* initial = nullptr) {
    cfg.validate();
    const double fn = norm2(sys.f);
    if (fn == 0.0) throw std::invalid_argument("cg_solve: zero right-hand side (no constraints)");

    SolveReport report;
    report.alpha = initial ? *initial : GridField(sys.width(), sys.height());
    if (initial && !initial->same_dims(sys.f))
        throw std::invalid_argument("cg_solve: initial guess dimension mismatch");

    WorkCounters work;
    ScopedWorkTally tally(work);
    GridField r = residual(sys.a, report.alpha, sys.f);
    double rr = dot(r, r);
    double res = std::sqrt(rr) / fn;
    report.trace.record(res, work.total());
    if (res < cfg.tolerance) {
        report.terminated = Termination::converged;
        return report;
    }
    GridField d = r;
    GridField q(sys.width(), sys.height());
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        spmv_into(sys.a, d, q);
        const double den = dot(d, q);
        if (!(den > 0.0)) {  // loss of positive definiteness
            report.terminated = Termination::diverged;
            return report;
        }
        const double step = rr / den;
        axpy(step, d, report.alpha);
        axpy(-step, q, r);
        const double rr_new = dot(r, r);
        res = std::sqrt(rr_new) / fn;
        report.trace.record(res, work.total());
        report.iterations = it;
        if (res < cfg.tolerance) {
            report.terminated = Termination::converged;
            return report;
        }
        if (!std::isfinite(res) || res > cfg.divergence_threshold) {
            report.terminated = Termination::diverged;
            return report;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t p = 0; p < d.size(); ++p) d[p] = r[p] + beta * d[p];
        tally_work(WorkKind::vec, d.size());
    }
    report.terminated = Termination::max_iterations;
    return report;
}

// One two-grid error correction: restrict the residual, solve the coarse
// error exactly from a zero initial estimate, prolong and add. The second
// hierarchy level is solved directly (size-guarded dense factorization).
inline GridField nested_iteration(const GridHierarchy& hier, const GridField& u, const GridField& f) {
    if (hier.level_count() < 2)
        throw std::invalid_argument("nested_iteration: hierarchy has no coarse level");
    const auto& fine = hier.levels[0];
    const auto& coarse = hier.levels[1];
    if (u.width != fine.width || u.height != fine.height || !u.same_dims(f))
        throw std::invalid_argument("nested_iteration: dimension mismatch");
    const GridField r = residual(fine.a, u, f);
    const GridField rc = restrict_full_weighting(r);
    const DenseCholesky chol(to_dense(coarse.a));
    const std::vector<double> ec = chol.solve(rc.values);
    GridField e(coarse.width, coarse.height);
    e.values = ec;
    GridField out = u;
    GridField correction = prolong_bilinear(e, fine.width, fine.height);
    axpy(1.0, correction, out);
    return out;
}

// Per-solve state for the v-cycle: scratch fields for every level plus the
// factorized coarsest operator, built once and reused across iterations.
class VcycleContext {
public:
    VcycleContext(const GridHierarchy& hier, const SolverConfig& cfg) : hier_(&hier), cfg_(cfg) {
        if (hier.level_count() == 0) throw std::invalid_argument("VcycleContext: empty hierarchy");
        if (cfg.coarse_solver == CoarseSolverKind::dense_direct) {
            if (hier.coarsest().pixels() > kDenseGuardPixels)
                throw std::invalid_argument("VcycleContext: coarsest level too large for a direct solve");
            coarse_chol_.emplace(to_dense(hier.coarsest().a));
        }
    }

    const GridHierarchy& hierarchy() const { return *hier_; }
    const SolverConfig& config() const { return cfg_; }

    // In-place v-cycle on the finest level.
    void cycle(GridField& u, const GridField& f) { cycle_level(0, u, f); }

private:
    void cycle_level(std::size_t idx, GridField& u, const GridField& f) {
        const auto& level = hier_->levels[idx];
        if (idx + 1 == hier_->level_count()) {
            solve_coarsest(u, f);
            return;
        }
        for (int s = 0; s < cfg_.pre_sweeps; ++s) smooth(level.a, u, f);
        GridField r = residual(level.a, u, f);
        GridField rc = restrict_full_weighting(r);
        GridField ec(hier_->levels[idx + 1].width, hier_->levels[idx + 1].height);
        cycle_level(idx + 1, ec, rc);
        GridField corr = prolong_bilinear(ec, level.width, level.height);
        axpy(1.0, corr, u);
        for (int s = 0; s < cfg_.post_sweeps; ++s) smooth(level.a, u, f);
    }

    void smooth(const StencilMatrix& a, GridField& u, const GridField& f) {
        apply_smoother(a, u, f, SmootherKind{cfg_.smoother.variant, cfg_.smoother.omega, 1});
    }

    void solve_coarsest(GridField& u, const GridField& f) {
        if (coarse_chol_) {
            u.values = coarse_chol_->solve(f.values);
        } else {
            u.fill(0.0);
            for (std::size_t s = 0; s < cfg_.coarse_gs_sweeps; ++s)
                gauss_seidel_sweep(hier_->coarsest().a, u, f, WorkKind::coarse_solve);
        }
    }

    const GridHierarchy* hier_;
    SolverConfig cfg_;
    std::optional<DenseCholesky> coarse_chol_;
};

// Single v-cycle (Galerkin hierarchy, 1 pre- and 1 post-smoothing sweep by
// default, exact solve on the coarsest level).
inline GridField vcycle(const GridHierarchy& hier, const GridField& u, const GridField& f,
                        const SolverConfig& cfg) {
    VcycleContext ctx(hier, cfg);
    GridField out = u;
    ctx.cycle(out, f);
    return out;
}

inline SolveReport vcycle_solve(const MattingSystem& sys, const GridHierarchy& hier,
                                const SolverConfig& cfg, const GridField* initial = nullptr) {
    if (hier.finest().width != sys.width() || hier.finest().height != sys.height())
        throw std::invalid_argument("vcycle_solve: hierarchy does not match the system");
    VcycleContext ctx(hier, cfg);
    return detail::run_iterative(
        sys, cfg, [&](GridField& x, const GridField&) { ctx.cycle(x, sys.f); }, initial);
}

inline SolveReport vcycle_solve(const MattingSystem& sys, const SolverConfig& cfg,
                                const GridField* initial = nullptr) {
    const GridHierarchy hier = build_hierarchy(sys.a, cfg.coarse_threshold);
    return vcycle_solve(sys, hier, cfg, initial);
}

namespace detail {

// Workspace for the multigrid descent methods. Fields are indexed by ladder
// level i in [1, L], 1 = coarsest, L = finest; index 0 is unused padding.
struct DescentWorkspace {
    const GridHierarchy* hier = nullptr;
    std::size_t nlevels = 0;
    std::vector<GridField> r, d, d_new, k, s;

    explicit DescentWorkspace(const GridHierarchy& h) : hier(&h), nlevels(h.level_count()) {
        r.resize(nlevels + 1);
        d.resize(nlevels + 1);
        d_new.resize(nlevels + 1);
        k.resize(nlevels + 1);
        s.resize(nlevels + 1);
        for (std::size_t i = 1; i <= nlevels; ++i) {
            const auto& lvl = level(i);
            r[i] = GridField(lvl.width, lvl.height);
            d[i] = GridField(lvl.width, lvl.height);
            d_new[i] = GridField(lvl.width, lvl.height);
            k[i] = GridField(lvl.width, lvl.height);
            s[i] = GridField(lvl.width, lvl.height);
        }
    }

    const GridHierarchy::Level& level(std::size_t i) const { return hier->by_ladder_index(i); }

    // Restrict the residual ladder from the fine field already in r[L].
    void fill_residual_ladder() {
        for (std::size_t i = nlevels - 1; i >= 1; --i) {
            r[i] = restrict_full_weighting(r[i + 1]);
            if (i == 1) break;
        }
    }

    // k[i] holds A_i x; restrict it down through k[i-1] .. k[1].
    void fill_k_ladder(std::size_t i) {
        for (std::size_t j = i; j >= 2; --j) k[j - 1] = restrict_full_weighting(k[j]);
    }

    // Normalize x to unit A_i-norm; returns false (and zeroes x) when the
    // direction is degenerate and the level must be skipped this iteration.
    bool a_normalize(std::size_t i, GridField& x) {
        spmv_into(level(i).a, x, k[i]);
        const double nrm2 = dot(k[i], x);
        if (!(nrm2 > kDegenerateDirection) || !std::isfinite(nrm2)) {
            x.fill(0.0);
            return false;
        }
        scale(x, 1.0 / std::sqrt(nrm2));
        return true;
    }
};

}  // namespace detail

// One multigrid gradient descent iteration: build the residuum ladder by
// successive restriction, A-orthonormalize it coarse-to-fine with all inner
// products evaluated at their own levels, then apply the combined
// correction. With a single level this is exactly steepest descent.
inline void mg_gradient_step(detail::DescentWorkspace& ws, GridField& x, const GridField& r_fine) {
    const std::size_t L = ws.nlevels;
    ws.r[L] = r_fine;
    ws.d[L] = r_fine;
    if (L >= 2) {
        ws.fill_residual_ladder();
        for (std::size_t i = 1; i < L; ++i) ws.d[i] = ws.r[i];
    }

    for (std::size_t i = 1; i <= L; ++i) {
        // Project out the already-orthonormalized coarser directions.
        if (i >= 2) {
            spmv_into(ws.level(i).a, ws.d[i], ws.k[i]);
            ws.fill_k_ladder(i);
            ws.s[1].fill(0.0);
            for (std::size_t j = 1; j <= i - 1; ++j) {
                axpy(dot(ws.k[j], ws.d[j]), ws.d[j], ws.s[j]);
                ws.s[j + 1] = prolong_bilinear(ws.s[j], ws.level(j + 1).width, ws.level(j + 1).height);
            }
            axpy(-1.0, ws.s[i], ws.d[i]);
        }
        ws.a_normalize(i, ws.d[i]);
    }

    // Combined correction sum_i <d_i, r_i> d_i, accumulated up the ladder.
    ws.s[1].fill(0.0);
    axpy(dot(ws.d[1], ws.r[1]), ws.d[1], ws.s[1]);
    for (std::size_t i = 2; i <= L; ++i) {
        ws.s[i] = prolong_bilinear(ws.s[i - 1], ws.level(i).width, ws.level(i).height);
        axpy(dot(ws.d[i], ws.r[i]), ws.d[i], ws.s[i]);
    }
    axpy(1.0, ws.s[L], x);
}

inline SolveReport mg_gradient_solve(const MattingSystem& sys, const GridHierarchy& hier,
                                     const SolverConfig& cfg, const GridField* initial = nullptr) {
    if (hier.finest().width != sys.width() || hier.finest().height != sys.height())
        throw std::invalid_argument("mg_gradient_solve: hierarchy does not match the system");
    detail::DescentWorkspace ws(hier);
    return detail::run_iterative(
        sys, cfg, [&](GridField& x, const GridField& r) { mg_gradient_step(ws, x, r); }, initial);
}

inline SolveReport mg_gradient_solve(const MattingSystem& sys, const SolverConfig& cfg,
                                     const GridField* initial = nullptr) {
    const GridHierarchy hier = build_hierarchy(sys.a, cfg.coarse_threshold);
    return mg_gradient_solve(sys, hier, cfg, initial);
}

// One multigrid conjugate gradient iteration. Old directions d are kept
// conjugate to the new residuum-space directions level by level; the
// dependence test ||s_i||_inf > eps ||d_i_new||_inf decides whether the
// conjugated direction is genuinely new or the old one is recycled. With a
// single level this reduces to classic CG.
inline void mgcg_step(detail::DescentWorkspace& ws, GridField& x, const GridField& r_fine,
                      double restart_epsilon) {
    const std::size_t L = ws.nlevels;
    ws.r[L] = r_fine;
    ws.d_new[L] = r_fine;
    if (L >= 2) {
        ws.fill_residual_ladder();
        for (std::size_t i = 1; i < L; ++i) ws.d_new[i] = ws.r[i];
    }

    for (std::size_t i = 1; i <= L; ++i) {
        // Re-orthogonalize the old direction against the new coarser ones.
        spmv_into(ws.level(i).a, ws.d[i], ws.k[i]);
        if (i >= 2) {
            ws.fill_k_ladder(i);
            ws.s[1].fill(0.0);
            for (std::size_t j = 1; j <= i - 1; ++j) {
                axpy(dot(ws.k[j], ws.d_new[j]), ws.d_new[j], ws.s[j]);
                ws.s[j + 1] = prolong_bilinear(ws.s[j], ws.level(j + 1).width, ws.level(j + 1).height);
            }
            axpy(-1.0, ws.s[i], ws.d[i]);
        }
        ws.a_normalize(i, ws.d[i]);

        // Orthogonalize the new direction against both direction sets at
        // the coarser levels, then conjugate it against the old direction
        // at this level.
        spmv_into(ws.level(i).a, ws.d_new[i], ws.k[i]);
        const double knew_dot_dold = dot(ws.k[i], ws.d[i]);
        if (i >= 2) {
            ws.fill_k_ladder(i);
            ws.s[1].fill(0.0);
            for (std::size_t j = 1; j <= i - 1; ++j) {
                axpy(dot(ws.k[j], ws.d_new[j]), ws.d_new[j], ws.s[j]);
                axpy(dot(ws.k[j], ws.d[j]), ws.d[j], ws.s[j]);
                ws.s[j + 1] = prolong_bilinear(ws.s[j], ws.level(j + 1).width, ws.level(j + 1).height);
            }
            axpy(-1.0, ws.s[i], ws.d_new[i]);
        }
        ws.s[i] = ws.d_new[i];
        axpy(-knew_dot_dold, ws.d[i], ws.s[i]);

        if (norm_inf(ws.s[i]) > restart_epsilon * norm_inf(ws.d_new[i])) {
            ws.d_new[i] = ws.s[i];
        } else {
            ws.d_new[i] = ws.d[i];
            ws.d[i].fill(0.0);
        }
        ws.a_normalize(i, ws.d_new[i]);
    }

    // Rotate directions and apply the combined correction.
    ws.d[1] = ws.d_new[1];
    ws.s[1].fill(0.0);
    axpy(dot(ws.d[1], ws.r[1]), ws.d[1], ws.s[1]);
    for (std::size_t i = 2; i <= L; ++i) {
        ws.d[i] = ws.d_new[i];
        ws.s[i] = prolong_bilinear(ws.s[i - 1], ws.level(i).width, ws.level(i).height);
        axpy(dot(ws.d[i], ws.r[i]), ws.d[i], ws.s[i]);
    }
    axpy(1.0, ws.s[L], x);
}

inline SolveReport mgcg_solve(const MattingSystem& sys, const GridHierarchy& hier,
                              const SolverConfig& cfg, const GridField* initial = nullptr) {
    if (hier.finest().width != sys.width() || hier.finest().height != sys.height())
        throw std::invalid_argument("mgcg_solve: hierarchy does not match the system");
    detail::DescentWorkspace ws(hier);
    bool first = true;
    return detail::run_iterative(
        sys, cfg,
        [&](GridField& x, const GridField& r) {
            if (first) {
                mg_gradient_step(ws, x, r);  // seeds the direction set
                first = false;
            } else {
                mgcg_step(ws, x, r, cfg.mgcg_restart_epsilon);
            }
        },
        initial);
}

inline SolveReport mgcg_solve(const MattingSystem& sys, const SolverConfig& cfg,
                              const GridField* initial = nullptr) {
    const GridHierarchy hier = build_hierarchy(sys.a, cfg.coarse_threshold);
    return mgcg_solve(sys, hier, cfg, initial);
}

// Dispatch used by the benchmark sweep and the CLI.
inline SolveReport run_solver(SolverId id, const MattingSystem& sys, const GridHierarchy* hier,
                              const SolverConfig& cfg, const GridField* initial = nullptr) {
    switch (id) {
        case SolverId::cg: return cg_solve(sys, cfg, initial);
        case SolverId::vcycle:
            return hier ? vcycle_solve(sys, *hier, cfg, initial) : vcycle_solve(sys, cfg, initial);
        case SolverId::mggd:
            return hier ? mg_gradient_solve(sys, *hier, cfg, initial)
                        : mg_gradient_solve(sys, cfg, initial);
        case SolverId::mgcg:
            return hier ? mgcg_solve(sys, *hier, cfg, initial) : mgcg_solve(sys, cfg, initial);
    }
    throw std::invalid_argument("run_solver: unknown solver id");
}

}  // namespace mgmatte

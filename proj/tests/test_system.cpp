#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"

using namespace mgmatte;

TEST_CASE("assemble with no constraints returns A = L, f = 0") {
    StencilMatrix lap = poisson_laplacian(4, 4);
    ConstraintMap cm(4, 4);
    MattingSystem sys = assemble(lap, cm, 1.0);
    CHECK(sys.constraint_count == 0);
    CHECK(norm_inf(sys.f) == 0.0);
    const Eigen::MatrixXd diff = oracle::dense_of(sys.a) - oracle::dense_of(lap);
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemble adds gamma to constrained diagonal entries") {
    StencilMatrix lap = poisson_laplacian(4, 4);
    ConstraintMap cm(4, 4);
    cm.constrain(1, 2, 1.0);
    MattingSystem sys = assemble(lap, cm, 1.0);
    Eigen::MatrixXd expect = oracle::dense_of(lap);
    const Eigen::Index p = 2 * 4 + 1;
    expect(p, p) += 1.0;
    CHECK((oracle::dense_of(sys.a) - expect).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t q = 0; q < sys.f.size(); ++q)
        CHECK(sys.f[q] == (q == static_cast<std::size_t>(p) ? 1.0 : 0.0));
}

TEST_CASE("fully constrained system reproduces the targets at large gamma") {
    std::mt19937 rng(8);
    ImagePlane img = oracle::random_image(rng, 6, 6);
    StencilMatrix lap = levin_laplacian(img, 1e-3);
    ConstraintMap cm(6, 6);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) cm.constrain(x, y, coin(rng) < 0.5 ? 0.0 : 1.0);
    MattingSystem sys = assemble(lap, cm, 1e6);
    GridField alpha = oracle::dense_solve(sys);
    double max_err = 0.0;
    for (std::size_t p = 0; p < alpha.size(); ++p)
        max_err = std::max(max_err, std::abs(alpha[p] - cm.target[p]));
    CHECK(max_err <= 1e-4);
}

TEST_CASE("assemble validates its inputs") {
    StencilMatrix lap = poisson_laplacian(4, 4);
    ConstraintMap cm(4, 4);
    cm.constrain(0, 0, 1.0);
    CHECK_THROWS_AS(assemble(lap, cm, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble(lap, cm, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble(lap, ConstraintMap(5, 4), 1.0), std::invalid_argument);
}

TEST_CASE("assemble preserves symmetry and raises the spectrum floor") {
    MattingSystem sys = oracle::small_matting_system(8);
    CHECK(sys.a.max_symmetry_violation() <= 1e-14);
    std::mt19937 rng(12);
    ImagePlane img = oracle::random_image(rng, 8, 8);
    StencilMatrix lap = levin_laplacian(img, 1e-3);
    SceneParams prm;
    ConstraintMap cm = make_disk_scene(8, prm).scribbles;
    MattingSystem sys2 = assemble(lap, cm, 1.0);
    const double min_l = oracle::eigenvalues_of(lap)(0);
    const double min_a = oracle::eigenvalues_of(sys2.a)(0);
    CHECK(min_a >= min_l - 1e-12);
    CHECK(min_a > 0.0);  // strictly PD with both polarities pinned
}

TEST_CASE("normalized_residual") {
    MattingSystem sys = oracle::small_matting_system(8);
    SECTION("zero guess gives exactly 1") {
        CHECK(normalized_residual(sys, GridField(8, 8)) == 1.0);
    }
    SECTION("dense solution gives ~0") {
        CHECK(normalized_residual(sys, oracle::dense_solve(sys)) <= 1e-10);
    }
    SECTION("linear in the perturbation size") {
        GridField exact = oracle::dense_solve(sys);
        std::mt19937 rng(4);
        GridField v = oracle::random_field(rng, 8, 8);
        const double av_norm = norm2(spmv(sys.a, v));
        const double fn = norm2(sys.f);
        for (double delta : {1e-3, 1e-1}) {
            GridField alpha = exact;
            axpy(delta, v, alpha);
            const double r = normalized_residual(sys, alpha);
            CHECK(std::abs(r - delta * av_norm / fn) <= 1e-8 + 1e-6 * r);
        }
    }
    SECTION("zero right-hand side rejected") {
        MattingSystem empty = assemble(poisson_laplacian(4, 4), ConstraintMap(4, 4), 1.0);
        CHECK_THROWS_AS(normalized_residual(empty, GridField(4, 4)), std::invalid_argument);
    }
}

TEST_CASE("solutions of scribbled systems stay near the unit box") {
    std::mt19937 rng(63);
    std::uniform_int_distribution<int> pick(0, 7);
    std::uniform_int_distribution<int> count(2, 10);
    for (int trial = 0; trial < 20; ++trial) {
        const bool use_levin = trial % 2 == 0;
        StencilMatrix lap = use_levin ? levin_laplacian(oracle::random_image(rng, 8, 8), 1e-3)
                                      : poisson_laplacian(8, 8);
        ConstraintMap cm(8, 8);
        cm.constrain(pick(rng), pick(rng), 0.0);
        cm.constrain(pick(rng), pick(rng), 1.0);
        for (int extra = count(rng); extra > 0; --extra)
            cm.constrain(pick(rng), pick(rng), trial % 3 == 0 ? 0.0 : 1.0);
        MattingSystem sys = assemble(lap, cm, 1.0);
        GridField alpha = oracle::dense_solve(sys);
        for (std::size_t p = 0; p < alpha.size(); ++p) {
            REQUIRE(alpha[p] >= -0.05);
            REQUIRE(alpha[p] <= 1.05);
        }
    }
}

TEST_CASE("constraint map helpers") {
    ConstraintMap cm(4, 4);
    CHECK_FALSE(cm.has_both_polarities());
    cm.constrain(0, 0, 1.0);
    CHECK_FALSE(cm.has_both_polarities());
    cm.constrain(3, 3, 0.0);
    CHECK(cm.has_both_polarities());
    CHECK(cm.count_constrained() == 2);
    CHECK_FALSE(cm.has_fractional_targets());
    cm.constrain(1, 1, 0.5);
    CHECK(cm.has_fractional_targets());
}

TEST_CASE("solve reports carry the full trace") {
    MattingSystem sys = oracle::small_matting_system(16);
    SolverConfig cfg;
    cfg.tolerance = 1e-5;
    cfg.max_iterations = 500;
    SolveReport rep = vcycle_solve(sys, cfg);
    CHECK(rep.terminated == Termination::converged);
    CHECK(rep.trace.residuals.size() == rep.iterations + 1);
    CHECK(rep.trace.work_units.size() == rep.iterations + 1);
    CHECK(rep.trace.residuals[0] == 1.0);
    CHECK(rep.trace.work_units[0] <= rep.trace.work_units.back());
    CHECK(rep.trace.residuals.back() < 1e-5);
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"

using namespace mgmatte;

TEST_CASE("restriction reproduces constants at interior coarse points") {
    for (int n : {8, 9}) {
        GridField fine(n, n);
        fine.fill(3.25);
        GridField coarse = restrict_full_weighting(fine);
        for (int y = 1; y + 1 < coarse.height; ++y)
            for (int x = 1; x + 1 < coarse.width; ++x)
                CHECK(std::abs(coarse.at(x, y) - 3.25) <= 1e-14);
    }
}

TEST_CASE("restriction of an interior impulse is the full-weighting stencil") {
    GridField fine(8, 8);
    fine.at(2, 2) = 1.0;
    GridField coarse = restrict_full_weighting(fine);
    CHECK(coarse.at(1, 1) == 0.25);
    CHECK(coarse.at(0, 1) == 0.125);
    CHECK(coarse.at(2, 1) == 0.125);
    CHECK(coarse.at(1, 0) == 0.125);
    CHECK(coarse.at(1, 2) == 0.125);
    CHECK(coarse.at(0, 0) == 0.0625);
    CHECK(coarse.at(2, 2) == 0.0625);
    CHECK(coarse.at(0, 2) == 0.0625);
    CHECK(coarse.at(2, 0) == 0.0625);
    CHECK(coarse.at(3, 3) == 0.0);
}

TEST_CASE("transfer operators match their dense matrix forms") {
    std::mt19937 rng(2);
    for (auto [w, h] : std::vector<std::pair<int, int>>{{8, 8}, {9, 7}, {6, 11}}) {
        const Eigen::MatrixXd r = oracle::dense_restriction(w, h);
        const Eigen::MatrixXd p = oracle::dense_prolongation(w, h);
        GridField fine = oracle::random_field(rng, w, h);
        const Eigen::VectorXd rc = r * oracle::to_eigen(fine);
        GridField coarse = restrict_full_weighting(fine);
        for (std::size_t q = 0; q < coarse.size(); ++q)
            REQUIRE(std::abs(coarse[q] - rc(static_cast<Eigen::Index>(q))) <= 1e-13);

        GridField cf = oracle::random_field(rng, coarse.width, coarse.height);
        const Eigen::VectorXd pf = p * oracle::to_eigen(cf);
        GridField up = prolong_bilinear(cf, w, h);
        for (std::size_t q = 0; q < up.size(); ++q)
            REQUIRE(std::abs(up[q] - pf(static_cast<Eigen::Index>(q))) <= 1e-13);
    }
}

TEST_CASE("prolongation reproduces constants and tents an impulse") {
    SECTION("constants at both parities") {
        for (int n : {8, 9}) {
            GridField coarse(coarse_extent(n), coarse_extent(n));
            coarse.fill(1.5);
            GridField fine = prolong_bilinear(coarse, n, n);
            for (double v : fine.values) CHECK(std::abs(v - 1.5) <= 1e-14);
        }
    }
    SECTION("interior impulse becomes the 3x3 tent") {
        GridField coarse(5, 5);
        coarse.at(2, 2) = 1.0;
        GridField fine = prolong_bilinear(coarse, 9, 9);
        const double tent[3][3] = {{0.25, 0.5, 0.25}, {0.5, 1.0, 0.5}, {0.25, 0.5, 0.25}};
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                CHECK(fine.at(4 + dx, 4 + dy) == tent[dy + 1][dx + 1]);
        CHECK(fine.at(2, 4) == 0.0);
    }
    SECTION("dimension consistency enforced") {
        CHECK_THROWS_AS(prolong_bilinear(GridField(4, 4), 9, 9), std::invalid_argument);
    }
}

TEST_CASE("prolongation is 4x the restriction transpose") {
    for (auto [w, h] : std::vector<std::pair<int, int>>{{8, 8}, {9, 9}, {10, 7}}) {
        const Eigen::MatrixXd r = oracle::dense_restriction(w, h);
        const Eigen::MatrixXd p = oracle::dense_prolongation(w, h);
        CHECK((p - 4.0 * r.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("galerkin_coarsen equals the dense triple product") {
    std::mt19937 rng(6);
    SECTION("Poisson 8x8") {
        StencilMatrix lap = poisson_laplacian(8, 8);
        StencilMatrix coarse = galerkin_coarsen(lap);
        const Eigen::MatrixXd expect = oracle::dense_restriction(8, 8) * oracle::dense_of(lap) *
                                       oracle::dense_prolongation(8, 8);
        CHECK((oracle::dense_of(coarse) - expect).cwiseAbs().maxCoeff() <= 1e-13);
        GridField ones(coarse.width(), coarse.height());
        ones.fill(1.0);
        CHECK(norm_inf(spmv(coarse, ones)) <= 1e-10);
        CHECK(coarse.max_symmetry_violation() <= 1e-13);
    }
    SECTION("diagonal matrix") {
        StencilMatrix diag = identity_stencil(7, 6);
        std::uniform_real_distribution<double> val(0.5, 2.0);
        for (double& v : diag.diagonal()) v = val(rng);
        StencilMatrix coarse = galerkin_coarsen(diag);
        const Eigen::MatrixXd expect = oracle::dense_restriction(7, 6) * oracle::dense_of(diag) *
                                       oracle::dense_prolongation(7, 6);
        CHECK((oracle::dense_of(coarse) - expect).cwiseAbs().maxCoeff() <= 1e-13);
    }
    SECTION("SPD input stays SPD") {
        MattingSystem sys = oracle::small_matting_system(8);
        StencilMatrix coarse = galerkin_coarsen(sys.a);
        CHECK(oracle::eigenvalues_of(coarse)(0) > 0.0);
    }
    SECTION("asymmetric input rejected") {
        StencilMatrix bad(4, 4, {{0, 0}}, /*symmetric=*/false);
        CHECK_THROWS_AS(galerkin_coarsen(bad), std::invalid_argument);
    }
}

TEST_CASE("variational identity: <Pe, A Pe> = 4 <e, A_c e>") {
    std::mt19937 rng(14);
    MattingSystem sys = oracle::small_matting_system(12);
    StencilMatrix coarse = galerkin_coarsen(sys.a);
    for (int trial = 0; trial < 10; ++trial) {
        GridField e = oracle::random_field(rng, coarse.width(), coarse.height());
        GridField pe = prolong_bilinear(e, 12, 12);
        const double fine_energy = dot(pe, spmv(sys.a, pe));
        const double coarse_energy = dot(e, spmv(coarse, e));
        REQUIRE(std::abs(fine_energy - 4.0 * coarse_energy) <=
                1e-10 * std::max(1.0, std::abs(fine_energy)));
    }
}

TEST_CASE("restrict(prolong(constant)) is constant on interior regions") {
    GridField coarse(5, 5);
    coarse.fill(2.0);
    GridField fine = prolong_bilinear(coarse, 9, 9);
    GridField back = restrict_full_weighting(fine);
    for (int y = 1; y < 4; ++y)
        for (int x = 1; x < 4; ++x) CHECK(std::abs(back.at(x, y) - 2.0) <= 1e-14);
}

TEST_CASE("build_hierarchy coarsens until the threshold") {
    SECTION("64x64 with threshold 1024 gives exactly 2 levels") {
        StencilMatrix lap = poisson_laplacian(64, 64);
        GridHierarchy hier = build_hierarchy(lap, 1024);
        REQUIRE(hier.level_count() == 2);
        CHECK(hier.coarsest().pixels() == 1024);
        CHECK(hier.levels[1].width == 32);
    }
    SECTION("coarsest level respects the threshold") {
        MattingSystem sys = oracle::small_matting_system(32);
        for (std::size_t threshold : {64, 128, 1024}) {
            GridHierarchy hier = build_hierarchy(sys.a, threshold);
            CHECK(hier.coarsest().pixels() <= threshold);
        }
    }
    SECTION("25-band storage stays within 1.5x of the finest level") {
        MattingSystem sys = oracle::small_matting_system(64);
        GridHierarchy hier = build_hierarchy(sys.a, 128);
        CHECK(hier.storage_ratio() <= 1.5);
    }
    SECTION("5-band fine input grows to at most 25-band coarse levels") {
        StencilMatrix lap = poisson_laplacian(32, 32);
        GridHierarchy hier = build_hierarchy(lap, 64);
        for (std::size_t l = 1; l < hier.level_count(); ++l)
            CHECK(hier.levels[l].a.band_count() == 25);
        CHECK(hier.storage_ratio() <= 3.0);  // band growth: 5 fine bands, 25 coarse
    }
    SECTION("galerkin identity holds at every level from a 16x16 start") {
        MattingSystem sys = oracle::small_matting_system(16);
        GridHierarchy hier = build_hierarchy(sys.a, 16);
        REQUIRE(hier.level_count() == 3);
        for (std::size_t l = 0; l + 1 < hier.level_count(); ++l) {
            const auto& fine = hier.levels[l];
            const Eigen::MatrixXd expect = oracle::dense_restriction(fine.width, fine.height) *
                                           oracle::dense_of(fine.a) *
                                           oracle::dense_prolongation(fine.width, fine.height);
            REQUIRE((oracle::dense_of(hier.levels[l + 1].a) - expect).cwiseAbs().maxCoeff() <=
                    1e-10);
        }
    }
    SECTION("null-space preservation propagates down the ladder") {
        StencilMatrix lap = poisson_laplacian(16, 16);
        GridHierarchy hier = build_hierarchy(lap, 16);
        for (const auto& level : hier.levels) {
            GridField ones(level.width, level.height);
            ones.fill(1.0);
            CHECK(norm_inf(spmv(level.a, ones)) <= 1e-10);
        }
    }
}

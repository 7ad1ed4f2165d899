#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"

using namespace mgmatte;

TEST_CASE("levin_laplacian annihilates the constant vector") {
    std::mt19937 rng(42);
    for (const auto reg : {CovRegularization::plain_epsilon, CovRegularization::epsilon_over_window}) {
        ImagePlane img = oracle::random_image(rng, 6, 6);
        StencilMatrix lap = levin_laplacian(img, 1e-3, 1, reg);
        GridField ones(6, 6);
        ones.fill(1.0);
        CHECK(norm_inf(spmv(lap, ones)) <= 1e-8);
        CHECK(lap.band_count() == 25);
        CHECK(lap.max_symmetry_violation() <= 1e-14);
    }
}

TEST_CASE("levin_laplacian matches the dense affinity-sum oracle") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 8; ++trial) {
        const int size = trial % 2 == 0 ? 5 : 6;
        const double epsilon = trial < 4 ? 1e-3 : 1.0;
        ImagePlane img = oracle::random_image(rng, size, size);
        const Eigen::MatrixXd expect = oracle::dense_levin_laplacian(img, epsilon);
        const Eigen::MatrixXd got = oracle::dense_of(levin_laplacian(img, epsilon));
        const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
        CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
}

TEST_CASE("levin_laplacian is positive semi-definite") {
    std::mt19937 rng(77);
    for (const auto reg : {CovRegularization::plain_epsilon, CovRegularization::epsilon_over_window}) {
        for (double epsilon : {1e-3, 1.0}) {
            ImagePlane img = oracle::random_image(rng, 6, 6);
            StencilMatrix lap = levin_laplacian(img, epsilon, 1, reg);
            const Eigen::VectorXd evs = oracle::eigenvalues_of(lap);
            CHECK(evs(0) >= -1e-8);
        }
    }
}

TEST_CASE("levin_laplacian rejects bad input") {
    std::mt19937 rng(9);
    ImagePlane tiny = oracle::random_image(rng, 2, 5);
    CHECK_THROWS_AS(levin_laplacian(tiny, 1e-3), std::invalid_argument);
    ImagePlane ok = oracle::random_image(rng, 5, 5);
    CHECK_THROWS_AS(levin_laplacian(ok, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(levin_laplacian(ok, -1.0), std::invalid_argument);
    ImagePlane gray(5, 5, 1);
    CHECK_THROWS_AS(levin_laplacian(gray, 1e-3), std::invalid_argument);
}

TEST_CASE("window statistics produce an SPD inverse covariance") {
    std::mt19937 rng(13);
    ImagePlane img = oracle::random_image(rng, 5, 5);
    WindowStats ws = compute_window_stats(img, 2, 2, 1, 1e-3);
    CHECK(ws.window_size == 9);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = ws.inv_cov[static_cast<std::size_t>(3 * i + j)];
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::Vector3d evs = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues();
    CHECK(evs(0) > 0.0);
}

TEST_CASE("poisson_laplacian is the 4-neighbor graph Laplacian") {
    SECTION("2x2 grid") {
        DenseMatrix d = to_dense(poisson_laplacian(2, 2));
        const double expect[4][4] = {
            {2, -1, -1, 0}, {-1, 2, 0, -1}, {-1, 0, 2, -1}, {0, -1, -1, 2}};
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK(d.at(i, j) == expect[i][j]);
    }
    SECTION("row sums vanish at any size") {
        for (auto [w, h] : std::vector<std::pair<int, int>>{{2, 2}, {5, 3}, {1, 7}, {8, 8}}) {
            StencilMatrix lap = poisson_laplacian(w, h);
            CHECK(lap.band_count() == 5);
            GridField ones(w, h);
            ones.fill(1.0);
            CHECK(norm_inf(spmv(lap, ones)) == 0.0);
        }
    }
    SECTION("1xn grid is the path-graph operator") {
        StencilMatrix lap = poisson_laplacian(6, 1);
        const auto& diag = lap.diagonal();
        CHECK(diag[0] == 1.0);
        CHECK(diag[5] == 1.0);
        for (std::size_t p = 1; p < 5; ++p) CHECK(diag[p] == 2.0);
        const auto right = static_cast<std::size_t>(lap.find_band({1, 0}));
        for (std::size_t p = 0; p < 5; ++p) CHECK(lap.band(right)[p] == -1.0);
        CHECK(lap.band(right)[5] == 0.0);
    }
    SECTION("degenerate dimensions rejected") {
        CHECK_THROWS_AS(poisson_laplacian(1, 1), std::invalid_argument);
        CHECK_THROWS_AS(poisson_laplacian(0, 4), std::invalid_argument);
    }
}

TEST_CASE("quadratic_form is the pairwise affinity sum") {
    SECTION("constant field has zero energy") {
        std::mt19937 rng(3);
        ImagePlane img = oracle::random_image(rng, 5, 5);
        StencilMatrix lap = levin_laplacian(img, 1e-3);
        GridField c(5, 5);
        c.fill(0.7);
        CHECK(std::abs(quadratic_form(lap, c)) <= 1e-9);
    }
    SECTION("Poisson 2x2 with a unit corner") {
        StencilMatrix lap = poisson_laplacian(2, 2);
        GridField x(2, 2);
        x[0] = 1.0;
        CHECK(quadratic_form(lap, x) == 2.0);
    }
    SECTION("matches the pairwise oracle and stays non-negative") {
        std::mt19937 rng(31);
        ImagePlane img = oracle::random_image(rng, 6, 6);
        StencilMatrix lap = levin_laplacian(img, 1e-3);
        const Eigen::MatrixXd dense = oracle::dense_of(lap);
        for (int trial = 0; trial < 100; ++trial) {
            GridField x = oracle::random_field(rng, 6, 6);
            const double q = quadratic_form(lap, x);
            const double expect = oracle::pairwise_quadratic_form(dense, oracle::to_eigen(x));
            CHECK(q >= -1e-9 * dot(x, x));
            CHECK(std::abs(q - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
        }
    }
    SECTION("dimension mismatch rejected") {
        CHECK_THROWS_AS(quadratic_form(poisson_laplacian(2, 2), GridField(3, 2)),
                        std::invalid_argument);
    }
}

TEST_CASE("affinity approaches the pure spatial term as epsilon grows") {
    std::mt19937 rng(55);
    ImagePlane img = oracle::random_image(rng, 6, 6);
    // Limit matrix: affinity = (#windows containing both pixels) / |w|.
    const int n = 36;
    Eigen::MatrixXd limit = Eigen::MatrixXd::Zero(n, n);
    for (int cy = 1; cy < 5; ++cy)
        for (int cx = 1; cx < 5; ++cx) {
            std::vector<int> idx;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) idx.push_back((cy + dy) * 6 + (cx + dx));
            for (int i : idx)
                for (int j : idx)
                    if (i != j) limit(i, j) += 1.0 / 9.0;
        }
    Eigen::MatrixXd limit_lap = -limit;
    for (int i = 0; i < n; ++i) limit_lap(i, i) = limit.row(i).sum();

    double prev = std::numeric_limits<double>::infinity();
    for (double epsilon : {1e-3, 1.0, 1e3}) {
        const Eigen::MatrixXd lap = oracle::dense_of(levin_laplacian(img, epsilon));
        const double dev = (lap - limit_lap).cwiseAbs().maxCoeff();
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev <= 1e-2);  // at eps = 1e3 the color term is nearly gone
}

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "oracles.hpp"

using namespace mgmatte;

TEST_CASE("laplace_1d builds the tridiagonal Dirichlet operator") {
    CHECK_THROWS_AS(laplace_1d(0), std::invalid_argument);

    SECTION("n=1 is the 1x1 matrix [2]") {
        ModelProblem1D mp = laplace_1d(1);
        DenseMatrix d = to_dense(mp.a);
        CHECK(d.at(0, 0) == 2.0);
        CHECK(mp.h == 0.5);
    }
    SECTION("n=3 matches the matrix display") {
        DenseMatrix d = to_dense(laplace_1d(3).a);
        const double expect[3][3] = {{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(d.at(i, j) == expect[i][j]);
    }
    SECTION("n=64: smallest numerical eigenvalue matches 2 - 2cos(pi/65)") {
        const Eigen::VectorXd evs = oracle::eigenvalues_of(laplace_1d(64).a);
        CHECK(std::abs(evs(0) - (2.0 - 2.0 * std::cos(std::numbers::pi / 65.0))) <= 1e-8);
        CHECK(evs(0) > 0.0);  // positive definite
    }
}

TEST_CASE("analytic eigenpairs satisfy A v = lambda v") {
    SECTION("n=3, mode 2: lambda is exactly 2") {
        const auto [lambda, v] = analytic_eigenpair(3, 2);
        CHECK(lambda == 2.0);
        GridField av = spmv(laplace_1d(3).a, v);
        for (std::size_t p = 0; p < 3; ++p) CHECK(std::abs(av[p] - 2.0 * v[p]) <= 1e-12);
    }
    SECTION("n=1, mode 1 matches the 1x1 matrix") {
        const auto [lambda, v] = analytic_eigenpair(1, 1);
        CHECK(lambda == 2.0);
    }
    SECTION("index out of range") {
        CHECK_THROWS_AS(analytic_eigenpair(4, 0), std::invalid_argument);
        CHECK_THROWS_AS(analytic_eigenpair(4, 5), std::invalid_argument);
    }
    SECTION("top eigenvalue stays below 4") {
        for (int n : {1, 2, 7, 63, 128}) CHECK(analytic_eigenpair(n, n).first < 4.0);
    }
    SECTION("residual invariant across sizes and modes") {
        for (int n : {1, 2, 3, 8, 31, 63, 64, 127, 128, 255, 256}) {
            ModelProblem1D mp = laplace_1d(n);
            for (int mode = 1; mode <= n; ++mode) {
                const auto [lambda, v] = analytic_eigenpair(n, mode);
                GridField av = spmv(mp.a, v);
                axpy(-lambda, v, av);
                REQUIRE(norm2(av) <= 1e-8 * norm2(v));
            }
        }
    }
}

TEST_CASE("analytic eigenvectors are mutually orthogonal") {
    const int n = 64;
    std::vector<GridField> vs;
    for (int mode = 1; mode <= n; ++mode) vs.push_back(analytic_eigenpair(n, mode).second);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double ip = dot(vs[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(j)]) /
                              (norm2(vs[static_cast<std::size_t>(i)]) * norm2(vs[static_cast<std::size_t>(j)]));
            REQUIRE(std::abs(ip) <= 1e-8);
        }
}

TEST_CASE("eigenvalues strictly increase with mode index") {
    const int n = 100;
    double prev = -1.0;
    for (int mode = 1; mode <= n; ++mode) {
        const double lambda = laplace_1d_eigenvalue(n, mode);
        CHECK(lambda > prev);
        prev = lambda;
    }
}

TEST_CASE("condition number follows the quadratic law") {
    CHECK(condition_number_estimate(1) == 1.0);

    SECTION("n=64 within 5% of 4(n+1)^2/pi^2") {
        const double kappa = condition_number_estimate(64);
        const double law = 4.0 * 65.0 * 65.0 / (std::numbers::pi * std::numbers::pi);
        CHECK(std::abs(kappa / law - 1.0) <= 0.05);
    }
    SECTION("kappa(4n)/kappa(n) approaches 16") {
        const double ratio = condition_number_estimate(256) / condition_number_estimate(64);
        const double law = (257.0 / 65.0) * (257.0 / 65.0);
        CHECK(std::abs(ratio / law - 1.0) <= 0.03);
        CHECK(std::abs(ratio - 16.0) <= 0.5);
    }
}

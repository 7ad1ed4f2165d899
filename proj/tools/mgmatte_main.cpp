// mgmatte: solver toolkit for matting-Laplacian linear systems.
//
// Subcommands: solve (image + scribbles -> matte), bench (synthetic scene
// resolution sweep), analyze (power-law fit of run logs), model1d (1D
// Laplace spectra and smoother probes).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mgmatte/mgmatte.hpp"
#include "mgmatte/runlog.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 1;
constexpr int kExitInputError = 2;

struct SolveOptions {
    std::string image_path, scribble_path, out_path, log_path;
    std::string solver = "vcycle";
    double tol = 1e-4;
    double gamma = 1.0;
    double epsilon = 1e-3;
    std::size_t max_iter = 1000;
    int threads = 1;
    bool deterministic = true;
    bool timing = false;
};

int run_solve(const SolveOptions& opt) {
    mgmatte::Runtime::threads() = opt.threads;
    mgmatte::Runtime::deterministic() = opt.deterministic;

    const mgmatte::SolverId solver = mgmatte::solver_from_string(opt.solver);
    mgmatte::ImagePlane img = mgmatte::read_image(opt.image_path);
    if (img.channels == 1) {
        std::cerr << "mgmatte: grayscale input, replicating to 3 channels for the color affinity\n";
        img = img.to_rgb();
    }
    const mgmatte::ConstraintMap scribbles =
        mgmatte::read_scribbles(opt.scribble_path, img.width, img.height);
    if (scribbles.count_constrained() == 0) {
        std::cerr << "mgmatte: warning: no constrained pixels, system is singular; aborting\n";
        return kExitInputError;
    }
    if (scribbles.has_fractional_targets())
        std::cerr << "mgmatte: warning: fractional scribble targets present\n";
    if (!scribbles.has_both_polarities())
        std::cerr << "mgmatte: warning: scribbles lack one polarity; matte may be trivial\n";

    const auto t0 = std::chrono::steady_clock::now();
    const mgmatte::StencilMatrix lap = mgmatte::levin_laplacian(img, opt.epsilon);
    const mgmatte::MattingSystem sys = mgmatte::assemble(lap, scribbles, opt.gamma);

    mgmatte::SolverConfig cfg;
    cfg.tolerance = opt.tol;
    cfg.max_iterations = opt.max_iter;
    const mgmatte::SolveReport report = mgmatte::run_solver(solver, sys, nullptr, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    mgmatte::write_matte(report.alpha, opt.out_path);

    if (!opt.log_path.empty()) {
        mgmatte::RunLogWriter log(opt.log_path);
        nlohmann::json meta;
        meta["tool"] = "mgmatte solve";
        meta["solver"] = opt.solver;
        meta["image"] = opt.image_path;
        meta["scribbles"] = opt.scribble_path;
        meta["width"] = img.width;
        meta["height"] = img.height;
        meta["pixels"] = img.pixels();
        meta["tolerance"] = opt.tol;
        meta["gamma"] = opt.gamma;
        meta["epsilon"] = opt.epsilon;
        meta["max_iterations"] = opt.max_iter;
        meta["threads"] = opt.threads;
        meta["deterministic"] = opt.deterministic;
        log.write_meta(meta);
        log.write_trace(report.trace);
        // Wall-clock timing is only logged on request so that deterministic
        // runs produce byte-identical files.
        log.write_final(report, opt.timing && !opt.deterministic ? seconds : -1.0);
    }

    std::cout << "solver=" << opt.solver << " iterations=" << report.iterations
              << " residual=" << report.trace.residuals.back()
              << " terminated=" << mgmatte::to_string(report.terminated)
              << " seconds=" << seconds << "\n";
    return report.terminated == mgmatte::Termination::converged ? kExitOk : kExitSolverFailure;
}

struct BenchOptions {
    std::string scene = "disk";
    std::vector<int> resolutions = {64, 128, 256};
    std::string solver = "vcycle";
    std::string out_path;
    double tol = 1e-4;
    double gamma = 1.0;
    double epsilon = 1e-3;
    std::size_t max_iter = 2000;
    unsigned seed = 7;
};

int run_bench(const BenchOptions& opt) {
    if (opt.scene != "disk") {
        std::cerr << "mgmatte: unknown scene '" << opt.scene << "' (available: disk)\n";
        return kExitInputError;
    }
    const mgmatte::SolverId solver = mgmatte::solver_from_string(opt.solver);
    mgmatte::SolverConfig cfg;
    cfg.tolerance = opt.tol;
    cfg.max_iterations = opt.max_iter;
    mgmatte::SceneParams scene;
    scene.seed = opt.seed;
    const auto rows =
        mgmatte::resolution_sweep(opt.resolutions, solver, cfg, scene, opt.epsilon, opt.gamma);

    std::string csv = "resolution,pixels,iterations,rho0,work_per_iteration,terminated\n";
    for (const auto& row : rows) {
        char line[256];
        std::snprintf(line, sizeof(line), "%d,%zu,%zu,%.17g,%llu,%s\n", row.resolution, row.pixels,
                      row.iterations, row.rho0,
                      static_cast<unsigned long long>(row.work_per_iteration),
                      mgmatte::to_string(row.terminated));
        csv += line;
    }
    if (!opt.out_path.empty()) {
        std::ofstream out(opt.out_path);
        if (!out) {
            std::cerr << "mgmatte: cannot open " << opt.out_path << " for writing\n";
            return kExitInputError;
        }
        out << csv;
    }
    std::cout << csv;
    bool all_ok = true;
    for (const auto& row : rows) all_ok = all_ok && row.terminated == mgmatte::Termination::converged;
    return all_ok ? kExitOk : kExitSolverFailure;
}

struct AnalyzeOptions {
    std::vector<std::string> logs;
    std::string out_path;
    bool fit_power = false;
};

int run_analyze(const AnalyzeOptions& opt) {
    std::vector<double> sizes_mpx, iterations;
    for (const std::string& path : opt.logs) {
        const mgmatte::RunLog log = mgmatte::read_run_log(path);
        if (!log.meta.contains("pixels") || !log.final.contains("iterations")) {
            std::cerr << "mgmatte: " << path << " missing pixels/iterations records\n";
            return kExitInputError;
        }
        sizes_mpx.push_back(log.meta["pixels"].get<double>() / 1e6);
        iterations.push_back(log.final["iterations"].get<double>());
    }
    std::string csv;
    if (opt.fit_power) {
        const mgmatte::PowerLawFit fit = mgmatte::power_law_fit(sizes_mpx, iterations);
        char line[256];
        std::snprintf(line, sizeof(line), "a,p,r_squared,points\n%.17g,%.17g,%.17g,%zu\n", fit.a,
                      fit.p, fit.r_squared, sizes_mpx.size());
        csv = line;
    } else {
        csv = "size_mpx,iterations\n";
        for (std::size_t i = 0; i < sizes_mpx.size(); ++i) {
            char line[128];
            std::snprintf(line, sizeof(line), "%.17g,%.17g\n", sizes_mpx[i], iterations[i]);
            csv += line;
        }
    }
    if (!opt.out_path.empty()) {
        std::ofstream out(opt.out_path);
        if (!out) {
            std::cerr << "mgmatte: cannot open " << opt.out_path << " for writing\n";
            return kExitInputError;
        }
        out << csv;
    }
    std::cout << csv;
    return kExitOk;
}

struct Model1dOptions {
    int n = 63;
    std::string smoother = "jacobi";
    bool report_spectrum = false;
};

int run_model1d(const Model1dOptions& opt) {
    const mgmatte::ModelProblem1D mp = mgmatte::laplace_1d(opt.n);
    std::cout << "n=" << mp.n << " h=" << mp.h << "\n";
    std::cout << "lambda_1=" << mgmatte::laplace_1d_eigenvalue(mp.n, 1)
              << " lambda_n=" << mgmatte::laplace_1d_eigenvalue(mp.n, mp.n)
              << " condition_number=" << mgmatte::condition_number_estimate(mp.n) << "\n";

    mgmatte::SmootherKind kind;
    double analytic = 0.0;
    const double c = std::cos(std::numbers::pi * mp.h);
    if (opt.smoother == "jacobi") {
        kind.variant = mgmatte::SmootherVariant::jacobi;
        analytic = c;
    } else if (opt.smoother == "gs") {
        kind.variant = mgmatte::SmootherVariant::gauss_seidel;
        analytic = c * c;
    } else {
        std::cerr << "mgmatte: unknown smoother '" << opt.smoother << "' (jacobi|gs)\n";
        return kExitInputError;
    }
    if (mp.a.pixels() <= mgmatte::kDenseGuardPixels) {
        const double rho = mgmatte::smoother_spectral_radius(mp.a, kind);
        std::cout << "smoother=" << opt.smoother << " rho_measured=" << rho
                  << " rho_analytic=" << analytic << "\n";
    } else {
        std::cout << "smoother=" << opt.smoother << " rho_analytic=" << analytic
                  << " (n too large for the dense probe)\n";
    }
    if (opt.report_spectrum) {
        std::cout << "mode,eigenvalue,eigenpair_residual\n";
        for (int i = 1; i <= mp.n; ++i) {
            const auto [lambda, v] = mgmatte::analytic_eigenpair(mp.n, i);
            mgmatte::GridField av = mgmatte::spmv(mp.a, v);
            mgmatte::axpy(-lambda, v, av);
            std::cout << i << "," << lambda << "," << mgmatte::norm2(av) / mgmatte::norm2(v) << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mgmatte: multigrid solvers for matting-Laplacian systems"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand("solve", "solve a matting system from image + scribbles");
    solve->add_option("--image", solve_opt.image_path, "input image (binary PPM/PGM)")->required();
    solve->add_option("--scribbles", solve_opt.scribble_path, "scribble image (binary PGM)")->required();
    solve->add_option("--out", solve_opt.out_path, "output matte (binary PGM)")->required();
    solve->add_option("--solver", solve_opt.solver, "cg|vcycle|mggd|mgcg")->default_val("vcycle");
    solve->add_option("--tol", solve_opt.tol, "normalized residual tolerance")->default_val(1e-4);
    solve->add_option("--gamma", solve_opt.gamma, "constraint weight")->default_val(1.0);
    solve->add_option("--epsilon", solve_opt.epsilon, "color covariance regularizer")->default_val(1e-3);
    solve->add_option("--max-iter", solve_opt.max_iter, "iteration cap")->default_val(1000);
    solve->add_option("--log", solve_opt.log_path, "run log (JSON lines)");
    solve->add_option("--threads", solve_opt.threads, "worker threads for spmv/Jacobi")->default_val(1);
    solve->add_flag("--deterministic,!--no-deterministic", solve_opt.deterministic,
                    "byte-identical outputs (default on)");
    solve->add_flag("--timing", solve_opt.timing, "include wall-clock time in the run log");

    BenchOptions bench_opt;
    CLI::App* bench = app.add_subcommand("bench", "resolution sweep on a synthetic scene");
    bench->add_option("--scene", bench_opt.scene, "scene family (disk)")->default_val("disk");
    bench->add_option("--resolutions", bench_opt.resolutions, "comma-separated resolutions")
        ->delimiter(',');
    bench->add_option("--solver", bench_opt.solver, "cg|vcycle|mggd|mgcg")->default_val("vcycle");
    bench->add_option("--out", bench_opt.out_path, "output CSV");
    bench->add_option("--tol", bench_opt.tol)->default_val(1e-4);
    bench->add_option("--gamma", bench_opt.gamma)->default_val(1.0);
    bench->add_option("--epsilon", bench_opt.epsilon)->default_val(1e-3);
    bench->add_option("--max-iter", bench_opt.max_iter)->default_val(2000);
    bench->add_option("--seed", bench_opt.seed, "scene seed")->default_val(7);

    AnalyzeOptions analyze_opt;
    CLI::App* analyze = app.add_subcommand("analyze", "analyze run logs");
    analyze->add_option("--log", analyze_opt.logs, "run log files")->required()->expected(-1);
    analyze->add_flag("--fit-power", analyze_opt.fit_power, "fit iterations to a*size^p");
    analyze->add_option("--out", analyze_opt.out_path, "output CSV");

    Model1dOptions model_opt;
    CLI::App* model1d = app.add_subcommand("model1d", "1D Laplace model problem report");
    model1d->add_option("--n", model_opt.n, "free variables")->default_val(63);
    model1d->add_option("--smoother", model_opt.smoother, "jacobi|gs")->default_val("jacobi");
    model1d->add_flag("--report-spectrum", model_opt.report_spectrum, "print the analytic spectrum");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "mgmatte: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (solve->parsed()) return run_solve(solve_opt);
        if (bench->parsed()) return run_bench(bench_opt);
        if (analyze->parsed()) return run_analyze(analyze_opt);
        if (model1d->parsed()) return run_model1d(model_opt);
    } catch (const mgmatte::ImageIoError& e) {
        std::cerr << "mgmatte: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mgmatte: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "mgmatte: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitOk;
}

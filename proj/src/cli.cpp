#include "phyp/cli.hpp"

#include "phyp/config.hpp"
#include "phyp/errors.hpp"
#include "phyp/ivp_solver.hpp"
#include "phyp/report_io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <utility>

namespace phyp::cli {

namespace {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e))
        return config_error;
    if (dynamic_cast<const IoError*>(&e))
        return io_error;
    if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const NonContractionError*>(&e)
        || dynamic_cast<const DomainError*>(&e) || dynamic_cast<const StepSizeError*>(&e))
        return non_convergence;
    if (dynamic_cast<const Error*>(&e))
        return hypothesis_failure;
    return non_convergence;
}

std::shared_ptr<spdlog::logger> logger()
{
    static const auto log = [] {
        auto l = spdlog::get("phyp");
        if (!l)
            l = spdlog::stderr_color_mt("phyp");
        const char* env = std::getenv("PERIODIC_HYP_LOG");
        const std::string level = env ? env : "info";
        l->set_level(level == "debug" ? spdlog::level::debug
                     : level == "error" ? spdlog::level::err
                                        : spdlog::level::info);
        return l;
    }();
    return log;
}

std::vector<double> perturbation_signs(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (auto& v : s)
        v = coin(rng) ? 1.0 : -1.0;
    return s;
}

Json validate_problem(const RunConfig& cfg, bool& ok)
{
    const auto p = build_problem(cfg, cfg.epsilon);
    const auto& spec = p.spec;
    Json j;
    j["system"] = cfg.system;
    j["time_scale"] = p.time_scale;
    const auto report = validate_hyperbolicity(spec);
    j["validation"] = report;
    const auto forcing = validate_forcing(p.bspec, spec.n, spec.m);
    j["forcing"] = Json{{"h_c1_bound", forcing.h_c1_bound},
                        {"periodicity_residual", forcing.periodicity_residual},
                        {"dg_dh_max", forcing.dG_dh_max},
                        {"rescaled", forcing.rescaled},
                        {"rescale_factor", forcing.rescale_factor}};
    const auto theta = minimal_characterizing_number(theta_matrix(forcing.spec, spec.n, spec.m));
    j["theta"] = theta.theta;
    const Matrix g0 = source_gradient(spec, Vector::Zero(spec.n));
    const double k_min = minimal_K(g0);
    const double K = cfg.solver.K.value_or(default_K(g0));
    j["k_min"] = k_min;
    j["k"] = K;
    ok = report.ok() && theta.theta < 1.0;
    if (K < k_min) {
        j["certificate"] = nullptr;
        j["ok"] = false;
        ok = false;
        throw DominanceError("K = " + format_real(K) + " is below K_min = " + format_real(k_min));
    }
    const auto w = weights(gtilde_matrix(spec, K), spec.L, spec.n, spec.m);
    const auto cert = smallness_certificate(theta.theta, K, spec.L, w.M3);
    j["certificate"] = cert;
    ok = ok && cert.ok;
    j["ok"] = ok;
    return j;
}

// epsilon times the largest summed harmonic amplitude of any component.
double forcing_amplitude(const RunConfig& cfg, double epsilon)
{
    std::map<int, double> per_component;
    for (const auto& h : cfg.forcing)
        per_component[h.component] += h.amplitude;
    double a = 0.0;
    for (const auto& [c, v] : per_component)
        a = std::max(a, v);
    return epsilon * a;
}

struct CellResult
{
    IterationReport iteration;
    std::optional<StabilityReport> stability;
    FieldNorms norms;
};

CellResult run_cell(const RunConfig& cfg, double epsilon, const fs::path& dir, std::uint64_t seed, bool stability)
{
    const auto p = build_problem(cfg, epsilon);
    const auto report = validate_hyperbolicity(p.spec);
    if (report.needs_rescaling)
        throw HyperbolicityError("mu_max = " + format_real(report.mu_max)
                                 + " > 1; set solver.rescale_time to rescale time");
    logger()->info("solving periodic problem, epsilon = {}, grid {}x{}", epsilon, cfg.solver.Nt, cfg.solver.Nx);
    auto sol = solve_periodic(p.spec, p.bspec, cfg.solver);
    if (!sol.report.converged)
        throw ConvergenceError("fixed-point iteration did not reach tol within max_iter");
    logger()->debug("converged after {} iterations", sol.report.iterations);

    CellResult res;
    res.iteration = sol.report;
    res.norms = norms(sol.field);
    emit_report(sol.report, ReportFormat::csv, dir / "iteration.csv");
    emit_report(sol.report, ReportFormat::json, dir / "iteration.json");
    emit_field(sol.field, dir / "field.csv");

    Json summary;
    summary["epsilon"] = epsilon;
    summary["norms"] = res.norms;
    Json amp_left = Json::array(), amp_right = Json::array();
    const auto& f = sol.field;
    for (int i = 0; i < f.n(); ++i) {
        double a0 = 0.0, aL = 0.0;
        for (int j = 0; j < f.Nt(); ++j) {
            a0 = std::max(a0, std::abs(f(i, j, 0)));
            aL = std::max(aL, std::abs(f(i, j, f.Nx())));
        }
        amp_left.push_back(a0);
        amp_right.push_back(aL);
    }
    summary["amplitude_x0"] = amp_left;
    summary["amplitude_xl"] = amp_right;
    summary["pde_residual"] = pde_residual(f, p.spec);
    summary["regularity"] = regularity_measurements(f);
    summary["certificate"] = sol.report.certificate;

    if (stability) {
        const double T0 = p.spec.L * measure_mu_max(p.spec);
        const double t_end = cfg.t_end > 0.0 ? cfg.t_end : 6.0 * T0;
        const double amplitude = cfg.perturbation * forcing_amplitude(cfg, epsilon);
        const Matrix u0 = perturbed_initial_data(f, amplitude, perturbation_signs(p.spec.n, seed));
        logger()->info("running IVP to t = {} (T0 = {})", t_end, T0);
        const auto traj = run(u0, p.spec, p.bspec, t_end, T0 / cfg.records_per_transit);
        if (traj.halted)
            throw DomainError(traj.diagnostic);
        res.stability = stability_metrics(traj, f, p.spec);
        emit_report(*res.stability, ReportFormat::csv, dir / "stability.csv");
        summary["stability"] = *res.stability;
    }
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return res;
}

int run_sweep(const RunConfig& cfg, const fs::path& out_dir, std::uint64_t seed, unsigned jobs, std::ostream& out)
{
    const auto eps = cfg.epsilons.empty() ? std::vector<double>{cfg.epsilon} : cfg.epsilons;
    std::vector<int> codes(eps.size(), success);
    std::vector<std::optional<CellResult>> results(eps.size());
    std::vector<std::string> messages(eps.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t q = next++; q < eps.size(); q = next++) {
            const auto dir = out_dir / ("cell_" + std::to_string(q));
            try {
                results[q] = run_cell(cfg, eps[q], dir, seed, true);
            } catch (const std::exception& e) {
                codes[q] = exit_code_for(e);
                messages[q] = e.what();
                logger()->error("cell {} (epsilon = {}): {}", q, eps[q], e.what());
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(eps.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    std::ostringstream csv;
    csv << "cell,epsilon,exit_code,iterations,beta,beta_s,beta_s_derivative,c0\n";
    std::optional<double> largest;
    for (std::size_t q = 0; q < eps.size(); ++q) {
        csv << q << ',' << format_real(eps[q]) << ',' << codes[q];
        if (results[q]) {
            const auto& r = *results[q];
            const auto& s = *r.stability;
            csv << ',' << r.iteration.iterations << ',' << format_real(r.iteration.fitted_beta.beta) << ','
                << format_real(s.fitted_decay.beta) << ',' << format_real(s.fitted_derivative_decay.beta) << ','
                << format_real(r.norms.c0);
            largest = std::max(largest.value_or(eps[q]), eps[q]);
        } else {
            csv << ",,,,,";
        }
        csv << '\n';
    }
    write_text(out_dir / "sweep.csv", csv.str());
    if (largest)
        out << "largest completed epsilon: " << format_real(*largest) << '\n';
    else
        out << "no sweep cell completed\n";
    if (largest)
        return success;
    return codes.empty() ? success : codes.front();
}

} // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Time-periodic solutions of 1D quasilinear hyperbolic systems", "phyp"};
    app.require_subcommand(1);
    std::string config;
    std::string out_dir = "out";
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
    app.add_option("--config", config, "configuration file (YAML or JSON)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads for sweep")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for the perturbation signs");
    std::string positional;
    const std::pair<const char*, const char*> commands[] = {
        {"validate", "check the structural and boundary hypotheses"},
        {"periodic", "compute the time-periodic solution"},
        {"stability", "periodic solution plus decay of a perturbed initial value problem"},
        {"sweep", "run one cell per forcing amplitude in experiment.epsilons"},
    };
    for (const auto& [name, description] : commands) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("config", positional, "configuration file");
        sub->fallthrough();
    }

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return success;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return config_error;
    }
    const std::string mode = app.get_subcommands().front()->get_name();
    if (config.empty())
        config = positional;
    if (config.empty()) {
        err << "no config file given\n";
        return config_error;
    }

    try {
        const auto cfg = load_config(config);
        if (mode == "validate") {
            bool ok = false;
            try {
                const Json j = validate_problem(cfg, ok);
                out << j.dump(2) << '\n';
            } catch (const ConfigError&) {
                throw;
            } catch (const IoError&) {
                throw;
            } catch (const Error& e) {
                out << "hypothesis violated: " << e.what() << '\n';
                return hypothesis_failure;
            }
            return ok ? success : hypothesis_failure;
        }
        if (mode == "sweep")
            return run_sweep(cfg, out_dir, seed, jobs, out);
        const auto res = run_cell(cfg, cfg.epsilon, out_dir, seed, mode == "stability");
        out << "iterations: " << res.iteration.iterations << ", c0 = " << format_real(res.norms.c0) << '\n';
        if (res.stability)
            out << "fitted decay per T0: " << format_real(res.stability->fitted_decay.beta) << '\n';
        return success;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

} // namespace phyp::cli

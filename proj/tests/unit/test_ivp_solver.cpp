#include "fixtures.hpp"
#include "phyp/errors.hpp"
#include "phyp/ivp_solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace phyp;
using fixtures::pi;

namespace {

Matrix exact_profile(double t, int N, double eps = 0.01)
{
    Matrix u(1, N + 1);
    for (int k = 0; k <= N; ++k)
        u(0, k) = fixtures::damped_scalar_exact(t, static_cast<double>(k) / N, eps);
    return u;
}

double final_error(const Trajectory& tr, int N)
{
    return (tr.profiles.back() - exact_profile(tr.times.back(), N)).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("equilibrium is preserved")
{
    const auto e2 = fixtures::reflect(0.5, 0.0);
    const auto tr = run(Matrix::Zero(2, 65), e2.spec, e2.bspec, 3.0, 0.5);
    CHECK_FALSE(tr.halted);
    CHECK(tr.times.size() == 7);
    for (const auto& p : tr.profiles)
        CHECK(p.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run with t_end = 0 returns the initial profile")
{
    const auto e1 = fixtures::damped_scalar();
    const Matrix u0 = exact_profile(0.0, 32);
    const auto tr = run(u0, e1.spec, e1.bspec, 0.0, 0.1);
    REQUIRE(tr.profiles.size() == 1);
    CHECK(tr.profiles[0] == u0);
    CHECK(tr.times[0] == 0.0);
}

TEST_CASE("exact periodic data returns to itself after one period")
{
    const auto e1 = fixtures::damped_scalar();
    const auto tr = run(exact_profile(0.0, 256), e1.spec, e1.bspec, 1.0, 0.25);
    CHECK(final_error(tr, 256) <= 1e-4);
    CHECK(std::abs(tr.times.back() - 1.0) < 1e-15);
}

TEST_CASE("transient from zero data is swept out")
{
    const auto e1 = fixtures::damped_scalar();
    const auto tr = run(Matrix::Zero(1, 257), e1.spec, e1.bspec, 3.0, 0.5);
    CHECK(final_error(tr, 256) <= 1e-4);
}

TEST_CASE("second-order convergence on the scalar problem")
{
    const auto e1 = fixtures::damped_scalar();
    const double ec = final_error(run(exact_profile(0.0, 64), e1.spec, e1.bspec, 1.0, 1.0), 64);
    const double ef = final_error(run(exact_profile(0.0, 128), e1.spec, e1.bspec, 1.0, 1.0), 128);
    const double order = std::log2(ec / ef);
    CHECK(order >= 1.7);
    CHECK(order <= 2.2);
}

TEST_CASE("step enforces the CFL limit and the neighbourhood")
{
    const auto e1 = fixtures::damped_scalar();
    const IvpState s{0.0, exact_profile(0.0, 32), 1.0 / 32};
    CHECK_NOTHROW(step(s, kMaxCfl / 32, e1.spec, e1.bspec));
    CHECK_THROWS_AS(step(s, 0.8 / 32, e1.spec, e1.bspec), StepSizeError);
    CHECK_THROWS_AS(step(s, 0.0, e1.spec, e1.bspec), StepSizeError);
    CHECK(stable_dt(s.u, s.dx, e1.spec) == doctest::Approx(kDefaultCfl / 32));

    const auto loud = fixtures::damped_scalar(0.5);
    const auto tr = run(Matrix::Zero(1, 33), loud.spec, loud.bspec, 1.0, 0.1);
    CHECK(tr.halted);
    CHECK(tr.diagnostic.find("neighbourhood") != std::string::npos);
    CHECK(tr.times.size() < 11);
}

TEST_CASE("periodic solution is invariant under the evolution")
{
    const auto e2 = fixtures::reflect(0.5);
    IterationConfig cfg;
    cfg.Nt = 128;
    cfg.Nx = 128;
    cfg.tol = 1e-12;
    const auto sol = solve_periodic(e2.spec, e2.bspec, cfg);
    const auto tr = run(extract_initial_data(sol.field), e2.spec, e2.bspec, 10.0, 0.5);
    const auto rep = stability_metrics(tr, sol.field, e2.spec);
    for (const auto& [t, phi] : rep.phi_samples)
        CHECK(phi < 2e-4);
}

TEST_CASE("stability_metrics: exact match and synthetic decay")
{
    const auto e1 = fixtures::damped_scalar();
    const Field f = sample_field(1, 32, 32, 1.0, 1.0, [](double t, double x) {
        return Vector::Constant(1, fixtures::damped_scalar_exact(t, x));
    });
    Trajectory tr;
    tr.dx = f.dx();
    for (int j = 0; j < 64; ++j) {
        tr.times.push_back(j * f.dt());
        Matrix p(1, 33);
        for (int k = 0; k <= 32; ++k)
            p(0, k) = f(0, j, k);
        tr.profiles.push_back(p);
    }
    const auto rep = stability_metrics(tr, f, e1.spec);
    CHECK(rep.exact_match);
    CHECK(rep.T0 == doctest::Approx(1.0));

    std::vector<std::pair<double, double>> samples;
    const double T0 = 0.8;
    for (int q = 0; q <= 80; ++q) {
        const double t = q * 0.1;
        samples.emplace_back(t, std::exp(-t));
    }
    const auto fit = fit_decay(samples, T0);
    CHECK(fit.valid());
    CHECK(std::abs(fit.beta - std::exp(-T0)) < 1e-6);
    CHECK(fit_decay({{0.0, 1.0}}, 1.0).status == RateFit::Status::insufficient_data);
}

TEST_CASE("reflection perturbation decays by the gain per transit")
{
    const auto e2 = fixtures::reflect(0.5);
    IterationConfig cfg;
    cfg.Nt = 128;
    cfg.Nx = 128;
    cfg.tol = 1e-12;
    const auto sol = solve_periodic(e2.spec, e2.bspec, cfg);
    const Matrix u0 = perturbed_initial_data(sol.field, 0.005, {1.0, -1.0});
    const auto tr = run(u0, e2.spec, e2.bspec, 6.0, 0.125);
    const auto rep = stability_metrics(tr, sol.field, e2.spec);
    CHECK(rep.monotone_envelope);
    CHECK(rep.fitted_decay.beta > 0.4);
    CHECK(rep.fitted_decay.beta < 0.6);
    CHECK(rep.fitted_derivative_decay.beta < 2.0 * rep.fitted_decay.beta);
    CHECK(rep.fitted_derivative_decay.beta > 0.5 * rep.fitted_decay.beta);
}

TEST_CASE("bump and perturbed data")
{
    CHECK(bump(0.0, 1.0) == 0.0);
    CHECK(bump(1.0, 1.0) == 0.0);
    CHECK(bump(0.5, 1.0) == 1.0);
    CHECK(bump(1e-3, 1.0) < 1e-100);
    CHECK(bump(-0.1, 1.0) == 0.0);

    const Field zero(2, 8, 16, 1.0, 2.0);
    const Matrix u0 = perturbed_initial_data(zero, 0.01, {1.0, -1.0});
    CHECK(u0(0, 8) == doctest::Approx(0.01));
    CHECK(u0(1, 8) == doctest::Approx(-0.01));
    CHECK(u0(0, 0) == 0.0);
    CHECK(u0(1, 16) == 0.0);
}

TEST_CASE("corner compatibility residuals")
{
    const auto e1 = fixtures::damped_scalar();
    const auto zero = compatibility_residual(Matrix::Zero(1, 257), 1.0 / 256, e1.spec, e1.bspec);
    CHECK(zero.c0 == 0.0);
    CHECK(zero.c1 == doctest::Approx(0.02 * pi).epsilon(1e-6));
    const auto exact = compatibility_residual(exact_profile(0.0, 256), 1.0 / 256, e1.spec, e1.bspec);
    CHECK(exact.c0 < 1e-15);
    CHECK(exact.c1 < 1e-3);
}

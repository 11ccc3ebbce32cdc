#include "fixtures.hpp"
#include "phyp/diagnostics.hpp"
#include "phyp/errors.hpp"
#include "phyp/report_io.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace phyp;
using fixtures::pi;
namespace fs = std::filesystem;

namespace {

Field e1_sampled(int N)
{
    return sample_field(1, N, N, 1.0, 1.0,
                        [](double t, double x) { return Vector::Constant(1, fixtures::damped_scalar_exact(t, x)); });
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "phyp_diagnostics_test";
    fs::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("norms")
{
    const Field zero(2, 8, 8, 1.0, 1.0);
    CHECK(norms(zero) == FieldNorms{0.0, 0.0});
    const Field c = sample_field(1, 8, 8, 1.0, 1.0, [](double, double) { return Vector::Constant(1, -0.04); });
    const auto nc = norms(c);
    CHECK(nc.c0 == doctest::Approx(0.04));
    CHECK(nc.c1 == doctest::Approx(0.04).epsilon(1e-12));

    const auto e1 = fixtures::damped_scalar();
    IterationConfig cfg;
    cfg.Nt = 128;
    cfg.Nx = 128;
    const auto sol = solve_periodic(e1.spec, e1.bspec, cfg);
    const auto n = norms(sol.field);
    CHECK(n.c0 > 0.009);
    CHECK(n.c0 < 0.0101);
}

TEST_CASE("weights examples")
{
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 1.1;
    g(1, 1) = -1.1;
    const auto w = weights(g, 1.0, 2, 1);
    CHECK(w.M3 == doctest::Approx(std::exp(1.1)));
    CHECK(w.M3 == doctest::Approx(3.0042).epsilon(1e-4));
    CHECK(w.W(0, 0.3) == doctest::Approx(std::exp(1.1 * 0.7)));
    CHECK(w.W(1, 0.3) == doctest::Approx(std::exp(1.1 * 0.3)));

    const auto w1 = weights(Matrix::Constant(1, 1, -0.5), 1.0, 1, 0);
    CHECK(w1.M3 == doctest::Approx(std::exp(0.5)));
    CHECK(w1.M3 == doctest::Approx(1.6487).epsilon(1e-4));

    Matrix bad = g;
    bad(0, 1) = 2.0;
    CHECK_THROWS_AS(weights(bad, 1.0, 2, 1), DominanceError);
    CHECK_THROWS_AS(weights(Matrix::Zero(1, 1), 1.0, 1, 0), DominanceError);
}

TEST_CASE("weight bounds hold on every constructed profile")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 4;
        const int m = trial % (n + 1);
        Matrix g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g(i, j) = u(rng);
        for (int i = 0; i < n; ++i) {
            const double off = g.row(i).cwiseAbs().sum() - std::abs(g(i, i));
            g(i, i) = (i < m ? 1.0 : -1.0) * (off + 0.01 + std::abs(u(rng)));
        }
        const double L = 0.5 + std::abs(u(rng));
        const auto w = weights(g, L, n, m);
        CHECK(w.M3 >= 1.0);
        for (int i = 0; i < n; ++i) {
            CHECK(w.W(i, i < m ? L : 0.0) == 1.0);
            double prev = w.W(i, 0.0);
            for (int q = 1; q < 1024; ++q) {
                const double x = L * q / 1023.0;
                const double v = w.W(i, x);
                CHECK(v >= 1.0);
                CHECK(v <= w.M3 * (1.0 + 1e-14));
                if (i < m)
                    CHECK(v < prev);
                else
                    CHECK(v > prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("smallness certificate arithmetic")
{
    const auto a = smallness_certificate(0.5, 0.0, 1.0, 2.0);
    CHECK(a.ok);
    CHECK(a.margin == doctest::Approx(0.5));
    const auto b = smallness_certificate(0.5, 0.3, 1.0, 2.0);
    CHECK_FALSE(b.ok);
    CHECK(b.margin == doctest::Approx(-0.1));
    const auto c = smallness_certificate(0.9999, 0.0, 1.0, 5.0);
    CHECK(c.ok);
    CHECK(c.margin == doctest::Approx(1e-4).epsilon(1e-9));
}

TEST_CASE("pde_residual")
{
    const auto e1 = fixtures::damped_scalar();
    CHECK(pde_residual(Field(1, 16, 16, 1.0, 1.0), e1.spec) == 0.0);
    const double r1 = pde_residual(e1_sampled(64), e1.spec);
    const double r2 = pde_residual(e1_sampled(128), e1.spec);
    CHECK(r1 / r2 >= 3.2);

    Field bad = e1_sampled(64);
    bad(0, 10, 20) += 1e-3;
    CHECK(pde_residual(bad, e1.spec) >= 1e-3 / (2.0 * bad.dt()) * 0.99);
}

TEST_CASE("regularity measurements")
{
    const Field s = sample_field(1, 256, 16, 1.0, 1.0,
                                 [](double t, double) { return Vector::Constant(1, 0.02 * std::sin(2.0 * pi * t)); });
    const auto rs = regularity_measurements(s);
    CHECK(rs.d2t == doctest::Approx(4.0 * pi * pi * 0.02).epsilon(0.01));
    CHECK(rs.d2x < 1e-12);

    const auto rc = regularity_measurements(
        sample_field(2, 16, 16, 1.0, 1.0, [](double, double) { return Vector::Constant(2, 0.3); }));
    CHECK(rc.d2t == 0.0);
    CHECK(rc.dtdx == 0.0);
    CHECK(rc.d2x == 0.0);

    const auto e1 = fixtures::damped_scalar();
    IterationConfig cfg;
    cfg.Nt = 256;
    cfg.Nx = 256;
    const auto sol = solve_periodic(e1.spec, e1.bspec, cfg);
    const auto r = regularity_measurements(sol.field, 0.01 * 4.0 * pi * pi);
    CHECK(r.d2t == doctest::Approx(0.3948).epsilon(0.05));
    REQUIRE(r.forcing_second_derivative_bound);

    const auto coarse = regularity_measurements(e1_sampled(64));
    const auto fine = regularity_measurements(e1_sampled(128));
    const auto cmp = compare_regularity(coarse, fine);
    REQUIRE(cmp.grid_pair_ratio);
    for (double q : *cmp.grid_pair_ratio)
        CHECK(std::abs(q - 1.0) < 0.05);
}

TEST_CASE("observed order")
{
    CHECK(observed_order(4.0, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("emit_report formats")
{
    IterationReport it;
    it.deltas = {0.1, 0.05, 0.025};
    it.iterations = 3;
    const auto csv = scratch("iteration.csv");
    emit_report(it, ReportFormat::csv, csv);
    CHECK(slurp(csv) == "iteration,delta\n1,0.10000000000000001\n2,0.050000000000000003\n3,0.025000000000000001\n");

    StabilityReport st;
    st.phi_samples = {{0.0, 1.0}, {1.0, 0.5}};
    st.dphi_samples = {{0.0, 2.0}, {1.0, 1.0}};
    st.T0 = 1.0;
    st.fitted_decay = RateFit{RateFit::Status::ok, 0.5, 2};
    const auto scsv = scratch("stability.csv");
    emit_report(st, ReportFormat::csv, scsv);
    CHECK(slurp(scsv).rfind("t,phi,dphi\n0,1,2\n1,0.5,1\n", 0) == 0);
    const auto side = Json::parse(slurp(scratch("stability.json")));
    CHECK(side["fitted_decay"]["beta"].get<double>() == 0.5);
    CHECK(side["t0"].get<double>() == 1.0);

    CHECK_THROWS_AS(emit_report(it, ReportFormat::csv, "/proc/phyp/nope/iteration.csv"), IoError);
    try {
        emit_report(it, ReportFormat::csv, "/proc/phyp/nope/iteration.csv");
    } catch (const IoError& e) {
        CHECK(e.path() == "/proc/phyp/nope/iteration.csv");
    }
}

TEST_CASE("emission is deterministic")
{
    IterationReport it;
    it.deltas = {1.0 / 3.0, 2.0 / 7.0};
    emit_report(it, ReportFormat::json, scratch("a.json"));
    emit_report(it, ReportFormat::json, scratch("b.json"));
    CHECK(slurp(scratch("a.json")) == slurp(scratch("b.json")));
}

TEST_CASE("JSON records round-trip exactly")
{
    const Certificate c{0.1 / 3.0, 1e-6, 1.0, std::exp(1.1), true, 1.0 - 0.1 / 3.0 - 1e-6 * std::exp(1.1)};
    emit_report(c, scratch("cert.json"));
    CHECK(Json::parse(slurp(scratch("cert.json"))).get<Certificate>() == c);

    RegularityReport r{0.394, 0.3951234567890123, 1.0 / 7.0, std::array<double, 3>{1.01, 0.99, 1.0 / 3.0}, 0.3948};
    emit_report(r, scratch("reg.json"));
    CHECK(Json::parse(slurp(scratch("reg.json"))).get<RegularityReport>() == r);
    RegularityReport bare{1.0, 2.0, 3.0, std::nullopt, std::nullopt};
    CHECK(Json(bare).get<RegularityReport>() == bare);

    ValidationReport v;
    v.samples = 256;
    v.mu_max = 0.8476188244194013;
    v.max_eigen_residual = 1.234e-17;
    v.needs_rescaling = true;
    emit_report(v, scratch("val.json"));
    CHECK(Json::parse(slurp(scratch("val.json"))).get<ValidationReport>() == v);

    const FieldNorms n{0.1, 0.1 + 2.0 * pi / 3.0};
    emit_report(n, scratch("norms.json"));
    CHECK(Json::parse(slurp(scratch("norms.json"))).get<FieldNorms>() == n);

    const RateFit f{RateFit::Status::converged_immediately, 0.0, 0};
    CHECK(Json(f).get<RateFit>() == f);
}

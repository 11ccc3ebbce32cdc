#include "phyp/periodic_solver.hpp"

#include "phyp/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace phyp {

namespace {

constexpr int kSubsteps = 4;

Field forcing_field(const Field& prev, const SystemSpec& spec, const IterationContext& ctx, Field& speeds)
{
    const int n = ctx.n;
    const Field dtf = derivative_t(prev);
    const Field dxf = derivative_x(prev);
    Field R(n, prev.Nt(), prev.Nx(), prev.T_star(), prev.L());
    Vector ut(n), ux(n);
    for (int j = 0; j < prev.Nt(); ++j)
        for (int k = 0; k <= prev.Nx(); ++k) {
            const Vector u = prev.value(j, k);
            if (!in_domain(spec, u))
                throw DomainError("iterate left the neighbourhood U; the forcing amplitude is too large");
            const auto eig = eigen_at(spec, u);
            const Matrix B = coupling_B(eig);
            const Vector gnl = g_nonlinear(spec, u, eig, ctx.mu0, ctx.g0);
            for (int i = 0; i < n; ++i) {
                ut(i) = dtf(i, j, k);
                ux(i) = dxf(i, j, k);
            }
            for (int i = 0; i < n; ++i) {
                double r = 0.0;
                for (int q = 0; q < n; ++q) {
                    if (q != i)
                        r += B(i, q) * (ux(q) + eig.mus(i) * ut(q)) + ctx.gtilde(i, q) * u(q);
                }
                r += ctx.K * ctx.mu0(i) * u(i) + gnl(i);
                R(i, j, k) = r;
                speeds(i, j, k) = eig.mus(i);
            }
        }
    return R;
}

} // namespace

void IterationConfig::validate() const
{
    if (Nt < 8 || Nx < 8)
        throw ConfigError("grid sizes must be at least 8");
    if (!(tol > 0.0))
        throw ConfigError("tolerance must be positive");
    if (max_iter < 1)
        throw ConfigError("max_iter must be positive");
    if (K && *K < 0.0)
        throw ConfigError("K must be nonnegative");
}

IterationContext make_context(const SystemSpec& spec, std::optional<double> K)
{
    IterationContext ctx;
    ctx.n = spec.n;
    ctx.m = spec.m;
    const Vector zero = Vector::Zero(spec.n);
    ctx.mu0 = eigen_at(spec, zero).mus;
    ctx.g0 = source_gradient(spec, zero);
    ctx.K = K.value_or(default_K(ctx.g0));
    ctx.gtilde = gtilde_matrix(spec, ctx.K);
    return ctx;
}

Field linearized_step(const Field& prev, const SystemSpec& spec, const BoundarySpec& bspec,
                      const IterationContext& ctx)
{
    const int n = ctx.n;
    const int m = ctx.m;
    const int Nt = prev.Nt();
    const int Nx = prev.Nx();

    Field speeds(n, Nt, Nx, prev.T_star(), prev.L());
    const Field R = forcing_field(prev, spec, ctx, speeds);
    Field next(n, Nt, Nx, prev.T_star(), prev.L());

    // Incoming boundary columns, explicit in prev.
    for (int j = 0; j < Nt; ++j) {
        const double t = prev.t(j);
        if (n - m > 0) {
            Vector out(m);
            for (int r = 0; r < m; ++r)
                out(r) = prev(r, j, 0);
            const Vector in = eval_boundary(bspec, n, m, Side::left, t, out);
            for (int q = 0; q < n - m; ++q)
                next(m + q, j, 0) = in(q);
        }
        if (m > 0) {
            Vector out(n - m);
            for (int q = 0; q < n - m; ++q)
                out(q) = prev(m + q, j, Nx);
            const Vector in = eval_boundary(bspec, n, m, Side::right, t, out);
            for (int r = 0; r < m; ++r)
                next(r, j, Nx) = in(r);
        }
    }

    std::array<double, kSubsteps + 1> xs{}, ts{}, fs{};
    for (int i = 0; i < n; ++i) {
        const bool leftward = i < m;
        const double g = ctx.gtilde(i, i);
        auto slope = [&](double t, double x) { return interpolate(speeds, i, t, x); };
        for (int step = 0; step < Nx; ++step) {
            const int k_up = leftward ? Nx - step : step;
            const int k_to = leftward ? k_up - 1 : k_up + 1;
            const double x_up = prev.x(k_up);
            const double x_to = prev.x(k_to);
            const double h = (x_up - x_to) / kSubsteps;
            for (int j = 0; j < Nt; ++j) {
                // Trace from the target node back to the upstream column.
                double t = prev.t(j);
                xs[0] = x_to;
                ts[0] = t;
                for (int q = 0; q < kSubsteps; ++q) {
                    const double x = x_to + q * h;
                    const double k1 = slope(t, x);
                    const double k2 = slope(t + 0.5 * h * k1, x + 0.5 * h);
                    const double k3 = slope(t + 0.5 * h * k2, x + 0.5 * h);
                    const double k4 = slope(t + h * k3, x + h);
                    t += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
                    xs[static_cast<std::size_t>(q) + 1] = q + 1 == kSubsteps ? x_up : x + h;
                    ts[static_cast<std::size_t>(q) + 1] = t;
                }
                for (std::size_t q = 0; q <= kSubsteps; ++q)
                    fs[q] = std::exp(g * (x_to - xs[q])) * interpolate(R, i, ts[q], xs[q]);
                // integral from x_up to x_to = -(trapezoid from x_to to x_up)
                double integral = 0.5 * (fs[0] + fs[kSubsteps]);
                for (std::size_t q = 1; q < kSubsteps; ++q)
                    integral += fs[q];
                integral *= -h;
                const double foot = interpolate_cubic_t(next, i, ts[kSubsteps], x_up);
                next(i, j, k_to) = std::exp(g * (x_to - x_up)) * foot + integral;
            }
        }
    }

    for (int j = 0; j < Nt; ++j)
        for (int k = 0; k <= Nx; ++k)
            if (!in_domain(spec, next.value(j, k)))
                throw DomainError("iterate left the neighbourhood U; the forcing amplitude is too large");
    return next;
}

Field linearized_step(const Field& prev, const SystemSpec& spec, const BoundarySpec& bspec,
                      const IterationConfig& cfg)
{
    return linearized_step(prev, spec, bspec, make_context(spec, cfg.K));
}

PeriodicSolution solve_periodic(const SystemSpec& spec, const BoundarySpec& bspec, const IterationConfig& cfg)
{
    cfg.validate();
    const auto ctx = make_context(spec, cfg.K);
    const auto theta = minimal_characterizing_number(theta_matrix(bspec, spec.n, spec.m));
    if (!(theta.theta < 1.0)) {
        std::ostringstream os;
        os << "boundary feedback is not dissipative: theta = " << theta.theta << " >= 1";
        throw DissipativityError(os.str());
    }
    const auto w = weights(ctx.gtilde, spec.L, spec.n, spec.m);

    PeriodicSolution sol;
    auto& rep = sol.report;
    rep.certificate = smallness_certificate(theta.theta, ctx.K, spec.L, w.M3);

    Field u(spec.n, cfg.Nt, cfg.Nx, bspec.T_star, spec.L);
    int rising = 0;
    for (int l = 1; l <= cfg.max_iter; ++l) {
        Field next = linearized_step(u, spec, bspec, ctx);
        const double d = sup_distance(next, u);
        const double d1 = std::max(sup_distance(derivative_t(next), derivative_t(u)),
                                   sup_distance(derivative_x(next), derivative_x(u)));
        rising = (!rep.deltas.empty() && d >= rep.deltas.back()) ? rising + 1 : 0;
        rep.deltas.push_back(d);
        rep.c1_deltas.push_back(d1);
        rep.iterations = l;
        u = std::move(next);
        if (d <= cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    if (!rep.converged && rising >= 5) {
        std::ostringstream os;
        os << "fixed-point iteration is not contracting after " << rep.iterations << " iterations (last delta "
           << rep.deltas.back() << ")";
        throw NonContractionError(os.str());
    }
    rep.fitted_beta = fit_contraction_rate(rep.deltas);
    sol.field = std::move(u);
    return sol;
}

RateFit fit_contraction_rate(const std::vector<double>& deltas)
{
    constexpr double floor = 100.0 * std::numeric_limits<double>::epsilon();
    std::vector<double> xs, ys;
    for (std::size_t l = 0; l < deltas.size(); ++l)
        if (deltas[l] > floor) {
            xs.push_back(static_cast<double>(l + 1));
            ys.push_back(std::log(deltas[l]));
        }
    RateFit fit;
    if (xs.empty() && !deltas.empty()) {
        fit.status = RateFit::Status::converged_immediately;
        return fit;
    }
    if (xs.size() < 4) {
        fit.status = RateFit::Status::insufficient_data;
        fit.points = static_cast<int>(xs.size());
        return fit;
    }
    // Drop up to two leading iterations while keeping at least four points.
    const std::size_t skip = std::min<std::size_t>(2, xs.size() - 4);
    const auto count = static_cast<double>(xs.size() - skip);
    double mx = 0.0, my = 0.0;
    for (std::size_t q = skip; q < xs.size(); ++q) {
        mx += xs[q];
        my += ys[q];
    }
    mx /= count;
    my /= count;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t q = skip; q < xs.size(); ++q) {
        sxy += (xs[q] - mx) * (ys[q] - my);
        sxx += (xs[q] - mx) * (xs[q] - mx);
    }
    fit.status = RateFit::Status::ok;
    fit.beta = std::exp(sxy / sxx);
    fit.points = static_cast<int>(count);
    return fit;
}

Matrix extract_initial_data(const Field& field)
{
    Matrix u0(field.n(), field.Nx() + 1);
    for (int k = 0; k <= field.Nx(); ++k)
        u0.col(k) = field.value(0, k);
    return u0;
}

} // namespace phyp

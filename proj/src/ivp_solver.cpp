#include "phyp/ivp_solver.hpp"

#include "phyp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phyp {

namespace {

// x-derivative of column k for a family moving right (info from the left)
// or left, second order wherever the stencil fits.
Vector upwind_dx(const Matrix& u, int k, double dx, bool rightward)
{
    const int N = static_cast<int>(u.cols()) - 1;
    const double inv = 1.0 / (2.0 * dx);
    if (rightward) {
        if (k >= 2)
            return (3.0 * u.col(k) - 4.0 * u.col(k - 1) + u.col(k - 2)) * inv;
        if (k == 1)
            return (u.col(2) - u.col(0)) * inv;
        return (-3.0 * u.col(0) + 4.0 * u.col(1) - u.col(2)) * inv;
    }
    if (k <= N - 2)
        return (-3.0 * u.col(k) + 4.0 * u.col(k + 1) - u.col(k + 2)) * inv;
    if (k == N - 1)
        return (u.col(N) - u.col(N - 2)) * inv;
    return (3.0 * u.col(N) - 4.0 * u.col(N - 1) + u.col(N - 2)) * inv;
}

Matrix central_dx(const Matrix& u, double dx)
{
    const auto N = u.cols() - 1;
    Matrix d(u.rows(), u.cols());
    const double inv = 1.0 / (2.0 * dx);
    d.col(0) = (-3.0 * u.col(0) + 4.0 * u.col(1) - u.col(2)) * inv;
    for (Eigen::Index k = 1; k < N; ++k)
        d.col(k) = (u.col(k + 1) - u.col(k - 1)) * inv;
    d.col(N) = (3.0 * u.col(N) - 4.0 * u.col(N - 1) + u.col(N - 2)) * inv;
    return d;
}

// u_t from the equation itself: F(u) - A(u) u_x.
Matrix time_derivative(const Matrix& u, const Matrix& ux, const SystemSpec& spec)
{
    Matrix ut(u.rows(), u.cols());
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        const Vector col = u.col(k);
        ut.col(k) = spec.F(col) - spec.A(col) * ux.col(k);
    }
    return ut;
}

void check_domain(const Matrix& u, const SystemSpec& spec, double t)
{
    for (Eigen::Index k = 0; k < u.cols(); ++k)
        if (!u.col(k).allFinite() || !in_domain(spec, u.col(k))) {
            std::ostringstream os;
            os << "solution left the neighbourhood U at t = " << t << ", x index " << k;
            throw DomainError(os.str());
        }
}

double max_speed(const Matrix& u, const SystemSpec& spec)
{
    double s = 0.0;
    for (Eigen::Index k = 0; k < u.cols(); ++k)
        s = std::max(s, eigen_at(spec, u.col(k)).lambdas.cwiseAbs().maxCoeff());
    return s;
}

} // namespace

Matrix ivp_rhs(const Matrix& u, double dx, const SystemSpec& spec)
{
    const int N = static_cast<int>(u.cols()) - 1;
    if (N < 4)
        throw std::invalid_argument("ivp_rhs: need at least 4 cells");
    Matrix out(u.rows(), u.cols());
    for (int k = 0; k <= N; ++k) {
        const Vector uk = u.col(k);
        const auto eig = eigen_at(spec, uk);
        Vector du = spec.F(uk);
        for (int i = 0; i < spec.n; ++i) {
            const double lam = eig.lambdas(i);
            const double w = eig.left.row(i).dot(upwind_dx(u, k, dx, lam > 0.0));
            du -= lam * w * eig.right.col(i);
        }
        out.col(k) = du;
    }
    return out;
}

void impose_boundary(Matrix& u, double t, const SystemSpec& spec, const BoundarySpec& bspec)
{
    const int n = spec.n;
    const int m = spec.m;
    const auto N = u.cols() - 1;
    if (n - m > 0) {
        const Vector in = eval_boundary(bspec, n, m, Side::left, t, u.col(0).head(m));
        u.col(0).tail(n - m) = in;
    }
    if (m > 0) {
        const Vector in = eval_boundary(bspec, n, m, Side::right, t, u.col(N).tail(n - m));
        u.col(N).head(m) = in;
    }
}

double stable_dt(const Matrix& u, double dx, const SystemSpec& spec, double cfl)
{
    return cfl * dx / max_speed(u, spec);
}

IvpState step(const IvpState& state, double dt, const SystemSpec& spec, const BoundarySpec& bspec)
{
    if (!(dt > 0.0))
        throw StepSizeError("time step must be positive");
    const double limit = kMaxCfl * state.dx / max_speed(state.u, spec);
    if (dt > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time step " << dt << " violates the CFL limit " << limit;
        throw StepSizeError(os.str());
    }
    const double t1 = state.t + dt;
    const Matrix k1 = ivp_rhs(state.u, state.dx, spec);
    Matrix stage = state.u + dt * k1;
    impose_boundary(stage, t1, spec, bspec);
    check_domain(stage, spec, t1);
    const Matrix k2 = ivp_rhs(stage, state.dx, spec);
    IvpState out{t1, state.u + 0.5 * dt * (k1 + k2), state.dx};
    impose_boundary(out.u, t1, spec, bspec);
    check_domain(out.u, spec, t1);
    return out;
}

Trajectory run(const Matrix& u0, const SystemSpec& spec, const BoundarySpec& bspec, double t_end,
               double record_every)
{
    if (u0.rows() != spec.n || u0.cols() < 5)
        throw std::invalid_argument("run: initial profile has the wrong shape");
    if (!(record_every > 0.0) || t_end < 0.0)
        throw std::invalid_argument("run: record cadence must be positive and t_end nonnegative");
    Trajectory traj;
    traj.dx = spec.L / static_cast<double>(u0.cols() - 1);
    IvpState state{0.0, u0, traj.dx};
    traj.times.push_back(0.0);
    traj.profiles.push_back(u0);

    const auto records = static_cast<long>(std::ceil(t_end / record_every - 1e-9));
    try {
        for (long q = 1; q <= records; ++q) {
            const double target = std::min(t_end, static_cast<double>(q) * record_every);
            const double span = target - state.t;
            const double dt_max = stable_dt(state.u, traj.dx, spec) / 1.05;
            const auto steps = std::max<long>(1, static_cast<long>(std::ceil(span / dt_max)));
            const double dt = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s)
                state = step(state, dt, spec, bspec);
            state.t = target;
            traj.times.push_back(target);
            traj.profiles.push_back(state.u);
        }
    } catch (const DomainError& e) {
        traj.halted = true;
        traj.diagnostic = e.what();
    }
    return traj;
}

RateFit fit_decay(const std::vector<std::pair<double, double>>& samples, double T0)
{
    constexpr double floor = 1e-13;
    std::vector<std::pair<double, double>> pick, on_grid;
    for (const auto& [t, y] : samples) {
        if (t < 2.0 * T0 * (1.0 - 1e-12) || !(y > floor))
            continue;
        const double k = t / T0;
        pick.emplace_back(k, std::log(y));
        if (std::abs(k - std::round(k)) < 1e-9)
            on_grid.emplace_back(k, std::log(y));
    }
    const auto& use = on_grid.size() >= 2 ? on_grid : pick;
    RateFit fit;
    fit.points = static_cast<int>(use.size());
    if (use.size() < 2) {
        fit.status = RateFit::Status::insufficient_data;
        return fit;
    }
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : use) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(use.size());
    my /= static_cast<double>(use.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : use) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    fit.status = RateFit::Status::ok;
    fit.beta = std::exp(sxy / sxx);
    return fit;
}

StabilityReport stability_metrics(const Trajectory& traj, const Field& periodic, const SystemSpec& spec)
{
    if (traj.profiles.empty())
        throw std::invalid_argument("stability_metrics: empty trajectory");
    const auto N = traj.profiles.front().cols() - 1;
    if (std::abs(traj.dx * static_cast<double>(N) - periodic.L()) > 1e-9 * periodic.L())
        throw std::invalid_argument("stability_metrics: trajectory and periodic field have different L");

    StabilityReport rep;
    rep.T0 = spec.L * measure_mu_max(spec);
    Matrix ref(spec.n, N + 1);
    for (std::size_t q = 0; q < traj.profiles.size(); ++q) {
        const double t = traj.times[q];
        const Matrix& u = traj.profiles[q];
        for (Eigen::Index k = 0; k <= N; ++k)
            ref.col(k) = interpolate_cubic_t(periodic, t, std::min(periodic.L(), static_cast<double>(k) * traj.dx));
        const double phi = (u - ref).cwiseAbs().maxCoeff();
        const Matrix ux = central_dx(u, traj.dx);
        const Matrix rx = central_dx(ref, traj.dx);
        const Matrix ut = time_derivative(u, ux, spec);
        const Matrix rt = time_derivative(ref, rx, spec);
        const double dphi = std::max((ux - rx).cwiseAbs().maxCoeff(), (ut - rt).cwiseAbs().maxCoeff());
        rep.phi_samples.emplace_back(t, phi);
        rep.dphi_samples.emplace_back(t, dphi);
    }

    double peak = 0.0;
    for (const auto& s : rep.phi_samples)
        peak = std::max(peak, s.second);
    if (peak <= 1e-13) {
        rep.exact_match = true;
        rep.fitted_decay.status = RateFit::Status::converged_immediately;
        rep.fitted_derivative_decay.status = RateFit::Status::converged_immediately;
        return rep;
    }
    rep.fitted_decay = fit_decay(rep.phi_samples, rep.T0);
    rep.fitted_derivative_decay = fit_decay(rep.dphi_samples, rep.T0);

    double last = INFINITY;
    for (const auto& [t, phi] : rep.phi_samples) {
        const double k = t / rep.T0;
        if (k < 2.0 - 1e-9 || std::abs(k - std::round(k)) > 1e-9)
            continue;
        if (phi > last)
            rep.monotone_envelope = false;
        last = phi;
    }
    return rep;
}

double bump(double x, double L)
{
    const double s = 2.0 * x / L - 1.0;
    if (std::abs(s) >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

Matrix perturbed_initial_data(const Field& periodic, double amplitude, const std::vector<double>& signs)
{
    Matrix u0 = extract_initial_data(periodic);
    for (int k = 0; k <= periodic.Nx(); ++k) {
        const double b = amplitude * bump(periodic.x(k), periodic.L());
        for (int i = 0; i < periodic.n(); ++i)
            u0(i, k) += (static_cast<std::size_t>(i) < signs.size() ? signs[static_cast<std::size_t>(i)] : 1.0) * b;
    }
    return u0;
}

CompatibilityResidual compatibility_residual(const Matrix& u0, double dx, const SystemSpec& spec,
                                             const BoundarySpec& bspec)
{
    const int n = spec.n;
    const int m = spec.m;
    const auto N = u0.cols() - 1;
    CompatibilityResidual res;
    const Matrix ux = central_dx(u0, dx);
    const Matrix ut = time_derivative(u0, ux, spec);
    constexpr double d = 1e-6;

    auto check = [&](Side side, Eigen::Index col, int first_out, int n_out, int first_in) {
        const Vector out = u0.col(col).segment(first_out, n_out);
        const Vector dout = ut.col(col).segment(first_out, n_out);
        const Vector g = eval_boundary(bspec, n, m, side, 0.0, out);
        const Vector gp = eval_boundary(bspec, n, m, side, d, out + d * dout);
        const Vector gm = eval_boundary(bspec, n, m, side, -d, out - d * dout);
        const Vector dg = (gp - gm) / (2.0 * d);
        for (Eigen::Index q = 0; q < g.size(); ++q) {
            res.c0 = std::max(res.c0, std::abs(u0(first_in + q, col) - g(q)));
            res.c1 = std::max(res.c1, std::abs(ut(first_in + q, col) - dg(q)));
        }
    };
    if (n - m > 0)
        check(Side::left, 0, 0, m, m);
    if (m > 0)
        check(Side::right, N, m, n - m, 0);
    return res;
}

} // namespace phyp

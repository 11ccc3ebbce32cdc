#include "phyp/builtins.hpp"

#include "phyp/errors.hpp"

#include <cmath>
#include <numbers>

namespace phyp {

namespace {

Signal harmonic_sum(std::vector<Harmonic> terms, double period, int order)
{
    return [terms = std::move(terms), period, order](double t) {
        double s = 0.0;
        for (const auto& h : terms) {
            const double w = 2.0 * std::numbers::pi * h.multiple / period;
            const double arg = w * t + h.phase;
            switch (order) {
            case 0: s += h.amplitude * std::sin(arg); break;
            case 1: s += h.amplitude * w * std::cos(arg); break;
            default: s -= h.amplitude * w * w * std::sin(arg); break;
            }
        }
        return s;
    };
}

BoundaryMap feedback_map(double gain, double quadratic)
{
    BoundaryMap g;
    g.value = [gain, quadratic](double h, const Vector& u) { return h + gain * u.sum() + quadratic * u.squaredNorm(); };
    g.grad_u = [gain, quadratic](double, const Vector& u) -> Vector {
        return Vector::Constant(u.size(), gain) + 2.0 * quadratic * u;
    };
    g.grad_h = [](double, const Vector&) { return 1.0; };
    return g;
}

} // namespace

void set_harmonic_forcing(BoundarySpec& bspec, int n, double period, const std::vector<Harmonic>& terms)
{
    bspec.h.assign(static_cast<std::size_t>(n), Signal{});
    bspec.h_prime.assign(static_cast<std::size_t>(n), Signal{});
    bspec.h_second.assign(static_cast<std::size_t>(n), Signal{});
    for (int i = 0; i < n; ++i) {
        std::vector<Harmonic> mine;
        for (const auto& h : terms) {
            if (h.component < 0 || h.component >= n)
                throw BoundaryMapError("forcing names a component outside the system");
            if (h.component == i)
                mine.push_back(h);
        }
        const auto idx = static_cast<std::size_t>(i);
        bspec.h[idx] = harmonic_sum(mine, period, 0);
        bspec.h_prime[idx] = harmonic_sum(mine, period, 1);
        bspec.h_second[idx] = harmonic_sum(mine, period, 2);
    }
    bspec.T_star = period;
}

BoundarySpec feedback_boundary(int n, int m, double period, double gain_left, double gain_right, double quadratic,
                               const std::vector<Harmonic>& terms)
{
    BoundarySpec b;
    for (int s = m; s < n; ++s)
        b.left.push_back(feedback_map(gain_left, quadratic));
    for (int r = 0; r < m; ++r)
        b.right.push_back(feedback_map(gain_right, quadratic));
    set_harmonic_forcing(b, n, period, terms);
    return b;
}

SystemSpec linear_damped_scalar(double speed, double damping, double L, double radius)
{
    if (!(speed > 0.0))
        throw HyperbolicityError("scalar transport needs a positive speed");
    SystemSpec s;
    s.n = 1;
    s.m = 0;
    s.L = L;
    s.domain_radius = radius;
    s.A = [speed](const Vector&) { return Matrix::Constant(1, 1, speed); };
    s.F = [damping](const Vector& u) -> Vector { return -damping * u; };
    s.gradF = [damping](const Vector&) { return Matrix::Constant(1, 1, -damping); };
    return s;
}

SystemSpec linear_reflect_2x2(double speed, double L, double radius)
{
    if (!(speed > 0.0))
        throw HyperbolicityError("reflection system needs a positive speed");
    SystemSpec s;
    s.n = 2;
    s.m = 1;
    s.L = L;
    s.domain_radius = radius;
    s.A = [speed](const Vector&) {
        Matrix a = Matrix::Zero(2, 2);
        a(0, 0) = -speed;
        a(1, 1) = speed;
        return a;
    };
    s.F = [](const Vector& u) -> Vector { return Vector::Zero(u.size()); };
    s.gradF = [](const Vector&) { return Matrix::Zero(2, 2); };
    return s;
}

SystemSpec quasilinear_euler_damping(double gamma, double damping, double sound_speed, double L, double radius)
{
    if (!(gamma > 1.0) || !(sound_speed > 0.0))
        throw HyperbolicityError("Euler builtin needs gamma > 1 and a positive sound speed");
    SystemSpec s;
    s.n = 2;
    s.m = 1;
    s.L = L;
    s.domain_radius = radius;
    // u1, u2: deviations of the Riemann invariants v -+ 2c/(gamma-1) from rest.
    s.A = [gamma, sound_speed](const Vector& u) {
        const double v = 0.5 * (u(0) + u(1));
        const double c = sound_speed + 0.25 * (gamma - 1.0) * (u(1) - u(0));
        Matrix a = Matrix::Zero(2, 2);
        a(0, 0) = v - c;
        a(1, 1) = v + c;
        return a;
    };
    s.F = [damping](const Vector& u) -> Vector {
        const double f = -0.5 * damping * (u(0) + u(1));
        return Vector::Constant(2, f);
    };
    s.gradF = [damping](const Vector&) { return Matrix::Constant(2, 2, -0.5 * damping); };
    return s;
}

} // namespace phyp

#pragma once

#include "phyp/builtins.hpp"
#include "phyp/periodic_solver.hpp"

#include <cmath>
#include <numbers>

namespace fixtures {

using phyp::BoundarySpec;
using phyp::Harmonic;
using phyp::Matrix;
using phyp::SystemSpec;
using phyp::Vector;

inline constexpr double pi = std::numbers::pi;

struct Problem
{
    SystemSpec spec;
    BoundarySpec bspec;
};

/// u_t + u_x = -0.5 u, u(t, 0) = eps sin(2 pi t), T* = 1.
inline Problem damped_scalar(double eps = 0.01)
{
    return {phyp::linear_damped_scalar(1.0, 0.5),
            phyp::feedback_boundary(1, 0, 1.0, 0.0, 0.0, 0.0, {Harmonic{0, 1, eps, 0.0}})};
}

/// Speeds -1, +1, gain k at both ends, h1 = eps sin(pi t), T* = 2.
inline Problem reflect(double k = 0.5, double eps = 0.01)
{
    return {phyp::linear_reflect_2x2(),
            phyp::feedback_boundary(2, 1, 2.0, k, k, 0.0, {Harmonic{0, 1, eps, 0.0}})};
}

/// Riemann-invariant Euler with friction and quadratic feedback.
inline Problem euler(double eps = 0.01)
{
    return {phyp::quasilinear_euler_damping(1.4, 0.2, 1.25),
            phyp::feedback_boundary(2, 1, 1.0, 0.5, 0.5, 0.5,
                                    {Harmonic{0, 1, eps, 0.0}, Harmonic{1, 2, 0.5 * eps, 0.3}})};
}

/// Closed-form periodic solution of the damped scalar problem.
inline double damped_scalar_exact(double t, double x, double eps = 0.01, double damping = 0.5)
{
    return eps * std::exp(-damping * x) * std::sin(2.0 * pi * (t - x));
}

/// Scalar spec with speed 1 + u (and zero source).
inline SystemSpec burgers_like(double radius = 0.1)
{
    SystemSpec s;
    s.n = 1;
    s.m = 0;
    s.domain_radius = radius;
    s.A = [](const Vector& u) { return Matrix::Constant(1, 1, 1.0 + u(0)); };
    s.F = [](const Vector& u) -> Vector { return Vector::Zero(u.size()); };
    return s;
}

/// Constant-coefficient spec with the given speeds (diagonal A) and source matrix.
inline SystemSpec linear_spec(const Vector& speeds, int m, const Matrix& g)
{
    SystemSpec s;
    s.n = static_cast<int>(speeds.size());
    s.m = m;
    s.A = [speeds](const Vector&) -> Matrix { return speeds.asDiagonal(); };
    s.F = [g](const Vector& u) -> Vector { return g * u; };
    s.gradF = [g](const Vector&) { return g; };
    return s;
}

/// Brute-force Jacobi iteration of the reflection problem on its straight
/// characteristics: u1(t, x) = b1(t + x - 1), u2(t, x) = b2(t - x) with
/// b1 = h1 + k u2(., 1) and b2 = k u1(., 0) built from the previous iterate.
struct ReflectIterate
{
    double k;
    double eps;

    double u(int level, int comp, double t, double x) const
    {
        if (level == 0)
            return 0.0;
        if (comp == 0) {
            const double tau = t + x - 1.0;
            return eps * std::sin(pi * tau) + k * u(level - 1, 1, tau, 1.0);
        }
        const double tau = t - x;
        return k * u(level - 1, 0, tau, 0.0);
    }
};

/// Steady amplitude of a(t) = h1(t) + k^2 a(t - 2) summed as a series.
inline double reflect_steady_amplitude(double k, double eps)
{
    double best = 0.0;
    for (int j = 0; j < 2000; ++j) {
        const double t = 2.0 * j / 2000.0;
        double a = 0.0, w = 1.0;
        for (int q = 0; q < 200; ++q, w *= k * k)
            a += w * eps * std::sin(pi * (t - 2.0 * q));
        best = std::max(best, std::abs(a));
    }
    return best;
}

} // namespace fixtures

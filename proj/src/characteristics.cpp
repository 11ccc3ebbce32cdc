#include "phyp/characteristics.hpp"

#include "phyp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace phyp {

namespace {

// Split a coordinate into cell index and fraction, snapping to nodes.
void locate(double s, int& cell, double& frac)
{
    const double r = std::round(s);
    if (std::abs(s - r) <= 1e-10 * std::max(1.0, std::abs(s)))
        s = r;
    const double f = std::floor(s);
    cell = static_cast<int>(f);
    frac = s - f;
}

void locate_x(const Field& field, double x, int& k, double& phi)
{
    const double L = field.L();
    if (x < -1e-12 || x > L + 1e-12)
        throw DomainError("interpolation abscissa x = " + std::to_string(x) + " lies outside [0, L]");
    locate(std::clamp(x, 0.0, L) / field.dx(), k, phi);
    if (k >= field.Nx()) {
        k = field.Nx() - 1;
        phi = 1.0;
    }
}

} // namespace

Field::Field(int n, int Nt, int Nx, double T_star, double L)
    : n_(n), Nt_(Nt), Nx_(Nx), T_star_(T_star), L_(L),
      data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(Nt) * static_cast<std::size_t>(Nx + 1), 0.0)
{
    if (n < 1 || Nt < 1 || Nx < 2 || !(T_star > 0.0) || !(L > 0.0))
        throw std::invalid_argument("Field: invalid grid parameters");
}

Vector Field::value(int j, int k) const
{
    Vector v(n_);
    const int jw = wrap(j);
    for (int i = 0; i < n_; ++i)
        v(i) = data_[index(i, jw, k)];
    return v;
}

void Field::set(int j, int k, const Vector& v)
{
    const int jw = wrap(j);
    for (int i = 0; i < n_; ++i)
        data_[index(i, jw, k)] = v(i);
}

double Field::sup_norm() const
{
    double s = 0.0;
    for (double v : data_)
        s = std::max(s, std::abs(v));
    return s;
}

double sup_distance(const Field& a, const Field& b)
{
    if (a.data().size() != b.data().size())
        throw std::invalid_argument("sup_distance: grid mismatch");
    double s = 0.0;
    for (std::size_t q = 0; q < a.data().size(); ++q)
        s = std::max(s, std::abs(a.data()[q] - b.data()[q]));
    return s;
}

Field sample_field(int n, int Nt, int Nx, double T_star, double L, const std::function<Vector(double, double)>& fn)
{
    Field f(n, Nt, Nx, T_star, L);
    for (int j = 0; j < Nt; ++j)
        for (int k = 0; k <= Nx; ++k)
            f.set(j, k, fn(f.t(j), f.x(k)));
    return f;
}

double interpolate(const Field& field, int i, double t, double x)
{
    int k = 0, j = 0;
    double phi = 0.0, theta = 0.0;
    locate_x(field, x, k, phi);
    locate(t / field.dt(), j, theta);
    const double a = (1.0 - theta) * field(i, j, k) + theta * field(i, j + 1, k);
    if (phi == 0.0)
        return a;
    const double b = (1.0 - theta) * field(i, j, k + 1) + theta * field(i, j + 1, k + 1);
    return (1.0 - phi) * a + phi * b;
}

Vector interpolate(const Field& field, double t, double x)
{
    Vector v(field.n());
    for (int i = 0; i < field.n(); ++i)
        v(i) = interpolate(field, i, t, x);
    return v;
}

double interpolate_cubic_t(const Field& field, int i, double t, double x)
{
    int k = 0, j = 0;
    double phi = 0.0, th = 0.0;
    locate_x(field, x, k, phi);
    locate(t / field.dt(), j, th);
    const double wm = -th * (th - 1.0) * (th - 2.0) / 6.0;
    const double w0 = (th + 1.0) * (th - 1.0) * (th - 2.0) / 2.0;
    const double w1 = -(th + 1.0) * th * (th - 2.0) / 2.0;
    const double w2 = (th + 1.0) * th * (th - 1.0) / 6.0;
    auto column = [&](int kk) {
        return wm * field(i, j - 1, kk) + w0 * field(i, j, kk) + w1 * field(i, j + 1, kk) + w2 * field(i, j + 2, kk);
    };
    const double a = column(k);
    if (phi == 0.0)
        return a;
    return (1.0 - phi) * a + phi * column(k + 1);
}

Vector interpolate_cubic_t(const Field& field, double t, double x)
{
    Vector v(field.n());
    for (int i = 0; i < field.n(); ++i)
        v(i) = interpolate_cubic_t(field, i, t, x);
    return v;
}

Field derivative_t(const Field& f)
{
    Field d(f.n(), f.Nt(), f.Nx(), f.T_star(), f.L());
    const double inv = 1.0 / (2.0 * f.dt());
    for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.Nt(); ++j)
            for (int k = 0; k <= f.Nx(); ++k)
                d(i, j, k) = (f(i, j + 1, k) - f(i, j - 1, k)) * inv;
    return d;
}

Field derivative_x(const Field& f)
{
    Field d(f.n(), f.Nt(), f.Nx(), f.T_star(), f.L());
    const double inv = 1.0 / (2.0 * f.dx());
    const int N = f.Nx();
    for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.Nt(); ++j) {
            d(i, j, 0) = (-3.0 * f(i, j, 0) + 4.0 * f(i, j, 1) - f(i, j, 2)) * inv;
            for (int k = 1; k < N; ++k)
                d(i, j, k) = (f(i, j, k + 1) - f(i, j, k - 1)) * inv;
            d(i, j, N) = (3.0 * f(i, j, N) - 4.0 * f(i, j, N - 1) + f(i, j, N - 2)) * inv;
        }
    return d;
}

Vector interpolate_dt(const Field& field, double t, double x)
{
    return interpolate(derivative_t(field), t, x);
}

Vector interpolate_dx(const Field& field, double t, double x)
{
    return interpolate(derivative_x(field), t, x);
}

CharacteristicTrace integrate_characteristic(const SlopeFn& slope, double t0, double x0, double x_end, int steps)
{
    CharacteristicTrace tr;
    tr.xs.reserve(static_cast<std::size_t>(steps) + 1);
    tr.ts.reserve(static_cast<std::size_t>(steps) + 1);
    tr.xs.push_back(x0);
    tr.ts.push_back(t0);
    const double h = (x_end - x0) / steps;
    double t = t0;
    for (int q = 0; q < steps; ++q) {
        const double x = x0 + q * h;
        const double k1 = slope(t, x);
        const double k2 = slope(t + 0.5 * h * k1, x + 0.5 * h);
        const double k3 = slope(t + 0.5 * h * k2, x + 0.5 * h);
        const double k4 = slope(t + h * k3, x + h);
        t += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        tr.xs.push_back(q + 1 == steps ? x_end : x0 + (q + 1) * h);
        tr.ts.push_back(t);
    }
    return tr;
}

CharacteristicTrace trace_characteristic(const Field& field, const SystemSpec& spec, int i, double t0, double x0)
{
    if (i < 1 || i > spec.n)
        throw std::invalid_argument("trace_characteristic: family index out of range");
    if (x0 < -1e-12 || x0 > field.L() + 1e-12)
        throw DomainError("trace_characteristic: x0 outside [0, L]");
    const bool leftward = i <= spec.m;
    const double x_end = leftward ? field.L() : 0.0;

    auto slope = [&](double t, double x) {
        const Vector u = interpolate(field, t, x);
        const double mu = eigen_at(spec, u).mus(i - 1);
        if ((mu < 0.0) != leftward)
            throw SignatureError("characteristic speed changed sign along the trace");
        return mu;
    };

    CharacteristicTrace tr;
    tr.family = i;
    tr.xs.push_back(x0);
    tr.ts.push_back(t0);
    const double h = field.L() / (4.0 * field.Nx());
    const double dir = leftward ? 1.0 : -1.0;
    double x = x0;
    double t = t0;
    while (dir * (x_end - x) > 1e-14 * field.L()) {
        const double step = dir * std::min(h, dir * (x_end - x));
        const double k1 = slope(t, x);
        const double k2 = slope(t + 0.5 * step * k1, x + 0.5 * step);
        const double k3 = slope(t + 0.5 * step * k2, x + 0.5 * step);
        const double k4 = slope(t + step * k3, x + step);
        t += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        x = std::abs(x_end - (x + step)) <= 1e-14 * field.L() ? x_end : x + step;
        tr.xs.push_back(x);
        tr.ts.push_back(t);
    }
    return tr;
}

} // namespace phyp

#pragma once

#include "phyp/system_model.hpp"

#include <functional>
#include <vector>

namespace phyp {

/// Grid function on the periodic strip [0, T*) x [0, L].
///
/// Rows t_j = j T*/Nt for j = 0..Nt-1 (no duplicated seam row), columns
/// x_k = k L/Nx for k = 0..Nx. Storage is component-major so a single
/// component's column (fixed k, varying j) is a strided slice.
class Field
{
public:
    Field() = default;
    Field(int n, int Nt, int Nx, double T_star, double L);

    int n() const { return n_; }
    int Nt() const { return Nt_; }
    int Nx() const { return Nx_; }
    double T_star() const { return T_star_; }
    double L() const { return L_; }
    double dt() const { return T_star_ / Nt_; }
    double dx() const { return L_ / Nx_; }
    double t(int j) const { return j * dt(); }
    double x(int k) const { return k * dx(); }

    /// Component i at (j mod Nt, k).
    double& operator()(int i, int j, int k) { return data_[index(i, wrap(j), k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, wrap(j), k)]; }

    Vector value(int j, int k) const;
    void set(int j, int k, const Vector& v);

    int wrap(int j) const
    {
        const int r = j % Nt_;
        return r < 0 ? r + Nt_ : r;
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// max |u_i(t_j, x_k)| over all components and nodes.
    double sup_norm() const;

private:
    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(Nt_) + static_cast<std::size_t>(j))
                   * static_cast<std::size_t>(Nx_ + 1)
               + static_cast<std::size_t>(k);
    }

    int n_ = 0;
    int Nt_ = 0;
    int Nx_ = 0;
    double T_star_ = 1.0;
    double L_ = 1.0;
    std::vector<double> data_;
};

/// max over components and nodes of |a - b|; grids must match.
double sup_distance(const Field& a, const Field& b);

Field sample_field(int n, int Nt, int Nx, double T_star, double L,
                   const std::function<Vector(double, double)>& fn);

/// Bilinear interpolation, periodic in t. Exact at nodes.
Vector interpolate(const Field& field, double t, double x);
double interpolate(const Field& field, int component, double t, double x);

/// Periodic four-point (cubic Lagrange) interpolation in t, linear in x.
double interpolate_cubic_t(const Field& field, int component, double t, double x);
Vector interpolate_cubic_t(const Field& field, double t, double x);

/// Second-order difference fields: central and periodic in t; central in x
/// with one-sided second-order stencils at x = 0 and x = L.
Field derivative_t(const Field& field);
Field derivative_x(const Field& field);

Vector interpolate_dt(const Field& field, double t, double x);
Vector interpolate_dx(const Field& field, double t, double x);

struct CharacteristicTrace
{
    int family = 0; // 1-based
    std::vector<double> xs;
    std::vector<double> ts; // unwrapped
};

/// Slope dt/dx along a characteristic as a function of (t, x).
using SlopeFn = std::function<double(double, double)>;

/// Classical RK4 in x for dt/dx = slope(t, x) from (t0, x0) to x_end with
/// `steps` equal steps. Returns the visited samples including both ends.
CharacteristicTrace integrate_characteristic(const SlopeFn& slope, double t0, double x0, double x_end, int steps);

/// Traces family i (1-based) of the frozen `field` from (t0, x0) back to its
/// inflow boundary (x = 0 for rightward families, x = L for leftward ones)
/// with step L / (4 Nx) and a final partial step landing on the boundary.
CharacteristicTrace trace_characteristic(const Field& field, const SystemSpec& spec, int i, double t0, double x0);

} // namespace phyp

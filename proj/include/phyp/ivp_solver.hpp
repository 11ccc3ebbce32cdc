#pragma once

#include "phyp/boundary.hpp"
#include "phyp/characteristics.hpp"
#include "phyp/periodic_solver.hpp"
#include "phyp/system_model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace phyp {

/// CFL number used when `run` picks the time step.
inline constexpr double kDefaultCfl = 0.4;
/// Largest CFL number accepted by `step` (linear stability limit of Heun
/// with the second-order upwind stencil).
inline constexpr double kMaxCfl = 0.5;

/// Spatial profile at time t: an n x (Nx+1) matrix, column k at x = k dx.
struct IvpState
{
    double t = 0.0;
    Matrix u;
    double dx = 0.0;
};

struct Trajectory
{
    std::vector<double> times;
    std::vector<Matrix> profiles;
    double dx = 0.0;
    bool halted = false;
    std::string diagnostic;
};

struct StabilityReport
{
    std::vector<std::pair<double, double>> phi_samples;
    std::vector<std::pair<double, double>> dphi_samples;
    RateFit fitted_decay;            // beta_S per T0
    RateFit fitted_derivative_decay; // same fit on the derivative deviation
    double T0 = 0.0;
    bool exact_match = false;
    bool monotone_envelope = true; // Phi((k+1) T0) <= Phi(k T0) for k >= 2
};

struct CompatibilityResidual
{
    double c0 = 0.0;
    double c1 = 0.0;
};

/// Semi-discrete right-hand side -sum_i lambda_i (l_i . D_i u) r_i + F(u),
/// with D_i the second-order upwind difference for family i.
Matrix ivp_rhs(const Matrix& u, double dx, const SystemSpec& spec);

/// Overwrites the incoming components at x = 0 and x = L from the boundary maps.
void impose_boundary(Matrix& u, double t, const SystemSpec& spec, const BoundarySpec& bspec);

/// One Heun step; boundary maps are imposed after each stage.
IvpState step(const IvpState& state, double dt, const SystemSpec& spec, const BoundarySpec& bspec);

/// Largest step allowed by the CFL number for the given profile.
double stable_dt(const Matrix& u, double dx, const SystemSpec& spec, double cfl = kDefaultCfl);

Trajectory run(const Matrix& u0, const SystemSpec& spec, const BoundarySpec& bspec, double t_end,
               double record_every);

StabilityReport stability_metrics(const Trajectory& traj, const Field& periodic, const SystemSpec& spec);

/// Fit of samples (t, y) to y ~ C beta^(t / T0) using samples with t >= 2 T0,
/// restricted to integer multiples of T0 when at least two are present.
RateFit fit_decay(const std::vector<std::pair<double, double>>& samples, double T0);

/// Smooth bump exp(1 - 1/(1 - s^2)), s = 2x/L - 1, vanishing outside (0, L).
double bump(double x, double L);

/// u^(P)(0, .) plus amplitude * bump in every component, with signs in {-1, +1}.
Matrix perturbed_initial_data(const Field& periodic, double amplitude, const std::vector<double>& signs);

/// Zeroth and first order corner compatibility of u0 with the boundary maps at t = 0.
CompatibilityResidual compatibility_residual(const Matrix& u0, double dx, const SystemSpec& spec,
                                             const BoundarySpec& bspec);

} // namespace phyp

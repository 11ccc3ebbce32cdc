#pragma once

#include "phyp/system_model.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace phyp {

/// One incoming-component boundary map u_i = G_i(h_i, outgoing components).
struct BoundaryMap
{
    std::function<double(double, const Vector&)> value;
    /// Optional analytic derivatives; central differences are used when empty.
    std::function<Vector(double, const Vector&)> grad_u;
    std::function<double(double, const Vector&)> grad_h;
};

using Signal = std::function<double(double)>;

/// Boundary maps at both ends plus the T*-periodic forcing signals.
///
/// `left` holds G_s for s = m+1..n (arguments u_1..u_m), `right` holds G_r
/// for r = 1..m (arguments u_{m+1}..u_n). Signal `h[i]` drives component i.
struct BoundarySpec
{
    std::vector<BoundaryMap> left;
    std::vector<BoundaryMap> right;
    std::vector<Signal> h;
    std::vector<Signal> h_prime;  // optional, same size as h when present
    std::vector<Signal> h_second; // optional
    double T_star = 1.0;
    double h_c1_bound = 0.0;
    std::optional<double> h_second_deriv_bound;
};

struct ThetaData
{
    Matrix theta_matrix;
    double theta = 0.0;
    Vector optimal_scaling;
};

struct ForcingReport
{
    std::vector<double> c1_norms; // max(sup|h_i|, sup|h_i'|)
    double h_c1_bound = 0.0;
    double periodicity_residual = 0.0;
    double dG_dh_max = 0.0;
    bool rescaled = false;
    double rescale_factor = 1.0;
    std::optional<double> h_second_deriv_bound;
    /// Equal to the input unless `rescaled`, then h~ = 2 M0' h and G~(h~, u) = G(h~ / (2 M0'), u).
    BoundarySpec spec;
};

enum class Side { left, right };

/// Number of samples per period used for sup norms of the forcing.
inline constexpr int kForcingSamples = 4096;

Matrix theta_matrix(const BoundarySpec& bspec, int n, int m);

/// Spectral radius of |Theta| by shifted power iteration; Gamma from the Perron vector.
ThetaData theta_by_spectral_radius(const Matrix& theta);

/// Damped Newton descent over log gamma_i on a smoothed max-row-sum
/// objective, with the smoothing tightened by continuation.
ThetaData theta_by_scaling_descent(const Matrix& theta);

/// Minimal characterizing number; both methods run and must agree within 1e-6.
ThetaData minimal_characterizing_number(const Matrix& theta);

/// max-row-sum norm of Gamma Theta Gamma^{-1}.
double scaled_row_norm(const Matrix& theta, const Vector& gamma);

ForcingReport validate_forcing(const BoundarySpec& bspec, int n, int m);

Vector eval_boundary(const BoundarySpec& bspec, int n, int m, Side side, double t, const Vector& outgoing);

} // namespace phyp

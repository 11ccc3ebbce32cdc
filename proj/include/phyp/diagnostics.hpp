#pragma once

#include "phyp/characteristics.hpp"
#include "phyp/system_model.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>

namespace phyp {

struct FieldNorms
{
    double c0 = 0.0;
    double c1 = 0.0;

    bool operator==(const FieldNorms&) const = default;
};

/// Exponential weights W_r(x) = exp(g_rr (L - x)), W_s(x) = exp(-g_ss x).
struct WeightProfile
{
    Vector rates; // diagonal of g-tilde
    double L = 1.0;
    int m = 0;
    double M3 = 1.0;

    double W(int i, double x) const; // i is 0-based
};

struct Certificate
{
    double theta = 0.0;
    double K = 0.0;
    double L = 0.0;
    double M3 = 1.0;
    bool ok = false;
    double margin = 0.0;

    bool operator==(const Certificate&) const = default;
};

struct RegularityReport
{
    double d2t = 0.0;
    double dtdx = 0.0;
    double d2x = 0.0;
    /// fine / coarse for (d2t, dtdx, d2x), filled by `compare_regularity`.
    std::optional<std::array<double, 3>> grid_pair_ratio;
    std::optional<double> forcing_second_derivative_bound;

    bool operator==(const RegularityReport&) const = default;
};

FieldNorms norms(const Field& field);

WeightProfile weights(const Matrix& gtilde, double L, int n, int m);

Certificate smallness_certificate(double theta, double K, double L, double M3);

/// sup over interior nodes of |u_t + A(u) u_x - F(u)| with second-order stencils.
double pde_residual(const Field& field, const SystemSpec& spec);

RegularityReport regularity_measurements(const Field& field,
                                         std::optional<double> forcing_second_derivative_bound = std::nullopt);

/// Copies `fine` and records fine/coarse ratios of the three measurements.
RegularityReport compare_regularity(const RegularityReport& coarse, const RegularityReport& fine);

/// Observed order log2(coarse / fine) of an error quantity under grid halving.
double observed_order(double coarse_error, double fine_error);

} // namespace phyp

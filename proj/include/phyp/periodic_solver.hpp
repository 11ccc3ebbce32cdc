#pragma once

#include "phyp/boundary.hpp"
#include "phyp/characteristics.hpp"
#include "phyp/diagnostics.hpp"
#include "phyp/system_model.hpp"

#include <optional>
#include <vector>

namespace phyp {

struct IterationConfig
{
    int Nt = 128;
    int Nx = 128;
    std::optional<double> K; // defaults to default_K(g0)
    double tol = 1e-10;
    int max_iter = 200;

    void validate() const;
};

/// Least-squares fit of d_l ~ C beta^l.
struct RateFit
{
    enum class Status { ok, insufficient_data, converged_immediately };
    Status status = Status::insufficient_data;
    double beta = 0.0;
    int points = 0;

    bool valid() const { return status == Status::ok; }
    bool operator==(const RateFit&) const = default;
};

struct IterationReport
{
    std::vector<double> deltas;    // C0 distance between successive iterates
    std::vector<double> c1_deltas; // informational
    RateFit fitted_beta;
    int iterations = 0;
    bool converged = false;
    Certificate certificate;
};

/// Quantities of the linearized scheme that depend only on the origin.
struct IterationContext
{
    int n = 0;
    int m = 0;
    double K = 0.0;
    Vector mu0;
    Matrix g0;
    Matrix gtilde;
};

IterationContext make_context(const SystemSpec& spec, std::optional<double> K = std::nullopt);

/// One sweep of the linearized transport system.
///
/// Every family is marched from its inflow boundary cell by cell: the
/// characteristic of `prev` through each target node is traced back across
/// one cell with four RK4 steps, the upstream value is read with a periodic
/// cubic in t, and du/dx = g_ii u + R_i is integrated exactly in the diagonal
/// term with the trapezoidal rule on the forcing R_i. Boundary values use
/// `prev` only.
Field linearized_step(const Field& prev, const SystemSpec& spec, const BoundarySpec& bspec,
                      const IterationContext& ctx);

Field linearized_step(const Field& prev, const SystemSpec& spec, const BoundarySpec& bspec,
                      const IterationConfig& cfg);

struct PeriodicSolution
{
    Field field;
    IterationReport report;
};

/// Fixed-point iteration from the zero field until the C0 delta drops below cfg.tol.
PeriodicSolution solve_periodic(const SystemSpec& spec, const BoundarySpec& bspec, const IterationConfig& cfg);

RateFit fit_contraction_rate(const std::vector<double>& deltas);

/// Row t = 0 of the field as an n x (Nx+1) matrix.
Matrix extract_initial_data(const Field& field);

} // namespace phyp

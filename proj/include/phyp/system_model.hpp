#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phyp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using MatrixField = std::function<Matrix(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

/// Numerical tolerances used when checking the structural hypotheses.
namespace tol {
inline constexpr double eigen_residual = 1e-8;
inline constexpr double biorthonormality = 1e-10;
inline constexpr double origin = 1e-12;
} // namespace tol

/// The quasilinear system u_t + A(u) u_x = F(u) on [0, L].
///
/// The first `m` families travel leftward (negative speeds), the remaining
/// `n - m` rightward. `gradF` may be left empty, in which case a fourth-order
/// central difference is used.
struct SystemSpec
{
    int n = 1;
    int m = 0;
    MatrixField A;
    VectorField F;
    MatrixField gradF;
    double domain_radius = 0.1;
    double L = 1.0;
};

struct EigenStructure
{
    Vector lambdas;
    Matrix left;  // rows l_i
    Matrix right; // columns r_i
    Vector mus;
};

struct SourceLinearization
{
    Matrix g0;
    double K = 0.0;
    Matrix gtilde;
    double mu_max = 0.0;
};

struct ValidationReport
{
    int samples = 0;
    bool signature_constant = true;
    double mu_max = 0.0;
    bool needs_rescaling = false;
    bool a0_diagonal = true;
    bool f0_zero = true;
    double max_eigen_residual = 0.0;
    double max_biorthonormality_error = 0.0;

    bool ok() const { return signature_constant && !needs_rescaling && a0_diagonal && f0_zero; }
    bool operator==(const ValidationReport&) const = default;
};

/// Eigen-decomposition with l_i r_j = delta_ij and |r_i| = 1.
///
/// Eigenvalues are ordered negatives first, each group ascending; the
/// largest-magnitude entry of every r_i is made positive.
EigenStructure eigen_decompose(const Matrix& A_val, int m);

EigenStructure eigen_at(const SystemSpec& spec, const Vector& u);

/// Jacobian of F at u (user-supplied or fourth-order finite differences).
Matrix source_gradient(const SystemSpec& spec, const Vector& u);

/// Deterministic low-discrepancy points (Halton) filling the ball |u| <= radius.
std::vector<Vector> sample_ball(int dim, double radius, int count);

ValidationReport validate_hyperbolicity(const SystemSpec& spec, int samples = 256);

/// max_i sup_U |1 / lambda_i| over the sampled neighbourhood.
double measure_mu_max(const SystemSpec& spec, int samples = 256);

/// Factor c applied to A and F by `rescale_time`; periods must be divided by it.
double time_rescale_factor(const SystemSpec& spec, int samples = 256);

/// Rescales time so that mu_max = 1 when it exceeds 1, identity otherwise.
/// The caller divides every boundary period by `time_rescale_factor(spec)`.
SystemSpec rescale_time(const SystemSpec& spec, int samples = 256);

/// Constant matrix R(0) of right eigenvectors; substituting u = R(0) v makes
/// A(0) diagonal. Offered for explicit opt-in, never applied silently.
Matrix diagonalizing_transform(const SystemSpec& spec);

double minimal_K(const Matrix& g0);

/// The K used when none is given: 0 if g0 is strictly diagonally dominant,
/// otherwise minimal_K(g0) + 1e-6.
double default_K(const Matrix& g0);

Matrix coupling_B(const SystemSpec& spec, const Vector& u);
Matrix coupling_B(const EigenStructure& eig);

Matrix gtilde_matrix(const SystemSpec& spec, double K);

/// Throws DominanceError unless rows r <= m satisfy g_rr > sum |g_rj| and
/// rows s > m satisfy -g_ss > sum |g_sj|.
void check_dominance(const Matrix& gtilde, int m);

SourceLinearization linearize_source(const SystemSpec& spec, std::optional<double> K = std::nullopt,
                                     int samples = 256);

/// The quadratic remainder mu_i(u) f_i(u) - sum_j mu_i(0) g_ij(0) u_j - sum_j B_ij(u) mu_i(u) f_j(u).
Vector g_nonlinear(const SystemSpec& spec, const Vector& u);

/// Same quantity with the origin data (mu(0), g0) and the eigenstructure at u
/// already available; used in the solver hot loop.
Vector g_nonlinear(const SystemSpec& spec, const Vector& u, const EigenStructure& eig,
                   const Vector& mu0, const Matrix& g0);

bool in_domain(const SystemSpec& spec, const Vector& u);

} // namespace phyp

#include "phyp/system_model.hpp"

#include "phyp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace phyp {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(int base, long index)
{
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

bool is_diagonal(const Matrix& A, double eps)
{
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (i != j && std::abs(A(i, j)) > eps)
                return false;
    return true;
}

void fix_sign(Eigen::Ref<Vector> r)
{
    Eigen::Index imax = 0;
    r.cwiseAbs().maxCoeff(&imax);
    if (r(imax) < 0.0)
        r = -r;
}

} // namespace

EigenStructure eigen_decompose(const Matrix& A_val, int m)
{
    const auto n = A_val.rows();
    if (n == 0 || A_val.cols() != n)
        throw HyperbolicityError("coefficient matrix must be square and non-empty");
    if (!A_val.allFinite())
        throw HyperbolicityError("coefficient matrix has non-finite entries");

    const double scale = std::max(1.0, A_val.cwiseAbs().maxCoeff());
    Vector lam(n);
    Matrix R(n, n);

    if (is_diagonal(A_val, 0.0)) {
        lam = A_val.diagonal();
        R.setIdentity();
    } else {
        Eigen::EigenSolver<Matrix> es(A_val);
        if (es.info() != Eigen::Success)
            throw HyperbolicityError("eigenvalue computation failed");
        const auto& ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(ev(i).imag()) > 1e-12 * scale)
                throw HyperbolicityError("complex eigenvalue encountered");
            lam(i) = ev(i).real();
        }
        R = es.eigenvectors().real();
    }

    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(lam(i)) <= 1e-14 * scale)
            throw HyperbolicityError("zero eigenvalue encountered");

    const auto negatives = (lam.array() < 0.0).count();
    if (negatives != m) {
        std::ostringstream os;
        os << "eigenvalue signature (" << negatives << ", " << n - negatives << ") differs from expected ("
           << m << ", " << n - m << ")";
        throw SignatureError(os.str());
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const bool na = lam(a) < 0.0;
        const bool nb = lam(b) < 0.0;
        if (na != nb)
            return na;
        return lam(a) < lam(b);
    });

    EigenStructure out;
    out.lambdas.resize(n);
    out.right.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.lambdas(k) = lam(order[static_cast<std::size_t>(k)]);
        out.right.col(k) = R.col(order[static_cast<std::size_t>(k)]).normalized();
        fix_sign(out.right.col(k));
    }

    Eigen::PartialPivLU<Matrix> lu(out.right);
    if (!(lu.rcond() > 1e-12))
        throw HyperbolicityError("eigenvectors are (numerically) linearly dependent");
    out.left = lu.inverse();
    out.mus = out.lambdas.cwiseInverse();
    return out;
}

EigenStructure eigen_at(const SystemSpec& spec, const Vector& u)
{
    return eigen_decompose(spec.A(u), spec.m);
}

Matrix source_gradient(const SystemSpec& spec, const Vector& u)
{
    if (spec.gradF)
        return spec.gradF(u);
    const auto n = u.size();
    const double h = 1e-5 * std::max(1.0, u.cwiseAbs().maxCoeff());
    Matrix g(n, n);
    Vector e = Vector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        e.setZero();
        e(j) = h;
        g.col(j) = (-spec.F(u + 2.0 * e) + 8.0 * spec.F(u + e) - 8.0 * spec.F(u - e) + spec.F(u - 2.0 * e))
                   / (12.0 * h);
    }
    return g;
}

std::vector<Vector> sample_ball(int dim, double radius, int count)
{
    if (dim > static_cast<int>(std::size(kPrimes)))
        throw std::invalid_argument("sample_ball: dimension too large for Halton bases");
    std::vector<Vector> pts;
    pts.reserve(static_cast<std::size_t>(count));
    if (count <= 0)
        return pts;
    pts.push_back(Vector::Zero(dim));
    for (long idx = 1; static_cast<int>(pts.size()) < count; ++idx) {
        Vector p(dim);
        for (int d = 0; d < dim; ++d)
            p(d) = 2.0 * radical_inverse(kPrimes[d], idx) - 1.0;
        if (p.squaredNorm() <= 1.0)
            pts.push_back(radius * p);
    }
    return pts;
}

bool in_domain(const SystemSpec& spec, const Vector& u)
{
    return u.norm() <= spec.domain_radius * (1.0 + 1e-12);
}

ValidationReport validate_hyperbolicity(const SystemSpec& spec, int samples)
{
    ValidationReport rep;
    const Vector zero = Vector::Zero(spec.n);

    const Vector f0 = spec.F(zero);
    if (f0.cwiseAbs().maxCoeff() > tol::origin)
        throw SourceOriginError("F(0) differs from zero by " + std::to_string(f0.cwiseAbs().maxCoeff()));
    rep.f0_zero = true;

    const Matrix a0 = spec.A(zero);
    const auto eig0 = eigen_decompose(a0, spec.m);
    rep.a0_diagonal = is_diagonal(a0, tol::origin)
                      && (eig0.right - Matrix::Identity(spec.n, spec.n)).cwiseAbs().maxCoeff() <= tol::origin;

    const auto pts = sample_ball(spec.n, spec.domain_radius, samples);
    rep.samples = static_cast<int>(pts.size());
    for (const auto& u : pts) {
        const Matrix a = spec.A(u);
        EigenStructure eig;
        try {
            eig = eigen_decompose(a, spec.m);
        } catch (const SignatureError& e) {
            rep.signature_constant = false;
            throw SignatureError(std::string("signature changes inside the neighbourhood: ") + e.what());
        } catch (const HyperbolicityError& e) {
            // A real eigenvalue hitting zero away from the origin is where the signature flips.
            const auto ev = a.eigenvalues();
            const bool real = (ev.imag().array().abs() <= 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff())).all();
            if (real) {
                rep.signature_constant = false;
                throw SignatureError(std::string("an eigenvalue vanishes inside the neighbourhood: ") + e.what());
            }
            throw;
        }
        rep.mu_max = std::max(rep.mu_max, eig.mus.cwiseAbs().maxCoeff());
        for (int i = 0; i < spec.n; ++i) {
            const double res_l = (eig.left.row(i) * a - eig.lambdas(i) * eig.left.row(i)).cwiseAbs().maxCoeff();
            const double res_r = (a * eig.right.col(i) - eig.lambdas(i) * eig.right.col(i)).cwiseAbs().maxCoeff();
            rep.max_eigen_residual = std::max({rep.max_eigen_residual, res_l, res_r});
        }
        const double bio = (eig.left * eig.right - Matrix::Identity(spec.n, spec.n)).cwiseAbs().maxCoeff();
        rep.max_biorthonormality_error = std::max(rep.max_biorthonormality_error, bio);
    }
    rep.needs_rescaling = rep.mu_max > 1.0 + 1e-12;
    return rep;
}

double measure_mu_max(const SystemSpec& spec, int samples)
{
    double mu = 0.0;
    for (const auto& u : sample_ball(spec.n, spec.domain_radius, samples))
        mu = std::max(mu, eigen_at(spec, u).mus.cwiseAbs().maxCoeff());
    return mu;
}

double time_rescale_factor(const SystemSpec& spec, int samples)
{
    const double mu = measure_mu_max(spec, samples);
    if (!std::isfinite(mu))
        throw HyperbolicityError("mu_max is infinite");
    return mu > 1.0 ? mu : 1.0;
}

SystemSpec rescale_time(const SystemSpec& spec, int samples)
{
    const double c = time_rescale_factor(spec, samples);
    if (c == 1.0)
        return spec;
    SystemSpec out = spec;
    out.A = [A = spec.A, c](const Vector& u) -> Matrix { return c * A(u); };
    out.F = [F = spec.F, c](const Vector& u) -> Vector { return c * F(u); };
    if (spec.gradF)
        out.gradF = [G = spec.gradF, c](const Vector& u) -> Matrix { return c * G(u); };
    return out;
}

Matrix diagonalizing_transform(const SystemSpec& spec)
{
    return eigen_at(spec, Vector::Zero(spec.n)).right;
}

double minimal_K(const Matrix& g0)
{
    double k = 0.0;
    for (Eigen::Index i = 0; i < g0.rows(); ++i) {
        double row = g0(i, i);
        for (Eigen::Index j = 0; j < g0.cols(); ++j)
            if (j != i)
                row += std::abs(g0(i, j));
        k = std::max(k, row);
    }
    return k;
}

double default_K(const Matrix& g0)
{
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < g0.rows(); ++i) {
        double row = g0(i, i);
        for (Eigen::Index j = 0; j < g0.cols(); ++j)
            if (j != i)
                row += std::abs(g0(i, j));
        worst = std::max(worst, row);
    }
    return worst < 0.0 ? 0.0 : minimal_K(g0) + 1e-6;
}

Matrix coupling_B(const EigenStructure& eig)
{
    const auto n = eig.left.rows();
    Matrix B = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lii = eig.left(i, i);
        if (std::abs(lii) < 1e-12)
            throw DegenerateEigenbasisError("l_ii vanishes for family " + std::to_string(i + 1));
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i)
                B(i, j) = -eig.left(i, j) / lii;
    }
    return B;
}

Matrix coupling_B(const SystemSpec& spec, const Vector& u)
{
    return coupling_B(eigen_at(spec, u));
}

void check_dominance(const Matrix& gt, int m)
{
    for (Eigen::Index i = 0; i < gt.rows(); ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < gt.cols(); ++j)
            if (j != i)
                off += std::abs(gt(i, j));
        const double diag = i < m ? gt(i, i) : -gt(i, i);
        if (!(diag > off)) {
            std::ostringstream os;
            os << "row " << i + 1 << " of g-tilde is not diagonally dominant (" << diag << " <= " << off
               << "); K is too small";
            throw DominanceError(os.str());
        }
    }
}

Matrix gtilde_matrix(const SystemSpec& spec, double K)
{
    if (K < 0.0)
        throw DominanceError("K must be nonnegative");
    const Vector zero = Vector::Zero(spec.n);
    const Vector mu0 = eigen_at(spec, zero).mus;
    const Matrix g0 = source_gradient(spec, zero);
    Matrix gt = mu0.asDiagonal() * g0;
    gt.diagonal() -= K * mu0;
    check_dominance(gt, spec.m);
    return gt;
}

SourceLinearization linearize_source(const SystemSpec& spec, std::optional<double> K, int samples)
{
    SourceLinearization out;
    out.g0 = source_gradient(spec, Vector::Zero(spec.n));
    out.K = K.value_or(default_K(out.g0));
    out.gtilde = gtilde_matrix(spec, out.K);
    out.mu_max = measure_mu_max(spec, samples);
    return out;
}

Vector g_nonlinear(const SystemSpec& spec, const Vector& u, const EigenStructure& eig, const Vector& mu0,
                   const Matrix& g0)
{
    const Vector f = spec.F(u);
    const Matrix B = coupling_B(eig);
    Vector out = eig.mus.cwiseProduct(f) - mu0.cwiseProduct(g0 * u);
    out -= eig.mus.cwiseProduct(B * f);
    return out;
}

Vector g_nonlinear(const SystemSpec& spec, const Vector& u)
{
    if (!in_domain(spec, u))
        throw DomainError("state lies outside the neighbourhood U");
    const Vector zero = Vector::Zero(spec.n);
    return g_nonlinear(spec, u, eigen_at(spec, u), eigen_at(spec, zero).mus, source_gradient(spec, zero));
}

} // namespace phyp

#include "phyp/boundary.hpp"

#include "phyp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace phyp {

namespace {

constexpr double kFdStep = 1e-6;

double partial_u(const BoundaryMap& g, double hval, const Vector& u, Eigen::Index k)
{
    if (g.grad_u)
        return g.grad_u(hval, u)(k);
    Vector up = u, um = u;
    up(k) += kFdStep;
    um(k) -= kFdStep;
    return (g.value(hval, up) - g.value(hval, um)) / (2.0 * kFdStep);
}

double partial_h(const BoundaryMap& g, double hval, const Vector& u)
{
    if (g.grad_h)
        return g.grad_h(hval, u);
    return (g.value(hval + kFdStep, u) - g.value(hval - kFdStep, u)) / (2.0 * kFdStep);
}

// reach(i, j): j can be reached from i along nonzero entries.
std::vector<std::vector<bool>> reachability(const Matrix& M)
{
    const auto n = static_cast<std::size_t>(M.rows());
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        r[i][i] = true;
        for (std::size_t j = 0; j < n; ++j)
            if (M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0)
                r[i][j] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (r[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (r[k][j])
                        r[i][j] = true;
    return r;
}

struct PerronResult
{
    double rho;
    Vector v;
};

// Shifted power iteration on I + M for an irreducible nonnegative M; stops on
// the Collatz-Wielandt bracket min (Mv)_i / v_i <= rho <= max (Mv)_i / v_i.
PerronResult perron(const Matrix& M)
{
    const auto n = M.rows();
    Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
    constexpr int kMaxSteps = 100000;
    for (int it = 0; it < kMaxSteps; ++it) {
        const Vector mv = M * v;
        const Vector q = mv.cwiseQuotient(v);
        const double lo = q.minCoeff();
        const double hi = q.maxCoeff();
        if (hi - lo <= 1e-14 * std::max(hi, 1e-300) || hi == 0.0)
            return {hi, v};
        v = (v + mv) / (v + mv).sum();
    }
    throw ConvergenceError("power iteration did not converge after 1e5 steps");
}

} // namespace

Matrix theta_matrix(const BoundarySpec& bspec, int n, int m)
{
    if (static_cast<int>(bspec.left.size()) != n - m || static_cast<int>(bspec.right.size()) != m)
        throw BoundaryMapError("boundary map count does not match (n, m)");
    Matrix th = Matrix::Zero(n, n);
    const Vector zl = Vector::Zero(m);
    const Vector zr = Vector::Zero(n - m);
    for (int q = 0; q < n - m; ++q)
        for (int r = 0; r < m; ++r)
            th(m + q, r) = partial_u(bspec.left[static_cast<std::size_t>(q)], 0.0, zl, r);
    for (int r = 0; r < m; ++r)
        for (int q = 0; q < n - m; ++q)
            th(r, m + q) = partial_u(bspec.right[static_cast<std::size_t>(r)], 0.0, zr, q);
    if (!th.allFinite())
        throw BoundaryMapError("non-finite derivative of a boundary map at the origin");
    return th;
}

double scaled_row_norm(const Matrix& theta, const Vector& gamma)
{
    double best = 0.0;
    for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < theta.cols(); ++j)
            row += std::abs(gamma(i) * theta(i, j) / gamma(j));
        best = std::max(best, row);
    }
    return best;
}

ThetaData theta_by_spectral_radius(const Matrix& theta)
{
    const auto n = theta.rows();
    ThetaData out;
    out.theta_matrix = theta;
    const Matrix M = theta.cwiseAbs();
    if (n == 0)
        return out;

    const auto reach = reachability(M);
    bool irreducible = true;
    for (const auto& row : reach)
        irreducible = irreducible && std::all_of(row.begin(), row.end(), [](bool b) { return b; });

    if (irreducible) {
        const auto pr = perron(M);
        out.optimal_scaling = pr.v.cwiseInverse();
        out.optimal_scaling /= out.optimal_scaling.maxCoeff();
        out.theta = scaled_row_norm(theta, out.optimal_scaling);
        return out;
    }

    // Reducible: rho is the largest spectral radius over the strongly
    // connected components. The infimum is generally not attained, so the
    // returned scaling comes from the descent route.
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    double rho = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (done[static_cast<std::size_t>(i)])
            continue;
        std::vector<Eigen::Index> comp;
        for (Eigen::Index j = 0; j < n; ++j)
            if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                && reach[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
                comp.push_back(j);
                done[static_cast<std::size_t>(j)] = true;
            }
        Matrix block(static_cast<Eigen::Index>(comp.size()), static_cast<Eigen::Index>(comp.size()));
        for (std::size_t a = 0; a < comp.size(); ++a)
            for (std::size_t b = 0; b < comp.size(); ++b)
                block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = M(comp[a], comp[b]);
        if (block.size() == 1)
            rho = std::max(rho, block(0, 0));
        else
            rho = std::max(rho, perron(block).rho);
    }
    out.theta = rho;
    out.optimal_scaling = theta_by_scaling_descent(theta).optimal_scaling;
    return out;
}

ThetaData theta_by_scaling_descent(const Matrix& theta)
{
    const auto n = theta.rows();
    ThetaData out;
    out.theta_matrix = theta;
    const Matrix M = theta.cwiseAbs();
    Vector s = Vector::Zero(n);
    if (n == 0 || M.maxCoeff() == 0.0) {
        out.optimal_scaling = Vector::Ones(n);
        return out;
    }

    // Scaled entries e_kj = M_kj exp(s_k - s_j); row_k is their row sum.
    auto entries = [&](const Vector& x) {
        Matrix e(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index j = 0; j < n; ++j)
                e(k, j) = M(k, j) * std::exp(x(k) - x(j));
        return e;
    };
    // Smoothed max  tau * log sum_k row_k^(1/tau), evaluated in log space.
    auto objective = [&](const Vector& x, double tau) {
        const Vector rows = entries(x).rowwise().sum();
        double top = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < n; ++k)
            if (rows(k) > 0.0)
                top = std::max(top, std::log(rows(k)));
        double acc = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
            if (rows(k) > 0.0)
                acc += std::exp((std::log(rows(k)) - top) / tau);
        return top + tau * std::log(acc);
    };
    // With x = exp(-s), row_k = (M x)_k / x_k, so min row <= theta <= max row.
    auto gap_closed = [&](const Vector& x) {
        const Vector rows = entries(x).rowwise().sum();
        return rows.minCoeff() > 0.0 && std::log(rows.maxCoeff() / rows.minCoeff()) < 1e-12;
    };

    // Reducible matrices approach the infimum only as some log-scalings
    // diverge; the box keeps exp() finite while leaving cross terms of order
    // exp(-2 kBox / n), far below the agreement tolerance.
    constexpr double kBox = 150.0;
    constexpr double kMaxStep = 10.0;
    for (double tau = 1.0; tau >= 1e-10 && !gap_closed(s); tau *= 0.1) {
        for (int it = 0; it < 200; ++it) {
            const Matrix e = entries(s);
            const Vector rows = e.rowwise().sum();
            Vector phi = Vector::Constant(n, -std::numeric_limits<double>::infinity());
            for (Eigen::Index k = 0; k < n; ++k)
                if (rows(k) > 0.0)
                    phi(k) = std::log(rows(k));
            Vector w = ((phi.array() - phi.maxCoeff()) / tau).exp();
            w /= w.sum();

            // d phi_k / d s_c = delta_kc - p_kc, with p_k the row-normalized entries.
            Matrix J = Matrix::Zero(n, n);
            Matrix H = Matrix::Zero(n, n);
            for (Eigen::Index k = 0; k < n; ++k) {
                if (!(rows(k) > 0.0))
                    continue;
                const Vector p = e.row(k).transpose() / rows(k);
                J.row(k) = -p.transpose();
                J(k, k) += 1.0;
                H += w(k) * (Matrix(p.asDiagonal()) - p * p.transpose());
            }
            const Vector grad = J.transpose() * w;
            H += (J.transpose() * w.asDiagonal() * J - grad * grad.transpose()) / tau;
            if (grad.lpNorm<Eigen::Infinity>() < 1e-15)
                break;

            // The objective is invariant under s + c 1; pin that direction.
            const double scale = std::max(H.diagonal().maxCoeff(), 1e-300);
            const Matrix Hp = H + Matrix::Constant(n, n, scale / static_cast<double>(n))
                              + 1e-12 * scale * Matrix::Identity(n, n);
            Vector dir = -Hp.ldlt().solve(grad);
            if (!dir.allFinite() || grad.dot(dir) >= 0.0)
                dir = -grad;
            if (dir.lpNorm<Eigen::Infinity>() > kMaxStep)
                dir *= kMaxStep / dir.lpNorm<Eigen::Infinity>();

            const double f0 = objective(s, tau);
            double step = 1.0;
            Vector trial = s;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
                trial = (s + step * dir).cwiseMax(-kBox).cwiseMin(kBox);
                if (objective(trial, tau) <= f0 + 1e-4 * step * grad.dot(dir)) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                break;
            const double moved = (trial - s).lpNorm<Eigen::Infinity>();
            s = trial;
            if (moved < 1e-13 || gap_closed(s))
                break;
        }
    }
    out.optimal_scaling = (s.array() - s.maxCoeff()).exp();
    out.theta = scaled_row_norm(theta, out.optimal_scaling);
    return out;
}

ThetaData minimal_characterizing_number(const Matrix& theta)
{
    auto spectral = theta_by_spectral_radius(theta);
    const auto descent = theta_by_scaling_descent(theta);
    if (std::abs(spectral.theta - descent.theta) > 1e-6) {
        std::ostringstream os;
        os << "theta estimates disagree: spectral radius " << spectral.theta << " vs scaling descent "
           << descent.theta;
        throw ConvergenceError(os.str());
    }
    return spectral;
}

ForcingReport validate_forcing(const BoundarySpec& bspec, int n, int m)
{
    if (static_cast<int>(bspec.h.size()) != n)
        throw BoundaryMapError("expected one forcing signal per component");
    if (!(bspec.T_star > 0.0))
        throw PeriodicityError("period T* must be positive");

    ForcingReport rep;
    const double T = bspec.T_star;
    const double dt = T / kForcingSamples;
    const double fd = 1e-5 * T;
    double second = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto& h = bspec.h[static_cast<std::size_t>(i)];
        const bool has_prime = bspec.h_prime.size() == bspec.h.size() && bspec.h_prime[static_cast<std::size_t>(i)];
        const bool has_second
            = bspec.h_second.size() == bspec.h.size() && bspec.h_second[static_cast<std::size_t>(i)];
        double sup = 0.0, dsup = 0.0;
        for (int k = 0; k < kForcingSamples; ++k) {
            const double t = k * dt;
            const double v = h(t);
            sup = std::max(sup, std::abs(v));
            const double d = has_prime ? bspec.h_prime[static_cast<std::size_t>(i)](t)
                                       : (h(t + fd) - h(t - fd)) / (2.0 * fd);
            dsup = std::max(dsup, std::abs(d));
            rep.periodicity_residual = std::max(rep.periodicity_residual, std::abs(h(t + T) - v));
            if (has_second)
                second = std::max(second, std::abs(bspec.h_second[static_cast<std::size_t>(i)](t)));
        }
        rep.c1_norms.push_back(std::max(sup, dsup));
        rep.h_c1_bound = std::max(rep.h_c1_bound, rep.c1_norms.back());
    }
    if (rep.periodicity_residual > 1e-8) {
        std::ostringstream os;
        os << "forcing is not T*-periodic (residual " << rep.periodicity_residual << ")";
        throw PeriodicityError(os.str());
    }
    const bool all_second = bspec.h_second.size() == bspec.h.size()
                            && std::all_of(bspec.h_second.begin(), bspec.h_second.end(),
                                           [](const Signal& s) { return static_cast<bool>(s); });
    if (all_second)
        rep.h_second_deriv_bound = second;

    const Vector zl = Vector::Zero(m);
    const Vector zr = Vector::Zero(n - m);
    for (const auto& g : bspec.left)
        rep.dG_dh_max = std::max(rep.dG_dh_max, std::abs(partial_h(g, 0.0, zl)));
    for (const auto& g : bspec.right)
        rep.dG_dh_max = std::max(rep.dG_dh_max, std::abs(partial_h(g, 0.0, zr)));

    rep.spec = bspec;
    rep.spec.h_c1_bound = rep.h_c1_bound;
    rep.spec.h_second_deriv_bound = rep.h_second_deriv_bound;

    if (rep.dG_dh_max > 0.5 + 1e-9) {
        const double c = 2.0 * rep.dG_dh_max;
        rep.rescaled = true;
        rep.rescale_factor = c;
        auto scale_signal = [c](const Signal& s) -> Signal {
            if (!s)
                return s;
            return [s, c](double t) { return c * s(t); };
        };
        auto scale_map = [c](const BoundaryMap& g) {
            BoundaryMap out;
            out.value = [f = g.value, c](double hh, const Vector& u) { return f(hh / c, u); };
            if (g.grad_u)
                out.grad_u = [f = g.grad_u, c](double hh, const Vector& u) { return f(hh / c, u); };
            if (g.grad_h)
                out.grad_h = [f = g.grad_h, c](double hh, const Vector& u) { return f(hh / c, u) / c; };
            return out;
        };
        auto& s = rep.spec;
        std::transform(s.h.begin(), s.h.end(), s.h.begin(), scale_signal);
        std::transform(s.h_prime.begin(), s.h_prime.end(), s.h_prime.begin(), scale_signal);
        std::transform(s.h_second.begin(), s.h_second.end(), s.h_second.begin(), scale_signal);
        std::transform(s.left.begin(), s.left.end(), s.left.begin(), scale_map);
        std::transform(s.right.begin(), s.right.end(), s.right.begin(), scale_map);
        s.h_c1_bound *= c;
        if (s.h_second_deriv_bound)
            *s.h_second_deriv_bound *= c;
    }
    return rep;
}

Vector eval_boundary(const BoundarySpec& bspec, int n, int m, Side side, double t, const Vector& outgoing)
{
    const bool left = side == Side::left;
    const auto& maps = left ? bspec.left : bspec.right;
    if (outgoing.size() != (left ? m : n - m))
        throw BoundaryMapError("outgoing vector has the wrong length");
    Vector out(static_cast<Eigen::Index>(maps.size()));
    for (std::size_t q = 0; q < maps.size(); ++q) {
        const std::size_t comp = left ? static_cast<std::size_t>(m) + q : q;
        const double v = maps[q].value(bspec.h[comp](t), outgoing);
        if (!std::isfinite(v))
            throw BoundaryMapError("boundary map returned a non-finite value");
        out(static_cast<Eigen::Index>(q)) = v;
    }
    return out;
}

} // namespace phyp

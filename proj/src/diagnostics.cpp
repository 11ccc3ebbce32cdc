#include "phyp/diagnostics.hpp"

#include "phyp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace phyp {

FieldNorms norms(const Field& field)
{
    FieldNorms out;
    out.c0 = field.sup_norm();
    const double d = std::max(derivative_t(field).sup_norm(), derivative_x(field).sup_norm());
    out.c1 = out.c0 + d;
    return out;
}

double WeightProfile::W(int i, double x) const
{
    return i < m ? std::exp(rates(i) * (L - x)) : std::exp(-rates(i) * x);
}

WeightProfile weights(const Matrix& gtilde, double L, int n, int m)
{
    if (gtilde.rows() != n || gtilde.cols() != n)
        throw std::invalid_argument("weights: g-tilde has the wrong shape");
    check_dominance(gtilde, m);
    WeightProfile w;
    w.rates = gtilde.diagonal();
    w.L = L;
    w.m = m;
    w.M3 = 1.0;
    for (int i = 0; i < n; ++i)
        w.M3 = std::max(w.M3, i < m ? w.W(i, 0.0) : w.W(i, L));
    return w;
}

Certificate smallness_certificate(double theta, double K, double L, double M3)
{
    Certificate c{theta, K, L, M3, false, 0.0};
    c.margin = 1.0 - theta - K * L * M3;
    c.ok = theta + K * L * M3 < 1.0;
    return c;
}

double pde_residual(const Field& f, const SystemSpec& spec)
{
    const double it = 1.0 / (2.0 * f.dt());
    const double ix = 1.0 / (2.0 * f.dx());
    double worst = 0.0;
    Vector ut(f.n()), ux(f.n());
    for (int j = 0; j < f.Nt(); ++j)
        for (int k = 1; k < f.Nx(); ++k) {
            for (int i = 0; i < f.n(); ++i) {
                ut(i) = (f(i, j + 1, k) - f(i, j - 1, k)) * it;
                ux(i) = (f(i, j, k + 1) - f(i, j, k - 1)) * ix;
            }
            const Vector u = f.value(j, k);
            const Vector r = ut + spec.A(u) * ux - spec.F(u);
            worst = std::max(worst, r.cwiseAbs().maxCoeff());
        }
    return worst;
}

RegularityReport regularity_measurements(const Field& f, std::optional<double> m0)
{
    RegularityReport rep;
    rep.forcing_second_derivative_bound = m0;
    const double dt = f.dt();
    const double dx = f.dx();
    for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.Nt(); ++j)
            for (int k = 1; k < f.Nx(); ++k) {
                const double tt = (f(i, j + 1, k) - 2.0 * f(i, j, k) + f(i, j - 1, k)) / (dt * dt);
                const double xx = (f(i, j, k + 1) - 2.0 * f(i, j, k) + f(i, j, k - 1)) / (dx * dx);
                const double tx
                    = (f(i, j + 1, k + 1) - f(i, j + 1, k - 1) - f(i, j - 1, k + 1) + f(i, j - 1, k - 1)) / (4.0 * dt * dx);
                rep.d2t = std::max(rep.d2t, std::abs(tt));
                rep.d2x = std::max(rep.d2x, std::abs(xx));
                rep.dtdx = std::max(rep.dtdx, std::abs(tx));
            }
    return rep;
}

RegularityReport compare_regularity(const RegularityReport& coarse, const RegularityReport& fine)
{
    auto ratio = [](double c, double f) { return c == 0.0 ? (f == 0.0 ? 1.0 : INFINITY) : f / c; };
    RegularityReport out = fine;
    out.grid_pair_ratio
        = std::array<double, 3>{ratio(coarse.d2t, fine.d2t), ratio(coarse.dtdx, fine.dtdx), ratio(coarse.d2x, fine.d2x)};
    return out;
}

double observed_order(double coarse_error, double fine_error)
{
    return std::log2(coarse_error / fine_error);
}

} // namespace phyp

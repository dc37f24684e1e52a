#include "gkdv/ground_state.hpp"

#include <cmath>
#include <stdexcept>

#include "gkdv/calculus.hpp"

namespace gkdv {

namespace {
const double kQ0 = std::pow(3.0, 0.25);

double sech(double u) {
    const double a = std::exp(-std::abs(u));
    return 2.0 * a / (1.0 + a * a);
}
}  // namespace

double Q_value(double x) { return kQ0 * std::sqrt(sech(2.0 * x)); }

double Q_deriv1(double x) { return -std::tanh(2.0 * x) * Q_value(x); }

double Q_deriv2(double x) {
    const double q = Q_value(x);
    return q - q * q * q * q * q;
}

double Q_deriv3(double x) {
    const double q = Q_value(x);
    const double q4 = q * q * q * q;
    return (1.0 - 5.0 * q4) * Q_deriv1(x);
}

Field eval_Q(const Grid1D& grid) { return make_field(grid, Q_value); }

Field eval_Q_deriv(const Grid1D& grid, int order) {
    switch (order) {
        case 1: return make_field(grid, Q_deriv1);
        case 2: return make_field(grid, Q_deriv2);
        case 3: return make_field(grid, Q_deriv3);
        default: throw std::invalid_argument("eval_Q_deriv: order must be 1, 2 or 3");
    }
}

Field apply_Lambda(const Field& f) {
    const Field fp = differentiate(f, 1);
    Field out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = 0.5 * f[i] + f.grid().node(i) * fp[i];
    out.check_finite("apply_Lambda output");
    return out;
}

double mass(const Field& f) { return inner_product(f, f); }

double energy(const Field& f) {
    const Field fp = differentiate(f, 1);
    Field integrand(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f[i];
        const double v2 = v * v;
        integrand[i] = 0.5 * fp[i] * fp[i] - (v2 * v2 * v2) / 6.0;
    }
    return integrate(integrand);
}

Field rescale(const Field& f, double lambda, double sigma, const Grid1D& target,
              std::size_t* clamped) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale: lambda must be positive");
    const double amp = 1.0 / std::sqrt(lambda);
    Field out(target);
    if (f.grid().periodic()) {
        TrigInterpolant interp(f);
        for (std::size_t i = 0; i < target.count(); ++i)
            out[i] = amp * interp((target.node(i) - sigma) / lambda);
    } else {
        for (std::size_t i = 0; i < target.count(); ++i)
            out[i] = amp * interp_value(f, (target.node(i) - sigma) / lambda, clamped);
    }
    out.check_finite("rescale output");
    return out;
}

double gn_ratio(const Field& f) {
    static const double intQ2_ref = soliton_constants(default_profile_grid()).intQ2;
    Field f6(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v2 = f[i] * f[i];
        f6[i] = v2 * v2 * v2;
    }
    const double m = mass(f);
    const Field fp = differentiate(f, 1);
    const double grad2 = inner_product(fp, fp);
    const double denom = (m / intQ2_ref) * (m / intQ2_ref) * grad2;
    if (denom == 0.0) throw std::invalid_argument("gn_ratio: zero denominator");
    return integrate(f6) / (3.0 * denom);
}

SolitonConstants soliton_constants(const Grid1D& grid) {
    const Field Q = eval_Q(grid);
    const Field Qp = eval_Q_deriv(grid, 1);
    Field LQ(grid);  // closed-form Lambda Q keeps the constants quadrature-pure
    for (std::size_t i = 0; i < grid.count(); ++i)
        LQ[i] = 0.5 * Q[i] + grid.node(i) * Qp[i];
    Field Q6(grid);
    for (std::size_t i = 0; i < Q.size(); ++i) {
        const double v2 = Q[i] * Q[i];
        Q6[i] = v2 * v2 * v2;
    }
    SolitonConstants c;
    c.intQ = integrate(Q);
    c.intQ2 = inner_product(Q, Q);
    c.intQ6 = integrate(Q6);
    c.intQy2 = inner_product(Qp, Qp);
    c.normLambdaQ2 = inner_product(LQ, LQ);
    c.energyQ = 0.5 * c.intQy2 - c.intQ6 / 6.0;
    return c;
}

Grid1D default_profile_grid() { return Grid1D::bounded(-60.0, 60.0, 2048); }

}  // namespace gkdv

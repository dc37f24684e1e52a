#include "gkdv/tail.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gkdv/calculus.hpp"

namespace gkdv {

namespace {

// C^3 smoothstep on [0,1]: 35u^4 - 84u^5 + 70u^6 - 20u^7.
double smooth7(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}
double smooth7_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = u * (1.0 - u);
    return 140.0 * v * v * v;
}
double smooth7_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 420.0 * u * u * (1.0 - u) * (1.0 - u) * (1.0 - 2.0 * u);
}

void check_spec(const TailSpec& spec) {
    if (!(spec.c0 < 0.0)) throw std::invalid_argument("TailSpec: c0 must be negative");
    if (!(spec.theta > 1.5)) throw std::invalid_argument("TailSpec: theta must exceed 3/2");
    if (!(spec.x0 > 1.0)) throw std::invalid_argument("TailSpec: x0 must be large");
}

}  // namespace

double f0_value(double x, const TailSpec& spec) {
    const double a = 0.25 * spec.x0;
    if (x <= a) return 0.0;
    const double u = (x - a) / a;  // ramp spans [x0/4, x0/2]
    return spec.c0 * std::pow(x, -spec.theta) * smooth7(u);
}

double f0_deriv(double x, const TailSpec& spec, int k) {
    const double a = 0.25 * spec.x0;
    if (x <= a) return 0.0;
    const double u = (x - a) / a;
    const double du = 1.0 / a;
    const double p = std::pow(x, -spec.theta);
    const double th = spec.theta;
    switch (k) {
        case 0:
            return spec.c0 * p * smooth7(u);
        case 1:
            return spec.c0 * (-th * p / x * smooth7(u) + p * smooth7_d1(u) * du);
        case 2:
            return spec.c0 * (th * (th + 1.0) * p / (x * x) * smooth7(u) -
                              2.0 * th * p / x * smooth7_d1(u) * du +
                              p * smooth7_d2(u) * du * du);
        default:
            throw std::invalid_argument("f0_deriv: k must be 0, 1 or 2");
    }
}

Field build_f0(const Grid1D& grid, const TailSpec& spec) {
    check_spec(spec);
    if (grid.right() < 4.0 * spec.x0)
        throw std::invalid_argument("build_f0: grid must reach 4*x0 on the right");
    Field out = make_field(grid, [&](double x) { return f0_value(x, spec); });

    // Derivative-bound guard: generous ceiling in units of |c0| x^{-theta-k}.
    const double ceiling = 100.0 * (1.0 + spec.theta) * (1.0 + spec.theta);
    for (std::size_t i = 0; i < grid.count(); ++i) {
        const double x = grid.node(i);
        if (x <= 0.25 * spec.x0) continue;
        for (int k = 0; k <= 2; ++k) {
            const double bound = ceiling * std::abs(spec.c0) * std::pow(x, -spec.theta - k);
            if (std::abs(f0_deriv(x, spec, k)) > bound)
                throw std::runtime_error("build_f0: derivative bound violated at x = " +
                                         std::to_string(x));
        }
    }
    return out;
}

TailEnvelope f0_envelope(const Grid1D& grid, const TailSpec& spec) {
    TailEnvelope env{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < grid.count(); ++i) {
        const double x = grid.node(i);
        if (x <= 0.25 * spec.x0) continue;
        const double w0 = std::pow(x, spec.theta) / std::abs(spec.c0);
        env.C0 = std::max(env.C0, std::abs(f0_deriv(x, spec, 0)) * w0);
        env.C1 = std::max(env.C1, std::abs(f0_deriv(x, spec, 1)) * w0 * x);
        env.C2 = std::max(env.C2, std::abs(f0_deriv(x, spec, 2)) * w0 * x * x);
    }
    return env;
}

Field taper_right(const Field& f, double frac) {
    const Grid1D& g = f.grid();
    const double xa = g.right() - frac * g.length();
    const double xb = g.right();
    Field out = f;
    for (std::size_t i = 0; i < g.count(); ++i) {
        const double x = g.node(i);
        if (x > xa) out[i] *= 1.0 - smooth7((x - xa) / (xb - xa));
    }
    return out;
}

TailPersistenceReport check_tail_persistence(const Field& f_evolved, const Field& f0, double t,
                                             const TailSpec& spec, double region_right_cap,
                                             const Field* f_probe, double dt_probe) {
    require_same_grid(f_evolved, f0, "check_tail_persistence");
    const Grid1D& g = f_evolved.grid();

    TailPersistenceReport rep;
    rep.t = t;
    rep.region_left = 0.5 * t + 0.5 * spec.x0;
    rep.region_right =
        region_right_cap > 0.0 ? region_right_cap : std::numeric_limits<double>::infinity();
    rep.supW0 = rep.supW1 = 0.0;
    rep.sup_dt = std::numeric_limits<double>::quiet_NaN();
    rep.region_nonempty = false;

    const Field df = differentiate(f_evolved, 1);
    for (std::size_t i = 0; i < g.count(); ++i) {
        const double x = g.node(i);
        if (x <= rep.region_left || x >= rep.region_right) continue;
        rep.region_nonempty = true;
        const double w0 = std::pow(x, spec.theta + 2.0);
        const double w1 = std::pow(x, spec.theta + 3.0);
        rep.supW0 = std::max(rep.supW0, std::abs(f_evolved[i] - f0_deriv(x, spec, 0)) * w0);
        rep.supW1 = std::max(rep.supW1, std::abs(df[i] - f0_deriv(x, spec, 1)) * w1);
    }
    if (!rep.region_nonempty)
        throw std::invalid_argument("check_tail_persistence: region x > t/2 + x0/2 is empty");

    if (f_probe && dt_probe > 0.0) {
        require_same_grid(*f_probe, f_evolved, "check_tail_persistence probe");
        rep.sup_dt = 0.0;
        for (std::size_t i = 0; i < g.count(); ++i) {
            const double x = g.node(i);
            if (x <= rep.region_left || x >= rep.region_right) continue;
            const double dfdt = ((*f_probe)[i] - f_evolved[i]) / dt_probe;
            rep.sup_dt = std::max(rep.sup_dt, std::abs(dfdt) * std::pow(x, spec.theta + 3.0));
        }
    }
    return rep;
}

}  // namespace gkdv

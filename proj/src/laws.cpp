#include "gkdv/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gkdv {

LawParams params_from_nu(double nu, double intQ) {
    if (!(nu > 0.5 && nu < 1.0))
        throw std::invalid_argument("params_from_nu: nu must lie in (1/2, 1)");
    LawParams p;
    p.nu = nu;
    p.beta = nu / (3.0 * nu - 1.0);
    p.theta = (1.0 - 0.5 * p.beta) / (1.0 - p.beta);
    p.intQ = intQ;
    p.c0 = -0.5 * intQ * (p.theta - 1.0) * std::pow(2.0 * p.theta - 1.0, p.theta - 1.0);
    const double rho_max = 0.25 * std::min({2.0 * p.beta - 1.0, 0.25, 2.0 - 2.0 * p.beta});
    p.rho = 0.5 * rho_max;
    p.k = static_cast<int>(std::ceil(2.0 * (1.0 + p.j) / (1.0 - p.beta))) + 1;
    validate(p);
    return p;
}

void validate(const LawParams& p) {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
    if (!(p.theta > 1.5)) throw std::invalid_argument("LawParams: theta must exceed 3/2");
    if (!(p.beta > 0.5 && p.beta < 1.0)) throw std::invalid_argument("LawParams: beta outside (1/2,1)");
    if (!(p.nu > 0.5 && p.nu < 1.0)) throw std::invalid_argument("LawParams: nu outside (1/2,1)");
    if (!close(p.beta, 2.0 * (p.theta - 1.0) / (2.0 * p.theta - 1.0)))
        throw std::invalid_argument("LawParams: beta/theta inconsistent");
    if (!close(p.theta, (1.0 - 0.5 * p.beta) / (1.0 - p.beta)))
        throw std::invalid_argument("LawParams: theta/beta inconsistent");
    if (!close(p.nu, p.beta / (3.0 * p.beta - 1.0)))
        throw std::invalid_argument("LawParams: nu/beta inconsistent");
    const double c0_ref =
        -0.5 * p.intQ * (p.theta - 1.0) * std::pow(2.0 * p.theta - 1.0, p.theta - 1.0);
    if (!close(p.c0, c0_ref)) throw std::invalid_argument("LawParams: c0 inconsistent");
    const double rho_max = 0.25 * std::min({2.0 * p.beta - 1.0, 0.25, 2.0 - 2.0 * p.beta});
    if (!(p.rho > 0.0 && p.rho < rho_max))
        throw std::invalid_argument("LawParams: rho outside (0, rho_max)");
    if (!(static_cast<double>(p.k) > 2.0 * (1.0 + p.j) / (1.0 - p.beta)))
        throw std::invalid_argument("LawParams: k too small");
    if (!(p.B > 100.0)) throw std::invalid_argument("LawParams: B must exceed 100");
    if (!(p.s0 >= 1.0)) throw std::invalid_argument("LawParams: s0 must be >= 1");
}

ModulationState closed_form(double s, const LawParams& p) {
    if (!(s > 0.0)) throw std::invalid_argument("closed_form: s must be positive");
    ModulationState st;
    st.s = s;
    st.t = std::numeric_limits<double>::quiet_NaN();
    st.lambda = std::pow(s, -p.beta);
    st.sigma = std::pow(s, 1.0 - p.beta) / (1.0 - p.beta);
    st.b = p.beta / s;
    return st;
}

std::array<double, 3> ode_rhs(const ModulationState& st, const LawParams& p) {
    if (!(st.lambda > 0.0) || !(st.sigma > 0.0))
        throw std::invalid_argument("ode_rhs: lambda and sigma must be positive");
    const double K = 4.0 * p.c0 / p.intQ;
    const double lam_s = -st.b * st.lambda;
    const double sig_s = st.lambda;
    const double sqrt_lam = std::sqrt(st.lambda);
    const double sig_pow = std::pow(st.sigma, -p.theta);
    const double b_s = -2.0 * st.b * st.b -
                       K * (1.5 * st.b * sqrt_lam * sig_pow -
                            p.theta * st.lambda * sqrt_lam * sig_pow / st.sigma);
    return {lam_s, sig_s, b_s};
}

GH g_h(const ModulationState& st, const LawParams& p) {
    GH out;
    out.g = st.b / (st.lambda * st.lambda) +
            (4.0 * p.c0 / p.intQ) * std::pow(st.lambda, -1.5) * std::pow(st.sigma, -p.theta);
    out.h = std::sqrt(st.lambda) -
            (2.0 * p.c0 / ((1.0 - p.theta) * p.intQ)) * std::pow(st.sigma, 1.0 - p.theta);
    return out;
}

namespace {

using Vec4 = std::array<double, 4>;  // lambda, sigma, b, t

Vec4 rhs4(double /*s*/, const Vec4& y, const LawParams& p) {
    ModulationState st{0.0, 0.0, y[0], y[1], y[2]};
    const auto d = ode_rhs(st, p);
    return {d[0], d[1], d[2], y[0] * y[0] * y[0]};
}

// Dormand-Prince 5(4) tableau.
struct DP54 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

struct StepResult {
    Vec4 y;
    double err;
};

StepResult dp54_step(double s, const Vec4& y, double h, const LawParams& p) {
    using T = DP54;
    auto axpy = [](const Vec4& y0, std::initializer_list<std::pair<double, const Vec4*>> terms,
                   double h) {
        Vec4 out = y0;
        for (auto& [a, k] : terms)
            for (int i = 0; i < 4; ++i) out[i] += h * a * (*k)[i];
        return out;
    };
    const Vec4 k1 = rhs4(s, y, p);
    const Vec4 k2 = rhs4(s + T::c2 * h, axpy(y, {{T::a21, &k1}}, h), p);
    const Vec4 k3 = rhs4(s + T::c3 * h, axpy(y, {{T::a31, &k1}, {T::a32, &k2}}, h), p);
    const Vec4 k4 = rhs4(s + T::c4 * h, axpy(y, {{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}, h), p);
    const Vec4 k5 = rhs4(
        s + T::c5 * h, axpy(y, {{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}, h), p);
    const Vec4 k6 = rhs4(
        s + h,
        axpy(y, {{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}}, h), p);
    Vec4 y5 = axpy(y, {{T::b1, &k1}, {T::b3, &k3}, {T::b4, &k4}, {T::b5, &k5}, {T::b6, &k6}}, h);
    const Vec4 k7 = rhs4(s + h, y5, p);

    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                              T::e6 * k6[i] + T::e7 * k7[i]);
        const double scale = 1.0 + std::max(std::abs(y[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(e) / scale);
    }
    return {y5, err};
}

}  // namespace

std::vector<ModulationState> integrate_laws(const ModulationState& init, double s_end,
                                            const LawParams& p, double tol,
                                            std::size_t samples) {
    if (s_end < init.s) throw std::invalid_argument("integrate_laws: s_end must be >= init.s");
    if (s_end == init.s) return {init};
    if (samples < 2) samples = 2;

    std::vector<double> s_out(samples);
    for (std::size_t i = 0; i < samples; ++i)
        s_out[i] = init.s + (s_end - init.s) * static_cast<double>(i) /
                               static_cast<double>(samples - 1);

    std::vector<ModulationState> out;
    out.reserve(samples);
    double t0 = std::isfinite(init.t) ? init.t : 0.0;
    out.push_back({init.s, t0, init.lambda, init.sigma, init.b});

    double s = init.s;
    Vec4 y{init.lambda, init.sigma, init.b, t0};
    double h = (s_end - init.s) / 100.0;
    std::size_t next = 1;

    while (next < samples) {
        const double target = s_out[next];
        bool clipped = false;
        if (s + h >= target) {
            h = target - s;
            clipped = true;
        }
        if (!(h > 1e-14 * std::max(1.0, std::abs(s))))
            throw std::runtime_error("integrate_laws: step-size underflow near s = " +
                                     std::to_string(s));
        const auto step = dp54_step(s, y, h, p);
        if (step.err <= tol) {
            s += h;
            y = step.y;
            if (clipped) {
                out.push_back({s, y[3], y[0], y[1], y[2]});
                ++next;
            }
        }
        const double grow =
            step.err > 0.0 ? 0.9 * std::pow(tol / step.err, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (clipped && step.err <= tol && next < samples)
            h = std::min(h, s_out[next] - s);
    }
    return out;
}

TimeMap time_map(const std::vector<ModulationState>& traj, const LawParams& p) {
    if (traj.empty()) throw std::invalid_argument("time_map: empty trajectory");
    for (std::size_t i = 1; i < traj.size(); ++i)
        if (!(traj[i].s > traj[i - 1].s))
            throw std::invalid_argument("time_map: trajectory must be monotone in s");
    const double three_beta_m1 = 3.0 * p.beta - 1.0;
    if (!(three_beta_m1 > 0.0)) throw std::invalid_argument("time_map: 3*beta - 1 must be positive");

    TimeMap out;
    out.t.resize(traj.size());
    bool carried = true;
    for (const auto& st : traj) carried = carried && std::isfinite(st.t);
    if (carried) {
        const double t0 = traj.front().t;
        for (std::size_t i = 0; i < traj.size(); ++i) out.t[i] = traj[i].t - t0;
    } else {
        out.t[0] = 0.0;
        for (std::size_t i = 1; i < traj.size(); ++i) {
            const double l0 = traj[i - 1].lambda, l1 = traj[i].lambda;
            out.t[i] = out.t[i - 1] +
                       0.5 * (l0 * l0 * l0 + l1 * l1 * l1) * (traj[i].s - traj[i - 1].s);
        }
    }
    out.T_partial = out.t.back();
    const double lam_end = traj.back().lambda;
    out.T_estimate = out.T_partial + lam_end * lam_end * lam_end * traj.back().s / three_beta_m1;
    return out;
}

}  // namespace gkdv

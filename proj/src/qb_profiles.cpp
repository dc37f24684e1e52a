#include "gkdv/qb_profiles.hpp"

#include <cmath>
#include <stdexcept>

#include "gkdv/calculus.hpp"
#include "gkdv/ground_state.hpp"

namespace gkdv {

namespace {
// Quintic smoothstep s(u) = 6u^5 - 15u^4 + 10u^3 on [0,1], shifted to [-2,-1].
double step_u(double t) { return t + 2.0; }
}  // namespace

double chi_value(double t) {
    if (t <= -2.0) return 0.0;
    if (t >= -1.0) return 1.0;
    const double u = step_u(t);
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double chi_deriv1(double t) {
    if (t <= -2.0 || t >= -1.0) return 0.0;
    const double u = step_u(t);
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
}

double chi_deriv2(double t) {
    if (t <= -2.0 || t >= -1.0) return 0.0;
    const double u = step_u(t);
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

double chi_deriv3(double t) {
    if (t <= -2.0 || t >= -1.0) return 0.0;
    const double u = step_u(t);
    return 60.0 * (1.0 - 6.0 * u + 6.0 * u * u);
}

QbWorkspace::QbWorkspace(const ProfileSet& ps, double left_extent, double b_star)
    : ps_(ps),
      grid_(Grid1D::bounded(
          ps.grid.right() -
              std::ceil((ps.grid.right() - left_extent) / ps.grid.spacing()) * ps.grid.spacing(),
          ps.grid.right(),
          static_cast<std::size_t>(
              std::ceil((ps.grid.right() - left_extent) / ps.grid.spacing())) + 1)),
      b_star_(b_star),
      offset_(static_cast<long>(grid_.count()) - static_cast<long>(ps.grid.count())),
      Q_(grid_), Qp_(grid_), P_(grid_), Pp_(grid_), Ppp_(grid_), Pppp_(grid_), LambdaQ_(grid_) {
    if (offset_ < 0) throw std::invalid_argument("QbWorkspace: extension must contain the profile grid");

    const double half_intQ = 0.5 * ps_.intQ;
    const Field Pprime = differentiate(ps_.P, 1);
    const auto tailQ = cumulative_from_right(grid_, Q_value);

    for (std::size_t i = 0; i < grid_.count(); ++i) {
        const double y = grid_.node(i);
        Q_[i] = Q_value(y);
        Qp_[i] = Q_deriv1(y);
        LambdaQ_[i] = 0.5 * Q_[i] + y * Qp_[i];
        const long j = static_cast<long>(i) - offset_;
        if (j >= 0) {
            P_[i] = ps_.P[static_cast<std::size_t>(j)];
            Pp_[i] = Pprime[static_cast<std::size_t>(j)];
        } else {
            P_[i] = half_intQ;  // left limit of P; error ~ e^{-|left|/?} below 1e-20
            Pp_[i] = 0.0;
        }
        // From L P = D: P'' = P - 5Q^4 P - D, and its derivative with
        // D' = Lambda Q, so no further differencing enters.
        const double D = y * Q_[i] + 0.5 * tailQ[i];
        const double q4 = Q_[i] * Q_[i] * Q_[i] * Q_[i];
        Ppp_[i] = P_[i] - 5.0 * q4 * P_[i] - D;
        Pppp_[i] = Pp_[i] - 5.0 * q4 * Pp_[i] - 20.0 * Q_[i] * Q_[i] * Q_[i] * Qp_[i] * P_[i] -
                   LambdaQ_[i];
    }
}

void QbWorkspace::check_b(double b) const {
    if (std::abs(b) >= b_star_)
        throw std::invalid_argument("QbWorkspace: |b| must be below b_star");
    if (b != 0.0) {
        const double plateau_left = -2.0 * std::pow(std::abs(b), -kCutoffGamma);
        if (plateau_left < grid_.left())
            throw std::invalid_argument("QbWorkspace: grid too small for the cutoff plateau");
    }
}

LocalizedProfile QbWorkspace::make_Qb(double b) const {
    check_b(b);
    const double a = std::pow(std::abs(b), kCutoffGamma);
    Field Pb(grid_);
    Field Qb(grid_);
    for (std::size_t i = 0; i < grid_.count(); ++i) {
        Pb[i] = P_[i] * chi_value(a * grid_.node(i));
        Qb[i] = Q_[i] + b * Pb[i];
    }
    Qb.check_finite("make_Qb output");
    return {b, std::move(Qb), std::move(Pb)};
}

Field QbWorkspace::dQb_db(double b) const {
    check_b(b);
    const double a = std::pow(std::abs(b), kCutoffGamma);
    Field out(grid_);
    for (std::size_t i = 0; i < grid_.count(); ++i) {
        const double y = grid_.node(i);
        out[i] = P_[i] * chi_value(a * y) + kCutoffGamma * a * y * chi_deriv1(a * y) * P_[i];
    }
    return out;
}

Field QbWorkspace::make_PsiB(double b) const {
    check_b(b);
    const double a = std::pow(std::abs(b), kCutoffGamma);
    const Field dQb = dQb_db(b);
    Field psi(grid_);
    for (std::size_t i = 0; i < grid_.count(); ++i) {
        const double y = grid_.node(i);
        const double c0 = chi_value(a * y);
        const double c1 = a * chi_deriv1(a * y);
        const double c2 = a * a * chi_deriv2(a * y);
        const double c3 = a * a * a * chi_deriv3(a * y);

        const double Pb = P_[i] * c0;
        const double Pb1 = Pp_[i] * c0 + P_[i] * c1;
        const double Pb3 = Pppp_[i] * c0 + 3.0 * Ppp_[i] * c1 + 3.0 * Pp_[i] * c2 + P_[i] * c3;

        const double qb = Q_[i] + b * Pb;
        const double qb1 = Qp_[i] + b * Pb1;
        const double qb4 = qb * qb * qb * qb;
        const double q4 = Q_[i] * Q_[i] * Q_[i] * Q_[i];

        // d/dy (Q_b'' - Q_b + Q_b^5), with the Q-only part cancelled by the
        // ground-state equation.
        const double Tprime = b * (Pb3 - Pb1) + 5.0 * (qb4 * qb1 - q4 * Qp_[i]);
        const double lambda_qb = 0.5 * qb + y * qb1;
        psi[i] = -(Tprime + b * lambda_qb - 2.0 * b * b * dQb[i]);
    }
    psi.check_finite("make_PsiB output");
    return psi;
}

double QbWorkspace::P_at(double y) const {
    if (y < ps_.grid.left()) return 0.5 * ps_.intQ;
    if (y > ps_.grid.right()) return 0.0;
    return interp_value(ps_.P, y);
}

Field QbWorkspace::eval_Qb_on(const Grid1D& g, double b) const {
    const double a = std::pow(std::abs(b), kCutoffGamma);
    Field out(g);
    for (std::size_t i = 0; i < g.count(); ++i) {
        const double y = g.node(i);
        const double chi = (b == 0.0) ? 1.0 : chi_value(a * y);
        out[i] = Q_value(y) + b * P_at(y) * chi;
    }
    return out;
}

}  // namespace gkdv

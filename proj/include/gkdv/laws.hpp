#pragma once

#include <array>
#include <vector>

namespace gkdv {

/// Parameter bundle tying the blow-up laws together. beta/theta/nu are
/// mutually consistent; c0 is pinned by the law algebra.
struct LawParams {
    double theta;
    double beta;
    double nu;
    double c0;
    double rho;
    double gamma = 0.75;
    double j = 2.5;
    int k;
    double B = 128.0;
    double s0 = 1.0;
    double x0 = 100.0;
    double intQ;  // soliton mass constant entering c0, g and h
};

/// beta = nu/(3nu-1), theta = (1-beta/2)/(1-beta),
/// c0 = -(intQ/2)(theta-1)(2theta-1)^{theta-1}, rho = half its allowed
/// maximum, k = ceil(2(1+j)/(1-beta)) + 1. nu must lie in (1/2, 1).
LawParams params_from_nu(double nu, double intQ);

/// Throws unless all mutual-consistency invariants hold to 1e-12.
void validate(const LawParams& p);

struct ModulationState {
    double s;
    double t;       // NaN until a time map fills it
    double lambda;
    double sigma;
    double b;
};

/// The exact solution family: lambda = s^-beta, sigma = s^{1-beta}/(1-beta),
/// b = beta/s. t is left unset (NaN).
ModulationState closed_form(double s, const LawParams& p);

/// (d lambda/ds, d sigma/ds, d b/ds) of the formal modulation system; the b
/// equation comes from differentiating the conserved quantity g.
std::array<double, 3> ode_rhs(const ModulationState& state, const LawParams& p);

struct GH {
    double g;
    double h;
};

/// g = b/lambda^2 + (4 c0/intQ) lambda^{-3/2} sigma^{-theta},
/// h = lambda^{1/2} - (2 c0/((1-theta) intQ)) sigma^{1-theta}.
GH g_h(const ModulationState& state, const LawParams& p);

/// Adaptive RK45 (Dormand-Prince) integration of the modulation system with
/// dense output at `samples` equally spaced s-points (endpoints included).
/// t is carried as a fourth component with dt/ds = lambda^3, starting at 0.
std::vector<ModulationState> integrate_laws(const ModulationState& init, double s_end,
                                            const LawParams& p, double tol = 1e-10,
                                            std::size_t samples = 201);

struct TimeMap {
    std::vector<double> t;  // t(s) per trajectory sample
    double T_partial;       // raw integral of lambda^3 up to s_max
    double T_estimate;      // T_partial + closed-form tail lambda_end^3 s_end/(3beta-1)
};

/// t(s) from the trajectory (carried t when present, trapezoid in s
/// otherwise) and the blow-up time estimate. The tail beyond s_max uses the
/// closed-form asymptotics lambda ~ c s^-beta, for which the remaining
/// integral is lambda^3 s/(3beta-1).
TimeMap time_map(const std::vector<ModulationState>& trajectory, const LawParams& p);

}  // namespace gkdv

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gkdv/evolution.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/laws.hpp"
#include "gkdv/qb_profiles.hpp"

namespace gkdv {

/// The scaled weights of the energy machinery. phi equals e^y below -1,
/// 1+y on (-1/2,1/2) and y above 2; psi equals e^{2y} below -1 and 1 above
/// -1/2. The connecting pieces are C^2 and monotone: phi' is a positive
/// exponential-of-polynomial on each gap (one free coefficient fixes the
/// integral), psi blends its branches with a quintic smoothstep.
double phi_value(double y);
double phi_deriv(double y);
double psi_value(double y);
double psi_deriv(double y);

struct WeightFamily {
    double B;
    int k;
    Field phiB, dphiB;   // phi(y/B) and its y-derivative
    Field psiB, dpsiB;
    Field phik;          // y^k for y > 0, 0 otherwise
};

WeightFamily make_weight_family(const Grid1D& grid, double B, int k);

/// sqrt( int eps_y^2 psi_B + int eps^2 phi_B ).
double norm_NB(const Field& eps, const WeightFamily& w);

/// int [ eps_y^2 psi_B + eps^2 phi_B
///       - (1/3)((W+F+eps)^6 - (W+F)^6 - 6(W+F)^5 eps) psi_B ].
double functional_F(const Field& eps, const Field& W, const Field& Fext, const WeightFamily& w);

/// s^j F + lambda^k int phi_k eps^2; the scaling term is accumulated per node
/// in log space so lambda^k and y^k never overflow individually.
double functional_H(double s, double Fval, double lambda, const Field& eps,
                    const WeightFamily& w, const LawParams& p);

/// lambda^k int phi_k eps^2 alone (log-space accumulation).
double scaling_term(double lambda, const Field& eps, const WeightFamily& w);

struct DecompositionResult {
    double lambda;
    double sigma;
    double b;
    double r;             // lambda^{1/2} f(t, sigma)
    Field eps;            // remainder on the y window
    double orth_residual[3];
    int newton_iterations;
};

/// Newton solver for the three orthogonality conditions
/// (eps, yLQ) = (eps, LQ) = (eps, Q) = 0 in relative frame coordinates.
/// The first iteration uses the closed-form Jacobian at the profile point;
/// later iterations refresh it by finite differences.
class Decomposer {
public:
    explicit Decomposer(const QbWorkspace& qb, Grid1D ywindow, double lambda_floor = 1e-6);

    const Grid1D& ywindow() const { return ygrid_; }

    DecompositionResult decompose(const Field& v, const Field& f, double t,
                                  const ModulationState& guess) const;

    /// The base-point Jacobian of the orthogonality map in relative
    /// coordinates (rows: yLQ, LQ, Q conditions; columns: lambda, sigma, b).
    Eigen::Matrix3d analytic_jacobian() const;

    /// Profile part W = Q_b + r R on the window.
    Field profile_W(double b, double r) const;

    /// F(y) = sqrt(lambda) f(t, lambda y + sigma) on the window.
    Field rescaled_F(const Field& f, double lambda, double sigma) const;

private:
    const QbWorkspace* qb_;
    Grid1D ygrid_;
    double lambda_floor_;
    Field Q_, Qp_, LambdaQ_, yLambdaQ_, R_, P_;
    double normLambdaQ2_, PQ_, PLQ_, PyLQ_;

    Eigen::Vector3d theta_map(const Field& v, const Field& f, double lambda, double sigma,
                              double b, Field* eps_out, double* r_out) const;
};

struct TrackSeries {
    std::vector<double> s, t, lambda, sigma, b, g, h, NB, F, H;
    std::vector<double> res_lambda;  // |lambda_s/lambda + b| by finite differences in s
    std::vector<double> res_sigma;   // |sigma_s/lambda - 1|
    std::vector<int> newton_iterations;
    double budget_violation_fraction = 0.0;  // d H/ds > C * (lambda^k s^-5/2 + s^{j-4})
    double budget_fit_C = 1.0;
    bool truncated = false;
    std::string truncation_reason;
};

/// Decompose every snapshot (sequential warm start), reconstruct s(t) through
/// the tracked lambda, and evaluate the diagnostic functionals. guess0 seeds
/// the first Newton solve; by default the closed-form state at p.s0.
TrackSeries track(const Trajectory& traj, const Trajectory& f_traj, const LawParams& p,
                  const Decomposer& dec, const WeightFamily& w);
TrackSeries track(const Trajectory& traj, const Trajectory& f_traj, const LawParams& p,
                  const Decomposer& dec, const WeightFamily& w, const ModulationState& guess0);

}  // namespace gkdv

#include "gkdv/modulation.hpp"

#include <cmath>
#include <stdexcept>

#include "gkdv/calculus.hpp"
#include "gkdv/ground_state.hpp"
#include "gkdv/linsolve.hpp"

namespace gkdv {

namespace {

double smooth5(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
double smooth5_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
}

double hermite_qA(double u) { return -1.5 * u * u * u + 2.0 * u * u + 0.5 * u - 1.0; }
double bump(double u) { const double v = u * (1.0 - u); return v * v; }

// 7-point Gauss-Legendre on [0,1], composite.
double integral01(const std::function<double(double)>& fn, double upper, int panels = 24) {
    static const double gx[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                                 0.0,                  0.4058451513773972,  0.7415311855993945,
                                 0.9491079123427585};
    static const double gw[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                 0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                 0.1294849661688697};
    double acc = 0.0;
    const double hp = upper / panels;
    for (int c = 0; c < panels; ++c) {
        const double mid = (c + 0.5) * hp, half = 0.5 * hp;
        for (int q = 0; q < 7; ++q) acc += gw[q] * fn(mid + half * gx[q]);
    }
    return acc * 0.5 * hp;
}

// Solve int_0^1 exp(q(u) + alpha*bump(u)) du = target for alpha by bisection.
double solve_alpha(const std::function<double(double)>& q, double target) {
    auto I = [&](double a) {
        return integral01([&](double u) { return std::exp(q(u) + a * bump(u)); }, 1.0);
    };
    double lo = -400.0, hi = 50.0;
    if (!(I(lo) <= target && I(hi) >= target))
        throw std::logic_error("weight gap construction: target integral out of range");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (I(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct GapCoefs {
    double alphaA;
    double alphaB;
};

const GapCoefs& gap_coefs() {
    static const GapCoefs gc = [] {
        GapCoefs g;
        // phi on (-1,-1/2): u = 2(y+1), integral of phi' must be 1/2 - 1/e.
        g.alphaA = solve_alpha(hermite_qA, 2.0 * (0.5 - std::exp(-1.0)));
        // phi on (1/2,2): u = (y-1/2)/1.5, integral must be 1/2.
        g.alphaB = solve_alpha([](double) { return 0.0; }, 0.5 / 1.5);
        return g;
    }();
    return gc;
}

double phi_gapA_deriv(double u) {
    return std::exp(hermite_qA(u) + gap_coefs().alphaA * bump(u));
}
double phi_gapB_deriv(double u) { return std::exp(gap_coefs().alphaB * bump(u)); }

}  // namespace

double phi_value(double y) {
    if (y <= -1.0) return std::exp(y);
    if (y < -0.5) {
        const double u = 2.0 * (y + 1.0);
        return std::exp(-1.0) + 0.5 * integral01(phi_gapA_deriv, u);
    }
    if (y <= 0.5) return 1.0 + y;
    if (y < 2.0) {
        const double u = (y - 0.5) / 1.5;
        return 1.5 + 1.5 * integral01(phi_gapB_deriv, u);
    }
    return y;
}

double phi_deriv(double y) {
    if (y <= -1.0) return std::exp(y);
    if (y < -0.5) return phi_gapA_deriv(2.0 * (y + 1.0));  // dq/dy absorbed: phi' = e^q itself
    if (y <= 0.5) return 1.0;
    if (y < 2.0) return phi_gapB_deriv((y - 0.5) / 1.5);
    return 1.0;
}

double psi_value(double y) {
    if (y <= -1.0) return std::exp(2.0 * y);
    if (y < -0.5) {
        const double s = smooth5(2.0 * (y + 1.0));
        return (1.0 - s) * std::exp(2.0 * y) + s;
    }
    return 1.0;
}

double psi_deriv(double y) {
    if (y <= -1.0) return 2.0 * std::exp(2.0 * y);
    if (y < -0.5) {
        const double u = 2.0 * (y + 1.0);
        const double s = smooth5(u);
        return (1.0 - s) * 2.0 * std::exp(2.0 * y) + 2.0 * smooth5_d1(u) * (1.0 - std::exp(2.0 * y));
    }
    return 0.0;
}

WeightFamily make_weight_family(const Grid1D& grid, double B, int k) {
    if (!(B > 100.0)) throw std::invalid_argument("make_weight_family: B must exceed 100");
    if (k < 1) throw std::invalid_argument("make_weight_family: k must be positive");
    WeightFamily w{B, k, Field(grid), Field(grid), Field(grid), Field(grid), Field(grid)};
    for (std::size_t i = 0; i < grid.count(); ++i) {
        const double y = grid.node(i);
        const double yb = y / B;
        w.phiB[i] = phi_value(yb);
        w.dphiB[i] = phi_deriv(yb) / B;
        w.psiB[i] = psi_value(yb);
        w.dpsiB[i] = psi_deriv(yb) / B;
        w.phik[i] = y > 0.0 ? std::pow(y, k) : 0.0;
        if (!(w.dphiB[i] > 0.0))
            throw std::logic_error("make_weight_family: phi' must stay positive");
    }
    return w;
}

double norm_NB(const Field& eps, const WeightFamily& w) {
    require_same_grid(eps, w.phiB, "norm_NB");
    const Field deps = differentiate(eps, 1);
    Field integrand(eps.grid());
    for (std::size_t i = 0; i < eps.size(); ++i)
        integrand[i] = deps[i] * deps[i] * w.psiB[i] + eps[i] * eps[i] * w.phiB[i];
    return std::sqrt(integrate(integrand));
}

double functional_F(const Field& eps, const Field& W, const Field& Fext, const WeightFamily& w) {
    require_same_grid(eps, W, "functional_F");
    require_same_grid(eps, Fext, "functional_F");
    const Field deps = differentiate(eps, 1);
    auto sixth = [](double x) {
        const double x2 = x * x;
        return x2 * x2 * x2;
    };
    Field integrand(eps.grid());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double base = W[i] + Fext[i];
        const double pert = base + eps[i];
        const double b2 = base * base;
        const double b5 = b2 * b2 * base;
        integrand[i] = deps[i] * deps[i] * w.psiB[i] + eps[i] * eps[i] * w.phiB[i] -
                       (sixth(pert) - sixth(base) - 6.0 * b5 * eps[i]) * w.psiB[i] / 3.0;
    }
    return integrate(integrand);
}

double scaling_term(double lambda, const Field& eps, const WeightFamily& w) {
    require_same_grid(eps, w.phik, "scaling_term");
    if (!(lambda > 0.0)) throw std::invalid_argument("scaling_term: lambda must be positive");
    const double log_lambda = std::log(lambda);
    const Eigen::VectorXd qw = quadrature_weights(eps.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double y = eps.grid().node(i);
        if (!(y > 0.0) || eps[i] == 0.0) continue;
        // lambda^k y^k eps^2 w assembled in log space: each factor alone may
        // overflow for the large k in play.
        const double ln_term = w.k * (log_lambda + std::log(y)) +
                               2.0 * std::log(std::abs(eps[i])) +
                               std::log(qw(static_cast<long>(i)));
        acc += std::exp(ln_term);
    }
    return acc;
}

double functional_H(double s, double Fval, double lambda, const Field& eps,
                    const WeightFamily& w, const LawParams& p) {
    if (!(s > 0.0)) throw std::invalid_argument("functional_H: s must be positive");
    return std::pow(s, p.j) * Fval + scaling_term(lambda, eps, w);
}

Decomposer::Decomposer(const QbWorkspace& qb, Grid1D ywindow, double lambda_floor)
    : qb_(&qb),
      ygrid_(ywindow),
      lambda_floor_(lambda_floor),
      Q_(eval_Q(ywindow)),
      Qp_(eval_Q_deriv(ywindow, 1)),
      LambdaQ_(ywindow),
      yLambdaQ_(ywindow),
      R_(ywindow),
      P_(ywindow) {
    for (std::size_t i = 0; i < ygrid_.count(); ++i) {
        const double y = ygrid_.node(i);
        LambdaQ_[i] = 0.5 * Q_[i] + y * Qp_[i];
        yLambdaQ_[i] = y * LambdaQ_[i];
    }
    const ProfileSet& ps = qb.profiles();
    if (ygrid_ == ps.grid) {
        R_ = ps.R;
        P_ = ps.P;
    } else {
        for (std::size_t i = 0; i < ygrid_.count(); ++i) {
            R_[i] = interp_value(ps.R, ygrid_.node(i));
            P_[i] = qb.P_at(ygrid_.node(i));
        }
    }
    normLambdaQ2_ = inner_product(LambdaQ_, LambdaQ_);
    PQ_ = inner_product(P_, Q_);
    PLQ_ = inner_product(P_, LambdaQ_);
    PyLQ_ = inner_product(P_, yLambdaQ_);
}

Eigen::Matrix3d Decomposer::analytic_jacobian() const {
    Eigen::Matrix3d J;
    J << 0.0, normLambdaQ2_, -PyLQ_,
         normLambdaQ2_, 0.0, -PLQ_,
         0.0, 0.0, -PQ_;
    return J;
}

Field Decomposer::profile_W(double b, double r) const {
    Field W = qb_->eval_Qb_on(ygrid_, b);
    for (std::size_t i = 0; i < ygrid_.count(); ++i) W[i] += r * R_[i];
    return W;
}

Field Decomposer::rescaled_F(const Field& f, double lambda, double sigma) const {
    const double amp = std::sqrt(lambda);
    Field out(ygrid_);
    for (std::size_t i = 0; i < ygrid_.count(); ++i)
        out[i] = amp * interp_value(f, lambda * ygrid_.node(i) + sigma);
    return out;
}

Eigen::Vector3d Decomposer::theta_map(const Field& v, const Field& f, double lambda, double sigma,
                                      double b, Field* eps_out, double* r_out) const {
    const double amp = std::sqrt(lambda);
    const double r = amp * interp_value(f, sigma);
    const Field Qb = qb_->eval_Qb_on(ygrid_, b);
    Field eps(ygrid_);
    for (std::size_t i = 0; i < ygrid_.count(); ++i) {
        const double x = lambda * ygrid_.node(i) + sigma;
        eps[i] = amp * interp_value(v, x) - Qb[i] - r * R_[i];
    }
    Eigen::Vector3d theta(inner_product(eps, yLambdaQ_), inner_product(eps, LambdaQ_),
                          inner_product(eps, Q_));
    if (eps_out) *eps_out = std::move(eps);
    if (r_out) *r_out = r;
    return theta;
}

DecompositionResult Decomposer::decompose(const Field& v, const Field& f, double /*t*/,
                                          const ModulationState& guess) const {
    double lambda = guess.lambda, sigma = guess.sigma, b = guess.b;
    if (!(lambda > lambda_floor_))
        throw std::invalid_argument("decompose: guess lambda below floor");

    const double tol = 1e-10 * std::sqrt(soliton_constants(default_profile_grid()).intQ2);
    const double fd_h = 1e-6;
    Eigen::Matrix3d J = analytic_jacobian();

    Eigen::Vector3d theta;
    for (int iter = 1; iter <= 50; ++iter) {
        theta = theta_map(v, f, lambda, sigma, b, nullptr, nullptr);
        if (theta.cwiseAbs().maxCoeff() < tol) {
            DecompositionResult res{lambda, sigma, b, 0.0, Field(ygrid_), {0, 0, 0}, iter};
            const Eigen::Vector3d th = theta_map(v, f, lambda, sigma, b, &res.eps, &res.r);
            for (int i = 0; i < 3; ++i) res.orth_residual[i] = th(i);
            res.eps.check_finite("decompose remainder");
            return res;
        }
        if (iter > 1) {
            // Finite-difference refresh in relative frame coordinates.
            for (int c = 0; c < 3; ++c) {
                double lp = lambda, sp = sigma, bp = b;
                double lm = lambda, sm = sigma, bm = b;
                if (c == 0) { lp = lambda * (1.0 + fd_h); lm = lambda * (1.0 - fd_h); }
                if (c == 1) { sp = sigma + lambda * fd_h; sm = sigma - lambda * fd_h; }
                if (c == 2) { bp = b + fd_h; bm = b - fd_h; }
                const Eigen::Vector3d tp = theta_map(v, f, lp, sp, bp, nullptr, nullptr);
                const Eigen::Vector3d tm = theta_map(v, f, lm, sm, bm, nullptr, nullptr);
                J.col(c) = (tp - tm) / (2.0 * fd_h);
            }
        }
        const Eigen::JacobiSVD<Eigen::Matrix3d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double cond = svd.singularValues()(0) / svd.singularValues()(2);
        if (!(cond < 1e8))
            throw std::runtime_error("decompose: Jacobian conditioning beyond 1e8 (regime exit)");
        Eigen::Vector3d delta = svd.solve(-theta);
        const double cap = 0.2;
        const double mag = delta.cwiseAbs().maxCoeff();
        if (mag > cap) delta *= cap / mag;
        lambda *= 1.0 + delta(0);
        sigma += lambda * delta(1);
        b += delta(2);
        if (!(lambda > lambda_floor_))
            throw std::runtime_error("decompose: lambda collapsed below floor");
    }
    throw std::runtime_error("decompose: Newton failed to converge within 50 iterations");
}

TrackSeries track(const Trajectory& traj, const Trajectory& f_traj, const LawParams& p,
                  const Decomposer& dec, const WeightFamily& w) {
    return track(traj, f_traj, p, dec, w, closed_form(p.s0, p));
}

TrackSeries track(const Trajectory& traj, const Trajectory& f_traj, const LawParams& p,
                  const Decomposer& dec, const WeightFamily& w, const ModulationState& guess0) {
    if (traj.times.size() != f_traj.times.size())
        throw std::invalid_argument("track: trajectories are not time-aligned");
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (std::abs(traj.times[i] - f_traj.times[i]) > 1e-12 * (1.0 + traj.times[i]))
            throw std::invalid_argument("track: trajectories are not time-aligned");

    TrackSeries ts;
    ModulationState guess = guess0;
    double s_acc = p.s0;

    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        DecompositionResult res{0, 0, 0, 0, Field(dec.ywindow()), {0, 0, 0}, 0};
        try {
            res = dec.decompose(traj.snapshots[i], f_traj.snapshots[i], traj.times[i], guess);
        } catch (const std::exception& e) {
            ts.truncated = true;
            ts.truncation_reason = e.what();
            break;
        }
        if (i > 0) {
            const double dt = traj.times[i] - traj.times[i - 1];
            const double l0 = ts.lambda.back(), l1 = res.lambda;
            s_acc += 0.5 * (1.0 / (l0 * l0 * l0) + 1.0 / (l1 * l1 * l1)) * dt;
        }
        guess = ModulationState{s_acc, traj.times[i], res.lambda, res.sigma, res.b};
        const GH gh = g_h(guess, p);

        const Field W = dec.profile_W(res.b, res.r);
        const Field Fx = dec.rescaled_F(f_traj.snapshots[i], res.lambda, res.sigma);
        const double Fval = functional_F(res.eps, W, Fx, w);

        ts.s.push_back(s_acc);
        ts.t.push_back(traj.times[i]);
        ts.lambda.push_back(res.lambda);
        ts.sigma.push_back(res.sigma);
        ts.b.push_back(res.b);
        ts.g.push_back(gh.g);
        ts.h.push_back(gh.h);
        ts.NB.push_back(norm_NB(res.eps, w));
        ts.F.push_back(Fval);
        ts.H.push_back(functional_H(s_acc, Fval, res.lambda, res.eps, w, p));
        ts.newton_iterations.push_back(res.newton_iterations);
    }

    const std::size_t n = ts.s.size();
    ts.res_lambda.assign(n, 0.0);
    ts.res_sigma.assign(n, 0.0);
    auto slope_at = [&](const std::vector<double>& q, std::size_t i) {
        const std::size_t lo = (i == 0) ? 0 : i - 1;
        const std::size_t hi = (i + 1 < n) ? i + 1 : i;
        if (hi == lo) return 0.0;
        return (q[hi] - q[lo]) / (ts.s[hi] - ts.s[lo]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double lam_s = slope_at(ts.lambda, i);
        const double sig_s = slope_at(ts.sigma, i);
        ts.res_lambda[i] = std::abs(lam_s / ts.lambda[i] + ts.b[i]);
        ts.res_sigma[i] = std::abs(sig_s / ts.lambda[i] - 1.0);
    }

    // Monotonicity audit: dH/ds against the budget lambda^k s^-5/2 + s^{j-4},
    // with one scale constant matched to the data (ratio of mean magnitudes).
    if (n >= 2) {
        std::vector<double> dH(n - 1), budget(n - 1);
        double mean_dH = 0.0, mean_budget = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            dH[i] = (ts.H[i + 1] - ts.H[i]) / (ts.s[i + 1] - ts.s[i]);
            const double lam = 0.5 * (ts.lambda[i] + ts.lambda[i + 1]);
            const double sm = 0.5 * (ts.s[i] + ts.s[i + 1]);
            budget[i] = std::exp(w.k * std::log(lam)) * std::pow(sm, -2.5) +
                        std::pow(sm, p.j - 4.0);
            mean_dH += std::abs(dH[i]);
            mean_budget += budget[i];
        }
        mean_dH /= static_cast<double>(n - 1);
        mean_budget /= static_cast<double>(n - 1);
        ts.budget_fit_C = std::max(1.0, mean_dH / mean_budget);
        std::size_t violations = 0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (dH[i] > ts.budget_fit_C * budget[i]) ++violations;
        ts.budget_violation_fraction =
            static_cast<double>(violations) / static_cast<double>(n - 1);
    }
    return ts;
}

}  // namespace gkdv

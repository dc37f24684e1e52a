#pragma once

#include "gkdv/grid.hpp"
#include "gkdv/linop.hpp"

namespace gkdv {

/// Smooth transition chi: 0 on (-inf,-2], 1 on [-1,+inf), quintic smoothstep
/// in between (C^2 with vanishing endpoint derivatives; (chi'')^2 <= 120 chi').
double chi_value(double t);
double chi_deriv1(double t);
double chi_deriv2(double t);
double chi_deriv3(double t);

inline constexpr double kCutoffGamma = 0.75;   // exponent in chi(|b|^gamma y)
inline constexpr double kDefaultBStar = 0.05;  // default |b| ceiling

struct LocalizedProfile {
    double b;
    Field Qb;
    Field Pb;
};

/// Workspace for localized-profile construction on a leftward extension of
/// the profile grid (grid spacing preserved, nodes aligned). P and P' are
/// carried over from the ProfileSet and extended by their limits; P'' and
/// P''' come from the profile equation, so the only finite-difference input
/// is a single first derivative of P.
class QbWorkspace {
public:
    QbWorkspace(const ProfileSet& ps, double left_extent = -400.0,
                double b_star = kDefaultBStar);

    const Grid1D& grid() const { return grid_; }
    const ProfileSet& profiles() const { return ps_; }
    double b_star() const { return b_star_; }

    /// Q_b = Q + b P chi(|b|^gamma y). Throws if |b| >= b_star or the plateau
    /// [-2|b|^{-gamma}, 0] sticks out of the grid.
    LocalizedProfile make_Qb(double b) const;

    /// Equation error Psi_b with the profile-equation terms eliminated
    /// analytically: -Psi_b = d/dy[b(P_b'' - P_b) + (Q_b^5 - Q^5)]
    ///                        + b Lambda Q_b - 2 b^2 dQ_b/db.
    Field make_PsiB(double b) const;

    /// dQ_b/db = P_b + gamma |b|^gamma y chi'(|b|^gamma y) P.
    Field dQb_db(double b) const;

    /// Pointwise P with limit extension (1/2 int Q on the left, 0 on the right).
    double P_at(double y) const;

    /// Q_b sampled on an arbitrary grid through P_at (no plateau-coverage
    /// requirement; used by the decomposition window).
    Field eval_Qb_on(const Grid1D& g, double b) const;

private:
    ProfileSet ps_;
    Grid1D grid_;
    double b_star_;
    long offset_;                    // index of profile-grid node 0 in the tail grid
    Field Q_, Qp_, P_, Pp_, Ppp_, Pppp_, LambdaQ_;

    void check_b(double b) const;
};

}  // namespace gkdv

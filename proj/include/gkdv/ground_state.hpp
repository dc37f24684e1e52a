#pragma once

#include <cstddef>

#include "gkdv/grid.hpp"

namespace gkdv {

/// Pointwise ground state Q(x) = (3 sech^2(2x))^(1/4) and its first three
/// derivatives in closed form (Q'' is eliminated through the profile
/// equation Q'' = Q - Q^5).
double Q_value(double x);
double Q_deriv1(double x);
double Q_deriv2(double x);
double Q_deriv3(double x);

Field eval_Q(const Grid1D& grid);
Field eval_Q_deriv(const Grid1D& grid, int order);

/// Scaling generator: (Lambda f)(y) = f/2 + y f', with f' from differentiate.
Field apply_Lambda(const Field& f);

double mass(const Field& f);
double energy(const Field& f);

/// lambda^{-1/2} f((x - sigma)/lambda) sampled on `target`. Cubic-family local
/// interpolation on bounded sources, trigonometric on periodic sources.
/// Points falling outside a bounded source are clamped to 0; the count is
/// reported through *clamped when given.
Field rescale(const Field& f, double lambda, double sigma, const Grid1D& target,
              std::size_t* clamped = nullptr);

/// (1/3 int f^6) / [ (int f^2 / int Q^2)^2 int (f')^2 ]; <= 1 with equality at Q.
double gn_ratio(const Field& f);

struct SolitonConstants {
    double intQ;          // int Q
    double intQ2;         // int Q^2
    double intQ6;         // int Q^6
    double intQy2;        // int (Q')^2
    double normLambdaQ2;  // ||Lambda Q||_{L2}^2
    double energyQ;       // E(Q)
};

/// Quadrature on the given grid; defaults to the standard profile box.
SolitonConstants soliton_constants(const Grid1D& grid);

/// The default working box for profile construction: [-60, 60], n = 2048.
Grid1D default_profile_grid();

}  // namespace gkdv

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "gkdv/grid.hpp"

namespace gkdv {

/// d^order/dx^order of a sampled field. Spectral (FFT) on periodic grids,
/// centered finite differences of interior accuracy kFdAccuracy on bounded
/// grids with one-sided stencils of the same width at the endpoints.
/// order must be 1, 2 or 3.
Field differentiate(const Field& f, int order);

inline constexpr int kFdAccuracy = 12;

/// Trapezoidal rule on bounded grids, rectangle rule on periodic grids.
double integrate(const Field& f);

/// integrate(f*g); requires the same grid.
double inner_product(const Field& f, const Field& g);

/// sqrt(integral of f^2 * weight); weight must be strictly positive.
double weighted_norm(const Field& f, const Field& weight);

/// L2 norm sqrt(integral f^2).
double norm_L2(const Field& f);

/// Fornberg finite-difference weights for derivative `order` at point x0
/// given stencil nodes x. Returns one weight per node.
std::vector<double> fd_weights(double x0, const std::vector<double>& x, int order);

/// Local 6-point Lagrange interpolation of f at point x. On periodic grids the
/// stencil wraps; on bounded grids it is clamped at the ends. Points outside
/// the domain of a bounded grid return 0 and increment *clamped if given.
double interp_value(const Field& f, double x, std::size_t* clamped = nullptr);

/// Trigonometric interpolant of a periodic field; exact for band-limited
/// data. The Fourier transform is taken once at construction; each
/// evaluation is O(n).
class TrigInterpolant {
public:
    explicit TrigInterpolant(const Field& f);
    double operator()(double x) const;

private:
    double left_, length_;
    std::size_t n_;
    std::vector<std::complex<double>> coeff_;  // modes 0..n/2
};

/// Cumulative integral of an analytic function from the right grid end:
/// out[i] = integral_{x_i}^{x_{n-1}} fn dx, by 7-point Gauss-Legendre per cell.
std::vector<double> cumulative_from_right(const Grid1D& grid,
                                          const std::function<double(double)>& fn);

/// Least-squares slope of log|y| against log(x), skipping non-positive |y|.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares slope of y against x.
double linear_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gkdv

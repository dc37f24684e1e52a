#pragma once

#include "gkdv/grid.hpp"

namespace gkdv {

/// Slowly decaying right-side tail: zero for x < x0/4, c0 x^{-theta} for
/// x > x0/2, a single C^3 smoothstep ramp multiplying the power law between.
struct TailSpec {
    double c0;     // < 0
    double theta;  // > 3/2
    double x0;     // >> 1
};

/// Pointwise f0 and its first two derivatives (closed form).
double f0_value(double x, const TailSpec& spec);
double f0_deriv(double x, const TailSpec& spec, int k);  // k in {0,1,2}

/// Samples f0 on the grid; the grid must extend to at least 4*x0 on the
/// right. The derivative envelopes |f0^(k)| <= C_k |c0| x^{-theta-k} are
/// checked on construction (generous ceiling; violation reports the node).
Field build_f0(const Grid1D& grid, const TailSpec& spec);

/// Fitted envelope constants C_k = sup |f0^(k)(x)| x^{theta+k} / |c0|.
struct TailEnvelope {
    double C0, C1, C2;
};
TailEnvelope f0_envelope(const Grid1D& grid, const TailSpec& spec);

/// Multiply the field by a smooth down-ramp on the final `frac` portion of
/// the box so a power tail can live on a periodic domain without a seam.
Field taper_right(const Field& f, double frac = 0.1);

struct TailPersistenceReport {
    double t;
    double region_left;     // t/2 + x0/2
    double region_right;    // cap (taper exclusion); +inf when unused
    bool region_nonempty;
    double supW0;           // sup |f(t,x) - f0(x)| x^{theta+2}
    double supW1;           // sup |f'(t,x) - f0'(x)| x^{theta+3}
    double sup_dt;          // sup |df/dt| x^{theta+3}; NaN without a probe snapshot
};

/// Weighted persistence check over x > t/2 + x0/2 (optionally capped on the
/// right). f_probe, when given, is the solution at t + dt_probe and feeds a
/// one-sided time-derivative estimate.
TailPersistenceReport check_tail_persistence(const Field& f_evolved, const Field& f0, double t,
                                             const TailSpec& spec,
                                             double region_right_cap = 0.0,
                                             const Field* f_probe = nullptr,
                                             double dt_probe = 0.0);

}  // namespace gkdv

#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gkdv/grid.hpp"
#include "gkdv/laws.hpp"
#include "gkdv/qb_profiles.hpp"

namespace gkdv {

/// Raised when a step produces non-finite samples; carries the last time at
/// which the state was still finite.
class BlowupDetected : public std::runtime_error {
public:
    explicit BlowupDetected(double last_valid_time)
        : std::runtime_error("numerical blow-up detected"), last_valid_time_(last_valid_time) {}
    double last_valid_time() const { return last_valid_time_; }

private:
    double last_valid_time_;
};

struct EvolutionConfig {
    Grid1D box;                      // periodic
    double dt = 0.0;                 // 0 -> pick the largest dt under the guard
    double cfl_c = 1.0;              // guard constant: dt <= cfl_c * spacing^3
    double dealias_frac = 2.0 / 3.0;
    double snapshot_dt = 0.0;        // 0 -> snapshots only at start and end

    double max_dt() const {
        const double h = box.spacing();
        return cfl_c * h * h * h;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<double> mass_drift;    // (M(t) - M(0)) / M(0)
    std::vector<double> energy_drift;  // E(t) - E(0)
};

/// ETDRK4 stepper for u_t = -(u_xx + u^5)_x on a periodic box: the
/// third-derivative term is integrated exactly in Fourier space, the quintic
/// term by explicit stages with 2/3-rule dealiasing. FFTW plans and the
/// phi-function weights are cached per (box, dt).
class GkdvStepper {
public:
    GkdvStepper(const EvolutionConfig& cfg, double dt);
    ~GkdvStepper();
    GkdvStepper(const GkdvStepper&) = delete;
    GkdvStepper& operator=(const GkdvStepper&) = delete;

    double dt() const { return dt_; }
    void to_spectral(const Field& u);
    Field to_field(const Grid1D& box) const;
    void advance();                     // one dt step in spectral space
    bool finite_state() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double dt_;
};

/// One step of the scheme (convenience wrapper; validates dt against the guard).
Field step(const Field& u, double dt, const EvolutionConfig& cfg);

using Observer = std::function<void(double, const Field&)>;

/// Repeated stepping with snapshotting and conservation diagnostics.
Trajectory evolve(const Field& u0, double t_end, const EvolutionConfig& cfg,
                  const std::vector<Observer>& observers = {});

/// Initial data of the blow-up experiment:
///   U0(x) = lambda0^{-1/2} (Q_b0 + r0 R + eps0)((x - sigma0)/lambda0) + f(x),
/// r0 = lambda0^{1/2} f(sigma0). The inner profile is assembled on the
/// workspace tail grid and rescaled onto the box of f_snapshot. Corridor
/// violations throw with the offending condition named.
Field build_U0(const LawParams& p, double lambda0, double sigma0, double b0, const Field& eps0,
               const Field& f_snapshot, const QbWorkspace& qb);

/// Corridor midpoint for lambda0 (the h(s0) = 0 choice) and its half-width.
double lambda0_midpoint(const LawParams& p, double sigma0);
double lambda0_halfwidth_base(const LawParams& p);  // s0^{-beta/2 - 2 rho}

}  // namespace gkdv

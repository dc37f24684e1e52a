#include "gkdv/calculus.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace gkdv {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// r2c transform of real samples; returns n/2+1 complex modes (unnormalized).
std::vector<std::complex<double>> forward_fft(std::span<const double> in) {
    const std::size_t n = in.size();
    std::vector<double> buf(in.begin(), in.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> inverse_fft(std::vector<std::complex<double>> modes, std::size_t n) {
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                    reinterpret_cast<fftw_complex*>(modes.data()), out.data(),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= inv;
    return out;
}

Field differentiate_periodic(const Field& f, int order) {
    const std::size_t n = f.grid().count();
    auto modes = forward_fft(f.samples());
    const double k0 = 2.0 * std::numbers::pi / f.grid().length();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const std::complex<double> ik(0.0, k0 * static_cast<double>(m));
        std::complex<double> mult = 1.0;
        for (int p = 0; p < order; ++p) mult *= ik;
        modes[m] *= mult;
    }
    if (order % 2 == 1 && n % 2 == 0) modes[n / 2] = 0.0;  // Nyquist mode has no odd derivative
    return Field(f.grid(), inverse_fft(std::move(modes), n));
}

// Interior stencil half-width for derivative m at accuracy kFdAccuracy.
std::size_t stencil_size(int order) {
    return 2 * static_cast<std::size_t>((order + 1) / 2) + kFdAccuracy - 1;
}

Field differentiate_bounded(const Field& f, int order) {
    const std::size_t n = f.grid().count();
    const std::size_t w = stencil_size(order);
    if (n < w || n < 2 * static_cast<std::size_t>(order) + 2)
        throw std::invalid_argument("differentiate: grid too coarse for requested order");
    const double h = f.grid().spacing();
    const std::size_t half = w / 2;

    // Offsets in units of h; weights carry the 1/h^order factor.
    std::vector<double> xs(w);
    auto weights_at = [&](std::size_t first, double x0_offset) {
        for (std::size_t j = 0; j < w; ++j)
            xs[j] = static_cast<double>(first + j);
        auto wgt = fd_weights(x0_offset, xs, order);
        const double scale = std::pow(h, -order);
        for (double& v : wgt) v *= scale;
        return wgt;
    };

    const auto interior = weights_at(0, static_cast<double>(half));
    Field out(f.grid());
    const auto s = f.samples();
    for (std::size_t i = half; i + half < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < w; ++j) acc += interior[j] * s[i - half + j];
        out[i] = acc;
    }
    for (std::size_t i = 0; i < half; ++i) {
        const auto wgt = weights_at(0, static_cast<double>(i));
        double acc = 0.0;
        for (std::size_t j = 0; j < w; ++j) acc += wgt[j] * s[j];
        out[i] = acc;
    }
    for (std::size_t i = n - half; i < n; ++i) {
        const std::size_t first = n - w;
        const auto wgt = weights_at(0, static_cast<double>(i - first));
        double acc = 0.0;
        for (std::size_t j = 0; j < w; ++j) acc += wgt[j] * s[first + j];
        out[i] = acc;
    }
    return out;
}

}  // namespace

Field differentiate(const Field& f, int order) {
    if (order < 1 || order > 3)
        throw std::invalid_argument("differentiate: order must be 1, 2 or 3");
    f.check_finite("differentiate input");
    Field out = f.grid().periodic() ? differentiate_periodic(f, order)
                                    : differentiate_bounded(f, order);
    out.check_finite("differentiate output");
    return out;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& x, int order) {
    // Fornberg (1988): weights for derivatives 0..order at x0 on nodes x.
    const std::size_t n = x.size();
    const int m = order;
    std::vector<double> c(n * static_cast<std::size_t>(m + 1), 0.0);
    auto C = [&](std::size_t i, int j) -> double& {
        return c[i * static_cast<std::size_t>(m + 1) + static_cast<std::size_t>(j)];
    };
    double c1 = 1.0;
    double c4 = x[0] - x0;
    C(0, 0) = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = C(i, m);
    return out;
}

double integrate(const Field& f) {
    f.check_finite("integrate input");
    const auto s = f.samples();
    const double h = f.grid().spacing();
    double acc = 0.0;
    if (f.grid().periodic()) {
        for (double v : s) acc += v;
        return acc * h;
    }
    acc = 0.5 * (s.front() + s.back());
    for (std::size_t i = 1; i + 1 < s.size(); ++i) acc += s[i];
    return acc * h;
}

double inner_product(const Field& f, const Field& g) {
    require_same_grid(f, g, "inner_product");
    return integrate(pointwise_mul(f, g));
}

double weighted_norm(const Field& f, const Field& weight) {
    require_same_grid(f, weight, "weighted_norm");
    for (double w : weight.samples())
        if (!(w > 0.0)) throw std::invalid_argument("weighted_norm: weight must be strictly positive");
    Field w2(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) w2[i] = f[i] * f[i] * weight[i];
    return std::sqrt(integrate(w2));
}

double norm_L2(const Field& f) { return std::sqrt(inner_product(f, f)); }

double interp_value(const Field& f, double x, std::size_t* clamped) {
    const Grid1D& g = f.grid();
    const std::size_t n = g.count();
    const double h = g.spacing();
    static constexpr std::size_t kPts = 6;

    if (!g.periodic() && (x < g.left() || x > g.right())) {
        if (clamped) ++(*clamped);
        return 0.0;
    }

    double t = (x - g.left()) / h;
    long i0 = static_cast<long>(std::floor(t)) - 2;
    if (!g.periodic()) {
        if (i0 < 0) i0 = 0;
        if (i0 > static_cast<long>(n - kPts)) i0 = static_cast<long>(n - kPts);
    }

    double xs[kPts], ys[kPts];
    for (std::size_t j = 0; j < kPts; ++j) {
        const long idx = i0 + static_cast<long>(j);
        xs[j] = static_cast<double>(idx);
        const long wrapped = g.periodic() ? ((idx % static_cast<long>(n)) + n) % static_cast<long>(n)
                                          : idx;
        ys[j] = f[static_cast<std::size_t>(wrapped)];
    }
    // Lagrange polynomial through the 6 stencil points, in index units.
    double acc = 0.0;
    for (std::size_t j = 0; j < kPts; ++j) {
        double lj = 1.0;
        for (std::size_t k = 0; k < kPts; ++k) {
            if (k == j) continue;
            lj *= (t - xs[k]) / (xs[j] - xs[k]);
        }
        acc += lj * ys[j];
    }
    return acc;
}

TrigInterpolant::TrigInterpolant(const Field& f)
    : left_(f.grid().left()), length_(f.grid().length()), n_(f.grid().count()) {
    if (!f.grid().periodic())
        throw std::invalid_argument("TrigInterpolant: requires a periodic grid");
    coeff_ = forward_fft(f.samples());
    const double inv = 1.0 / static_cast<double>(n_);
    for (auto& c : coeff_) c *= inv;
}

double TrigInterpolant::operator()(double x) const {
    const double theta = 2.0 * std::numbers::pi * (x - left_) / length_;
    // Real signal: f(x) = c0 + 2*sum_{m=1}^{n/2-1} Re(c_m e^{im theta}) + Re(c_{n/2} e^{i n/2 theta})
    double acc = coeff_[0].real();
    const std::complex<double> rot(std::cos(theta), std::sin(theta));
    std::complex<double> e = rot;
    for (std::size_t m = 1; m + 1 < coeff_.size(); ++m) {
        acc += 2.0 * (coeff_[m] * e).real();
        e *= rot;
    }
    if (n_ % 2 == 0) acc += (coeff_.back() * e).real();
    return acc;
}

std::vector<double> cumulative_from_right(const Grid1D& grid,
                                          const std::function<double(double)>& fn) {
    // 7-point Gauss-Legendre nodes/weights on [-1,1].
    static const double gx[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                                 0.0,                  0.4058451513773972,  0.7415311855993945,
                                 0.9491079123427585};
    static const double gw[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                 0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                 0.1294849661688697};
    const std::size_t n = grid.count();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) {
        const double a = grid.node(i), b = grid.node(i + 1);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double cell = 0.0;
        for (int q = 0; q < 7; ++q) cell += gw[q] * fn(mid + half * gx[q]);
        out[i] = out[i + 1] + cell * half;
    }
    return out;
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_slope: need matching vectors of size >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("linear_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && std::abs(y[i]) > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(std::abs(y[i])));
        }
    }
    return linear_slope(lx, ly);
}

}  // namespace gkdv

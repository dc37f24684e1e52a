#include <cmath>
#include <vector>

#include "doctest.h"
#include "gkdv/calculus.hpp"
#include "gkdv/ground_state.hpp"
#include "gkdv/linop.hpp"
#include "gkdv/qb_profiles.hpp"

using namespace gkdv;

namespace {
const QbWorkspace& workspace() {
    static const QbWorkspace qb(shared_profile_set());
    return qb;
}
}  // namespace

TEST_CASE("cutoff function") {
    CHECK(chi_value(-2.5) == 0.0);
    CHECK(chi_value(-2.0) == 0.0);
    CHECK(chi_value(-1.0) == 1.0);
    CHECK(chi_value(0.7) == 1.0);
    double supC = 0.0;
    for (double t = -2.2; t <= -0.8; t += 1e-4) {
        const double c = chi_value(t);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        const double d1 = chi_deriv1(t);
        const double d2 = chi_deriv2(t);
        if (d1 > 1e-12) supC = std::max(supC, d2 * d2 / d1);
    }
    // (chi'')^2 <= 120 chi' holds exactly for the quintic smoothstep
    CHECK(supC <= 120.0 + 1e-9);

    // chi derivatives agree with centered differences
    for (double t : {-1.9, -1.5, -1.2}) {
        const double h = 1e-6;
        CHECK(chi_deriv1(t) ==
              doctest::Approx((chi_value(t + h) - chi_value(t - h)) / (2 * h)).epsilon(1e-6));
        CHECK(chi_deriv2(t) ==
              doctest::Approx((chi_deriv1(t + h) - chi_deriv1(t - h)) / (2 * h)).epsilon(1e-6));
        CHECK(chi_deriv3(t) ==
              doctest::Approx((chi_deriv2(t + h) - chi_deriv2(t - h)) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("localized profile assembly") {
    const QbWorkspace& qb = workspace();

    SUBCASE("definition holds pointwise") {
        const LocalizedProfile lp = qb.make_Qb(0.02);
        const Field Q = eval_Q(qb.grid());
        for (std::size_t i = 0; i < qb.grid().count(); ++i)
            CHECK(std::abs(lp.Qb[i] - Q[i] - 0.02 * lp.Pb[i]) < 1e-12);
    }
    SUBCASE("cutoff branches of P_b") {
        const double b = 0.02;
        const LocalizedProfile lp = qb.make_Qb(b);
        const double edge = std::pow(b, -kCutoffGamma);
        for (std::size_t i = 0; i < qb.grid().count(); ++i) {
            const double y = qb.grid().node(i);
            if (y < -2.0 * edge) CHECK(lp.Pb[i] == 0.0);
            if (y > -edge) CHECK(lp.Pb[i] == doctest::Approx(qb.P_at(y)).epsilon(1e-12));
        }
    }
    SUBCASE("small-b limit") {
        const double b = 1e-4;
        const QbWorkspace wide(shared_profile_set(), -2.0 * std::pow(1e-4, -0.75) - 10.0);
        const LocalizedProfile lp = wide.make_Qb(b);
        const Field Q = eval_Q(wide.grid());
        double dev = 0.0, Pmax = 0.0;
        for (std::size_t i = 0; i < wide.grid().count(); ++i) {
            dev = std::max(dev, std::abs(lp.Qb[i] - Q[i]));
            Pmax = std::max(Pmax, std::abs(wide.P_at(wide.grid().node(i))));
        }
        CHECK(dev < b * Pmax * 1.01);
    }
    SUBCASE("domain guards") {
        CHECK_THROWS_AS(qb.make_Qb(0.05), std::invalid_argument);   // at b_star
        CHECK_THROWS_AS(qb.make_Qb(1e-4), std::invalid_argument);   // plateau outside grid
        const QbWorkspace narrow(shared_profile_set(), -100.0);
        CHECK_THROWS_AS(narrow.make_Qb(0.003), std::invalid_argument);
    }
    SUBCASE("pointwise envelope") {
        double C = 0.0;
        for (double b : {5e-3, 2e-2}) {
            const LocalizedProfile lp = qb.make_Qb(b);
            const double a = std::pow(b, kCutoffGamma);
            for (std::size_t i = 0; i < qb.grid().count(); ++i) {
                const double y = qb.grid().node(i);
                const double ind = (a * y >= -2.0 && a * y <= 0.0) ? 1.0 : 0.0;
                const double env =
                    std::exp(-std::abs(y)) + b * (ind + std::exp(-std::abs(y) / 2.0));
                C = std::max(C, std::abs(lp.Qb[i]) / env);
            }
        }
        CHECK(C > 0.0);
        CHECK(C < 5.0);
    }
}

TEST_CASE("mass and energy expansions of Q_b") {
    const QbWorkspace& qb = workspace();
    const ProfileSet& ps = shared_profile_set();
    const Field Q = eval_Q(qb.grid());
    const double intQ2 = inner_product(Q, Q);

    std::vector<double> bs{1e-3, 2e-3, 4e-3, 7e-3, 1e-2}, m_err, e_err;
    for (double b : bs) {
        const LocalizedProfile lp = qb.make_Qb(b);
        m_err.push_back(std::abs(mass(lp.Qb) - intQ2 - 2.0 * b * ps.PQ));
        e_err.push_back(std::abs(energy(lp.Qb) + b * ps.PQ));
    }
    CHECK(loglog_slope(bs, m_err) >= 1.25 - 0.1);
    CHECK(loglog_slope(bs, e_err) >= 2.0 - 0.15);
}

TEST_CASE("equation error Psi_b") {
    const QbWorkspace& qb = workspace();
    const Grid1D& tg = qb.grid();
    const Field Q = eval_Q(tg);
    Field LQ(tg);
    for (std::size_t i = 0; i < tg.count(); ++i) {
        const double y = tg.node(i);
        LQ[i] = 0.5 * Q_value(y) + y * Q_deriv1(y);
    }

    SUBCASE("vanishes at b = 0") {
        CHECK(qb.make_PsiB(0.0).max_abs() < 1e-7);
    }
    SUBCASE("projection scalings") {
        std::vector<double> bs{3e-3, 6e-3, 1.2e-2, 2e-2, 3e-2}, pq, plq;
        for (double b : bs) {
            const Field psi = qb.make_PsiB(b);
            pq.push_back(std::abs(inner_product(psi, Q)));
            plq.push_back(std::abs(inner_product(psi, LQ)));
        }
        CHECK(loglog_slope(bs, pq) >= 3.0 - 0.2);
        CHECK(loglog_slope(bs, plq) >= 2.0 - 0.15);
    }
    SUBCASE("weighted norm scaling") {
        // the cutoff-bump contribution to ||Psi_b||_{L2_B} dies off faster
        // than any power of b but dominates until |b|^{-gamma} >> B; the b^2
        // envelope is binding only below that crossover
        const QbWorkspace wide(shared_profile_set(), -2700.0);
        std::vector<double> bs{7e-5, 1.2e-4, 2e-4, 3e-4}, l2b;
        const Field wB = make_field(wide.grid(), [](double y) { return std::exp(y / 128.0); });
        for (double b : bs) l2b.push_back(weighted_norm(wide.make_PsiB(b), wB));
        CHECK(loglog_slope(bs, l2b) >= 2.0 - 0.2);
    }
}

TEST_CASE("dQ_b/db matches centered differences") {
    const QbWorkspace& qb = workspace();
    const double b = 0.01, delta = 1e-6;
    const Field analytic = qb.dQb_db(b);
    const Field plus = qb.make_Qb(b + delta).Qb;
    const Field minus = qb.make_Qb(b - delta).Qb;
    double dev = 0.0;
    for (std::size_t i = 0; i < qb.grid().count(); ++i)
        dev = std::max(dev, std::abs(analytic[i] - (plus[i] - minus[i]) / (2.0 * delta)));
    CHECK(dev < 1e-5);
}

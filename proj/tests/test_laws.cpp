#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gkdv/ground_state.hpp"
#include "gkdv/laws.hpp"

using namespace gkdv;

namespace {
double ref_intQ() {
    static const double v = soliton_constants(default_profile_grid()).intQ;
    return v;
}
}  // namespace

TEST_CASE("parameter algebra from nu") {
    SUBCASE("nu = 2/3 gives theta = 2") {
        const LawParams p = params_from_nu(2.0 / 3.0, ref_intQ());
        CHECK(p.beta == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
        CHECK(p.theta == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(p.c0 == doctest::Approx(-1.5 * ref_intQ()).epsilon(1e-14));
        CHECK(p.B == 128.0);
    }
    SUBCASE("nu near 1 sends beta and theta to their left limits") {
        const LawParams p = params_from_nu(0.999, ref_intQ());
        CHECK(p.beta > 0.5);
        CHECK(p.beta < 0.51);
        CHECK(p.theta > 1.5);
        CHECK(p.theta < 1.6);
    }
    SUBCASE("nu = 0.55 demands a large k") {
        const LawParams p = params_from_nu(0.55, ref_intQ());
        CHECK(p.k >= 46);
        CHECK(static_cast<double>(p.k) > 2.0 * (1.0 + p.j) / (1.0 - p.beta));
    }
    SUBCASE("round trip beta -> nu") {
        for (double nu : {0.55, 2.0 / 3.0, 0.8, 0.95}) {
            const LawParams p = params_from_nu(nu, ref_intQ());
            CHECK(std::abs(p.beta / (3.0 * p.beta - 1.0) - nu) < 1e-14);
        }
    }
    SUBCASE("domain guard") {
        CHECK_THROWS_AS(params_from_nu(0.5, ref_intQ()), std::invalid_argument);
        CHECK_THROWS_AS(params_from_nu(1.0, ref_intQ()), std::invalid_argument);
    }
    SUBCASE("constant identity (2 c0/((theta-1) intQ))^2 = (2 theta-1)^(2 theta-2)") {
        for (double theta : {1.75, 2.0, 3.0}) {
            const double beta = 2.0 * (theta - 1.0) / (2.0 * theta - 1.0);
            const LawParams p = params_from_nu(beta / (3.0 * beta - 1.0), ref_intQ());
            const double lhs = std::pow(2.0 * p.c0 / ((p.theta - 1.0) * p.intQ), 2.0);
            const double rhs = std::pow(2.0 * p.theta - 1.0, 2.0 * p.theta - 2.0);
            CHECK(std::abs(lhs - rhs) < 1e-12 * rhs);
        }
    }
}

TEST_CASE("closed-form family") {
    const LawParams p = params_from_nu(2.0 / 3.0, ref_intQ());
    SUBCASE("powers of one") {
        const ModulationState st = closed_form(1.0, p);
        CHECK(st.lambda == 1.0);
        CHECK(st.sigma == doctest::Approx(1.0 / (1.0 - p.beta)).epsilon(1e-14));
        CHECK(st.b == doctest::Approx(p.beta).epsilon(1e-14));
    }
    SUBCASE("beta = 2/3 at s = 8") {
        CHECK(closed_form(8.0, p).lambda == doctest::Approx(0.25).epsilon(1e-14));
    }
    SUBCASE("g and h vanish identically") {
        for (double theta : {1.75, 2.0, 3.0}) {
            const double beta = 2.0 * (theta - 1.0) / (2.0 * theta - 1.0);
            const LawParams q = params_from_nu(beta / (3.0 * beta - 1.0), ref_intQ());
            for (double s : {1.0, 5.0, 40.0, 300.0}) {
                const ModulationState st = closed_form(s, q);
                const GH gh = g_h(st, q);
                CHECK(std::abs(gh.g) < 1e-10 * std::abs(st.b / (st.lambda * st.lambda)));
                CHECK(std::abs(gh.h) < 1e-10 * std::sqrt(st.lambda));
            }
        }
    }
}

TEST_CASE("auxiliary functions g and h") {
    const LawParams p = params_from_nu(2.0 / 3.0, ref_intQ());
    SUBCASE("doubling lambda at fixed sigma, b decreases g for b > 0") {
        ModulationState st = closed_form(20.0, p);
        const double g0 = g_h(st, p).g;
        st.lambda *= 2.0;
        CHECK(g_h(st, p).g < g0);
    }
    SUBCASE("h vanishes exactly at its defining lambda") {
        ModulationState st = closed_form(20.0, p);
        const double base = (2.0 * p.c0 / ((1.0 - p.theta) * p.intQ)) *
                            std::pow(st.sigma, 1.0 - p.theta);
        st.lambda = base * base;
        CHECK(std::abs(g_h(st, p).h) < 1e-14);
    }
}

TEST_CASE("modulation system right-hand side") {
    const LawParams p = params_from_nu(2.0 / 3.0, ref_intQ());
    SUBCASE("closed forms are exact solutions") {
        for (double s : {2.0, 10.0, 100.0}) {
            const ModulationState st = closed_form(s, p);
            const auto d = ode_rhs(st, p);
            const double lam_s = -p.beta * std::pow(s, -p.beta - 1.0);
            const double sig_s = std::pow(s, -p.beta);
            const double b_s = -p.beta / (s * s);
            CHECK(std::abs(d[0] - lam_s) < 1e-10 * std::abs(lam_s));
            CHECK(std::abs(d[1] - sig_s) < 1e-10 * std::abs(sig_s));
            CHECK(std::abs(d[2] - b_s) < 1e-10 * std::abs(b_s));
        }
    }
    SUBCASE("b = 0 freezes the scale") {
        ModulationState st = closed_form(5.0, p);
        st.b = 0.0;
        CHECK(ode_rhs(st, p)[0] == 0.0);
    }
    SUBCASE("positivity guard") {
        ModulationState st = closed_form(5.0, p);
        st.sigma = -1.0;
        CHECK_THROWS_AS(ode_rhs(st, p), std::invalid_argument);
    }
}

TEST_CASE("law integration") {
    const LawParams p = params_from_nu(2.0 / 3.0, ref_intQ());
    SUBCASE("zero-length integration returns the initial state") {
        const ModulationState init = closed_form(10.0, p);
        const auto traj = integrate_laws(init, 10.0, p);
        REQUIRE(traj.size() == 1);
        CHECK(traj[0].lambda == init.lambda);
    }
    SUBCASE("matches the closed form over a decade") {
        const auto traj = integrate_laws(closed_form(10.0, p), 100.0, p, 1e-12, 181);
        for (const auto& st : traj) {
            const double lam = std::pow(st.s, -p.beta);
            CHECK(std::abs(st.lambda - lam) < 1e-6 * lam);
        }
    }
    SUBCASE("g is a first integral of the flow") {
        const ModulationState init = closed_form(10.0, p);
        const auto traj = integrate_laws(init, 100.0, p, 1e-12, 51);
        const double g0 = g_h(traj.front(), p).g;
        for (const auto& st : traj) CHECK(std::abs(g_h(st, p).g - g0) < 1e-8);
    }
    SUBCASE("perturbing b excites the h instability") {
        ModulationState init = closed_form(10.0, p);
        init.b += 1e-3 / 10.0;
        const auto traj = integrate_laws(init, 100.0, p, 1e-12, 51);
        const double h0 = std::abs(g_h(traj.front(), p).h);
        const double h1 = std::abs(g_h(traj.back(), p).h);
        CHECK(h1 > h0);
    }
    SUBCASE("sigma power identity along closed forms") {
        const auto traj = integrate_laws(closed_form(10.0, p), 100.0, p, 1e-12, 101);
        const double expo = 1.0 / (1.0 - p.beta);
        const double target = std::pow(1.0 - p.beta, -expo);
        for (std::size_t i = 1; i < traj.size(); ++i) {
            const double ds = traj[i].s - traj[i - 1].s;
            const double d = (std::pow(traj[i].sigma, expo) - std::pow(traj[i - 1].sigma, expo)) / ds;
            CHECK(std::abs(d - target) < 1e-8 * target);
        }
    }
}

TEST_CASE("time map and blow-up time") {
    const LawParams p = params_from_nu(2.0 / 3.0, ref_intQ());
    SUBCASE("constant scale gives t = s - s0") {
        std::vector<ModulationState> traj;
        for (double s = 1.0; s <= 5.0; s += 0.5)
            traj.push_back({s, std::numeric_limits<double>::quiet_NaN(), 1.0, 1.0, 0.0});
        const TimeMap tm = time_map(traj, p);
        for (std::size_t i = 0; i < traj.size(); ++i)
            CHECK(tm.t[i] == doctest::Approx(traj[i].s - 1.0).epsilon(1e-14));
    }
    SUBCASE("closed-form remaining time") {
        const double s0 = 10.0;
        const auto traj = integrate_laws(closed_form(s0, p), 100.0 * s0, p, 1e-13, 2001);
        const TimeMap tm = time_map(traj, p);
        const double m = 3.0 * p.beta - 1.0;
        for (std::size_t i = 0; i < traj.size(); i += 100) {
            const double expect = std::pow(traj[i].s, -m) / m;
            CHECK(std::abs((tm.T_estimate - tm.t[i]) - expect) < 1e-6 * expect);
        }
    }
    SUBCASE("rate conversion") {
        const double s0 = 10.0;
        const auto traj = integrate_laws(closed_form(s0, p), 100.0 * s0, p, 1e-13, 501);
        const TimeMap tm = time_map(traj, p);
        const double expo = p.beta / (3.0 * p.beta - 1.0);
        for (std::size_t i = 0; i < traj.size(); i += 50) {
            const double pred = std::pow((3.0 * p.beta - 1.0) * (tm.T_estimate - tm.t[i]), expo);
            CHECK(std::abs(traj[i].lambda - pred) < 1e-5 * pred);
        }
    }
    SUBCASE("monotonicity guard") {
        std::vector<ModulationState> bad = {closed_form(2.0, p), closed_form(1.0, p)};
        CHECK_THROWS_AS(time_map(bad, p), std::invalid_argument);
    }
}

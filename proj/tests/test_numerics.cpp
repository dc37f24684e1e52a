#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gkdv/calculus.hpp"
#include "gkdv/field_io.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/ground_state.hpp"
#include "gkdv/linsolve.hpp"

using namespace gkdv;

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid1D::periodic(0.0, 1.0, 100), std::invalid_argument);  // not a power of two
    CHECK_THROWS_AS(Grid1D::bounded(0.0, 1.0, 8), std::invalid_argument);     // too few nodes
    CHECK_THROWS_AS(Grid1D::bounded(1.0, 0.0, 64), std::invalid_argument);
    const Grid1D p = Grid1D::periodic(0.0, 2.0, 64);
    CHECK(p.spacing() == doctest::Approx(2.0 / 64));
    const Grid1D b = Grid1D::bounded(0.0, 2.0, 65);
    CHECK(b.spacing() == doctest::Approx(2.0 / 64));
    CHECK(b.node(64) == doctest::Approx(2.0));
}

TEST_CASE("spectral differentiation of sin") {
    const Grid1D g = Grid1D::periodic(0.0, 2.0 * std::numbers::pi, 128);
    const Field f = make_field(g, [](double x) { return std::sin(x); });
    const Field d = differentiate(f, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < g.count(); ++i)
        err = std::max(err, std::abs(d[i] - std::cos(g.node(i))));
    CHECK(err < 1e-10);
}

TEST_CASE("derivatives of a constant vanish") {
    // one-sided high-order stencil weights amplify roundoff near the ends,
    // so the order-3 floor is looser
    const double tol[4] = {0.0, 1e-9, 1e-8, 1e-5};
    for (auto kind : {Grid1D::periodic(0.0, 1.0, 64), Grid1D::bounded(0.0, 1.0, 64)}) {
        const Field f = make_field(kind, [](double) { return 3.25; });
        for (int order : {1, 2, 3}) CHECK(differentiate(f, order).max_abs() < tol[order]);
    }
}

TEST_CASE("bounded second derivative closes the ground-state equation") {
    // Oracle: Q'' = Q - Q^5 from the explicit profile formula.
    const Grid1D g = Grid1D::bounded(-20.0, 20.0, 1024);
    const Field Q = eval_Q(g);
    const Field d2 = differentiate(Q, 2);
    double err = 0.0;
    for (std::size_t i = 0; i < g.count(); ++i) {
        const double q = Q[i];
        err = std::max(err, std::abs(-d2[i] + q - q * q * q * q * q));
    }
    CHECK(err < 1e-8);
}

TEST_CASE("differentiate rejects bad input") {
    const Grid1D g = Grid1D::bounded(0.0, 1.0, 64);
    const Field f(g);
    CHECK_THROWS_AS(differentiate(f, 0), std::invalid_argument);
    CHECK_THROWS_AS(differentiate(f, 4), std::invalid_argument);
    // the 16-node floor of Grid1D keeps even the widest stencil in range
    CHECK_NOTHROW(differentiate(Field(Grid1D::bounded(0.0, 1.0, 16)), 1));
    CHECK_NOTHROW(differentiate(Field(Grid1D::bounded(0.0, 1.0, 16)), 3));
}

TEST_CASE("repeated first derivative agrees with second derivative") {
    const Grid1D g = Grid1D::bounded(-8.0, 8.0, 512);
    const Field f = make_field(g, [](double x) { return std::exp(-x * x / 4.0) * std::cos(x); });
    const Field d11 = differentiate(differentiate(f, 1), 1);
    const Field d2 = differentiate(f, 2);
    CHECK(norm_L2(d11 - d2) / norm_L2(d2) < 1e-6);
}

TEST_CASE("integration oracles") {
    SUBCASE("unit function on [0,1]") {
        const Grid1D g = Grid1D::bounded(0.0, 1.0, 101);
        CHECK(integrate(make_field(g, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("gaussian integral") {
        const Grid1D g = Grid1D::bounded(-20.0, 20.0, 1024);
        const Field f = make_field(g, [](double x) { return std::exp(-x * x); });
        CHECK(std::abs(integrate(f) - std::sqrt(std::numbers::pi)) < 1e-10);
    }
    SUBCASE("soliton mass in closed form") {
        // int Q^2 = sqrt(3) int sech(2x) = sqrt(3) pi / 2.
        const Grid1D g = Grid1D::bounded(-20.0, 20.0, 1024);
        const Field Q = eval_Q(g);
        CHECK(std::abs(inner_product(Q, Q) - std::sqrt(3.0) * std::numbers::pi / 2.0) < 1e-8);
    }
}

TEST_CASE("integrate is linear") {
    const Grid1D g = Grid1D::bounded(-5.0, 5.0, 257);
    const Field f = make_field(g, [](double x) { return std::sin(3 * x) + x; });
    const Field h = make_field(g, [](double x) { return std::cos(x) * x * x; });
    const double a = 2.75, bb = -1.5;
    Field combo = a * f;
    combo += bb * h;
    const double lhs = integrate(combo);
    const double rhs = a * integrate(f) + bb * integrate(h);
    CHECK(std::abs(lhs - rhs) < 1e-12 * (std::abs(a) * norm_L2(f) + std::abs(bb) * norm_L2(h)));
}

TEST_CASE("inner product identities on the soliton") {
    const Grid1D g = default_profile_grid();
    const Field Q = eval_Q(g);
    const Field Qp = eval_Q_deriv(g, 1);
    CHECK(std::abs(inner_product(Q, Qp)) < 1e-10);  // odd integrand
    const Field LQ = apply_Lambda(Q);
    CHECK(std::abs(inner_product(Q, LQ)) < 1e-8);
    Field yLQ(g);
    for (std::size_t i = 0; i < g.count(); ++i) yLQ[i] = g.node(i) * LQ[i];
    CHECK(inner_product(Qp, yLQ) ==
          doctest::Approx(inner_product(LQ, LQ)).epsilon(1e-8));
    CHECK_THROWS_AS(inner_product(Q, Field(Grid1D::bounded(-1.0, 1.0, 64))),
                    std::invalid_argument);
}

TEST_CASE("inner product is symmetric and bilinear") {
    const Grid1D g = Grid1D::bounded(-3.0, 3.0, 129);
    std::mt19937 rng(1234);
    std::normal_distribution<double> dist;
    auto random_field = [&] {
        Field f(g);
        for (std::size_t i = 0; i < g.count(); ++i)
            f[i] = dist(rng) * std::exp(-g.node(i) * g.node(i));
        return f;
    };
    const Field f = random_field(), h = random_field(), w = random_field();
    CHECK(inner_product(f, h) == doctest::Approx(inner_product(h, f)).epsilon(1e-14));
    const double a = 0.7, bb = -2.2;
    Field combo = a * f;
    combo += bb * h;
    CHECK(inner_product(combo, w) ==
          doctest::Approx(a * inner_product(f, w) + bb * inner_product(h, w)).epsilon(1e-13));
}

TEST_CASE("weighted norm") {
    SUBCASE("zero field") {
        const Grid1D g = Grid1D::bounded(-1.0, 1.0, 65);
        const Field w = make_field(g, [](double) { return 1.0; });
        CHECK(weighted_norm(Field(g), w) == 0.0);
    }
    SUBCASE("solitary weight in closed form") {
        // int e^{-|y|/10} over [-40,40] = 20 (1 - e^{-4}); kink at a node.
        const Grid1D g = Grid1D::bounded(-40.0, 40.0, (1u << 17) + 1);
        const Field one = make_field(g, [](double) { return 1.0; });
        const Field w = make_field(g, [](double y) { return std::exp(-std::abs(y) / 10.0); });
        const double expect = std::sqrt(20.0 * (1.0 - std::exp(-4.0)));
        CHECK(std::abs(weighted_norm(one, w) - expect) < 1e-8);
    }
    SUBCASE("exponential weight stays near the plain norm for large B") {
        const Grid1D g = Grid1D::bounded(-20.0, 20.0, 1024);
        const Field Q = eval_Q(g);
        const Field w = make_field(g, [](double y) { return std::exp(y / 100.0); });
        const double wn = weighted_norm(Q, w);
        const double n2 = norm_L2(Q);
        CHECK(wn > n2 * std::exp(-0.2));
        CHECK(wn < n2 * std::exp(0.2));
    }
    SUBCASE("rejects nonpositive weight") {
        const Grid1D g = Grid1D::bounded(-1.0, 1.0, 65);
        const Field w = make_field(g, [](double y) { return y; });
        CHECK_THROWS_AS(weighted_norm(Field(g), w), std::invalid_argument);
    }
}

TEST_CASE("constrained solver") {
    SUBCASE("identity operator returns the rhs") {
        const Grid1D g = Grid1D::bounded(0.0, 1.0, 32);
        const Field rhs = make_field(g, [](double x) { return std::sin(5 * x); });
        LinearSystem sys(Eigen::MatrixXd::Identity(32, 32), rhs);
        const auto sol = solve_constrained(sys);
        CHECK(norm_L2(sol.solution - rhs) < 1e-12);
    }
    SUBCASE("helmholtz on a periodic grid") {
        // Oracle: (-d^2 + 1) cos = 2 cos, so the solution is cos/2.
        const Grid1D g = Grid1D::periodic(0.0, 2.0 * std::numbers::pi, 64);
        const std::size_t n = g.count();
        Eigen::MatrixXd op(n, n);
        Field e(g);
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = 1.0;
            const Field col = differentiate(e, 2);
            for (std::size_t i = 0; i < n; ++i)
                op(static_cast<long>(i), static_cast<long>(j)) = -col[i] + (i == j ? 1.0 : 0.0);
            e[j] = 0.0;
        }
        const Field rhs = make_field(g, [](double x) { return std::cos(x); });
        LinearSystem sys(std::move(op), rhs);
        const auto sol = solve_constrained(sys);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            err = std::max(err, std::abs(sol.solution[i] - 0.5 * std::cos(g.node(i))));
        CHECK(err < 1e-10);
    }
    SUBCASE("constraints are honored to 1e-10") {
        const Grid1D g = Grid1D::bounded(-1.0, 1.0, 48);
        const Field rhs = make_field(g, [](double x) { return x * x; });
        LinearSystem sys(Eigen::MatrixXd::Identity(48, 48), rhs);
        sys.add_constraint(make_field(g, [](double) { return 1.0; }), 0.0);
        const auto sol = solve_constrained(sys, 1.0);  // constrained projection, residual expected
        CHECK(std::abs(sol.constraint_residuals[0]) < 1e-10);
        CHECK(std::abs(integrate(sol.solution)) < 1e-10);
    }
    SUBCASE("dependent constraints are rejected") {
        const Grid1D g = Grid1D::bounded(-1.0, 1.0, 32);
        LinearSystem sys(Eigen::MatrixXd::Identity(32, 32), Field(g));
        sys.add_constraint(make_field(g, [](double x) { return x; }), 0.0);
        sys.add_constraint(make_field(g, [](double x) { return 2.0 * x; }), 0.0);
        CHECK_THROWS_AS(solve_constrained(sys), std::invalid_argument);
    }
}

TEST_CASE("field serialization round trip is bit exact") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1e3, 1e3);
    const Grid1D g = Grid1D::bounded(-2.5, 7.5, 33);
    Field f(g);
    for (std::size_t i = 0; i < g.count(); ++i) f[i] = dist(rng) * std::exp(dist(rng) / 250.0);
    f[0] = 1.0 / 3.0;
    f[1] = 1e-300;

    std::stringstream ss;
    write_field_csv(ss, f);
    const Field back = read_field_csv(ss);
    REQUIRE(back.grid() == f.grid());
    for (std::size_t i = 0; i < g.count(); ++i) CHECK(back[i] == f[i]);

    const Field jback = field_from_json(field_to_json(f));
    REQUIRE(jback.grid() == f.grid());
    for (std::size_t i = 0; i < g.count(); ++i) CHECK(jback[i] == f[i]);
}

TEST_CASE("interpolation is exact at nodes and accurate between") {
    const Grid1D g = Grid1D::bounded(-4.0, 4.0, 257);
    const Field f = make_field(g, [](double x) { return std::sin(2.0 * x); });
    CHECK(interp_value(f, g.node(100)) == doctest::Approx(f[100]).epsilon(1e-15));
    double err = 0.0;
    for (double x = -3.9; x < 3.9; x += 0.0137)
        err = std::max(err, std::abs(interp_value(f, x) - std::sin(2.0 * x)));
    CHECK(err < 1e-8);
    std::size_t clamped = 0;
    CHECK(interp_value(f, 17.0, &clamped) == 0.0);
    CHECK(clamped == 1);
}

TEST_CASE("trig interpolation reproduces band-limited data") {
    const Grid1D g = Grid1D::periodic(0.0, 2.0 * std::numbers::pi, 32);
    const Field f = make_field(g, [](double x) { return std::sin(3.0 * x) + 0.5 * std::cos(7.0 * x); });
    const TrigInterpolant ti(f);
    double err = 0.0;
    for (double x = 0.05; x < 6.2; x += 0.173)
        err = std::max(err, std::abs(ti(x) - (std::sin(3.0 * x) + 0.5 * std::cos(7.0 * x))));
    CHECK(err < 1e-12);
}

TEST_CASE("cumulative quadrature from the right") {
    const Grid1D g = Grid1D::bounded(0.0, 6.0, 61);
    const auto out = cumulative_from_right(g, [](double x) { return std::exp(-x); });
    for (std::size_t i = 0; i < g.count(); ++i) {
        const double expect = std::exp(-g.node(i)) - std::exp(-6.0);
        CHECK(std::abs(out[i] - expect) < 1e-13);
    }
}

TEST_CASE("slope fits recover exact power laws") {
    std::vector<double> x{1e-3, 3e-3, 1e-2, 3e-2}, y;
    for (double v : x) y.push_back(4.2 * std::pow(v, 2.5));
    CHECK(loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0}, ys{1.0, 3.0, 5.0, 7.0};
    CHECK(linear_slope(xs, ys) == doctest::Approx(2.0).epsilon(1e-14));
}

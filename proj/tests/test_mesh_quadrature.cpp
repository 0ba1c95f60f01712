#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdlab/mesh.hpp"

#include <cmath>
#include <random>

using namespace cdlab;

TEST_CASE("uniform mesh layout") {
    const Mesh1D m = make_mesh(8);
    CHECK(m.n == 8);
    CHECK(m.h == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(m.node(0) == 0.0);
    CHECK(m.node(8) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.node(3) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK_THROWS(make_mesh(1));
}

TEST_CASE("interior hats form a partition of unity away from the boundary") {
    const Mesh1D m = make_mesh(7);
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> dist(m.h, 1.0 - m.h);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = dist(rng);
        double s = 0.0;
        for (int j = 1; j < m.n; ++j) s += hat_eval(m, j, x);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(hat_eval(m, 3, m.node(3)) == doctest::Approx(1.0));
    CHECK(hat_eval(m, 3, m.node(2)) == doctest::Approx(0.0));
    CHECK(hat_eval(m, 3, m.node(4)) == doctest::Approx(0.0));
    CHECK_THROWS(hat_eval(m, 0, 0.5));
    CHECK_THROWS(hat_eval(m, m.n, 0.5));
}

TEST_CASE("interpolation reproduces nodal values and slopes") {
    const Mesh1D m = make_mesh(10);
    const ScalarFn f = make_fn([](double x) { return std::sin(3.0 * x); });
    const NodalField1D u = interpolate(m, f);
    CHECK(u.at_node(0) == 0.0);
    CHECK(u.at_node(10) == 0.0);
    for (int j = 1; j < 10; ++j)
        CHECK(u.at_node(j) == doctest::Approx(std::sin(3.0 * m.node(j))).epsilon(1e-14));
    // field_eval is linear between nodes
    const double mid = 0.5 * (m.node(3) + m.node(4));
    CHECK(field_eval(u, mid) ==
          doctest::Approx(0.5 * (u.at_node(3) + u.at_node(4))).epsilon(1e-13));
    CHECK(field_slope(u, mid) ==
          doctest::Approx((u.at_node(4) - u.at_node(3)) / m.h).epsilon(1e-13));
}

TEST_CASE("constant function carries its metadata") {
    const ScalarFn f = make_const_fn(2.5);
    CHECK(f(0.3) == 2.5);
    REQUIRE(f.constant.has_value());
    CHECK(*f.constant == 2.5);
    REQUIRE(f.sup_f.has_value());
    CHECK(*f.sup_f == 2.5);
    REQUIRE(f.sup_df.has_value());
    CHECK(*f.sup_df == 0.0);
    REQUIRE(f.antiderivative);
    CHECK(f.antiderivative(0.4) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Gauss quadrature is exact on polynomials of degree 2k-1") {
    // order 10 integrates degree 19 exactly
    auto p = [](double x) { return std::pow(x, 19) - 3.0 * std::pow(x, 12) + x; };
    const double exact = 1.0 / 20.0 - 3.0 / 13.0 + 1.0 / 2.0;
    CHECK(gauss_quad(p, 0.0, 1.0, 10) == doctest::Approx(exact).epsilon(1e-14));
    // order 3 integrates degree 5 exactly but not degree 6
    auto q5 = [](double x) { return std::pow(x, 5); };
    CHECK(gauss_quad(q5, 0.0, 1.0, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    // repeated calls (cached nodes) agree bit-for-bit
    CHECK(gauss_quad(p, 0.2, 0.9, 10) == gauss_quad(p, 0.2, 0.9, 10));
}

TEST_CASE("adaptive quadrature reaches tight tolerances on smooth integrands") {
    auto g = [](double x) { return std::exp(x); };
    CHECK(adaptive_quad(g, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    auto osc = [](double x) { return std::cos(40.0 * x); };
    CHECK(adaptive_quad(osc, 0.0, 1.0) == doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature terminates on round-off noise integrands") {
    // a square of a near-cancellation: no relative tolerance is reachable,
    // the absolute floor (or the subdivision budget) must stop the recursion
    auto noise = [](double x) {
        const double d = (1.0 + x) - (1.0 + x);  // contrived exact zero
        const double jitter = 1e-16 * std::sin(1e5 * x);
        return (d + jitter) * (d + jitter);
    };
    const double v = adaptive_quad(noise, 0.0, 1.0, 1e-13, 48, 1e-30);
    CHECK(std::abs(v) < 1e-28);
}

TEST_CASE("panel quadrature resolves boundary layers") {
    const double eps = 1e-6;
    auto layer_right = [eps](double x) { return std::exp((x - 1.0) / eps) / eps; };
    // int_0^1 = 1 - e^{-1/eps}
    CHECK(panel_quad_right(layer_right, 0.0, 1.0, eps) == doctest::Approx(1.0).epsilon(1e-10));
    auto layer_left = [eps](double x) { return std::exp(-x / eps) / eps; };
    CHECK(panel_quad_left(layer_left, 0.0, 1.0, eps) == doctest::Approx(1.0).epsilon(1e-10));
    // smooth integrand: panels still integrate correctly
    auto smooth = [](double x) { return x * x; };
    CHECK(panel_quad_left(smooth, 0.0, 1.0, 0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

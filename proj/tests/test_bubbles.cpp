#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdlab/bubbles.hpp"

#include <cmath>

using namespace cdlab;

// reference values computed with 40-digit arithmetic for eps=0.1, h=0.25
namespace {
constexpr double kT0 = 0.84828363995751289761;          // tanh(h/(2 eps))
constexpr double kBExp = 0.18942548983385201339;        // 1/(2 t0) - eps/h
constexpr double kBeta = 0.28413823475077802008;        // (3/2) * kBExp
constexpr double kBeExp = 0.47356372458463003346;       // h * int (B')^2
constexpr double kBexpMid = 0.12245933120185456464;     // B(h/2) at eps = h
}  // namespace

TEST_CASE("quadratic bubble moments") {
    const BubbleSpec q = make_quadratic(0.125);
    CHECK(q.kind == BubbleKind::quadratic);
    CHECK(q.b == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(q.b_e == doctest::Approx(16.0 / 3.0).epsilon(1e-15));
    CHECK(q(0.0) == doctest::Approx(0.0));
    CHECK(q(0.125) == doctest::Approx(0.0));
    CHECK(q(0.0625) == doctest::Approx(1.0).epsilon(1e-14));  // max of 4t(1-t)
    const auto [b, be] = quadrature_moments(q);
    CHECK(b == doctest::Approx(q.b).epsilon(1e-10));
    CHECK(be == doctest::Approx(q.b_e).epsilon(1e-8));
}

TEST_CASE("exponential bubble matches closed-form moments") {
    const BubbleSpec e = make_exponential(0.1, 0.25);
    CHECK(std::tanh(0.25 / 0.2) == doctest::Approx(kT0).epsilon(1e-15));
    CHECK(e.b == doctest::Approx(kBExp).epsilon(1e-14));
    CHECK(e.b_e == doctest::Approx(kBeExp).epsilon(1e-10));
    CHECK(e(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e(0.25) == doctest::Approx(0.0).epsilon(1e-15));
    // midpoint value at eps = h (any h, the shape depends on h/eps only)
    const BubbleSpec same = make_exponential(0.5, 0.5);
    CHECK(same(0.25) == doctest::Approx(kBexpMid).epsilon(1e-14));
    const auto [b, be] = quadrature_moments(e);
    CHECK(b == doctest::Approx(e.b).epsilon(1e-10));
    CHECK(be == doctest::Approx(e.b_e).epsilon(1e-7));
}

TEST_CASE("exponential bubble survives extreme diffusion ratios") {
    // eps far below h: t0 -> 1, b -> 1/2 - eps/h
    const BubbleSpec e = make_exponential(1e-8, 0.1);
    CHECK(std::isfinite(e.b));
    CHECK(std::isfinite(e.b_e));
    CHECK(e.b == doctest::Approx(0.5 - 1e-7).epsilon(1e-9));
    CHECK(std::isfinite(e(0.05)));
    CHECK(e(0.0) == doctest::Approx(0.0));
    // eps far above h: b -> h/(12 eps) -> 0+ (diffusion-dominated limit)
    const BubbleSpec d = make_exponential(10.0, 0.1);
    CHECK(d.b > 0.0);
    CHECK(d.b == doctest::Approx(0.1 / 120.0).epsilon(1e-3));
}

TEST_CASE("scaled quadratic matches the exponential average") {
    const BubbleSpec s = make_scaled_quadratic(0.1, 0.25);
    CHECK(s.beta == doctest::Approx(kBeta).epsilon(1e-14));
    CHECK(s.b == doctest::Approx(kBExp).epsilon(1e-12));
    CHECK(s.b_e == doctest::Approx(16.0 * kBeta * kBeta / 3.0).epsilon(1e-13));
    const BubbleSpec e = make_exponential(0.1, 0.25);
    CHECK(s.b == doctest::Approx(e.b).epsilon(1e-12));
    // beta <= 0 happens only in the diffusion-dominated regime b <= 0 - never
    // for positive b; a huge eps/h still gives a tiny positive average
    CHECK(make_scaled_quadratic(50.0, 0.1).b > 0.0);
}

TEST_CASE("limit quadratic is the eps/h -> 0 limit") {
    const BubbleSpec l = make_limit_quadratic(0.2);
    CHECK(l.b == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(l.beta == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(l.b_e == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(l(0.1) == doctest::Approx(0.75).epsilon(1e-14));  // 3 t (1-t) at t=1/2
    const BubbleSpec s = make_scaled_quadratic(1e-12, 0.2);
    CHECK(s.b == doctest::Approx(l.b).epsilon(1e-10));
}

TEST_CASE("quadratic with a prescribed average") {
    const double h = 0.05;
    const BubbleSpec q = make_quadratic_with_average(0.5 - 0.01, h);
    CHECK(q.b == doctest::Approx(0.49).epsilon(1e-14));
    const auto [b, be] = quadrature_moments(q);
    CHECK(b == doctest::Approx(0.49).epsilon(1e-10));
    CHECK(be == doctest::Approx(q.b_e).epsilon(1e-8));
}

TEST_CASE("custom bubbles are audited at construction") {
    const double h = 0.1;
    const BubbleSpec c = make_custom([h](double x) { return std::sin(std::acos(-1.0) * x / h); }, h);
    CHECK(c.b == doctest::Approx(2.0 / std::acos(-1.0)).epsilon(1e-10));
    CHECK_THROWS(make_custom([](double) { return 1.0; }, h));        // B(0) != 0
    CHECK_THROWS(make_custom([h](double x) { return -x * (h - x); }, h));  // negative average
}

TEST_CASE("upwinded test functions combine hat and bubbles") {
    const Mesh1D m = make_mesh(5);
    const BubbleSpec q = make_quadratic(m.h);
    const TestFunction g{m, q, 2};
    // at nodes, bubbles vanish: g_i(x_j) = delta_ij
    for (int j = 0; j <= 5; ++j)
        CHECK(test_eval(g, m.node(j)) == doctest::Approx(j == 2 ? 1.0 : 0.0).epsilon(1e-14));
    // inside element i: phi_i + B_i ; inside element i+1: phi_i - B_{i+1}
    const double xm_lo = 0.5 * (m.node(1) + m.node(2));
    const double xm_hi = 0.5 * (m.node(2) + m.node(3));
    CHECK(test_eval(g, xm_lo) == doctest::Approx(0.5 + 1.0).epsilon(1e-13));
    CHECK(test_eval(g, xm_hi) == doctest::Approx(0.5 - 1.0).epsilon(1e-13));
    // outside the support of phi_i and the two bubbles, zero
    CHECK(test_eval(g, 0.05) == doctest::Approx(0.0));
    CHECK(test_eval(g, 0.9) == doctest::Approx(0.0));
}

#include "cdlab/bubbles.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cdlab {

BubbleSpec make_quadratic(double h) {
    if (h <= 0) throw std::invalid_argument("make_quadratic: h > 0 required");
    BubbleSpec s;
    s.kind = BubbleKind::quadratic;
    s.h = h;
    s.b = 2.0 / 3.0;
    s.b_e = 16.0 / 3.0;
    s.eval = [h](double x) { return 4.0 * (x / h) * (1.0 - x / h); };
    return s;
}

BubbleSpec make_exponential(double eps, double h) {
    if (eps <= 0 || h <= 0) throw std::invalid_argument("make_exponential: eps, h > 0 required");
    BubbleSpec s;
    s.kind = BubbleKind::exponential;
    s.h = h;
    s.eps = eps;
    const double t0 = std::tanh(h / (2.0 * eps));
    s.b = 1.0 / (2.0 * t0) - eps / h;
    // denominator 1 - e^{-h/eps} underflows to 1 for h/eps large; always finite
    const double denom = -std::expm1(-h / eps);
    s.eval = [eps, h, denom](double x) {
        return -std::expm1(-x / eps) / denom - x / h;
    };
    auto [b_q, be_q] = quadrature_moments(s);
    (void)b_q;
    s.b_e = be_q;
    return s;
}

BubbleSpec make_scaled_quadratic(double eps, double h) {
    if (eps <= 0 || h <= 0)
        throw std::invalid_argument("make_scaled_quadratic: eps, h > 0 required");
    const double t0 = std::tanh(h / (2.0 * eps));
    const double beta = 1.5 * (1.0 / (2.0 * t0) - eps / h);
    if (!(beta > 0))
        throw std::invalid_argument(
            "make_scaled_quadratic: beta <= 0 (h too small relative to eps for upwinding)");
    BubbleSpec s;
    s.kind = BubbleKind::scaled_quadratic;
    s.h = h;
    s.eps = eps;
    s.beta = beta;
    s.b = 2.0 * beta / 3.0;
    s.b_e = 16.0 * beta * beta / 3.0;
    s.eval = [beta, h](double x) { return (4.0 * beta / (h * h)) * x * (h - x); };
    return s;
}

BubbleSpec make_limit_quadratic(double h) {
    if (h <= 0) throw std::invalid_argument("make_limit_quadratic: h > 0 required");
    BubbleSpec s;
    s.kind = BubbleKind::limit_quadratic;
    s.h = h;
    s.beta = 0.75;
    s.b = 0.5;
    s.b_e = 3.0;
    s.eval = [h](double x) { return 3.0 * (x / h) * (1.0 - x / h); };
    return s;
}

BubbleSpec make_custom(std::function<double(double)> eval, double h) {
    if (h <= 0) throw std::invalid_argument("make_custom: h > 0 required");
    if (std::abs(eval(0.0)) > 1e-12 || std::abs(eval(h)) > 1e-12)
        throw std::invalid_argument("make_custom: bubble must vanish at 0 and h");
    BubbleSpec s;
    s.kind = BubbleKind::custom;
    s.h = h;
    s.eval = std::move(eval);
    auto [b, b_e] = quadrature_moments(s);
    if (!(b > 0)) throw std::invalid_argument("make_custom: non-positive average");
    s.b = b;
    s.b_e = b_e;
    return s;
}

BubbleSpec make_quadratic_with_average(double b, double h) {
    if (!(b > 0)) throw std::invalid_argument("make_quadratic_with_average: b > 0 required");
    BubbleSpec s = make_quadratic(h);
    const double scale = b / s.b;
    auto base = s.eval;
    s.kind = BubbleKind::custom;
    s.eval = [base, scale](double x) { return scale * base(x); };
    s.b = b;
    s.b_e = s.b_e * scale * scale;
    return s;
}

double test_eval(const TestFunction& t, double x) {
    const Mesh1D& mesh = t.mesh;
    const int i = t.index;
    if (i < 1 || i > mesh.n - 1) throw std::out_of_range("test_eval: index outside 1..n-1");
    double v = hat_eval(mesh, i, x);
    const double xim1 = mesh.node(i - 1), xi = mesh.node(i), xip1 = mesh.node(i + 1);
    if (x >= xim1 && x <= xi) v += t.bubble(x - xim1);   // + B_i
    if (x > xi && x <= xip1) v -= t.bubble(x - xi);      // - B_{i+1}
    return v;
}

std::pair<double, double> quadrature_moments(const BubbleSpec& spec) {
    const double h = spec.h;
    // Richardson-extrapolated central difference: O(step^4) truncation lets
    // the step stay large enough to keep round-off noise below 1e-12.
    const double step = (spec.kind == BubbleKind::exponential)
                            ? std::min(h, spec.eps) * 1e-3
                            : h * 1e-3;
    auto deriv = [&spec, step, h](double x) {
        auto central = [&](double s) {
            const double lo = std::max(0.0, x - s), hi = std::min(h, x + s);
            return (spec(hi) - spec(lo)) / (hi - lo);
        };
        return (4.0 * central(0.5 * step) - central(step)) / 3.0;
    };
    double b, b_e;
    if (spec.kind == BubbleKind::exponential) {
        // layer of width eps at the left end of [0,h]
        b = panel_quad_left([&spec](double x) { return spec(x); }, 0.0, h, spec.eps) / h;
        b_e = h * panel_quad_left([&deriv](double x) { return deriv(x) * deriv(x); }, 0.0, h,
                                  spec.eps);
    } else {
        b = gauss_quad([&spec](double x) { return spec(x); }, 0.0, h, 20) / h;
        b_e = h * gauss_quad([&deriv](double x) { return deriv(x) * deriv(x); }, 0.0, h, 20);
    }
    return {b, b_e};
}

}  // namespace cdlab

#pragma once

#include "cdlab/mesh.hpp"

namespace cdlab {

enum class BubbleKind { quadratic, scaled_quadratic, limit_quadratic, exponential, custom };

/// A generating bubble B on [0,h] with B(0)=B(h)=0 and positive average,
/// together with its moments: b = (1/h) * int B and b_e with
/// int (B')^2 = b_e / h.
struct BubbleSpec {
    BubbleKind kind = BubbleKind::custom;
    double h = 0.0;
    double eps = 0.0;   ///< used by scaled_quadratic / exponential kinds
    double beta = 0.0;  ///< scaled_quadratic amplitude
    double b = 0.0;     ///< average (1/h) int_0^h B
    double b_e = 0.0;   ///< energy scale, h * int_0^h (B')^2
    std::function<double(double)> eval;  ///< B(x) for x in [0,h]

    double operator()(double x) const { return eval(x); }
};

/// Upwinded test function g_i = phi_i + B_i - B_{i+1}, where B_k lives on
/// element k = [x_{k-1}, x_k] via B_k(x) = B(x - x_{k-1}).
struct TestFunction {
    Mesh1D mesh;
    BubbleSpec bubble;
    int index = 0;  ///< i in 1..n-1
};

/// B(x) = 4 (x/h)(1 - x/h); moments b = 2/3, b_e = 16/3.
BubbleSpec make_quadratic(double h);

/// B(x) = (1 - e^{-x/eps})/(1 - e^{-h/eps}) - x/h with t0 = tanh(h/(2 eps))
/// and b = 1/(2 t0) - eps/h. b_e is computed by layer-resolving quadrature.
/// Only exponentials of non-positive arguments are evaluated.
BubbleSpec make_exponential(double eps, double h);

/// B(x) = (4 beta / h^2) x (h - x) with beta = (3/2)(1/(2 t0) - eps/h);
/// its average b = 2 beta / 3 matches make_exponential's b for the same
/// (eps, h). Rejects parameter pairs with beta <= 0.
BubbleSpec make_scaled_quadratic(double eps, double h);

/// The eps/h -> 0 limit of the scaled quadratic: B(x) = 3 (x/h)(1 - x/h),
/// with b = 1/2 (beta = 3/4).
BubbleSpec make_limit_quadratic(double h);

/// Arbitrary bubble; moments are computed by order-20 quadrature. Rejects
/// evaluators violating B(0)=B(h)=0 or with non-positive average.
BubbleSpec make_custom(std::function<double(double)> eval, double h);

/// Quadratic bubble rescaled so that its average equals exactly the given b.
BubbleSpec make_quadratic_with_average(double b, double h);

/// Value of g_i at x in [0,1].
double test_eval(const TestFunction& t, double x);

/// Moments recomputed by quadrature (layer-resolving for the exponential
/// kind); used to audit the stored (b, b_e).
std::pair<double, double> quadrature_moments(const BubbleSpec& spec);

}  // namespace cdlab

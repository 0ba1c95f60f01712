#pragma once

#include "cdlab/mesh.hpp"

namespace cdlab {

/// Which discrete trial norm ||.|| to evaluate.
///   SL:   ||u||^2 = eps^2 |u|_{H1}^2 + |u|_{*,h}^2
///   UPG:  ||u||^2 = (eps + h b)^2/(1 + b_e) |u|_{H1}^2 + |u|_{*,h}^2/(1 + b_e)
///   SPLS: ||u||^2 = eps^2 |u|_{H1}^2 + (||u||_{L2}^2 - ubar^2)
struct NormVariant {
    enum class Tag { SL, UPG, SPLS } tag = Tag::SL;
    double eps = 0.0;
    double h = 0.0;    ///< UPG only
    double b = 0.0;    ///< UPG only: bubble average
    double b_e = 0.0;  ///< UPG only: bubble energy scale

    static NormVariant sl(double eps) { return {Tag::SL, eps, 0, 0, 0}; }
    static NormVariant spls(double eps) { return {Tag::SPLS, eps, 0, 0, 0}; }
    static NormVariant upg(double eps, double h, double b, double b_e) {
        return {Tag::UPG, eps, h, b, b_e};
    }
};

/// Subinterval [a,b] of [0,1] restricting error integrals.
struct Window {
    double a = 0.0;
    double b = 1.0;
};

/// Oscillation diagnostics of a nodal field (boundary zeros included).
struct OscReport {
    int sign_changes = 0;       ///< strict sign alternations of first differences
    double teeth_amplitude = 0; ///< max_j |u_j - (u_{j-1}+u_{j+1})/2|
    double max_jump = 0;        ///< max |u_{j+1} - u_j|
};

/// Result of the T operator: Tu(x) = x * ubar - int_0^x u, with the
/// H1 seminorm |Tu| satisfying |Tu|^2 = ||u||_{L2}^2 - ubar^2.
struct TResult {
    std::function<double(double)> Tu;
    double seminorm = 0.0;
};

/// Discrete optimal seminorm |u|_{*,h}: square root of
/// (1/n) sum_i (element average)^2 - (int u)^2, element averages of the
/// piecewise-linear field being (u_{i-1}+u_i)/2. Radicands in [-1e-14, 0)
/// are clamped to zero; anything more negative raises std::runtime_error.
double star_seminorm(const NodalField1D& u);

/// T applied to a piecewise-linear field (exact element-wise prefix sums).
TResult apply_T(const NodalField1D& u);

/// T applied to a general function (adaptive quadrature).
TResult apply_T(const ScalarFn& u);

/// The variant norm ||u|| built from the pieces above.
double star_norm(const NodalField1D& u, const NormVariant& variant);

/// H1 seminorm of the piecewise-linear field (exact).
double h1_seminorm(const NodalField1D& u);

/// L2 norm of the piecewise-linear field (exact).
double l2_norm(const NodalField1D& u);

/// Integral of the piecewise-linear field over [0,1] (exact).
double field_integral(const NodalField1D& u);

/// max over interior nodes of |u_h(x_j) - exact(x_j)|.
double discrete_inf_error(const NodalField1D& u, const ScalarFn& exact);

/// Windowed L2 and H1 errors ||u - u_h||_{L2(w)}, |u - u_h|_{H1(w)} by
/// per-element quadrature with elements clipped to the window. If
/// layer_scale > 0, the integrand is assumed to carry a layer of that width
/// at x = 1 and right-anchored geometric panels are used there.
std::pair<double, double> windowed_errors(const NodalField1D& u, const ScalarFn& exact,
                                          const ScalarFn& dexact, const Window& w,
                                          double layer_scale = 0.0);

/// Oscillation diagnostics; see OscReport.
OscReport oscillation_report(const NodalField1D& u);

/// The teeth-saw mode omega_h = phi_1 + phi_3 + ... (n even required):
/// nodal values 1 at odd interior nodes, 0 at even ones.
NodalField1D make_teeth_saw(const Mesh1D& mesh);

}  // namespace cdlab

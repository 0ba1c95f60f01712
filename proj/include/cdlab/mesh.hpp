#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace cdlab {

/// Uniform partition of [0,1] into n elements with nodes x_j = j*h, h = 1/n.
struct Mesh1D {
    int n = 0;                  ///< element count (>= 2)
    double h = 0.0;             ///< mesh size 1/n
    std::vector<double> nodes;  ///< n+1 node coordinates

    double node(int j) const { return nodes[static_cast<std::size_t>(j)]; }
};

/// Continuous piecewise-linear function with zero boundary values,
/// stored as the n-1 interior nodal coefficients u_1..u_{n-1}.
struct NodalField1D {
    Mesh1D mesh;
    Eigen::VectorXd values;  ///< size n-1; values[j-1] is the coefficient at x_j

    /// Nodal value including the implicit boundary zeros (0 <= j <= n).
    double at_node(int j) const {
        if (j <= 0 || j >= mesh.n) return 0.0;
        return values[j - 1];
    }
};

/// A scalar function on [0,1] with optional analytic extras used by
/// assembly fast paths and error bounds.
struct ScalarFn {
    std::function<double(double)> f;
    std::optional<double> sup_f;             ///< known bound on |f|
    std::optional<double> sup_df;            ///< known bound on |f'|
    std::optional<double> constant;          ///< set when f is identically this value
    std::function<double(double)> antiderivative;  ///< optional F with F(0)=0, F'=f

    double operator()(double x) const { return f(x); }
};

/// Build a ScalarFn from a plain callable (no analytic extras).
ScalarFn make_fn(std::function<double(double)> f);

/// Build the constant function c (enables exact assembly fast paths).
ScalarFn make_const_fn(double c);

/// Uniform mesh with n >= 2 elements; throws std::invalid_argument otherwise.
Mesh1D make_mesh(int n);

/// Value of the interior hat function phi_i at x (i in 1..n-1).
/// Throws std::out_of_range for an invalid index.
double hat_eval(const Mesh1D& mesh, int i, double x);

/// Nodal interpolant I_h(f): values[j] = f(x_j) at the interior nodes.
NodalField1D interpolate(const Mesh1D& mesh, const ScalarFn& f);

/// Point value of the piecewise-linear field at x in [0,1].
double field_eval(const NodalField1D& u, double x);

/// One-sided (left) derivative of the field at x; constant per element.
double field_slope(const NodalField1D& u, double x);

/// Gauss-Legendre quadrature of g over [a,b] with `order` points
/// (exact for polynomials of degree <= 2*order-1). Nodes are computed
/// once per order and cached.
double gauss_quad(const std::function<double(double)>& g, double a, double b, int order);

/// Adaptive quadrature: order-10 Gauss with two-level refinement until the
/// local estimate changes by less than rel_tol relatively or abs_tol
/// absolutely. abs_tol guards integrands that are round-off noise (for
/// example a squared error of a nodally exact solution), where no amount of
/// refinement can reach a relative tolerance.
double adaptive_quad(const std::function<double(double)>& g, double a, double b,
                     double rel_tol = 1e-13, int max_depth = 48, double abs_tol = 0.0);

/// Quadrature for integrands with a sharp layer of width `scale` at the left
/// endpoint a: geometric panels [a, a+s], [a+s, a+3s], ... (widths doubling),
/// order-10 Gauss per panel.
double panel_quad_left(const std::function<double(double)>& g, double a, double b, double scale);

/// Same as panel_quad_left but the layer sits at the right endpoint b.
double panel_quad_right(const std::function<double(double)>& g, double a, double b, double scale);

}  // namespace cdlab

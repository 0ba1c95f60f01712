#pragma once

#include "cdlab/mesh.hpp"
#include "cdlab/tridiag.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>

namespace cdlab {

/// A scalar function on the unit square, with an optional constant tag
/// enabling exact assembly fast paths.
struct ScalarFn2D {
    std::function<double(double, double)> f;
    std::optional<double> constant;

    double operator()(double x, double y) const { return f(x, y); }
};

ScalarFn2D make_fn_2d(std::function<double(double, double)> f);
ScalarFn2D make_const_fn_2d(double c);

/// Bilinear nodal field sum u_ij phi_i(x) phi_j(y), zero on the boundary,
/// stored x-fastest: values[(j-1)*(n-1) + (i-1)] = u_ij.
struct NodalField2D {
    int n = 0;
    Eigen::VectorXd values;

    /// Nodal value including the implicit boundary zeros (0 <= i,j <= n).
    double at_node(int i, int j) const {
        if (i <= 0 || i >= n || j <= 0 || j >= n) return 0.0;
        return values[(j - 1) * (n - 1) + (i - 1)];
    }
};

/// Tensor-structured system A = M (x) Mfe_x + (eps/h) S (x) Mq, the left
/// factor acting on the y-index. The four factors are tridiagonal:
///   M    = (h/6) tridiag(1,4,1)        (mass in y)
///   Mfe_x = upwinded convection-diffusion factor in x (exponential form)
///   S    = tridiag(-1,2,-1)            (stiffness in y)
///   Mq   = M + beta (h/3) tridiag(-1,0,1)
struct KroneckerSystem {
    int n = 0;
    double eps = 0.0;
    double beta = 0.0;
    TriDiag M, Mfe_x, S, Mq;
    Eigen::VectorXd rhs;  ///< (n-1)^2, x-fastest
};

/// Assemble the 2D upwinded system with the scaled-quadratic bubble in x,
/// beta = (3/2)(1/(2 t0) - eps/h), t0 = tanh(h/(2 eps)). The x-factor is
/// cross-checked against the exponential closed form
/// (1/t0) tridiag(-(1+t0)/2, 1, -(1-t0)/2) during assembly. rhs entries are
/// (f, g_i(x) phi_j(y)) by order-6 tensor Gauss quadrature (exact fast path
/// for constant f).
KroneckerSystem assemble_2d(double eps, int n, const ScalarFn2D& f);

/// Fast solve by diagonalizing the y-factors in the discrete sine basis
/// (M and S commute since M = (h/6)(6I - S)); one tridiagonal x-solve per
/// y-mode. Exact up to round-off.
NodalField2D solve_2d_fast(const KroneckerSystem& sys);

/// Oracle solve forming the dense matrix (guarded to n <= 32).
NodalField2D solve_2d_dense(const KroneckerSystem& sys);

/// Reduced system [M (x) C0] W = F with C0 = tridiag(-1,1,0) in x and the
/// limit bubble 3 t(1-t) in the load; forward substitution per y-row then
/// tridiagonal mass solves per x-column.
NodalField2D solve_reduced_2d(int n, const ScalarFn2D& f);

/// The x_i-section (u_i1, ..., u_i,n-1) as a 1D field over y.
NodalField1D section(const NodalField2D& u, int i);

/// Dense matrix of the Kronecker system (test oracle; n <= 32).
Eigen::MatrixXd dense_2d_matrix(const KroneckerSystem& sys);

/// A v via the factored form, without building the dense matrix.
Eigen::VectorXd apply_kronecker(const KroneckerSystem& sys, const Eigen::VectorXd& v);

}  // namespace cdlab

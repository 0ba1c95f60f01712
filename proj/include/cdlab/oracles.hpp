#pragma once

#include "cdlab/mesh.hpp"

#include <Eigen/Dense>

namespace cdlab {

/// First-order transport companions of the model problem:
///   LR:      w(x) = int_0^x f            (w(0) = 0)
///   RL:      theta(x) = w(x) - int_0^1 f (theta(1) = 0)
///   Shifted: U(x) = w(x) - w(1)/2
enum class TransportKind { LR, RL, Shifted };

/// Value of the requested transport solution at x. Uses the analytic
/// antiderivative when the ScalarFn carries one, adaptive quadrature
/// otherwise.
double transport(TransportKind kind, const ScalarFn& f, double x);

/// Exact solution of -eps u'' + u' = 1, u(0)=u(1)=0, in the overflow-safe
/// form x - (e^{(x-1)/eps} - e^{-1/eps}) / (1 - e^{-1/eps}).
double exact_const_f(double eps, double x);

/// An exact solution u together with its derivative.
struct ExactSolution {
    ScalarFn u;
    ScalarFn du;
};

/// Exact solution of -eps u'' + u' = f for polynomial f = sum c_k x^k.
ExactSolution exact_solution_poly(double eps, const std::vector<double>& coeffs);

/// Exact solution for trigonometric f = sin(k x) or cos(k x).
ExactSolution exact_solution_trig(double eps, double k, bool is_sin);

/// Green's function of -eps u'' + u' with zero boundary values, evaluated
/// in overflow-safe factored form (only non-positive exponents).
double greens(double eps, double x, double s);

/// Dense matrix with entry (j,i) = G(x_{j+1}, x_{i+1}) over the interior
/// nodes; the closed-form inverse of the exponential-bubble system matrix.
Eigen::MatrixXd inverse_via_greens(double eps, const Mesh1D& mesh);

/// Target space of an L2 projection.
enum class ProjectionTarget {
    interior_hats,   ///< zero-boundary P1 (dimension n-1)
    mean_zero,       ///< {q - mean(q) : q zero-boundary P1}
    tied_ends        ///< P1 with v(0) = v(1) (dimension n)
};

/// An L2-projected piecewise-linear function.
struct ProjectedFn {
    Eigen::VectorXd coefs;   ///< coefficients in the target basis
    Eigen::VectorXd nodal;   ///< values at all nodes 0..n
    std::function<double(double)> eval;
};

/// Brute-force L2 projection of g onto the target space (normal equations
/// assembled by per-element quadrature).
ProjectedFn l2_project(const ScalarFn& g, ProjectionTarget target, const Mesh1D& mesh);

/// Solution of -v'' = f, v(0)=v(1)=0 at x, via the Poisson kernel
/// min(x,s)(1 - max(x,s)).
double poisson_uf(const ScalarFn& f, double x);

/// Elliptic projection of poisson_uf onto the zero-boundary P2 space in the
/// hierarchical basis (n-1 vertex hats, then n element bubbles 4 t(1-t)).
Eigen::VectorXd elliptic_projection_uf(const ScalarFn& f, const Mesh1D& mesh);

/// Window selector for interp_energy_error.
enum class EnergyWindow { full, away_from_layer, layer };  // [0,1], [0,1-h], [1-h,1]

/// Closed-form squared H1 error |u - I_h u|^2 of the nodal interpolant of
/// exact_const_f on the given window.
double interp_energy_error(double eps, double h, EnergyWindow window);

}  // namespace cdlab

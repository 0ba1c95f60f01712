#pragma once

#include "cdlab/bubbles.hpp"
#include "cdlab/mesh.hpp"
#include "cdlab/tridiag.hpp"

#include <Eigen/Dense>
#include <optional>
#include <utility>

namespace cdlab {

/// Discretization family.
enum class Method { SL, SPLS, UPG };

/// Everything needed to assemble a 1D discrete problem. eps = 0 selects the
/// reduced problem (the eps-terms are dropped symbolically, not taken as a
/// limit).
struct ProblemSpec1D {
    double eps = 0.0;
    ScalarFn f;
    Mesh1D mesh;
    Method method = Method::SL;
    std::optional<BubbleSpec> bubble;  ///< required for UPG
};

/// Symmetric indefinite saddle system [[A0, B],[B^T, 0]] acting on
/// (w over P2, u over P1). Rows of b_block are P2 test functions
/// (n-1 vertex hats then n element bubbles), columns are P1 trial hats.
struct SaddleSystem {
    Eigen::MatrixXd a0_block;  ///< (2n-1) x (2n-1), SPD P2 stiffness
    Eigen::MatrixXd b_block;   ///< (2n-1) x (n-1)
    Eigen::VectorXd rhs;       ///< (2n-1), entries (f, v) for P2 test v
};

/// Both components of a saddle solve.
struct SPLSSolution {
    Eigen::VectorXd w;  ///< P2 coefficients, hierarchical ordering
    NodalField1D u;
};

/// Outcome of the reduced (eps = 0) SL solve: either a solution or a
/// structured singularity report (never an exception).
struct ReducedSLReport {
    bool singular = false;
    NodalField1D u;          ///< valid iff !singular
    Eigen::VectorXd kernel;  ///< interior nodal kernel vector, valid iff singular
    double defect = 0.0;     ///< kernel . rhs (solvability obstruction)
};

/// Load vector (f, phi_j) over the interior hats; exact fast path for
/// constant f, order-10 Gauss per element otherwise.
Eigen::VectorXd hat_load(const ScalarFn& f, const Mesh1D& mesh);

/// Load vector (f, g_j) for the upwinded test functions
/// g_j = phi_j + B_j - B_{j+1}; the bubble contributions cancel exactly for
/// constant f, and layer-resolving panels handle exponential bubbles.
Eigen::VectorXd upg_load(const ScalarFn& f, const Mesh1D& mesh, const BubbleSpec& bubble);

/// Standard linear Galerkin system (requires eps > 0):
/// (eps/h) tridiag(-1,2,-1) + tridiag(-1/2,0,1/2), rhs_j = (f, phi_j).
std::pair<TriDiag, Eigen::VectorXd> assemble_sl(const ProblemSpec1D& spec);

/// Upwinded Petrov-Galerkin system (eps >= 0, bubble average b > 0):
/// tridiag(-(eps/h + b) - 1/2, 2(eps/h + b), -(eps/h + b) + 1/2),
/// rhs_j = (f, g_j).
std::pair<TriDiag, Eigen::VectorXd> assemble_upg(const ProblemSpec1D& spec);

/// M-matrix predicate for the UPG stencil: nonpositive off-diagonals iff
/// eps/h + b >= 1/2.
bool upg_is_m_matrix(double eps, double h, double b);

/// Saddle system for the P1-P2 least-squares discretization (eps >= 0).
SaddleSystem assemble_spls(const ProblemSpec1D& spec);

/// Dense factorization of the saddle system; returns both components.
SPLSSolution solve_spls(const SaddleSystem& system);

/// Reduced SL problem tridiag(-1/2,0,1/2) U = (f, phi_j): unique solution
/// for odd n; for even n a singular report with the teeth-saw kernel and
/// the solvability defect.
ReducedSLReport solve_reduced_sl(const Mesh1D& mesh, const ScalarFn& f);

/// The discrete solution u_h for the given spec (SPLS returns its trial
/// component). Reduced singular systems surface as singular_error here;
/// use solve_reduced_sl for the report form.
NodalField1D solve(const ProblemSpec1D& spec);

}  // namespace cdlab

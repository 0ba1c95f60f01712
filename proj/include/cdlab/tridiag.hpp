#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace cdlab {

/// Thrown when a linear solve meets a (near-)zero pivot it cannot handle.
struct singular_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tridiagonal matrix stored by diagonals (m unknowns).
struct TriDiag {
    Eigen::VectorXd lower;  ///< size m-1, entries (i+1, i)
    Eigen::VectorXd diag;   ///< size m
    Eigen::VectorXd upper;  ///< size m-1, entries (i, i+1)

    int size() const { return static_cast<int>(diag.size()); }
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd to_dense() const;
};

/// Constant-diagonal tridiagonal matrix tridiag(lo, di, up) of size m.
TriDiag make_tridiag(int m, double lo, double di, double up);

/// Solve T x = rhs. When the upper diagonal is identically zero this is pure
/// forward substitution (the recursion u_j = (f_j - l_{j-1} u_{j-1}) / d_j);
/// otherwise the Thomas algorithm without pivoting. A pivot below 1e-300 in
/// magnitude raises singular_error.
Eigen::VectorXd solve_tridiag(const TriDiag& t, const Eigen::VectorXd& rhs);

}  // namespace cdlab

#include "cdlab/tridiag.hpp"

#include <cmath>

namespace cdlab {

Eigen::VectorXd TriDiag::apply(const Eigen::VectorXd& x) const {
    const int m = size();
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += lower[i - 1] * x[i - 1];
        if (i < m - 1) s += upper[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

Eigen::MatrixXd TriDiag::to_dense() const {
    const int m = size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        a(i, i) = diag[i];
        if (i > 0) a(i, i - 1) = lower[i - 1];
        if (i < m - 1) a(i, i + 1) = upper[i];
    }
    return a;
}

TriDiag make_tridiag(int m, double lo, double di, double up) {
    TriDiag t;
    t.lower = Eigen::VectorXd::Constant(m - 1, lo);
    t.diag = Eigen::VectorXd::Constant(m, di);
    t.upper = Eigen::VectorXd::Constant(m - 1, up);
    return t;
}

Eigen::VectorXd solve_tridiag(const TriDiag& t, const Eigen::VectorXd& rhs) {
    const int m = t.size();
    if (rhs.size() != m) throw std::invalid_argument("solve_tridiag: size mismatch");
    Eigen::VectorXd x(m);
    const bool forward_only = (m == 1) || (t.upper.array() == 0.0).all();
    if (forward_only) {
        for (int i = 0; i < m; ++i) {
            const double piv = t.diag[i];
            if (std::abs(piv) < 1e-300) throw singular_error("solve_tridiag: zero pivot");
            double r = rhs[i];
            if (i > 0) r -= t.lower[i - 1] * x[i - 1];
            x[i] = r / piv;
        }
        return x;
    }
    // Thomas algorithm: eliminate the lower diagonal, then back-substitute.
    Eigen::VectorXd c(m - 1), d(m);
    double piv = t.diag[0];
    if (std::abs(piv) < 1e-300) throw singular_error("solve_tridiag: zero pivot");
    c[0] = t.upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (int i = 1; i < m; ++i) {
        piv = t.diag[i] - t.lower[i - 1] * c[i - 1];
        if (std::abs(piv) < 1e-300) throw singular_error("solve_tridiag: zero pivot");
        if (i < m - 1) c[i] = t.upper[i] / piv;
        d[i] = (rhs[i] - t.lower[i - 1] * d[i - 1]) / piv;
    }
    x[m - 1] = d[m - 1];
    for (int i = m - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

}  // namespace cdlab

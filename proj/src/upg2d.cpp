#include "cdlab/upg2d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace cdlab {

ScalarFn2D make_fn_2d(std::function<double(double, double)> f) {
    ScalarFn2D out;
    out.f = std::move(f);
    return out;
}

ScalarFn2D make_const_fn_2d(double c) {
    ScalarFn2D out;
    out.f = [c](double, double) { return c; };
    out.constant = c;
    return out;
}

namespace {

constexpr int kTensorOrder = 6;

/// Load vector (f, g_i(x) phi_j(y)) with the quadratic-bubble test
/// g_i = phi_i + 4 beta t(1-t) upwinding, x-fastest ordering.
Eigen::VectorXd tensor_load(int n, const ScalarFn2D& f, double beta) {
    const int m = n - 1;
    const double h = 1.0 / n;
    Eigen::VectorXd rhs(m * m);
    if (f.constant) {
        // (c, g_i)(1, phi_j) = c h * h: the bubble integrals cancel between
        // neighboring elements exactly as in 1D.
        rhs.setConstant(*f.constant * h * h);
        return rhs;
    }
    // On element ex the x-test g_i restricts to t + 4 beta t(1-t) for
    // i = ex (ascending) and (1-t) - 4 beta t(1-t) for i = ex - 1.
    auto elem_integral = [&](int ex, int ey, bool x_asc, bool y_asc) {
        const double ax = (ex - 1) * h, ay = (ey - 1) * h;
        return gauss_quad(
            [&](double x) {
                const double t = (x - ax) / h;
                const double bub = 4.0 * beta * t * (1.0 - t);
                const double gx = x_asc ? t + bub : (1.0 - t) - bub;
                return gx * gauss_quad(
                                [&](double y) {
                                    const double s = (y - ay) / h;
                                    return f(x, y) * (y_asc ? s : 1.0 - s);
                                },
                                ay, ay + h, kTensorOrder);
            },
            ax, ax + h, kTensorOrder);
    };
    for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= m; ++i)
            rhs[(j - 1) * m + (i - 1)] = elem_integral(i, j, true, true) +
                                         elem_integral(i, j + 1, true, false) +
                                         elem_integral(i + 1, j, false, true) +
                                         elem_integral(i + 1, j + 1, false, false);
    return rhs;
}

/// Apply a tridiagonal factor to every column of a matrix.
Eigen::MatrixXd left_apply(const TriDiag& t, const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out(v.rows(), v.cols());
    for (int c = 0; c < v.cols(); ++c) out.col(c) = t.apply(v.col(c));
    return out;
}

}  // namespace

KroneckerSystem assemble_2d(double eps, int n, const ScalarFn2D& f) {
    if (!(eps > 0)) throw std::invalid_argument("assemble_2d: eps > 0 required");
    if (n < 2) throw std::invalid_argument("assemble_2d: n >= 2 required");
    const int m = n - 1;
    const double h = 1.0 / n;
    const double t0 = std::tanh(h / (2.0 * eps));
    const double bavg = 1.0 / (2.0 * t0) - eps / h;
    KroneckerSystem sys;
    sys.n = n;
    sys.eps = eps;
    sys.beta = 1.5 * bavg;

    const double s = eps / h + bavg;
    sys.Mfe_x = make_tridiag(m, -s - 0.5, 2.0 * s, -s + 0.5);
    // cross-check against the closed exponential form (1/t0) tridiag(...)
    const double scale = std::abs(2.0 * s);
    if (std::abs(sys.Mfe_x.diag[0] - 1.0 / t0) > 1e-12 * scale ||
        std::abs(sys.Mfe_x.lower[0] + (1.0 + t0) / (2.0 * t0)) > 1e-12 * scale ||
        std::abs(sys.Mfe_x.upper[0] + (1.0 - t0) / (2.0 * t0)) > 1e-12 * scale)
        throw std::logic_error("assemble_2d: bubble and exponential x-factors disagree");

    sys.M = make_tridiag(m, h / 6.0, 4.0 * h / 6.0, h / 6.0);
    sys.S = make_tridiag(m, -1.0, 2.0, -1.0);
    sys.Mq = make_tridiag(m, h / 6.0 - sys.beta * h / 3.0, 4.0 * h / 6.0,
                          h / 6.0 + sys.beta * h / 3.0);
    sys.rhs = tensor_load(n, f, sys.beta);
    return sys;
}

NodalField2D solve_2d_fast(const KroneckerSystem& sys) {
    const int n = sys.n;
    const int m = n - 1;
    const double h = 1.0 / n;
    Eigen::MatrixXd phi(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
            phi(j, k) = std::sin((j + 1.0) * (k + 1.0) * std::numbers::pi / n);
    const Eigen::Map<const Eigen::MatrixXd> fmat(sys.rhs.data(), m, m);
    const Eigen::MatrixXd g = fmat * phi;
    Eigen::MatrixXd z(m, m);
    const double c = sys.eps / h;
    for (int k = 0; k < m; ++k) {
        const double sigma = 2.0 - 2.0 * std::cos((k + 1.0) * std::numbers::pi / n);
        const double mu = (h / 6.0) * (6.0 - sigma);
        TriDiag mode;
        mode.lower = mu * sys.Mfe_x.lower + c * sigma * sys.Mq.lower;
        mode.diag = mu * sys.Mfe_x.diag + c * sigma * sys.Mq.diag;
        mode.upper = mu * sys.Mfe_x.upper + c * sigma * sys.Mq.upper;
        z.col(k) = solve_tridiag(mode, g.col(k));
    }
    const Eigen::MatrixXd x = (2.0 / n) * z * phi;
    NodalField2D out;
    out.n = n;
    out.values = Eigen::Map<const Eigen::VectorXd>(x.data(), m * m);
    return out;
}

Eigen::MatrixXd dense_2d_matrix(const KroneckerSystem& sys) {
    if (sys.n > 32)
        throw std::invalid_argument("dense_2d_matrix: dense oracle limited to n <= 32");
    const int m = sys.n - 1;
    const double c = sys.eps / (1.0 / sys.n);
    const Eigen::MatrixXd md = sys.M.to_dense();
    const Eigen::MatrixXd mfed = sys.Mfe_x.to_dense();
    const Eigen::MatrixXd sd = sys.S.to_dense();
    const Eigen::MatrixXd mqd = sys.Mq.to_dense();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m * m, m * m);
    for (int j = 0; j < m; ++j)
        for (int j2 = 0; j2 < m; ++j2)
            a.block(j * m, j2 * m, m, m) = md(j, j2) * mfed + c * sd(j, j2) * mqd;
    return a;
}

Eigen::VectorXd apply_kronecker(const KroneckerSystem& sys, const Eigen::VectorXd& v) {
    const int m = sys.n - 1;
    const double c = sys.eps / (1.0 / sys.n);
    const Eigen::Map<const Eigen::MatrixXd> vm(v.data(), m, m);
    // vec(Mfe V M^T) + c vec(Mq V S^T); M and S are symmetric
    const Eigen::MatrixXd term1 = left_apply(sys.Mfe_x, vm) * sys.M.to_dense();
    const Eigen::MatrixXd term2 = c * left_apply(sys.Mq, vm) * sys.S.to_dense();
    Eigen::MatrixXd sum = term1 + term2;
    return Eigen::Map<const Eigen::VectorXd>(sum.data(), m * m);
}

NodalField2D solve_2d_dense(const KroneckerSystem& sys) {
    if (sys.n > 32) throw std::invalid_argument("solve_2d_dense: n <= 32 required");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense_2d_matrix(sys));
    NodalField2D out;
    out.n = sys.n;
    out.values = lu.solve(sys.rhs);
    if (!out.values.allFinite()) throw singular_error("solve_2d_dense: singular system");
    return out;
}

NodalField2D solve_reduced_2d(int n, const ScalarFn2D& f) {
    if (n < 2) throw std::invalid_argument("solve_reduced_2d: n >= 2 required");
    const int m = n - 1;
    const double h = 1.0 / n;
    const Eigen::VectorXd rhs = tensor_load(n, f, 0.75);
    const Eigen::Map<const Eigen::MatrixXd> fmat(rhs.data(), m, m);
    const TriDiag c0 = make_tridiag(m, -1.0, 1.0, 0.0);
    const TriDiag mass = make_tridiag(m, h / 6.0, 4.0 * h / 6.0, h / 6.0);
    // [M (x) C0] vec(X) = vec(C0 X M): forward substitution in x, then a
    // mass solve per x-row in y.
    Eigen::MatrixXd y(m, m);
    for (int k = 0; k < m; ++k) y.col(k) = solve_tridiag(c0, fmat.col(k));
    Eigen::MatrixXd x(m, m);
    for (int r = 0; r < m; ++r) x.row(r) = solve_tridiag(mass, y.row(r).transpose()).transpose();
    NodalField2D out;
    out.n = n;
    out.values = Eigen::Map<const Eigen::VectorXd>(x.data(), m * m);
    return out;
}

NodalField1D section(const NodalField2D& u, int i) {
    const int m = u.n - 1;
    if (i < 1 || i > m) throw std::out_of_range("section: need 1 <= i <= n-1");
    Eigen::VectorXd vals(m);
    for (int j = 1; j <= m; ++j) vals[j - 1] = u.values[(j - 1) * m + (i - 1)];
    return NodalField1D{make_mesh(u.n), vals};
}

}  // namespace cdlab

#include "cdlab/discretize.hpp"

#include <cmath>
#include <stdexcept>

namespace cdlab {

namespace {

constexpr int kLoadOrder = 10;

/// (f, phi_j) on the two elements of the hat's support.
double hat_moment(const ScalarFn& f, const Mesh1D& mesh, int j) {
    const double h = mesh.h;
    const double xl = mesh.node(j - 1), xc = mesh.node(j), xr = mesh.node(j + 1);
    return gauss_quad([&](double x) { return f(x) * (x - xl) / h; }, xl, xc, kLoadOrder) +
           gauss_quad([&](double x) { return f(x) * (xr - x) / h; }, xc, xr, kLoadOrder);
}

/// (f, B_k) over element k = [x_{k-1}, x_k]; exponential bubbles get
/// left-anchored geometric panels (their gradient lives at the element's
/// left end at scale eps).
double bubble_moment(const ScalarFn& f, const Mesh1D& mesh, const BubbleSpec& bubble, int k) {
    const double a = mesh.node(k - 1);
    auto g = [&](double x) { return f(x) * bubble(x - a); };
    if (bubble.kind == BubbleKind::exponential)
        return panel_quad_left(g, a, a + mesh.h, std::min(bubble.eps, mesh.h));
    return gauss_quad(g, a, a + mesh.h, kLoadOrder);
}

}  // namespace

Eigen::VectorXd hat_load(const ScalarFn& f, const Mesh1D& mesh) {
    const int m = mesh.n - 1;
    Eigen::VectorXd rhs(m);
    if (f.constant) {
        rhs.setConstant(*f.constant * mesh.h);
        return rhs;
    }
    for (int j = 1; j <= m; ++j) rhs[j - 1] = hat_moment(f, mesh, j);
    return rhs;
}

Eigen::VectorXd upg_load(const ScalarFn& f, const Mesh1D& mesh, const BubbleSpec& bubble) {
    const int m = mesh.n - 1;
    if (f.constant) {
        // (f, B_j) - (f, B_{j+1}) = c b h - c b h = 0 on interior rows
        return Eigen::VectorXd::Constant(m, *f.constant * mesh.h);
    }
    Eigen::VectorXd bub(mesh.n);
    for (int k = 1; k <= mesh.n; ++k) bub[k - 1] = bubble_moment(f, mesh, bubble, k);
    Eigen::VectorXd rhs(m);
    for (int j = 1; j <= m; ++j) rhs[j - 1] = hat_moment(f, mesh, j) + bub[j - 1] - bub[j];
    return rhs;
}

std::pair<TriDiag, Eigen::VectorXd> assemble_sl(const ProblemSpec1D& spec) {
    if (spec.method != Method::SL) throw std::invalid_argument("assemble_sl: method must be SL");
    if (!(spec.eps > 0)) throw std::invalid_argument("assemble_sl: eps > 0 required");
    const double r = spec.eps / spec.mesh.h;
    TriDiag t = make_tridiag(spec.mesh.n - 1, -r - 0.5, 2 * r, -r + 0.5);
    return {std::move(t), hat_load(spec.f, spec.mesh)};
}

std::pair<TriDiag, Eigen::VectorXd> assemble_upg(const ProblemSpec1D& spec) {
    if (spec.method != Method::UPG) throw std::invalid_argument("assemble_upg: method must be UPG");
    if (!spec.bubble) throw std::invalid_argument("assemble_upg: bubble required");
    if (spec.eps < 0) throw std::invalid_argument("assemble_upg: eps >= 0 required");
    if (!(spec.bubble->b > 0)) throw std::invalid_argument("assemble_upg: bubble average must be positive");
    const double s = spec.eps / spec.mesh.h + spec.bubble->b;
    TriDiag t = make_tridiag(spec.mesh.n - 1, -s - 0.5, 2 * s, -s + 0.5);
    return {std::move(t), upg_load(spec.f, spec.mesh, *spec.bubble)};
}

bool upg_is_m_matrix(double eps, double h, double b) { return eps / h + b >= 0.5; }

SaddleSystem assemble_spls(const ProblemSpec1D& spec) {
    if (spec.eps < 0) throw std::invalid_argument("assemble_spls: eps >= 0 required");
    const int n = spec.mesh.n;
    const int m = n - 1;
    const int dim = 2 * n - 1;
    const double h = spec.mesh.h;
    const double eps = spec.eps;
    SaddleSystem sys;

    // a0 = (v', v') in the hierarchical basis: the vertex-bubble coupling
    // vanishes because bubble slopes integrate to zero per element.
    sys.a0_block = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < m; ++i) {
        sys.a0_block(i, i) = 2.0 / h;
        if (i > 0) sys.a0_block(i, i - 1) = -1.0 / h;
        if (i < m - 1) sys.a0_block(i, i + 1) = -1.0 / h;
    }
    for (int k = 0; k < n; ++k) sys.a0_block(m + k, m + k) = 16.0 / (3.0 * h);

    // b(v, p) = eps (p', v') + (p', v); the vertex rows reproduce the SL
    // stencil, the bubble rows see only the convection term.
    sys.b_block = Eigen::MatrixXd::Zero(dim, m);
    const double r = eps / h;
    for (int j = 0; j < m; ++j) {
        sys.b_block(j, j) = 2 * r;
        if (j > 0) sys.b_block(j, j - 1) = -r - 0.5;
        if (j < m - 1) sys.b_block(j, j + 1) = -r + 0.5;
    }
    for (int k = 1; k <= n; ++k) {
        if (k <= m) sys.b_block(m + k - 1, k - 1) = 2.0 / 3.0;
        if (k >= 2) sys.b_block(m + k - 1, k - 2) = -2.0 / 3.0;
    }

    sys.rhs.resize(dim);
    sys.rhs.head(m) = hat_load(spec.f, spec.mesh);
    if (spec.f.constant) {
        sys.rhs.tail(n).setConstant(*spec.f.constant * 2.0 * h / 3.0);
    } else {
        for (int k = 1; k <= n; ++k) {
            const double a = spec.mesh.node(k - 1);
            sys.rhs[m + k - 1] = gauss_quad(
                [&](double x) {
                    const double t = (x - a) / h;
                    return spec.f(x) * 4.0 * t * (1.0 - t);
                },
                a, a + h, kLoadOrder);
        }
    }
    return sys;
}

SPLSSolution solve_spls(const SaddleSystem& system) {
    const int dim = static_cast<int>(system.a0_block.rows());
    const int m = static_cast<int>(system.b_block.cols());
    const int n = m + 1;
    const int total = dim + m;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(total, total);
    k.topLeftCorner(dim, dim) = system.a0_block;
    k.topRightCorner(dim, m) = system.b_block;
    k.bottomLeftCorner(m, dim) = system.b_block.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
    rhs.head(dim) = system.rhs;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
    Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) throw singular_error("solve_spls: saddle system is singular");
    SPLSSolution out;
    out.w = sol.head(dim);
    out.u = NodalField1D{make_mesh(n), sol.tail(m)};
    return out;
}

ReducedSLReport solve_reduced_sl(const Mesh1D& mesh, const ScalarFn& f) {
    const int m = mesh.n - 1;
    const Eigen::VectorXd rhs = hat_load(f, mesh);
    const Eigen::MatrixXd c0 = make_tridiag(m, -0.5, 0.0, 0.5).to_dense();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c0);
    lu.setThreshold(1e-12);
    ReducedSLReport report;
    if (lu.rank() < m) {
        report.singular = true;
        Eigen::VectorXd ker = lu.kernel().col(0);
        int imax = 0;
        ker.cwiseAbs().maxCoeff(&imax);
        ker /= ker[imax];
        report.kernel = ker;
        report.defect = ker.dot(rhs);
    } else {
        report.u = NodalField1D{mesh, lu.solve(rhs)};
    }
    return report;
}

NodalField1D solve(const ProblemSpec1D& spec) {
    switch (spec.method) {
        case Method::SL: {
            if (spec.eps > 0) {
                auto [t, rhs] = assemble_sl(spec);
                return NodalField1D{spec.mesh, solve_tridiag(t, rhs)};
            }
            ReducedSLReport report = solve_reduced_sl(spec.mesh, spec.f);
            if (report.singular)
                throw singular_error("solve: reduced SL system is singular (even n)");
            return report.u;
        }
        case Method::UPG: {
            auto [t, rhs] = assemble_upg(spec);
            return NodalField1D{spec.mesh, solve_tridiag(t, rhs)};
        }
        case Method::SPLS:
            return solve_spls(assemble_spls(spec)).u;
    }
    throw std::invalid_argument("solve: unknown method");
}

}  // namespace cdlab

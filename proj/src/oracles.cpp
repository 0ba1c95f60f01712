#include "cdlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdlab {

double transport(TransportKind kind, const ScalarFn& f, double x) {
    auto prim = [&f](double t) {
        if (f.antiderivative) return f.antiderivative(t);
        return adaptive_quad(f.f, 0.0, t);
    };
    switch (kind) {
        case TransportKind::LR: return prim(x);
        case TransportKind::RL: return prim(x) - prim(1.0);
        case TransportKind::Shifted: return prim(x) - 0.5 * prim(1.0);
    }
    return 0.0;
}

double exact_const_f(double eps, double x) {
    if (eps <= 0) throw std::invalid_argument("exact_const_f: eps > 0 required");
    const double denom = -std::expm1(-1.0 / eps);
    return x - (std::exp((x - 1.0) / eps) - std::exp(-1.0 / eps)) / denom;
}

namespace {

double polyval(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

/// Finish an exact solution from a particular solution u_p (with u_p(0)=0)
/// and its derivative q: u = u_p + A + D e^{(x-1)/eps}.
ExactSolution finish_exact(double eps, std::function<double(double)> up,
                           std::function<double(double)> q) {
    const double denom = -std::expm1(-1.0 / eps);
    const double D = -up(1.0) / denom;
    const double A = -D * std::exp(-1.0 / eps);
    ExactSolution s;
    s.u = make_fn([=](double x) { return up(x) + A + D * std::exp((x - 1.0) / eps); });
    s.du = make_fn([=](double x) { return q(x) + (D / eps) * std::exp((x - 1.0) / eps); });
    return s;
}

}  // namespace

ExactSolution exact_solution_poly(double eps, const std::vector<double>& coeffs) {
    if (eps <= 0) throw std::invalid_argument("exact_solution_poly: eps > 0 required");
    // u' = q solves q - eps q' = f, i.e. q = sum_j eps^j f^(j) (finite sum).
    std::vector<double> q(coeffs.size(), 0.0);
    std::vector<double> der = coeffs;
    double fac = 1.0;
    bool nonzero = true;
    while (nonzero) {
        for (std::size_t k = 0; k < der.size(); ++k) q[k] += fac * der[k];
        nonzero = false;
        std::vector<double> next(der.size(), 0.0);
        for (std::size_t k = 0; k + 1 < der.size(); ++k) {
            next[k] = der[k + 1] * static_cast<double>(k + 1);
            if (next[k] != 0.0) nonzero = true;
        }
        der = next;
        fac *= eps;
    }
    std::vector<double> up_coeffs(q.size() + 1, 0.0);
    for (std::size_t k = 0; k < q.size(); ++k) up_coeffs[k + 1] = q[k] / static_cast<double>(k + 1);
    return finish_exact(
        eps, [up_coeffs](double x) { return polyval(up_coeffs, x); },
        [q](double x) { return polyval(q, x); });
}

ExactSolution exact_solution_trig(double eps, double k, bool is_sin) {
    if (eps <= 0) throw std::invalid_argument("exact_solution_trig: eps > 0 required");
    const double denom = 1.0 + eps * eps * k * k;
    const double a = is_sin ? 1.0 / denom : -eps * k / denom;
    const double b = is_sin ? eps * k / denom : 1.0 / denom;
    auto q = [a, b, k](double x) { return a * std::sin(k * x) + b * std::cos(k * x); };
    auto up = [a, b, k](double x) {
        return a * (1.0 - std::cos(k * x)) / k + b * std::sin(k * x) / k;
    };
    return finish_exact(eps, up, q);
}

double greens(double eps, double x, double s) {
    if (eps <= 0) throw std::invalid_argument("greens: eps > 0 required");
    const double denom = -std::expm1(-1.0 / eps);
    if (s < x) {
        return -std::expm1(-(1.0 - x) / eps) * -std::expm1(-s / eps) / denom;
    }
    return (std::exp((x - s) / eps) - std::exp((x - 1.0) / eps) - std::exp(-s / eps) +
            std::exp(-1.0 / eps)) /
           denom;
}

Eigen::MatrixXd inverse_via_greens(double eps, const Mesh1D& mesh) {
    const int m = mesh.n - 1;
    Eigen::MatrixXd g(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) g(j, i) = greens(eps, mesh.node(j + 1), mesh.node(i + 1));
    return g;
}

namespace {

/// (g, phi_i) for all interior hats, by adaptive per-element quadrature.
Eigen::VectorXd hat_moments(const ScalarFn& g, const Mesh1D& mesh) {
    const int m = mesh.n - 1;
    const double h = mesh.h;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (int i = 1; i <= m; ++i) {
        const double xl = mesh.node(i - 1), xc = mesh.node(i), xr = mesh.node(i + 1);
        rhs[i - 1] =
            adaptive_quad([&](double x) { return g(x) * (x - xl) / h; }, xl, xc) +
            adaptive_quad([&](double x) { return g(x) * (xr - x) / h; }, xc, xr);
    }
    return rhs;
}

Eigen::MatrixXd hat_mass(const Mesh1D& mesh) {
    const int m = mesh.n - 1;
    const double h = mesh.h;
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        mass(i, i) = 4.0 * h / 6.0;
        if (i > 0) mass(i, i - 1) = h / 6.0;
        if (i < m - 1) mass(i, i + 1) = h / 6.0;
    }
    return mass;
}

std::function<double(double)> nodal_interp(const Mesh1D& mesh, Eigen::VectorXd nodal) {
    return [mesh, nodal = std::move(nodal)](double x) {
        int k = std::clamp(static_cast<int>(std::ceil(x / mesh.h)), 1, mesh.n);
        const double t = (x - mesh.node(k - 1)) / mesh.h;
        return nodal[k - 1] + t * (nodal[k] - nodal[k - 1]);
    };
}

}  // namespace

ProjectedFn l2_project(const ScalarFn& g, ProjectionTarget target, const Mesh1D& mesh) {
    const int n = mesh.n;
    const int m = n - 1;
    const double h = mesh.h;
    ProjectedFn out;
    if (target == ProjectionTarget::interior_hats) {
        Eigen::VectorXd c = hat_mass(mesh).ldlt().solve(hat_moments(g, mesh));
        out.coefs = c;
        out.nodal = Eigen::VectorXd::Zero(n + 1);
        out.nodal.segment(1, m) = c;
    } else if (target == ProjectionTarget::tied_ends) {
        // basis: interior hats, then psi = phi_0 + phi_n (the tied boundary pair)
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m + 1, m + 1);
        mass.topLeftCorner(m, m) = hat_mass(mesh);
        mass(m, m) = 2.0 * h / 3.0;
        mass(m, 0) += h / 6.0;
        mass(0, m) += h / 6.0;
        mass(m, m - 1) += h / 6.0;
        mass(m - 1, m) += h / 6.0;
        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = hat_moments(g, mesh);
        rhs[m] = adaptive_quad([&](double x) { return g(x) * (h - x) / h; }, 0.0, h) +
                 adaptive_quad([&](double x) { return g(x) * (x - (1.0 - h)) / h; }, 1.0 - h, 1.0);
        Eigen::VectorXd c = mass.ldlt().solve(rhs);
        out.coefs = c;
        out.nodal = Eigen::VectorXd::Zero(n + 1);
        out.nodal.segment(1, m) = c.head(m);
        out.nodal[0] = out.nodal[n] = c[m];
    } else {  // mean_zero: basis psi_i = phi_i - h (images q - mean(q))
        Eigen::MatrixXd mass = hat_mass(mesh);
        mass.array() -= h * h;
        Eigen::VectorXd rhs = hat_moments(g, mesh);
        const double gbar = adaptive_quad(g.f, 0.0, 1.0);
        rhs.array() -= h * gbar;
        Eigen::VectorXd c = mass.ldlt().solve(rhs);
        out.coefs = c;
        out.nodal = Eigen::VectorXd::Zero(n + 1);
        const double shift = h * c.sum();
        for (int j = 1; j < n; ++j) out.nodal[j] = c[j - 1] - shift;
        out.nodal[0] = out.nodal[n] = -shift;
    }
    out.eval = nodal_interp(mesh, out.nodal);
    return out;
}

double poisson_uf(const ScalarFn& f, double x) {
    const double left = adaptive_quad([&f](double s) { return s * f(s); }, 0.0, x);
    const double right = adaptive_quad([&f](double s) { return (1.0 - s) * f(s); }, x, 1.0);
    return (1.0 - x) * left + x * right;
}

Eigen::VectorXd elliptic_projection_uf(const ScalarFn& f, const Mesh1D& mesh) {
    const int n = mesh.n;
    const int m = n - 1;
    const double h = mesh.h;
    Eigen::VectorXd coefs(2 * n - 1);
    // vertex block: P1 stiffness tridiag(-1,2,-1)/h
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        stiff(i, i) = 2.0 / h;
        if (i > 0) stiff(i, i - 1) = -1.0 / h;
        if (i < m - 1) stiff(i, i + 1) = -1.0 / h;
    }
    coefs.head(m) = stiff.ldlt().solve(hat_moments(f, mesh));
    // bubble block: diagonal int (B_k')^2 = 16/(3h)
    for (int k = 1; k <= n; ++k) {
        const double a = mesh.node(k - 1);
        const double load = adaptive_quad(
            [&](double x) {
                const double t = (x - a) / h;
                return f(x) * 4.0 * t * (1.0 - t);
            },
            a, a + h);
        coefs[m + k - 1] = load * 3.0 * h / 16.0;
    }
    return coefs;
}

double interp_energy_error(double eps, double h, EnergyWindow window) {
    if (eps <= 0 || h <= 0 || h >= 1)
        throw std::invalid_argument("interp_energy_error: need eps > 0, 0 < h < 1");
    const double full = ((1.0 + std::exp(-1.0 / eps)) / -std::expm1(-1.0 / eps)) *
                        (0.5 / eps - (1.0 / h) * -std::expm1(-h / eps) /
                                         (1.0 + std::exp(-h / eps)));
    if (window == EnergyWindow::full) return full;
    const double abl = ((std::exp(-2.0 * h / eps) - std::exp(-2.0 / eps)) /
                        -std::expm1(-2.0 / eps)) *
                       full;
    if (window == EnergyWindow::away_from_layer) return abl;
    return full - abl;
}

}  // namespace cdlab

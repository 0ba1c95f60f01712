#include "cdlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdlab {

double star_seminorm(const NodalField1D& u) {
    const int n = u.mesh.n;
    double sum_sq = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double avg = 0.5 * (u.at_node(i - 1) + u.at_node(i));
        sum_sq += avg * avg;
    }
    const double integral = field_integral(u);
    double radicand = sum_sq / n - integral * integral;
    if (radicand < 0.0) {
        if (radicand < -1e-14) throw std::runtime_error("star_seminorm: negative radicand");
        radicand = 0.0;
    }
    return std::sqrt(radicand);
}

TResult apply_T(const NodalField1D& u) {
    const Mesh1D mesh = u.mesh;
    const int n = mesh.n;
    const double h = mesh.h;
    const double ubar = field_integral(u);
    // prefix integrals at nodes (exact trapezoid for the linear field)
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n; ++k)
        prefix[static_cast<std::size_t>(k)] =
            prefix[static_cast<std::size_t>(k - 1)] + 0.5 * h * (u.at_node(k - 1) + u.at_node(k));
    TResult r;
    r.Tu = [mesh, u, ubar, prefix, h](double x) {
        int k = std::clamp(static_cast<int>(std::ceil(x / h)), 1, mesh.n);
        const double x0 = mesh.node(k - 1);
        const double a = u.at_node(k - 1);
        const double slope = (u.at_node(k) - a) / h;
        const double t = x - x0;
        const double partial = a * t + 0.5 * slope * t * t;
        return x * ubar - (prefix[static_cast<std::size_t>(k - 1)] + partial);
    };
    const double sq = l2_norm(u) * l2_norm(u) - ubar * ubar;
    r.seminorm = std::sqrt(std::max(0.0, sq));
    return r;
}

TResult apply_T(const ScalarFn& u) {
    const double ubar = adaptive_quad(u.f, 0.0, 1.0);
    TResult r;
    auto f = u.f;
    r.Tu = [f, ubar](double x) { return x * ubar - adaptive_quad(f, 0.0, x); };
    const double l2sq = adaptive_quad([&u](double x) { return u(x) * u(x); }, 0.0, 1.0);
    r.seminorm = std::sqrt(std::max(0.0, l2sq - ubar * ubar));
    return r;
}

double star_norm(const NodalField1D& u, const NormVariant& v) {
    const double h1 = h1_seminorm(u);
    switch (v.tag) {
        case NormVariant::Tag::SL: {
            const double s = star_seminorm(u);
            return std::sqrt(v.eps * v.eps * h1 * h1 + s * s);
        }
        case NormVariant::Tag::UPG: {
            const double s = star_seminorm(u);
            const double c = (v.eps + v.h * v.b);
            return std::sqrt((c * c * h1 * h1 + s * s) / (1.0 + v.b_e));
        }
        case NormVariant::Tag::SPLS: {
            const double t = apply_T(u).seminorm;
            return std::sqrt(v.eps * v.eps * h1 * h1 + t * t);
        }
    }
    return 0.0;
}

double h1_seminorm(const NodalField1D& u) {
    const int n = u.mesh.n;
    const double h = u.mesh.h;
    double s = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double d = u.at_node(i) - u.at_node(i - 1);
        s += d * d;
    }
    return std::sqrt(s / h);
}

double l2_norm(const NodalField1D& u) {
    const int n = u.mesh.n;
    const double h = u.mesh.h;
    double s = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double a = u.at_node(i - 1), b = u.at_node(i);
        s += (a * a + a * b + b * b);  // int over element = h*(a^2+ab+b^2)/3
    }
    return std::sqrt(s * h / 3.0);
}

double field_integral(const NodalField1D& u) {
    return u.mesh.h * u.values.sum();  // trapezoid, exact with zero boundary values
}

double discrete_inf_error(const NodalField1D& u, const ScalarFn& exact) {
    double m = 0.0;
    for (int j = 1; j < u.mesh.n; ++j)
        m = std::max(m, std::abs(u.values[j - 1] - exact(u.mesh.node(j))));
    return m;
}

std::pair<double, double> windowed_errors(const NodalField1D& u, const ScalarFn& exact,
                                          const ScalarFn& dexact, const Window& w,
                                          double layer_scale) {
    const Mesh1D& mesh = u.mesh;
    double scale = 1.0;
    for (int j = 0; j <= mesh.n; ++j)
        scale = std::max({scale, std::abs(u.at_node(j)), std::abs(exact(mesh.node(j)))});
    double l2 = 0.0, h1 = 0.0;
    for (int k = 1; k <= mesh.n; ++k) {
        const double lo = std::max(w.a, mesh.node(k - 1));
        const double hi = std::min(w.b, mesh.node(k));
        if (hi <= lo) continue;
        const double slope = (u.at_node(k) - u.at_node(k - 1)) / mesh.h;
        auto l2_ig = [&](double x) {
            const double d = exact(x) - field_eval(u, x);
            return d * d;
        };
        auto h1_ig = [&](double x) {
            const double d = dexact(x) - slope;
            return d * d;
        };
        // Round-off floors: when u matches exact to machine precision the
        // integrands are noise and a relative tolerance can never be met.
        const double dscale = std::max({1.0, std::abs(slope), std::abs(dexact(lo)),
                                        std::abs(dexact(0.5 * (lo + hi))), std::abs(dexact(hi))});
        const double l2_floor = 1e-30 * scale * scale * (hi - lo);
        const double h1_floor = 1e-30 * dscale * dscale * (hi - lo);
        // Right-anchored panels when the element reaches into a layer at x=1.
        const double layer_edge = 1.0 - 60.0 * layer_scale;
        if (layer_scale > 0.0 && hi > layer_edge) {
            const double mid = std::max(lo, layer_edge);
            l2 += adaptive_quad(l2_ig, lo, mid, 1e-13, 48, l2_floor) +
                  panel_quad_right(l2_ig, mid, hi, layer_scale);
            h1 += adaptive_quad(h1_ig, lo, mid, 1e-13, 48, h1_floor) +
                  panel_quad_right(h1_ig, mid, hi, layer_scale);
        } else {
            l2 += adaptive_quad(l2_ig, lo, hi, 1e-13, 48, l2_floor);
            h1 += adaptive_quad(h1_ig, lo, hi, 1e-13, 48, h1_floor);
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

OscReport oscillation_report(const NodalField1D& u) {
    const int n = u.mesh.n;
    OscReport rep;
    // first differences, boundary zeros included
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] = u.at_node(j + 1) - u.at_node(j);
    for (int j = 0; j + 1 < n; ++j)
        if (d[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(j + 1)] < 0.0)
            ++rep.sign_changes;
    for (int j = 0; j < n; ++j)
        rep.max_jump = std::max(rep.max_jump, std::abs(d[static_cast<std::size_t>(j)]));
    for (int j = 1; j < n; ++j) {
        const double centered = u.at_node(j) - 0.5 * (u.at_node(j - 1) + u.at_node(j + 1));
        rep.teeth_amplitude = std::max(rep.teeth_amplitude, std::abs(centered));
    }
    return rep;
}

NodalField1D make_teeth_saw(const Mesh1D& mesh) {
    if (mesh.n % 2 != 0) throw std::invalid_argument("make_teeth_saw: n must be even");
    NodalField1D u;
    u.mesh = mesh;
    u.values = Eigen::VectorXd::Zero(mesh.n - 1);
    for (int j = 1; j < mesh.n; j += 2) u.values[j - 1] = 1.0;
    return u;
}

}  // namespace cdlab

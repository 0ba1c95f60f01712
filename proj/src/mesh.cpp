#include "cdlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace cdlab {

ScalarFn make_fn(std::function<double(double)> f) {
    ScalarFn s;
    s.f = std::move(f);
    return s;
}

ScalarFn make_const_fn(double c) {
    ScalarFn s;
    s.f = [c](double) { return c; };
    s.sup_f = std::abs(c);
    s.sup_df = 0.0;
    s.constant = c;
    s.antiderivative = [c](double x) { return c * x; };
    return s;
}

Mesh1D make_mesh(int n) {
    if (n < 2) throw std::invalid_argument("make_mesh: need n >= 2");
    Mesh1D m;
    m.n = n;
    m.h = 1.0 / n;
    m.nodes.resize(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) m.nodes[static_cast<std::size_t>(j)] = j * m.h;
    m.nodes.back() = 1.0;
    return m;
}

double hat_eval(const Mesh1D& mesh, int i, double x) {
    if (i < 1 || i > mesh.n - 1) throw std::out_of_range("hat_eval: index outside 1..n-1");
    const double t = 1.0 - std::abs(x - mesh.node(i)) / mesh.h;
    return std::max(0.0, t);
}

NodalField1D interpolate(const Mesh1D& mesh, const ScalarFn& f) {
    NodalField1D u;
    u.mesh = mesh;
    u.values.resize(mesh.n - 1);
    for (int j = 1; j < mesh.n; ++j) u.values[j - 1] = f(mesh.node(j));
    return u;
}

namespace {

// Element index for point evaluation; x exactly at a node belongs to the
// left element (so derivatives are one-sided left).
int element_of(const Mesh1D& mesh, double x) {
    int k = static_cast<int>(std::ceil(x / mesh.h));
    return std::clamp(k, 1, mesh.n);
}

}  // namespace

double field_eval(const NodalField1D& u, double x) {
    const Mesh1D& mesh = u.mesh;
    const int k = element_of(mesh, x);
    const double a = u.at_node(k - 1), b = u.at_node(k);
    const double t = (x - mesh.node(k - 1)) / mesh.h;
    return a + t * (b - a);
}

double field_slope(const NodalField1D& u, double x) {
    const Mesh1D& mesh = u.mesh;
    const int k = element_of(mesh, x);
    return (u.at_node(k) - u.at_node(k - 1)) / mesh.h;
}

namespace {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};

// Legendre polynomial value and derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

GaussRule build_rule(int order) {
    GaussRule r;
    r.x.resize(static_cast<std::size_t>(order));
    r.w.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            auto [p, dp] = legendre(order, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        auto [p, dp] = legendre(order, x);
        (void)p;
        r.x[static_cast<std::size_t>(i)] = x;
        r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const GaussRule& rule_for(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
    return it->second;
}

}  // namespace

double gauss_quad(const std::function<double(double)>& g, double a, double b, int order) {
    if (order < 1) throw std::invalid_argument("gauss_quad: order >= 1 required");
    if (order == 1) return (b - a) * g(0.5 * (a + b));
    const GaussRule& r = rule_for(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * g(mid + half * r.x[i]);
    return half * s;
}

namespace {

double adaptive_rec(const std::function<double(double)>& g, double a, double b, double whole,
                    double rel_tol, double abs_tol, long& budget, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss_quad(g, a, m, 10), right = gauss_quad(g, m, b, 10);
    const double refined = left + right;
    const double err = std::abs(refined - whole);
    budget -= 2;
    if (depth <= 0 || budget <= 0 || err <= rel_tol * std::abs(refined) + abs_tol + 1e-300)
        return refined;
    return adaptive_rec(g, a, m, left, rel_tol, abs_tol, budget, depth - 1) +
           adaptive_rec(g, m, b, right, rel_tol, abs_tol, budget, depth - 1);
}

}  // namespace

double adaptive_quad(const std::function<double(double)>& g, double a, double b, double rel_tol,
                     int max_depth, double abs_tol) {
    if (b <= a) return 0.0;
    long budget = 1 << 16;  // hard cap on subdivisions, keeps worst case bounded
    return adaptive_rec(g, a, b, gauss_quad(g, a, b, 10), rel_tol, abs_tol, budget, max_depth);
}

double panel_quad_left(const std::function<double(double)>& g, double a, double b, double scale) {
    if (b <= a) return 0.0;
    const double len = b - a;
    double w = std::clamp(scale, len * 1e-14, len);
    double s = 0.0, lo = a;
    while (lo < b) {
        const double hi = std::min(b, lo + w);
        s += gauss_quad(g, lo, hi, 10);
        lo = hi;
        w *= 2.0;
    }
    return s;
}

double panel_quad_right(const std::function<double(double)>& g, double a, double b, double scale) {
    if (b <= a) return 0.0;
    const double len = b - a;
    double w = std::clamp(scale, len * 1e-14, len);
    double s = 0.0, hi = b;
    while (hi > a) {
        const double lo = std::max(a, hi - w);
        s += gauss_quad(g, lo, hi, 10);
        hi = lo;
        w *= 2.0;
    }
    return s;
}

}  // namespace cdlab

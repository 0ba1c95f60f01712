#include "cdlab/experiment.hpp"

#include "presets_data.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace cdlab {

namespace {

using nlohmann::json;

std::string g17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t idx = 0;
        const double v = std::stod(s, &idx);
        if (idx != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error("bad number '" + s + "' in " + what);
    }
}

double polyval(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

}  // namespace

FnDesc parse_fn_desc(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0)
        throw config_error("bad function descriptor '" + text + "' (expected kind:args)");
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    const std::string where = "descriptor '" + text + "'";
    FnDesc d;
    d.text = text;
    if (head == "const") {
        d.kind = FnDesc::Kind::constant;
        d.c = parse_number(tail, where);
    } else if (head == "sin" || head == "cos") {
        d.kind = head == "sin" ? FnDesc::Kind::trig_sin : FnDesc::Kind::trig_cos;
        if (tail.size() < 2 || tail.substr(tail.size() - 2) != "pi")
            throw config_error("trig " + where + " must end in 'pi'");
        const std::string mult = tail.substr(0, tail.size() - 2);
        d.k = (mult.empty() ? 1.0 : parse_number(mult, where)) * std::numbers::pi;
        if (!(d.k > 0)) throw config_error("trig frequency must be positive in " + where);
    } else if (head == "poly") {
        d.kind = FnDesc::Kind::poly;
        std::stringstream ss(tail);
        std::string tok;
        while (std::getline(ss, tok, ',')) d.coeffs.push_back(parse_number(tok, where));
        if (d.coeffs.empty()) throw config_error("poly " + where + " needs coefficients");
    } else if (head == "split") {
        d.kind = FnDesc::Kind::split;
        d.inner = std::make_shared<FnDesc>(parse_fn_desc(tail));
        if (d.inner->kind == FnDesc::Kind::split)
            throw config_error("split descriptors cannot nest: '" + text + "'");
    } else {
        throw config_error("unknown descriptor kind '" + head + "' in '" + text + "'");
    }
    return d;
}

FnDesc2D parse_fn_desc_2d(const std::string& text) {
    FnDesc2D d;
    d.text = text;
    if (text.rfind("const:", 0) == 0) {
        d.separable = false;
        d.c = parse_number(text.substr(6), "2D descriptor '" + text + "'");
        return d;
    }
    if (text.rfind("xy:", 0) == 0) {
        const std::string tail = text.substr(3);
        const auto star = tail.find('*');
        if (star == std::string::npos)
            throw config_error("2D descriptor '" + text + "' needs the form xy:<descx>*<descy>");
        d.separable = true;
        d.fx = parse_fn_desc(tail.substr(0, star));
        d.fy = parse_fn_desc(tail.substr(star + 1));
        if (d.fx.kind == FnDesc::Kind::split || d.fy.kind == FnDesc::Kind::split)
            throw config_error("split factors are not supported in 2D: '" + text + "'");
        return d;
    }
    throw config_error("unknown 2D descriptor '" + text + "'");
}

ScalarFn make_scalar_fn(const FnDesc& desc) {
    switch (desc.kind) {
        case FnDesc::Kind::constant:
            return make_const_fn(desc.c);
        case FnDesc::Kind::trig_sin: {
            const double k = desc.k;
            ScalarFn f = make_fn([k](double x) { return std::sin(k * x); });
            f.antiderivative = [k](double x) { return (1.0 - std::cos(k * x)) / k; };
            f.sup_f = 1.0;
            f.sup_df = k;
            return f;
        }
        case FnDesc::Kind::trig_cos: {
            const double k = desc.k;
            ScalarFn f = make_fn([k](double x) { return std::cos(k * x); });
            f.antiderivative = [k](double x) { return std::sin(k * x) / k; };
            f.sup_f = 1.0;
            f.sup_df = k;
            return f;
        }
        case FnDesc::Kind::poly: {
            const std::vector<double> c = desc.coeffs;
            ScalarFn f = make_fn([c](double x) { return polyval(c, x); });
            std::vector<double> anti(c.size() + 1, 0.0);
            for (std::size_t k = 0; k < c.size(); ++k)
                anti[k + 1] = c[k] / static_cast<double>(k + 1);
            f.antiderivative = [anti](double x) { return polyval(anti, x); };
            std::vector<double> der(c.size() > 1 ? c.size() - 1 : 1, 0.0);
            for (std::size_t k = 1; k < c.size(); ++k)
                der[k - 1] = c[k] * static_cast<double>(k);
            double sf = 0.0, sdf = 0.0;
            const int samples = 4096;
            for (int i = 0; i <= samples; ++i) {
                const double x = static_cast<double>(i) / samples;
                sf = std::max(sf, std::abs(polyval(c, x)));
                sdf = std::max(sdf, std::abs(polyval(der, x)));
            }
            f.sup_f = sf;
            f.sup_df = sdf;
            return f;
        }
        case FnDesc::Kind::split:
            return make_scalar_fn(*desc.inner);
    }
    throw config_error("unreachable descriptor kind");
}

ScalarFn2D make_scalar_fn_2d(const FnDesc2D& desc) {
    if (!desc.separable) return make_const_fn_2d(desc.c);
    const ScalarFn fx = make_scalar_fn(desc.fx);
    const ScalarFn fy = make_scalar_fn(desc.fy);
    ScalarFn2D out = make_fn_2d([fx, fy](double x, double y) { return fx(x) * fy(y); });
    if (desc.fx.kind == FnDesc::Kind::constant && desc.fy.kind == FnDesc::Kind::constant)
        out.constant = desc.fx.c * desc.fy.c;
    return out;
}

ExactSolution exact_for(const FnDesc& desc, double eps) {
    if (!(eps > 0)) throw config_error("exact solutions require eps > 0");
    switch (desc.kind) {
        case FnDesc::Kind::constant: return exact_solution_poly(eps, {desc.c});
        case FnDesc::Kind::poly: return exact_solution_poly(eps, desc.coeffs);
        case FnDesc::Kind::trig_sin: return exact_solution_trig(eps, desc.k, true);
        case FnDesc::Kind::trig_cos: return exact_solution_trig(eps, desc.k, false);
        case FnDesc::Kind::split: return exact_for(*desc.inner, eps);
    }
    throw config_error("unreachable descriptor kind");
}

namespace {

constexpr const char* kPresetOrder[] = {
    "fig1",          "fig2",           "fig3-left",     "fig3-middle",
    "fig3-right",    "exp-exactness",  "qbubble-bound", "forward-solve",
    "greens-inverse", "spikes2d",      "no-spikes2d",   "conv-upg"};

const std::map<std::string, std::string>& embedded_presets() {
    static const std::map<std::string, std::string> presets = [] {
        std::map<std::string, std::string> m;
        for (const auto& p : detail::kEmbeddedPresets) m.emplace(p.name, p.text);
        return m;
    }();
    return presets;
}

std::string preset_names_joined() {
    std::string out;
    for (const char* name : kPresetOrder) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

bool is_2d_method(RunMethod m) { return m == RunMethod::upg2d || m == RunMethod::reduced_2d; }

bool is_reduced_method(RunMethod m) {
    return m == RunMethod::reduced_sl || m == RunMethod::reduced_spls ||
           m == RunMethod::reduced_2d || m == RunMethod::project_shifted;
}

bool solves_1d_with_exact(RunMethod m) {
    return m == RunMethod::sl || m == RunMethod::spls || m == RunMethod::upg_quadratic ||
           m == RunMethod::upg_scaled || m == RunMethod::upg_exponential ||
           m == RunMethod::upg_forward;
}

RunMethod parse_method(const std::string& s) {
    static const std::map<std::string, RunMethod> methods = {
        {"sl", RunMethod::sl},
        {"spls", RunMethod::spls},
        {"upg-quadratic", RunMethod::upg_quadratic},
        {"upg-scaled", RunMethod::upg_scaled},
        {"upg-exponential", RunMethod::upg_exponential},
        {"upg-forward", RunMethod::upg_forward},
        {"reduced-sl", RunMethod::reduced_sl},
        {"reduced-spls", RunMethod::reduced_spls},
        {"upg2d", RunMethod::upg2d},
        {"reduced-2d", RunMethod::reduced_2d},
        {"project-shifted", RunMethod::project_shifted}};
    const auto it = methods.find(s);
    if (it == methods.end()) throw config_error("unknown method '" + s + "'");
    return it->second;
}

std::string method_name(RunMethod m) {
    switch (m) {
        case RunMethod::sl: return "sl";
        case RunMethod::spls: return "spls";
        case RunMethod::upg_quadratic: return "upg-quadratic";
        case RunMethod::upg_scaled: return "upg-scaled";
        case RunMethod::upg_exponential: return "upg-exponential";
        case RunMethod::upg_forward: return "upg-forward";
        case RunMethod::reduced_sl: return "reduced-sl";
        case RunMethod::reduced_spls: return "reduced-spls";
        case RunMethod::upg2d: return "upg2d";
        case RunMethod::reduced_2d: return "reduced-2d";
        case RunMethod::project_shifted: return "project-shifted";
    }
    return "?";
}

const std::set<std::string>& known_outputs() {
    static const std::set<std::string> s = {"solution", "errors", "oscillation", "table", "greens"};
    return s;
}

const std::set<std::string>& known_references() {
    static const std::set<std::string> s = {"exact",   "w",        "theta", "shifted",
                                            "reduced", "u_plus_teeth", "centered", "proj"};
    return s;
}

bool wants(const ExperimentConfig& c, const std::string& output) {
    for (const auto& o : c.outputs)
        if (o == output) return true;
    return false;
}

/// All validation shared between JSON parsing and run-time (CLI overrides
/// can re-shape the lists, so run_experiment validates again).
void validate_config(const ExperimentConfig& c) {
    if (c.n_list.empty()) throw config_error("config needs at least one n");
    for (int n : c.n_list)
        if (n < 2) throw config_error("n must be >= 2");
    if (c.eps_list.empty()) throw config_error("config needs at least one eps");
    if (is_reduced_method(c.method)) {
        for (double e : c.eps_list)
            if (e != 0.0)
                throw config_error("reduced methods take eps = 0 (omit eps or pass 0)");
    } else {
        for (double e : c.eps_list)
            if (!(e > 0))
                throw config_error("eps must be positive (use a reduced method for eps = 0)");
    }
    FnDesc desc1d;
    if (is_2d_method(c.method)) {
        parse_fn_desc_2d(c.f);
    } else {
        desc1d = parse_fn_desc(c.f);
    }

    if (c.outputs.empty()) throw config_error("config needs at least one output");
    for (const auto& o : c.outputs)
        if (!known_outputs().count(o)) throw config_error("unknown output '" + o + "'");
    for (const auto& r : c.references)
        if (!known_references().count(r)) throw config_error("unknown reference '" + r + "'");

    if (is_2d_method(c.method)) {
        if (!c.references.empty())
            throw config_error("reference columns are not available for 2D methods");
        for (const auto& o : c.outputs)
            if (o != "solution" && o != "oscillation")
                throw config_error("2D methods support only solution/oscillation outputs");
    } else {
        if (!c.sections.empty()) throw config_error("'sections' applies to 2D methods only");
    }

    if (c.method == RunMethod::project_shifted) {
        if (desc1d.kind == FnDesc::Kind::split)
            throw config_error("split descriptors are not supported for project-shifted");
        if (!c.references.empty())
            throw config_error("project-shifted does not take reference columns");
        for (const auto& o : c.outputs)
            if (o != "solution")
                throw config_error("project-shifted supports only the solution output");
    }

    if (wants(c, "errors") || wants(c, "table")) {
        if (!solves_1d_with_exact(c.method))
            throw config_error("errors/table outputs need a 1D method with eps > 0");
    }
    if (wants(c, "table")) {
        if (c.n_list.size() < 2)
            throw config_error("table output needs an increasing n list (each n doubling)");
        for (std::size_t i = 1; i < c.n_list.size(); ++i)
            if (c.n_list[i] != 2 * c.n_list[i - 1])
                throw config_error("table output needs each n to double the previous one");
    }
    if (wants(c, "greens") && c.method != RunMethod::upg_exponential)
        throw config_error("the greens output needs method upg-exponential");

    if (!is_reduced_method(c.method)) {
        for (const auto& r : c.references)
            if (r == "proj")
                throw config_error("the proj reference belongs to reduced/spls runs");
    }
    for (const auto& r : c.references)
        if ((r == "exact" || r == "u_plus_teeth") && is_reduced_method(c.method))
            throw config_error("reference '" + r + "' requires eps > 0");

    if (c.has_window) {
        if (!(c.window.a >= 0 && c.window.b <= 1 && c.window.a < c.window.b))
            throw config_error("window must satisfy 0 <= a < b <= 1");
    }
    if (c.abl_multiple >= 0) {
        for (int n : c.n_list)
            if (!(1.0 - c.abl_multiple / n > 0))
                throw config_error("abl window is empty for n = " + std::to_string(n));
    }
    if (c.method == RunMethod::upg_forward) {
        for (double e : c.eps_list)
            for (int n : c.n_list)
                if (!(e * n < 0.5))
                    throw config_error("upg-forward needs eps/h < 1/2");
    }
}

}  // namespace

const std::string& preset_json(const std::string& name) {
    const auto& m = embedded_presets();
    const auto it = m.find(name);
    if (it == m.end())
        throw config_error("unknown preset '" + name + "'; valid presets: " + preset_names_joined());
    return it->second;
}

std::vector<std::pair<std::string, std::string>> preset_catalog() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const char* name : kPresetOrder) {
        const json j = json::parse(preset_json(name));
        out.emplace_back(name, j.value("description", ""));
    }
    return out;
}

std::string list_presets() {
    std::string out = "available presets:\n";
    for (const auto& [name, desc] : preset_catalog()) {
        out += "  " + name;
        for (std::size_t i = name.size(); i < 16; ++i) out += ' ';
        out += desc + "\n";
    }
    return out;
}

ExperimentConfig parse_config_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config must be a JSON object");
    static const std::set<std::string> allowed = {"description", "method", "eps",      "n",
                                                 "f",           "window", "outputs",  "references",
                                                 "sections",    "out"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw config_error("unknown config key '" + key + "'");
    }

    ExperimentConfig c;
    c.out_dir.clear();
    if (!j.contains("method") || !j["method"].is_string())
        throw config_error("config needs a string 'method'");
    c.method = parse_method(j["method"].get<std::string>());

    if (!j.contains("n")) throw config_error("config needs 'n'");
    if (j["n"].is_number_integer()) {
        c.n_list = {j["n"].get<int>()};
    } else if (j["n"].is_array()) {
        for (const auto& v : j["n"]) {
            if (!v.is_number_integer()) throw config_error("'n' entries must be integers");
            c.n_list.push_back(v.get<int>());
        }
    } else {
        throw config_error("'n' must be an integer or a list of integers");
    }

    if (j.contains("eps")) {
        if (j["eps"].is_number()) {
            c.eps_list = {j["eps"].get<double>()};
        } else if (j["eps"].is_array()) {
            for (const auto& v : j["eps"]) {
                if (!v.is_number()) throw config_error("'eps' entries must be numbers");
                c.eps_list.push_back(v.get<double>());
            }
        } else {
            throw config_error("'eps' must be a number or a list of numbers");
        }
    } else if (is_reduced_method(c.method)) {
        c.eps_list = {0.0};
    }

    if (j.contains("f")) {
        if (!j["f"].is_string()) throw config_error("'f' must be a descriptor string");
        c.f = j["f"].get<std::string>();
    }

    if (j.contains("window")) {
        const auto& w = j["window"];
        if (w.is_string()) {
            const std::string s = w.get<std::string>();
            if (s.rfind("abl:", 0) != 0)
                throw config_error("window string must have the form abl:<k>");
            c.abl_multiple = parse_number(s.substr(4), "window '" + s + "'");
            if (c.abl_multiple < 0) throw config_error("abl multiple must be >= 0");
        } else if (w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number()) {
            c.has_window = true;
            c.window = Window{w[0].get<double>(), w[1].get<double>()};
        } else {
            throw config_error("'window' must be [a, b] or \"abl:<k>\"");
        }
    }

    if (j.contains("outputs")) {
        if (!j["outputs"].is_array()) throw config_error("'outputs' must be a list");
        c.outputs.clear();
        for (const auto& v : j["outputs"]) {
            if (!v.is_string()) throw config_error("'outputs' entries must be strings");
            c.outputs.push_back(v.get<std::string>());
        }
    } else {
        c.outputs = {"solution"};
    }

    if (j.contains("references")) {
        if (!j["references"].is_array()) throw config_error("'references' must be a list");
        for (const auto& v : j["references"]) {
            if (!v.is_string()) throw config_error("'references' entries must be strings");
            c.references.push_back(v.get<std::string>());
        }
    }

    if (j.contains("sections")) {
        if (!j["sections"].is_array()) throw config_error("'sections' must be a list");
        for (const auto& v : j["sections"]) {
            if (!v.is_number_integer()) throw config_error("'sections' entries must be integers");
            c.sections.push_back(v.get<int>());
        }
    }

    if (j.contains("out")) {
        if (!j["out"].is_string()) throw config_error("'out' must be a string");
        c.out_dir = j["out"].get<std::string>();
    }

    validate_config(c);
    return c;
}

ExperimentConfig load_preset(const std::string& name) {
    const std::string& text = preset_json(name);
    ExperimentConfig c = parse_config_json(text);
    c.preset = name;
    if (c.out_dir.empty()) c.out_dir = "runs/" + name;
    return c;
}

namespace {

// ---------------------------------------------------------------- artifacts

struct IndexRow {
    std::string method, eps, n, file, singular, defect;
};

class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& p) : out_(p, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + p.string() + " for writing");
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

Window resolve_window(const ExperimentConfig& c, const Mesh1D& mesh) {
    if (c.abl_multiple >= 0) return Window{0.0, 1.0 - c.abl_multiple * mesh.h};
    if (c.has_window) return c.window;
    return Window{0.0, 1.0};
}

/// x |-> w(x) - mean(w), the shift appearing in the reduced-projection
/// identity.
ScalarFn shifted_transport_fn(const ScalarFn& f) {
    auto w = [f](double x) { return transport(TransportKind::LR, f, x); };
    const double wbar = adaptive_quad(w, 0.0, 1.0);
    return make_fn([w, wbar](double x) { return w(x) - wbar; });
}

/// One solve of a non-reduced 1D method (or reduced SPLS) for a single f.
NodalField1D solve_1d_once(RunMethod method, double eps, const ScalarFn& f, const Mesh1D& mesh) {
    ProblemSpec1D spec;
    spec.eps = eps;
    spec.f = f;
    spec.mesh = mesh;
    switch (method) {
        case RunMethod::sl:
            spec.method = Method::SL;
            return solve(spec);
        case RunMethod::spls:
        case RunMethod::reduced_spls:
            spec.method = Method::SPLS;
            return solve(spec);
        case RunMethod::upg_quadratic:
            spec.method = Method::UPG;
            spec.bubble = make_quadratic(mesh.h);
            return solve(spec);
        case RunMethod::upg_scaled:
            spec.method = Method::UPG;
            spec.bubble = make_scaled_quadratic(eps, mesh.h);
            return solve(spec);
        case RunMethod::upg_exponential:
            spec.method = Method::UPG;
            spec.bubble = make_exponential(eps, mesh.h);
            return solve(spec);
        case RunMethod::upg_forward:
            spec.method = Method::UPG;
            spec.bubble = make_quadratic_with_average(0.5 - eps / mesh.h, mesh.h);
            return solve(spec);
        default:
            throw config_error("internal: solve_1d_once called with a non-solve method");
    }
}

/// Mean-free part f - mean(f) with a consistent antiderivative.
ScalarFn mean_free_part(const ScalarFn& f, double fbar) {
    ScalarFn out = make_fn([f, fbar](double x) { return f(x) - fbar; });
    if (f.antiderivative) {
        auto anti = f.antiderivative;
        out.antiderivative = [anti, fbar](double x) { return anti(x) - fbar * x; };
    }
    return out;
}

struct Solution1D {
    NodalField1D u;
    bool split = false;
    NodalField1D u_mean_free, u_mean;  ///< split components when split
};

Solution1D solve_1d(RunMethod method, double eps, const FnDesc& desc, const Mesh1D& mesh) {
    Solution1D out;
    const ScalarFn f = make_scalar_fn(desc);
    if (desc.kind == FnDesc::Kind::split) {
        const double fbar = f.antiderivative(1.0);
        out.split = true;
        out.u_mean_free = solve_1d_once(method, eps, mean_free_part(f, fbar), mesh);
        out.u_mean = solve_1d_once(method, eps, make_const_fn(fbar), mesh);
        out.u = NodalField1D{mesh, out.u_mean_free.values + out.u_mean.values};
    } else {
        out.u = solve_1d_once(method, eps, f, mesh);
    }
    return out;
}

struct RefColumn {
    std::string name;
    std::vector<double> values;  ///< node values 0..n
};

std::vector<RefColumn> build_references(const ExperimentConfig& c, const FnDesc& desc, double eps,
                                        const Mesh1D& mesh, const NodalField1D& u) {
    std::vector<RefColumn> cols;
    const int n = mesh.n;
    const ScalarFn f = make_scalar_fn(desc);
    auto nodes = [&](const std::function<double(double)>& g) {
        std::vector<double> v(n + 1);
        for (int j = 0; j <= n; ++j) v[j] = g(mesh.node(j));
        return v;
    };
    for (const std::string& r : c.references) {
        if (r == "exact") {
            const ExactSolution e = exact_for(desc, eps);
            cols.push_back({"u_exact", nodes(e.u.f)});
        } else if (r == "w") {
            cols.push_back({"w", nodes([&](double x) { return transport(TransportKind::LR, f, x); })});
        } else if (r == "theta") {
            cols.push_back(
                {"theta", nodes([&](double x) { return transport(TransportKind::RL, f, x); })});
        } else if (r == "shifted") {
            cols.push_back(
                {"U", nodes([&](double x) { return transport(TransportKind::Shifted, f, x); })});
        } else if (r == "reduced") {
            const ReducedSLReport rep = solve_reduced_sl(mesh, f);
            if (rep.singular)
                throw config_error("reference 'reduced' needs an odd n (the reduced system is "
                                   "singular for n = " + std::to_string(n) + ")");
            std::vector<double> v(n + 1);
            for (int j = 0; j <= n; ++j) v[j] = rep.u.at_node(j);
            cols.push_back({"U_h", std::move(v)});
        } else if (r == "u_plus_teeth") {
            if (n % 2 != 0)
                throw config_error("reference 'u_plus_teeth' needs an even n");
            const ExactSolution e = exact_for(desc, eps);
            const NodalField1D ipu = interpolate(mesh, e.u);
            const NodalField1D omega = make_teeth_saw(mesh);
            const double fbar = f.antiderivative ? f.antiderivative(1.0)
                                                 : adaptive_quad(f.f, 0.0, 1.0);
            const double coef = mesh.h * mesh.h / (2.0 * eps) * fbar;
            std::vector<double> v(n + 1);
            for (int j = 0; j <= n; ++j) v[j] = ipu.at_node(j) + coef * omega.at_node(j);
            cols.push_back({"u_plus_teeth", std::move(v)});
        } else if (r == "centered") {
            const double ubar = field_integral(u);
            std::vector<double> v(n + 1);
            for (int j = 0; j <= n; ++j) v[j] = u.at_node(j) - ubar;
            cols.push_back({"u_centered", std::move(v)});
        } else if (r == "proj") {
            const ProjectedFn p = l2_project(shifted_transport_fn(f), ProjectionTarget::tied_ends, mesh);
            std::vector<double> v(n + 1);
            for (int j = 0; j <= n; ++j) v[j] = p.nodal[j];
            cols.push_back({"proj", std::move(v)});
        } else {
            throw config_error("unknown reference '" + r + "'");
        }
    }
    return cols;
}

struct TableRow {
    int n = 0;
    double h = 0, err_inf = 0, err_l2 = 0, err_h1 = 0, bound = 0;
    bool has_bound = false;
};

void append_index(std::vector<IndexRow>& index, RunMethod method, const std::string& eps,
                  const std::string& n, const std::string& file, bool singular, double defect) {
    index.push_back(IndexRow{method_name(method), eps, n, file,
                             singular ? "true" : "false",
                             singular ? g17(defect) : std::string()});
}

void emit_1d_outputs(const ExperimentConfig& c, const FnDesc& desc, double eps, const Mesh1D& mesh,
                     const Solution1D& sol, const std::string& prefix,
                     const std::filesystem::path& dir, std::vector<IndexRow>& index,
                     std::vector<TableRow>& table) {
    const int n = mesh.n;
    if (wants(c, "solution")) {
        const std::vector<RefColumn> refs = build_references(c, desc, eps, mesh, sol.u);
        const std::string file = prefix + "_solution.csv";
        CsvWriter csv(dir / file);
        std::vector<std::string> header = {"x", "u_h"};
        if (sol.split) {
            header.push_back("u_mean_free");
            header.push_back("u_mean");
        }
        for (const RefColumn& r : refs) header.push_back(r.name);
        csv.row(header);
        for (int j = 0; j <= n; ++j) {
            std::vector<std::string> cells = {g17(mesh.node(j)), g17(sol.u.at_node(j))};
            if (sol.split) {
                cells.push_back(g17(sol.u_mean_free.at_node(j)));
                cells.push_back(g17(sol.u_mean.at_node(j)));
            }
            for (const RefColumn& r : refs) cells.push_back(g17(r.values[j]));
            csv.row(cells);
        }
        append_index(index, c.method, g17(eps), std::to_string(n), file, false, 0);
    }

    const bool needs_errors = wants(c, "errors") || wants(c, "table");
    if (needs_errors) {
        const ExactSolution e = exact_for(desc, eps);
        const double err_inf = discrete_inf_error(sol.u, e.u);
        const Window w = resolve_window(c, mesh);
        const auto [err_l2, err_h1] = windowed_errors(sol.u, e.u, e.du, w, eps);
        if (wants(c, "errors")) {
            const std::string file = prefix + "_errors.csv";
            CsvWriter csv(dir / file);
            csv.row({"n", "h", "err_inf", "err_l2_window", "err_h1_window"});
            csv.row({std::to_string(n), g17(mesh.h), g17(err_inf), g17(err_l2), g17(err_h1)});
            append_index(index, c.method, g17(eps), std::to_string(n), file, false, 0);
        }
        if (wants(c, "table")) {
            TableRow row;
            row.n = n;
            row.h = mesh.h;
            row.err_inf = err_inf;
            row.err_l2 = err_l2;
            row.err_h1 = err_h1;
            const ScalarFn f = make_scalar_fn(desc);
            if (f.sup_f && f.sup_df) {
                row.has_bound = true;
                row.bound = 2.0 * eps * *f.sup_f + mesh.h * mesh.h / 4.0 * *f.sup_df;
            }
            table.push_back(row);
        }
    }

    if (wants(c, "oscillation")) {
        const OscReport rep = oscillation_report(sol.u);
        const std::string file = prefix + "_oscillation.csv";
        CsvWriter csv(dir / file);
        csv.row({"n", "h", "sign_changes", "teeth_amplitude", "max_jump"});
        csv.row({std::to_string(n), g17(mesh.h), std::to_string(rep.sign_changes),
                 g17(rep.teeth_amplitude), g17(rep.max_jump)});
        append_index(index, c.method, g17(eps), std::to_string(n), file, false, 0);
    }
}

void run_1d(const ExperimentConfig& c, std::vector<IndexRow>& index) {
    const FnDesc desc = parse_fn_desc(c.f);
    const std::filesystem::path dir = c.out_dir;
    std::vector<std::vector<std::string>> greens_rows;

    for (const double eps : c.eps_list) {
        std::vector<TableRow> table;
        for (const int n : c.n_list) {
            const Mesh1D mesh = make_mesh(n);
            const std::string prefix = "eps" + g9(eps) + "_n" + std::to_string(n);

            if (wants(c, "greens")) {
                const BubbleSpec bubble = make_exponential(eps, mesh.h);
                const double s = eps / mesh.h + bubble.b;
                const Eigen::MatrixXd mfe =
                    make_tridiag(n - 1, -s - 0.5, 2.0 * s, -s + 0.5).to_dense();
                const Eigen::MatrixXd g = inverse_via_greens(eps, mesh);
                const double err =
                    (mfe * g - Eigen::MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff();
                greens_rows.push_back({g17(eps), std::to_string(n), g17(err)});
            }

            if (c.method == RunMethod::project_shifted) {
                const ScalarFn f = make_scalar_fn(desc);
                const ProjectedFn p =
                    l2_project(shifted_transport_fn(f), ProjectionTarget::tied_ends, mesh);
                if (wants(c, "solution")) {
                    const std::string file = prefix + "_solution.csv";
                    CsvWriter csv(dir / file);
                    csv.row({"x", "u_h"});
                    for (int j = 0; j <= n; ++j)
                        csv.row({g17(mesh.node(j)), g17(p.nodal[j])});
                    append_index(index, c.method, g17(eps), std::to_string(n), file, false, 0);
                }
                continue;
            }

            if (c.method == RunMethod::reduced_sl) {
                // split data decomposes linearly; the defect adds up
                ReducedSLReport rep;
                if (desc.kind == FnDesc::Kind::split) {
                    const ScalarFn f = make_scalar_fn(desc);
                    const double fbar = f.antiderivative(1.0);
                    const ReducedSLReport r0 = solve_reduced_sl(mesh, mean_free_part(f, fbar));
                    const ReducedSLReport rc = solve_reduced_sl(mesh, make_const_fn(fbar));
                    rep.singular = r0.singular;
                    if (!rep.singular)
                        rep.u = NodalField1D{mesh, r0.u.values + rc.u.values};
                    else {
                        rep.kernel = r0.kernel;
                        rep.defect = r0.defect + rc.defect;
                    }
                } else {
                    rep = solve_reduced_sl(mesh, make_scalar_fn(desc));
                }
                if (rep.singular) {
                    append_index(index, c.method, g17(eps), std::to_string(n), "", true,
                                 rep.defect);
                    continue;
                }
                emit_1d_outputs(c, desc, eps, mesh, Solution1D{rep.u, false, {}, {}}, prefix, dir,
                                index, table);
                continue;
            }

            const Solution1D sol = solve_1d(c.method, eps, desc, mesh);
            emit_1d_outputs(c, desc, eps, mesh, sol, prefix, dir, index, table);
        }

        if (wants(c, "table")) {
            const std::string file = "table_eps" + g9(eps) + ".csv";
            CsvWriter csv(dir / file);
            const bool has_bound = !table.empty() && table.front().has_bound;
            std::vector<std::string> header = {"n",        "h",       "err_inf",
                                               "err_l2_window", "err_h1_window", "rate_inf",
                                               "rate_l2",  "rate_h1"};
            if (has_bound) header.push_back("bound");
            csv.row(header);
            for (std::size_t i = 0; i < table.size(); ++i) {
                const TableRow& r = table[i];
                std::vector<std::string> cells = {std::to_string(r.n), g17(r.h), g17(r.err_inf),
                                                  g17(r.err_l2), g17(r.err_h1)};
                if (i == 0) {
                    cells.insert(cells.end(), {"", "", ""});
                } else {
                    const TableRow& p = table[i - 1];
                    cells.push_back(g17(std::log2(p.err_inf / r.err_inf)));
                    cells.push_back(g17(std::log2(p.err_l2 / r.err_l2)));
                    cells.push_back(g17(std::log2(p.err_h1 / r.err_h1)));
                }
                if (has_bound) cells.push_back(g17(r.bound));
                csv.row(cells);
            }
            append_index(index, c.method, g17(eps), "", file, false, 0);
        }
    }

    if (wants(c, "greens")) {
        CsvWriter csv(dir / "greens.csv");
        csv.row({"eps", "n", "identity_error"});
        for (const auto& row : greens_rows) csv.row(row);
        append_index(index, c.method, "", "", "greens.csv", false, 0);
    }
}

void run_2d(const ExperimentConfig& c, std::vector<IndexRow>& index) {
    const FnDesc2D desc = parse_fn_desc_2d(c.f);
    const std::filesystem::path dir = c.out_dir;
    for (const double eps : c.eps_list) {
        for (const int n : c.n_list) {
            const ScalarFn2D f = make_scalar_fn_2d(desc);
            const NodalField2D u = c.method == RunMethod::upg2d
                                       ? solve_2d_fast(assemble_2d(eps, n, f))
                                       : solve_reduced_2d(n, f);
            std::vector<int> sections = c.sections.empty() ? std::vector<int>{n / 2} : c.sections;
            for (int i : sections)
                if (i < 1 || i > n - 1)
                    throw config_error("section index " + std::to_string(i) +
                                       " outside 1..n-1 for n = " + std::to_string(n));
            const std::string prefix = "eps" + g9(eps) + "_n" + std::to_string(n);
            const double h = 1.0 / n;
            std::vector<std::vector<std::string>> osc_rows;
            for (const int i : sections) {
                const NodalField1D s = section(u, i);
                const OscReport rep = oscillation_report(s);
                if (wants(c, "solution")) {
                    const std::string file = prefix + "_section_" + std::to_string(i) + ".csv";
                    CsvWriter csv(dir / file);
                    csv.row({"y", "u_section", "teeth_amplitude"});
                    for (int j = 0; j <= n; ++j)
                        csv.row({g17(j * h), g17(s.at_node(j)), g17(rep.teeth_amplitude)});
                    append_index(index, c.method, g17(eps), std::to_string(n), file, false, 0);
                }
                osc_rows.push_back({std::to_string(i), std::to_string(rep.sign_changes),
                                    g17(rep.teeth_amplitude), g17(rep.max_jump)});
            }
            if (wants(c, "oscillation")) {
                const std::string file = prefix + "_oscillation.csv";
                CsvWriter csv(dir / file);
                csv.row({"i", "sign_changes", "teeth_amplitude", "max_jump"});
                for (const auto& row : osc_rows) csv.row(row);
                append_index(index, c.method, g17(eps), std::to_string(n), file, false, 0);
            }
        }
    }
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    if (c.out_dir.empty())
        c.out_dir = c.preset.empty() ? std::string("runs/custom") : "runs/" + c.preset;
    validate_config(c);
    std::filesystem::create_directories(c.out_dir);
    std::vector<IndexRow> index;
    try {
        if (is_2d_method(c.method))
            run_2d(c, index);
        else
            run_1d(c, index);
    } catch (const singular_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    CsvWriter csv(std::filesystem::path(c.out_dir) / "index.csv");
    csv.row({"method", "eps", "n", "file", "singular", "defect"});
    for (const IndexRow& r : index) csv.row({r.method, r.eps, r.n, r.file, r.singular, r.defect});
    return 0;
}

int cli_main(const std::vector<std::string>& args) {
    try {
        CLI::App app{"finite-element laboratory for convection-dominated diffusion"};
        app.name("cdlab");
        std::string config_path, preset, out_dir;
        double eps_override = 0.0;
        int n_override = 0;

        CLI::App* run_cmd = app.add_subcommand("run", "run an experiment from a config or preset");
        CLI::Option* opt_config =
            run_cmd->add_option("--config", config_path, "path to a JSON config file");
        CLI::Option* opt_preset = run_cmd->add_option("--preset", preset, "preset name");
        CLI::Option* opt_eps =
            run_cmd->add_option("--eps", eps_override, "override eps with a single value");
        CLI::Option* opt_n = run_cmd->add_option("--n", n_override, "override n with a single value");
        CLI::Option* opt_out = run_cmd->add_option("--out", out_dir, "output directory");
        CLI::App* presets_cmd = app.add_subcommand("presets", "list available presets");

        if (args.empty()) {
            std::cout << app.help();
            return 0;
        }
        std::vector<const char*> argv;
        argv.push_back("cdlab");
        for (const auto& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            std::cout << app.help();
            return 0;
        } catch (const CLI::ParseError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }

        if (presets_cmd->parsed()) {
            std::cout << list_presets();
            return 0;
        }
        if (run_cmd->parsed()) {
            if (opt_config->count() && opt_preset->count())
                throw config_error("give either --config or --preset, not both");
            ExperimentConfig c;
            if (opt_config->count()) {
                std::ifstream in(config_path, std::ios::binary);
                if (!in) throw config_error("cannot read config file '" + config_path + "'");
                std::stringstream ss;
                ss << in.rdbuf();
                c = parse_config_json(ss.str());
            } else if (opt_preset->count()) {
                c = load_preset(preset);
            } else {
                throw config_error("run needs --config or --preset");
            }
            if (opt_eps->count()) c.eps_list = {eps_override};
            if (opt_n->count()) c.n_list = {n_override};
            if (opt_out->count()) c.out_dir = out_dir;
            return run_experiment(c);
        }
        std::cout << app.help();
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const singular_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace cdlab

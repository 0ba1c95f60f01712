#pragma once

#include "cdlab/discretize.hpp"
#include "cdlab/norms.hpp"
#include "cdlab/oracles.hpp"
#include "cdlab/upg2d.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdlab {

/// Invalid configuration or descriptor (maps to process exit code 2).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed 1D function descriptor:
///   const:<c> | sin:<k>pi | cos:<k>pi | poly:c0,c1,... | split:<desc>
struct FnDesc {
    enum class Kind { constant, trig_sin, trig_cos, poly, split };
    Kind kind = Kind::constant;
    double c = 0.0;                 ///< constant value
    double k = 0.0;                 ///< trig frequency (the pi factor applied)
    std::vector<double> coeffs;     ///< poly coefficients c0, c1, ...
    std::shared_ptr<FnDesc> inner;  ///< split payload
    std::string text;               ///< original descriptor
};

/// Parsed 2D descriptor: const:<c> | xy:<descx>*<descy>
struct FnDesc2D {
    bool separable = false;  ///< true for xy:, false for const:
    double c = 0.0;
    FnDesc fx, fy;
    std::string text;
};

FnDesc parse_fn_desc(const std::string& text);
FnDesc2D parse_fn_desc_2d(const std::string& text);

/// Callable with analytic extras (antiderivative, sup-norms, const tag).
ScalarFn make_scalar_fn(const FnDesc& desc);
ScalarFn2D make_scalar_fn_2d(const FnDesc2D& desc);

/// Exact solution of -eps u'' + u' = f for the descriptor (eps > 0).
ExactSolution exact_for(const FnDesc& desc, double eps);

/// Method selector as spelled in configs.
enum class RunMethod {
    sl,
    spls,
    upg_quadratic,
    upg_scaled,
    upg_exponential,
    upg_forward,  ///< quadratic bubble scaled to b = 1/2 - eps/h
    reduced_sl,
    reduced_spls,
    upg2d,
    reduced_2d,
    project_shifted  ///< no solve: L2-project the shifted transport solution
};

/// A fully resolved experiment (preset fields merged with any overrides).
struct ExperimentConfig {
    std::string preset;  ///< originating preset name, if any
    RunMethod method = RunMethod::sl;
    std::vector<double> eps_list;
    std::vector<int> n_list;
    std::string f = "const:1";
    bool has_window = false;
    Window window;               ///< explicit [a,b], when has_window
    double abl_multiple = -1.0;  ///< window = [0, 1 - k*h] when >= 0
    std::vector<std::string> outputs;     ///< solution|errors|oscillation|table|greens
    std::vector<std::string> references;  ///< extra solution-file columns
    std::vector<int> sections;            ///< 2D section indices (default n/2)
    std::string out_dir = "runs/custom";
};

/// Parse and validate a JSON config document.
ExperimentConfig parse_config_json(const std::string& json_text);

/// Resolve a shipped preset by name (throws config_error for unknown names).
ExperimentConfig load_preset(const std::string& name);

/// (name, one-line description) pairs in canonical order.
std::vector<std::pair<std::string, std::string>> preset_catalog();

/// The embedded JSON text of a preset, byte-identical to the shipped file.
const std::string& preset_json(const std::string& name);

/// Human-readable preset listing.
std::string list_presets();

/// Run a resolved experiment, writing CSV artifacts under out_dir.
/// Returns a process exit code: 0 ok, 3 unexpected numerical failure.
/// Throws config_error for problems only detectable at run time.
int run_experiment(const ExperimentConfig& config);

/// Full CLI entry point with argv semantics (argv[0] excluded); never throws.
int cli_main(const std::vector<std::string>& args);

}  // namespace cdlab

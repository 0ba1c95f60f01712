#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cdlab/experiment.hpp"
#include "cdlab/oracles.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cdlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// run cli_main with both streams captured
int quiet_cli(const std::vector<std::string>& args) {
    std::stringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int rc = cli_main(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return rc;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("cdlab_test_" + tag);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("function descriptors parse and reject as documented") {
    const FnDesc c = parse_fn_desc("const:2.5");
    CHECK(c.kind == FnDesc::Kind::constant);
    CHECK(c.c == 2.5);

    const double pi = std::acos(-1.0);
    CHECK(parse_fn_desc("sin:pi").k == doctest::Approx(pi).epsilon(1e-15));
    CHECK(parse_fn_desc("sin:2pi").k == doctest::Approx(2.0 * pi).epsilon(1e-15));
    CHECK(parse_fn_desc("cos:0.5pi").k == doctest::Approx(0.5 * pi).epsilon(1e-15));
    CHECK(parse_fn_desc("cos:2pi").kind == FnDesc::Kind::trig_cos);

    const FnDesc p = parse_fn_desc("poly:0,1,-1");
    CHECK(p.kind == FnDesc::Kind::poly);
    REQUIRE(p.coeffs.size() == 3);
    CHECK(p.coeffs[2] == -1.0);

    const FnDesc s = parse_fn_desc("split:sin:pi");
    CHECK(s.kind == FnDesc::Kind::split);
    REQUIRE(s.inner);
    CHECK(s.inner->kind == FnDesc::Kind::trig_sin);

    CHECK_THROWS_AS(parse_fn_desc("sin:2"), config_error);       // missing pi
    CHECK_THROWS_AS(parse_fn_desc("foo:1"), config_error);
    CHECK_THROWS_AS(parse_fn_desc("const:abc"), config_error);
    CHECK_THROWS_AS(parse_fn_desc("const:1x"), config_error);    // trailing junk
    CHECK_THROWS_AS(parse_fn_desc("poly:"), config_error);
    CHECK_THROWS_AS(parse_fn_desc("split:split:const:1"), config_error);
    CHECK_THROWS_AS(parse_fn_desc("noseparator"), config_error);
}

TEST_CASE("2D descriptors") {
    const FnDesc2D c = parse_fn_desc_2d("const:3");
    CHECK(!c.separable);
    CHECK(c.c == 3.0);
    const FnDesc2D xy = parse_fn_desc_2d("xy:sin:pi*const:1");
    CHECK(xy.separable);
    CHECK(xy.fx.kind == FnDesc::Kind::trig_sin);
    CHECK(xy.fy.kind == FnDesc::Kind::constant);
    CHECK_THROWS_AS(parse_fn_desc_2d("xy:const:1"), config_error);   // no factor split
    CHECK_THROWS_AS(parse_fn_desc_2d("banana"), config_error);
    CHECK_THROWS_AS(parse_fn_desc_2d("xy:split:const:1*const:1"), config_error);
}

TEST_CASE("descriptor functions carry quadrature metadata") {
    const double pi = std::acos(-1.0);
    const ScalarFn s = make_scalar_fn(parse_fn_desc("sin:pi"));
    CHECK(s(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(s.antiderivative);
    CHECK(s.antiderivative(1.0) == doctest::Approx(2.0 / pi).epsilon(1e-14));
    CHECK(*s.sup_f == doctest::Approx(1.0));
    CHECK(*s.sup_df == doctest::Approx(pi));

    const ScalarFn p = make_scalar_fn(parse_fn_desc("poly:0,1,-1"));  // x - x^2
    CHECK(p(0.25) == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(p.antiderivative(1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(*p.sup_f == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(*p.sup_df == doctest::Approx(1.0).epsilon(1e-12));

    const ScalarFn2D f2 = make_scalar_fn_2d(parse_fn_desc_2d("xy:const:2*const:0.5"));
    REQUIRE(f2.constant.has_value());
    CHECK(*f2.constant == 1.0);
    // non-constant descriptor kinds go through quadrature even when the
    // values happen to be constant
    CHECK(!make_scalar_fn_2d(parse_fn_desc_2d("xy:poly:1*poly:1")).constant.has_value());
}

TEST_CASE("exact solutions dispatch by descriptor") {
    const ExactSolution e = exact_for(parse_fn_desc("const:1"), 0.1);
    CHECK(e.u(0.5) == doctest::Approx(exact_const_f(0.1, 0.5)).epsilon(1e-14));
    const ExactSolution s = exact_for(parse_fn_desc("split:const:1"), 0.1);
    CHECK(s.u(0.5) == doctest::Approx(e.u(0.5)).epsilon(1e-14));
    CHECK_THROWS_AS(exact_for(parse_fn_desc("const:1"), 0.0), config_error);
}

TEST_CASE("config validation accepts valid and rejects invalid documents") {
    const ExperimentConfig c =
        parse_config_json(R"({"method":"sl","eps":1e-3,"n":16})");
    CHECK(c.method == RunMethod::sl);
    REQUIRE(c.outputs.size() == 1);
    CHECK(c.outputs[0] == "solution");
    CHECK(c.f == "const:1");

    CHECK_THROWS_AS(parse_config_json("{not json"), config_error);
    CHECK_THROWS_AS(parse_config_json(R"([1,2])"), config_error);
    CHECK_THROWS_AS(parse_config_json(R"({"method":"sl","eps":1,"n":4,"bogus":1})"),
                    config_error);
    CHECK_THROWS_AS(parse_config_json(R"({"eps":1,"n":4})"), config_error);  // no method
    CHECK_THROWS_AS(parse_config_json(R"({"method":"sl","n":4})"), config_error);  // no eps
    CHECK_THROWS_AS(parse_config_json(R"({"method":"sl","eps":1e-3,"n":1})"), config_error);
    CHECK_THROWS_AS(parse_config_json(R"({"method":"sl","eps":0,"n":8})"), config_error);

    // reduced methods: eps defaults to zero, explicit nonzero rejected
    const ExperimentConfig r = parse_config_json(R"({"method":"reduced-sl","n":9})");
    REQUIRE(r.eps_list.size() == 1);
    CHECK(r.eps_list[0] == 0.0);
    CHECK_THROWS_AS(parse_config_json(R"({"method":"reduced-sl","eps":0.5,"n":9})"),
                    config_error);

    // table output needs a doubling n run
    CHECK(parse_config_json(
              R"({"method":"upg-scaled","eps":1e-3,"n":[16,32,64],"f":"sin:pi","outputs":["table"]})")
              .n_list.size() == 3);
    CHECK_THROWS_AS(
        parse_config_json(
            R"({"method":"upg-scaled","eps":1e-3,"n":[16,48],"f":"sin:pi","outputs":["table"]})"),
        config_error);
    CHECK_THROWS_AS(
        parse_config_json(
            R"({"method":"upg-scaled","eps":1e-3,"n":16,"f":"sin:pi","outputs":["table"]})"),
        config_error);

    // greens output is tied to the exponential-bubble method
    CHECK_THROWS_AS(
        parse_config_json(R"({"method":"sl","eps":1e-3,"n":20,"outputs":["greens"]})"),
        config_error);

    // 2D restrictions
    CHECK_THROWS_AS(
        parse_config_json(R"({"method":"upg2d","eps":1e-3,"n":8,"outputs":["errors"]})"),
        config_error);
    CHECK_THROWS_AS(
        parse_config_json(R"({"method":"upg2d","eps":1e-3,"n":8,"references":["exact"]})"),
        config_error);
    CHECK_THROWS_AS(
        parse_config_json(R"({"method":"sl","eps":1e-3,"n":8,"sections":[4]})"),
        config_error);

    // windows
    CHECK(parse_config_json(R"({"method":"sl","eps":1e-3,"n":8,"window":[0.2,0.8]})").has_window);
    CHECK(parse_config_json(R"({"method":"sl","eps":1e-3,"n":8,"window":"abl:2"})").abl_multiple ==
          2.0);
    CHECK_THROWS_AS(parse_config_json(R"({"method":"sl","eps":1e-3,"n":8,"window":[0.8,0.2]})"),
                    config_error);
    CHECK_THROWS_AS(parse_config_json(R"({"method":"sl","eps":1e-3,"n":8,"window":"abl:-1"})"),
                    config_error);

    // the forward-substitution method needs eps/h < 1/2
    CHECK_THROWS_AS(parse_config_json(R"({"method":"upg-forward","eps":0.1,"n":32})"),
                    config_error);
    CHECK(parse_config_json(R"({"method":"upg-forward","eps":1e-4,"n":32})").n_list[0] == 32);
}

TEST_CASE("preset catalog is complete and ordered") {
    const auto cat = preset_catalog();
    REQUIRE(cat.size() == 12);
    const char* expected[] = {"fig1",          "fig2",           "fig3-left",     "fig3-middle",
                              "fig3-right",    "exp-exactness",  "qbubble-bound", "forward-solve",
                              "greens-inverse", "spikes2d",      "no-spikes2d",   "conv-upg"};
    for (std::size_t i = 0; i < cat.size(); ++i) {
        CHECK(cat[i].first == expected[i]);
        CHECK(!cat[i].second.empty());  // every preset carries a description
    }
    const std::string listing = list_presets();
    for (const auto& [name, desc] : cat) CHECK(listing.find(name) != std::string::npos);
}

TEST_CASE("presets load with their canonical output directories") {
    const ExperimentConfig c = load_preset("fig1");
    CHECK(c.preset == "fig1");
    CHECK(c.out_dir == "runs/fig1");
    CHECK(c.method == RunMethod::sl);
    CHECK_THROWS_AS(load_preset("nope"), config_error);
    try {
        load_preset("nope");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("fig1") != std::string::npos);
    }
    // every preset parses and validates
    for (const auto& [name, desc] : preset_catalog()) CHECK(load_preset(name).preset == name);
}

TEST_CASE("embedded presets are byte-identical to the files on disk") {
    const fs::path dir = CDLAB_PRESET_DIR;
    for (const auto& [name, desc] : preset_catalog()) {
        const std::string file_text = slurp(dir / (name + ".json"));
        CHECK(preset_json(name) == file_text);
    }
}

TEST_CASE("experiment runs are byte-deterministic") {
    ExperimentConfig c = parse_config_json(
        R"({"method":"upg-exponential","eps":0.1,"n":10,"outputs":["solution","errors"],"references":["exact"]})");
    const fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
    c.out_dir = d1.string();
    REQUIRE(run_experiment(c) == 0);
    c.out_dir = d2.string();
    REQUIRE(run_experiment(c) == 0);
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
        const fs::path other = d2 / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
        ++compared;
    }
    CHECK(compared == 3);  // solution, errors, index
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("experiment artifacts have the documented schemas") {
    ExperimentConfig c = parse_config_json(
        R"({"method":"sl","eps":1e-2,"n":8,"outputs":["solution","oscillation"]})");
    const fs::path dir = fresh_dir("schema");
    c.out_dir = dir.string();
    REQUIRE(run_experiment(c) == 0);
    const std::string sol = slurp(dir / "eps0.01_n8_solution.csv");
    CHECK(sol.rfind("x,u_h\n", 0) == 0);
    // one row per node incl. both boundaries plus the header
    CHECK(std::count(sol.begin(), sol.end(), '\n') == 10);
    const std::string osc = slurp(dir / "eps0.01_n8_oscillation.csv");
    CHECK(osc.rfind("n,h,sign_changes,teeth_amplitude,max_jump\n", 0) == 0);
    const std::string idx = slurp(dir / "index.csv");
    CHECK(idx.rfind("method,eps,n,file,singular,defect\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("singular reduced runs are reported in the index, not as failures") {
    ExperimentConfig c = parse_config_json(R"({"method":"reduced-sl","n":10})");
    const fs::path dir = fresh_dir("singular");
    c.out_dir = dir.string();
    REQUIRE(run_experiment(c) == 0);
    const std::string idx = slurp(dir / "index.csv");
    CHECK(idx.find("true") != std::string::npos);     // singular flag
    CHECK(idx.find("0.5") != std::string::npos);       // defect = 5h = 0.5 for f=1
    fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
    CHECK(quiet_cli({}) == 0);                         // help
    CHECK(quiet_cli({"--help"}) == 0);
    CHECK(quiet_cli({"presets"}) == 0);
    CHECK(quiet_cli({"run"}) == 2);                    // neither config nor preset
    CHECK(quiet_cli({"run", "--preset", "nope"}) == 2);
    CHECK(quiet_cli({"run", "--config", "/nonexistent/config.json"}) == 2);
    CHECK(quiet_cli({"frobnicate"}) == 2);
    // reduced presets reject an eps override
    CHECK(quiet_cli({"run", "--preset", "fig3-middle", "--eps", "0.5"}) == 2);

    const fs::path dir = fresh_dir("cli_run");
    CHECK(quiet_cli({"run", "--preset", "exp-exactness", "--eps", "0.1", "--n", "10", "--out",
                     dir.string()}) == 0);
    CHECK(fs::exists(dir / "index.csv"));
    CHECK(fs::exists(dir / "eps0.1_n10_solution.csv"));
    fs::remove_all(dir);

    // config file path
    const fs::path cfg = fs::temp_directory_path() / "cdlab_test_cfg.json";
    const fs::path out = fresh_dir("cfg_run");
    {
        std::ofstream f(cfg);
        f << R"({"method":"upg-quadratic","eps":0.05,"n":8,"out":")" << out.string() << R"("})";
    }
    CHECK(quiet_cli({"run", "--config", cfg.string()}) == 0);
    CHECK(fs::exists(out / "index.csv"));
    fs::remove_all(out);
    fs::remove(cfg);

    // malformed config file
    const fs::path bad = fs::temp_directory_path() / "cdlab_test_bad.json";
    {
        std::ofstream f(bad);
        f << "{broken";
    }
    CHECK(quiet_cli({"run", "--config", bad.string()}) == 2);
    fs::remove(bad);
}

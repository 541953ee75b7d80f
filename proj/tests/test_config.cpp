#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "bandit_bonus/config.hpp"

using namespace bb;

namespace {

const char* kContinuousIni =
    "# benchmark model\n"
    "[model]\n"
    "kind = continuous\n"
    "discount_rate = 0.5\n"
    "arrival_rate = 0.8\n"
    "lump_value = 7\n"
    "safe_flow = 2.8\n"
    "assume_cbar_large = true\n"
    "[cost]\n"
    "kind = uniform\n"
    "cbar = 1.0\n";

struct TempFile {
    std::string path;
    TempFile(const std::string& name, const std::string& content)
        : path("/tmp/" + name) {
        std::ofstream(path, std::ios::binary) << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("sectioned key=value text parses with comments and spacing", "[config]") {
    const RunConfig cfg = parse_ini(
        "; leading comment\n"
        "[model]\n"
        "  kind =   continuous  \n"
        "# another comment\n"
        "\n"
        "[ sim ]\n"
        "n_paths=250\n"
        "label = two words here\n");
    CHECK(cfg.has("model", "kind"));
    CHECK(cfg.require("model", "kind") == "continuous");
    CHECK(cfg.require("sim", "n_paths") == "250");
    CHECK(cfg.require("sim", "label") == "two words here");
    CHECK_FALSE(cfg.has("sim", "missing"));
}

TEST_CASE("malformed text is rejected with the offending line", "[config]") {
    const auto message_of = [](const std::string& text) {
        try {
            parse_ini(text);
        } catch (const ConfigError& err) {
            return std::string(err.what());
        }
        return std::string("<no error>");
    };
    CHECK(message_of("[model\nkind = x\n").find("line 1") != std::string::npos);
    CHECK(message_of("key = 1\n").find("before any [section]") != std::string::npos);
    CHECK(message_of("[a]\njust words\n").find("line 2") != std::string::npos);
    CHECK(message_of("[a]\n= 3\n").find("empty key") != std::string::npos);
    CHECK(message_of("[]\n").find("empty section") != std::string::npos);
}

TEST_CASE("missing sections and keys are named in errors", "[config]") {
    RunConfig cfg = parse_ini("[model]\nkind = continuous\n");
    try {
        cfg.require("sim", "dt");
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("[sim]") != std::string::npos);
    }
    try {
        cfg.require("model", "discount_rate");
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("discount_rate") != std::string::npos);
        CHECK(std::string(err.what()).find("[model]") != std::string::npos);
    }
    // resolve() writes the fallback into the map so defaults become explicit.
    CHECK(cfg.resolve("model", "horizon", "inf") == "inf");
    CHECK(cfg.require("model", "horizon") == "inf");
}

TEST_CASE("JSON configs parse directly and from summary documents", "[config]") {
    const RunConfig direct = parse_json_config(
        R"({"model": {"kind": "continuous", "discount_rate": 0.5, "flagged": true}})");
    CHECK(direct.require("model", "kind") == "continuous");
    CHECK(direct.require("model", "discount_rate") == "0.5");
    CHECK(direct.require("model", "flagged") == "true");

    // A previous run's summary feeds back through its embedded config block.
    const RunConfig nested = parse_json_config(
        R"({"command": "solve-continuous", "mean": 1.25,)"
        R"( "config": {"model": {"kind": "discrete"}, "sim": {"n_paths": 50}}})");
    CHECK(nested.require("model", "kind") == "discrete");
    CHECK(nested.require("sim", "n_paths") == "50");

    CHECK_THROWS_AS(parse_json_config("{invalid"), ConfigError);
    CHECK_THROWS_AS(parse_json_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_json_config(R"({"model": 3})"), ConfigError);
}

TEST_CASE("file loading sniffs the format from the first byte", "[config]") {
    const TempFile ini("bb_cfg_test.ini", kContinuousIni);
    const TempFile json("bb_cfg_test.json",
                        "\n  {\"model\": {\"kind\": \"continuous\"}}\n");
    CHECK(load_config(ini.path).require("model", "discount_rate") == "0.5");
    CHECK(load_config(json.path).require("model", "kind") == "continuous");
    CHECK_THROWS_AS(load_config("/tmp/bb_no_such_file.ini"), ConfigError);
}

TEST_CASE("continuous model builder applies and records defaults", "[config]") {
    RunConfig cfg = parse_ini(kContinuousIni);
    const ContinuousModel m = build_continuous_model(cfg);
    CHECK(m.discount_rate == 0.5);
    CHECK(m.arrival_rate == 0.8);
    CHECK(m.lump_value == 7.0);
    CHECK(m.safe_flow == 2.8);
    CHECK(m.assume_cbar_large);
    CHECK(m.costs.cbar() == 1.0);

    // Omitted keys resolve to defaults *and* appear in the resolved map.
    RunConfig sparse = parse_ini(
        "[model]\nkind = continuous\ndiscount_rate = 0.5\narrival_rate = 0.8\n"
        "lump_value = 7\nsafe_flow = 2.8\n");
    const ContinuousModel m2 = build_continuous_model(sparse);
    CHECK_FALSE(m2.assume_cbar_large);
    CHECK(sparse.require("model", "assume_cbar_large") == "false");
    CHECK(sparse.require("cost", "kind") == "uniform");
    CHECK(sparse.require("cost", "cbar") == "1");

    // Invariant violations surface from the checked builder.
    RunConfig bad = parse_ini(kContinuousIni);
    bad.sections["model"]["safe_flow"] = "9.9"; // s > g
    CHECK_THROWS_AS(build_continuous_model(bad), InvariantError);
    RunConfig wrong_kind = parse_ini(kContinuousIni);
    wrong_kind.sections["model"]["kind"] = "discrete";
    CHECK_THROWS_AS(build_continuous_model(wrong_kind), ConfigError);
    RunConfig not_number = parse_ini(kContinuousIni);
    not_number.sections["model"]["lump_value"] = "seven";
    CHECK_THROWS_AS(build_continuous_model(not_number), ConfigError);
}

TEST_CASE("discrete spec builder covers all valuation laws", "[config]") {
    RunConfig uni = parse_ini(
        "[model]\nkind = discrete\nhorizon = 2\ndiscount = 0.95\nr2 = 2\n"
        "r1 = uniform\nr1_x = 4\n");
    const DiscreteSpec spec = build_discrete_spec(uni);
    REQUIRE(spec.model.horizon.has_value());
    CHECK(*spec.model.horizon == 2);
    CHECK(spec.model.er1 == 2.0);
    CHECK(spec.model.emax == 2.5);
    CHECK(spec.kind == R1Kind::Uniform);
    CHECK(spec.emax_at(3.0) == emax_uniform_r1(4.0, 3.0));

    RunConfig inf = parse_ini(
        "[model]\nkind = discrete\ndiscount = 0.95\nr2 = 2\nr1 = uniform\n");
    CHECK_FALSE(build_discrete_spec(inf).model.horizon.has_value());

    RunConfig mix = parse_ini(
        "[model]\nkind = discrete\nhorizon = 3\ndiscount = 0.9\nr2 = 3\n"
        "r1 = rho_mix\nrho = 0.4\n");
    const DiscreteSpec mix_spec = build_discrete_spec(mix);
    CHECK(mix_spec.model.er1 == 2.0);
    CHECK(mix_spec.model.emax == emax_rho_mix(0.4, 3.0));
    CHECK(mix_spec.sampler() != nullptr);

    RunConfig mix_bad_r2 = parse_ini(
        "[model]\nkind = discrete\nhorizon = 3\ndiscount = 0.9\nr2 = 2.5\n"
        "r1 = rho_mix\nrho = 0.4\n");
    CHECK_THROWS_AS(build_discrete_spec(mix_bad_r2), ConfigError);
    RunConfig mix_bad_rho = parse_ini(
        "[model]\nkind = discrete\nhorizon = 3\ndiscount = 0.9\nr2 = 3\n"
        "r1 = rho_mix\nrho = 1\n");
    CHECK_THROWS_AS(build_discrete_spec(mix_bad_rho), ConfigError);

    RunConfig moments = parse_ini(
        "[model]\nkind = discrete\nhorizon = 2\ndiscount = 0.95\nr2 = 2\n"
        "r1 = moments\ner1 = 2\nemax = 2.5\n");
    const DiscreteSpec mom = build_discrete_spec(moments);
    CHECK(mom.model.emax == 2.5);
    CHECK_THROWS_AS(mom.emax_at(2.0), ConfigError);
    CHECK_THROWS_AS(mom.sampler(), ConfigError);

    RunConfig zero_horizon = parse_ini(
        "[model]\nkind = discrete\nhorizon = 0\ndiscount = 0.95\nr2 = 2\nr1 = uniform\n");
    CHECK_THROWS_AS(build_discrete_spec(zero_horizon), ConfigError);
    RunConfig bad_law = parse_ini(
        "[model]\nkind = discrete\nhorizon = 2\ndiscount = 0.95\nr2 = 2\nr1 = what\n");
    CHECK_THROWS_AS(build_discrete_spec(bad_law), ConfigError);
}

TEST_CASE("simulation controls resolve with an environment override", "[config]") {
    unsetenv("BANDIT_BONUS_THREADS");
    RunConfig cfg = parse_ini("[sim]\nn_paths = 500\nalpha0 = 0.35\nthreads = 2\n");
    const SimConfig sim = build_sim_config(cfg);
    CHECK(sim.n_paths == 500);
    CHECK(sim.alpha0 == 0.35);
    CHECK(sim.threads == 2);
    CHECK(sim.dt == 1e-3);            // default applied...
    CHECK(cfg.has("sim", "dt"));      // ...and recorded
    CHECK(cfg.require("sim", "tail_correction") == "true");

    setenv("BANDIT_BONUS_THREADS", "7", 1);
    RunConfig forced = parse_ini("[sim]\nthreads = 2\n");
    const SimConfig forced_sim = build_sim_config(forced);
    CHECK(forced_sim.threads == 7);
    CHECK(forced.require("sim", "threads") == "7");

    setenv("BANDIT_BONUS_THREADS", "zero", 1);
    RunConfig garbled = parse_ini("[sim]\nthreads = 2\n");
    CHECK_THROWS_AS(build_sim_config(garbled), ConfigError);
    setenv("BANDIT_BONUS_THREADS", "0", 1);
    RunConfig nonpos = parse_ini("[sim]\nthreads = 2\n");
    CHECK_THROWS_AS(build_sim_config(nonpos), ConfigError);
    unsetenv("BANDIT_BONUS_THREADS");
}

TEST_CASE("solver options and sweep grids validate their ranges", "[config]") {
    RunConfig cfg = parse_ini("[solver]\ngrid_step = 1e-3\n");
    const SolverOptions opts = build_solver_options(cfg);
    CHECK(opts.grid_step == 1e-3);
    CHECK(opts.display_points == 2001);

    RunConfig coarse = parse_ini("[solver]\ngrid_step = 0.5\n");
    CHECK_THROWS_AS(build_solver_options(coarse), ConfigError);
    RunConfig tiny = parse_ini("[solver]\ndisplay_points = 1\n");
    CHECK_THROWS_AS(build_solver_options(tiny), ConfigError);

    RunConfig sweep = parse_ini("[sweep]\nr2_min = 1\nr2_max = 2\nr2_step = 0.5\n");
    const std::vector<double> grid = build_sweep_grid(sweep);
    REQUIRE(grid.size() == 3);
    CHECK(grid.front() == 1.0);
    CHECK(grid.back() == 2.0);

    RunConfig defaults;
    CHECK(build_sweep_grid(defaults).size() == 41);
    CHECK(build_output_dir(defaults) == "out");

    RunConfig bad_step = parse_ini("[sweep]\nr2_step = 0\n");
    CHECK_THROWS_AS(build_sweep_grid(bad_step), ConfigError);
    RunConfig inverted = parse_ini("[sweep]\nr2_min = 3\nr2_max = 1\n");
    CHECK_THROWS_AS(build_sweep_grid(inverted), ConfigError);
}

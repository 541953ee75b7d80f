#pragma once
/**
 * @file cli.hpp
 * @brief Command-line front end: subcommand dispatch, artifact emission and
 *        exit-code mapping.
 *
 * Commands (each takes one positional configuration file):
 *   solve-continuous  optimal bonus/value curves and cutoffs -> policy.csv
 *   solve-discrete    optimal bonus schedule and profits     -> policy.csv
 *   solve-planner     planner benchmark and direct mechanism -> policy.csv, mechanism.csv
 *   compare-welfare   W / Lambda / Pi on a common grid       -> welfare.csv
 *   sweep             per-strategy profits across R2         -> sweep.csv
 *   simulate          Monte Carlo policy evaluation          -> trace.csv (optional)
 *   validate          dry-run assumption report, no solving
 *
 * Every run command additionally writes summary.json containing the solved
 * cutoffs / fixed points / profits plus the exact resolved configuration;
 * feeding that summary back in as the config reproduces the run byte-for-byte.
 * Exit codes: 0 success, 2 configuration error, 3 model-invariant violation,
 * 4 solver failure.
 */

#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "bandit_bonus/config.hpp"
#include "bandit_bonus/continuous.hpp"
#include "bandit_bonus/discrete.hpp"
#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/io.hpp"
#include "bandit_bonus/planner.hpp"
#include "bandit_bonus/sim.hpp"

namespace bb {

namespace cli_detail {

/// One fully built artifact: file name plus complete contents.
struct Artifact {
    std::string name;
    std::string content;
};

/// Writes all artifacts under dir, creating it first.  Nothing touches the
/// filesystem until every artifact has been built, so a failed run (parse,
/// invariant or solver error) leaves no partial outputs behind.
inline void emit(const std::string& dir, const std::vector<Artifact>& artifacts) {
    std::filesystem::create_directories(dir);
    for (const Artifact& artifact : artifacts)
        write_file((std::filesystem::path(dir) / artifact.name).string(), artifact.content);
}

/// Applies an --out override before any section resolution happens.
inline void apply_out_override(RunConfig& cfg, const std::string& out_override) {
    if (!out_override.empty()) cfg.sections["output"]["dir"] = out_override;
}

/// Winner-transition description for the sweep summary, e.g.
/// "FC->PC in [1.95, 2] ; PC->SA in [3.2, 3.25]".
inline std::string describe_transitions(const std::vector<SweepRow>& rows) {
    std::string out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].winner == rows[i - 1].winner) continue;
        if (!out.empty()) out += " ; ";
        out += std::string(to_string(rows[i - 1].winner)) + "->" + to_string(rows[i].winner) +
               " in [" + fmt12(rows[i - 1].r2) + ", " + fmt12(rows[i].r2) + "]";
    }
    return out.empty() ? "none" : out;
}

/// Builds the discrete-model schedule selected by [sim] strategy.
inline StrategyChoice choose_schedule(const DiscreteModel& model, const std::string& which) {
    if (which == "optimal") return optimal_strategy(model);
    const auto labeled = [&](BonusSchedule sched) {
        StrategyChoice choice;
        choice.strategy = sched.strategy;
        choice.schedule = std::move(sched);
        choice.profit = strategy_profit(model, choice.strategy, choice.schedule);
        return choice;
    };
    if (which == "fc") return labeled(fc_schedule(model));
    if (which == "pc") return labeled(pc_schedule(model));
    if (which == "ir") return labeled(detail::ir_schedule(model));
    if (which == "sa") return labeled(detail::all_zero_schedule(model, Strategy::SA));
    if (which == "nb") return labeled(detail::all_zero_schedule(model, Strategy::NB));
    throw ConfigError("[sim] strategy must be one of optimal|fc|pc|ir|sa|nb, got '" + which +
                      "'");
}

} // namespace cli_detail

/// Solves the continuous model and writes policy.csv + summary.json.
inline void run_solve_continuous(RunConfig cfg) {
    const ContinuousModel model = build_continuous_model(cfg);
    const SolverOptions opts = build_solver_options(cfg);
    const std::string dir = build_output_dir(cfg);

    const PolicyMap map =
        solve_policy_auto(model, opts.grid_step, static_cast<std::size_t>(opts.display_points));
    const NaiveBoundary naive = naive_fc_boundary(model);

    JsonWriter json;
    json.field("command", "solve-continuous");
    json.field("regime", map.alpha_pc_ir ? "capped" : "large_cap");
    json.field("alpha_sa_pc", map.alpha_sa_pc);
    json.field("alpha_pc_fc", map.alpha_pc_fc);
    json.field("alpha_fc_nb", map.alpha_fc_nb);
    json.field("alpha_fc_nb_tangent", map.alpha_fc_nb_tangent);
    if (map.alpha_pc_ir) {
        json.field("alpha_pc_ir", *map.alpha_pc_ir);
        json.field("alpha_ir_fc", *map.alpha_ir_fc);
        json.field("alpha_sa_ir", cutoff_sa_ir(model));
    }
    json.field("naive_alpha1", naive.alpha1);
    json.field("naive_b1", naive.b1);
    json.field("value_at_alpha_pc_fc", policy_at(map, map.alpha_pc_fc).value);
    json.field("bonus_at_alpha_pc_fc", policy_at(map, map.alpha_pc_fc).bonus);
    json.field("config", cfg.sections);

    cli_detail::emit(dir, {{"policy.csv", policy_csv(map.curve)},
                           {"summary.json", json.str()}});
}

/// Solves the discrete model and writes policy.csv + summary.json.
inline void run_solve_discrete(RunConfig cfg) {
    const DiscreteSpec spec = build_discrete_spec(cfg);
    const std::string dir = build_output_dir(cfg);
    const DiscreteModel& m = spec.model;

    const StrategyChoice best = optimal_strategy(m);
    const BonusSchedule fc = fc_schedule(m);
    const BonusSchedule pc = pc_schedule(m);

    JsonWriter json;
    json.field("command", "solve-discrete");
    json.field("strategy", to_string(best.strategy));
    json.field("profit", best.profit);
    json.field("schedule", best.schedule.bonuses);
    json.field("interior_clamped", best.schedule.interior_clamped);
    json.field("pi_fc", strategy_profit(m, fc.strategy, fc));
    json.field("pi_pc", strategy_profit(m, pc.strategy, pc));
    json.field("pi_sa", strategy_profit(m, Strategy::SA,
                                        detail::all_zero_schedule(m, Strategy::SA)));
    json.field("pi_nb", strategy_profit(m, Strategy::NB,
                                        detail::all_zero_schedule(m, Strategy::NB)));
    json.field("pi_ir", strategy_profit(m, Strategy::IR, detail::ir_schedule(m)));
    if (const auto b_star = fixed_point(m, PsiVariant::M)) json.field("fixed_point_m", *b_star);
    if (const auto b_star = fixed_point(m, PsiVariant::N)) json.field("fixed_point_n", *b_star);
    json.field("config", cfg.sections);

    cli_detail::emit(dir, {{"policy.csv", schedule_csv(best.schedule)},
                           {"summary.json", json.str()}});
}

/// Solves the planner benchmark; writes policy.csv, mechanism.csv, summary.json.
inline void run_solve_planner(RunConfig cfg) {
    const ContinuousModel model = build_continuous_model(cfg);
    const SolverOptions opts = build_solver_options(cfg);
    const std::string dir = build_output_dir(cfg);

    const PlannerSolution plan =
        solve_planner(model, opts.grid_step, static_cast<std::size_t>(opts.display_points));

    // Deterministic sampling grid for the direct-mechanism table.
    std::vector<double> alphas;
    for (int i = 1; i <= 19; ++i) alphas.push_back(0.05 * i);
    std::vector<double> costs;
    const double cbar = model.costs.cbar();
    for (int i = 0; i <= 10; ++i) costs.push_back(cbar * i / 10.0);

    JsonWriter json;
    json.field("command", "solve-planner");
    json.field("alpha_sa_pc", plan.alpha_sa_pc);
    json.field("alpha_pc_fc", plan.alpha_pc_fc);
    json.field("alpha_fc_nb", plan.alpha_fc_nb);
    json.field("config", cfg.sections);

    cli_detail::emit(dir, {{"policy.csv", policy_csv(plan.curve)},
                           {"mechanism.csv", mechanism_csv(plan, alphas, costs)},
                           {"summary.json", json.str()}});
}

/// Welfare comparison W / Lambda / Pi; writes welfare.csv + summary.json.
inline void run_compare_welfare(RunConfig cfg) {
    const ContinuousModel model = build_continuous_model(cfg);
    const SolverOptions opts = build_solver_options(cfg);
    const std::string dir = build_output_dir(cfg);

    const WelfareTable table =
        welfare_compare(model, opts.grid_step, static_cast<std::size_t>(opts.display_points));

    double min_w_minus_lambda = std::numeric_limits<double>::infinity();
    double min_lambda_minus_pi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.alphas.size(); ++i) {
        min_w_minus_lambda = std::min(min_w_minus_lambda, table.planner[i] - table.surplus[i]);
        min_lambda_minus_pi = std::min(min_lambda_minus_pi, table.surplus[i] - table.profit[i]);
    }

    JsonWriter json;
    json.field("command", "compare-welfare");
    json.field("monopolist_alpha_fc_nb", table.monopolist_alpha_fc_nb);
    json.field("planner_alpha_fc_nb", table.planner_alpha_fc_nb);
    json.field("min_w_minus_lambda", min_w_minus_lambda);
    json.field("min_lambda_minus_pi", min_lambda_minus_pi);
    json.field("config", cfg.sections);

    cli_detail::emit(dir, {{"welfare.csv", welfare_csv(table)},
                           {"summary.json", json.str()}});
}

/// Per-strategy profit sweep across R2; writes sweep.csv + summary.json.
inline void run_sweep(RunConfig cfg) {
    const DiscreteSpec spec = build_discrete_spec(cfg);
    if (spec.kind == R1Kind::Moments)
        throw ConfigError("[model] r1 = moments fixes E max(R1,R2) at one R2; "
                          "sweeping requires r1 = uniform or rho_mix");
    const std::vector<double> grid = build_sweep_grid(cfg);
    const std::string dir = build_output_dir(cfg);

    const std::vector<SweepRow> rows =
        sweep_r2(spec.model, grid, [&](double r2) { return spec.emax_at(r2); });

    JsonWriter json;
    json.field("command", "sweep");
    json.field("rows", rows.size());
    json.field("winner_transitions", cli_detail::describe_transitions(rows));
    json.field("config", cfg.sections);

    cli_detail::emit(dir, {{"sweep.csv", sweep_csv(rows)},
                           {"summary.json", json.str()}});
}

/// Monte Carlo evaluation of the solved policy; writes summary.json and,
/// when trace_paths > 0 on a continuous model, trace.csv.
inline void run_simulate(RunConfig cfg) {
    const std::string kind = cfg.require("model", "kind");
    const std::string dir = build_output_dir(cfg);

    if (kind == "continuous") {
        const ContinuousModel model = build_continuous_model(cfg);
        const SolverOptions opts = build_solver_options(cfg);
        const SimConfig sim = build_sim_config(cfg);
        const PolicyMap map = solve_policy_auto(model, opts.grid_step,
                                                static_cast<std::size_t>(opts.display_points));

        std::vector<TraceRow> trace;
        const SimResult res = simulate_continuous(
            map, sim, nullptr, sim.trace_paths > 0 ? &trace : nullptr);
        const PolicyPoint at0 = policy_at(map, sim.alpha0);

        JsonWriter json;
        json.field("command", "simulate");
        json.field("model_kind", "continuous");
        json.field("alpha0", sim.alpha0);
        json.field("strategy_at_alpha0", to_string(at0.strategy));
        json.field("solver_value_at_alpha0", at0.value);
        json.field("mean", res.mean);
        json.field("std_error", res.std_error);
        json.field("n_paths", res.n_paths);
        json.field("good_state_fraction", res.good_state_fraction);
        json.field("stop_time_mean", res.stop_time.mean);
        json.field("stop_time_median", res.stop_time.median);
        json.field("stop_time_q90", res.stop_time.q90);
        json.field("exited_fraction", res.stop_time.exited_fraction);
        json.field("config", cfg.sections);

        std::vector<cli_detail::Artifact> artifacts;
        if (sim.trace_paths > 0) artifacts.push_back({"trace.csv", trace_csv(trace)});
        artifacts.push_back({"summary.json", json.str()});
        cli_detail::emit(dir, artifacts);
        return;
    }
    if (kind == "discrete") {
        const DiscreteSpec spec = build_discrete_spec(cfg);
        const SimConfig sim = build_sim_config(cfg);
        if (sim.trace_paths > 0)
            throw ConfigError("[sim] trace_paths applies to continuous-model simulation only");
        ConfigReader reader{cfg};
        const std::string which = reader.text("sim", "strategy", "optimal");
        const StrategyChoice choice = cli_detail::choose_schedule(spec.model, which);

        const SimResult res = simulate_discrete(spec.model, choice.schedule, spec.sampler(), sim);

        JsonWriter json;
        json.field("command", "simulate");
        json.field("model_kind", "discrete");
        json.field("strategy", to_string(choice.strategy));
        json.field("schedule", choice.schedule.bonuses);
        json.field("oracle_profit", choice.profit);
        json.field("mean", res.mean);
        json.field("std_error", res.std_error);
        json.field("n_paths", res.n_paths);
        json.field("good_state_fraction", res.good_state_fraction);
        json.field("stop_time_mean", res.stop_time.mean);
        json.field("stop_time_median", res.stop_time.median);
        json.field("stop_time_q90", res.stop_time.q90);
        json.field("exited_fraction", res.stop_time.exited_fraction);
        json.field("config", cfg.sections);

        cli_detail::emit(dir, {{"summary.json", json.str()}});
        return;
    }
    throw ConfigError("[model] kind must be 'continuous' or 'discrete', got '" + kind + "'");
}

/// Dry-run assumption report.  No solving: only closed-form cutoffs and the
/// regime selection are reported.  Exits zero whenever the config parses;
/// invariant violations appear as REJECTED lines in the report.
inline void run_validate(RunConfig cfg) {
    const std::string kind = cfg.require("model", "kind");
    if (kind == "continuous") {
        const ContinuousModel model = build_continuous_model_unchecked(cfg);
        std::printf("model: continuous\n");
        std::printf("  discount_rate = %s\n", fmt12(model.discount_rate).c_str());
        std::printf("  arrival_rate  = %s\n", fmt12(model.arrival_rate).c_str());
        std::printf("  lump_value    = %s\n", fmt12(model.lump_value).c_str());
        std::printf("  safe_flow     = %s\n", fmt12(model.safe_flow).c_str());
        try {
            model.validate();
        } catch (const InvariantError& err) {
            std::printf("REJECTED: %s\n", err.what());
            return;
        }
        std::printf("  assumptions: PASS (g = lambda z = %s > s = %s > 0)\n",
                    fmt12(model.g()).c_str(), fmt12(model.safe_flow).c_str());
        if (model.assume_cbar_large) {
            std::printf("  ir_admissible: true (assumed large)\n");
            std::printf("  regime path: SA -> PC -> FC -> NB\n");
        } else if (model.ir_admissible()) {
            std::printf("  ir_admissible: true (cbar = %s exceeds (lambda/r + 1)(g - s) = %s)\n",
                        fmt12(model.costs.cbar()).c_str(),
                        fmt12((model.arrival_rate / model.discount_rate + 1.0) *
                              (model.g() - model.safe_flow))
                            .c_str());
            std::printf("  regime path: SA -> PC -> FC -> NB\n");
        } else {
            std::printf("  ir_admissible: false (bonus cap can bind)\n");
            std::printf("  regime path: SA -> PC -> IR -> FC -> NB\n");
            std::printf("  alpha_sa_ir  = %s\n", fmt12(cutoff_sa_ir(model)).c_str());
        }
        std::printf("  alpha_sa_pc  = %s\n", fmt12(cutoff_sa_pc(model)).c_str());
        std::printf("  alpha_pc_fc  = %s\n", fmt12(cutoff_pc_fc(model)).c_str());
        return;
    }
    if (kind == "discrete") {
        const DiscreteSpec spec = build_discrete_spec_unchecked(cfg);
        const DiscreteModel& m = spec.model;
        std::printf("model: discrete\n");
        if (m.horizon)
            std::printf("  horizon  = %d\n", *m.horizon);
        else
            std::printf("  horizon  = inf\n");
        std::printf("  discount = %s\n", fmt12(m.discount).c_str());
        std::printf("  er1      = %s\n", fmt12(m.er1).c_str());
        std::printf("  emax     = %s\n", fmt12(m.emax).c_str());
        std::printf("  r2       = %s\n", fmt12(m.r2).c_str());
        try {
            m.validate();
        } catch (const InvariantError& err) {
            std::printf("REJECTED: %s\n", err.what());
            return;
        }
        std::printf("  assumptions: PASS (E max >= max(E R1, R2), discount in (0,1))\n");
        std::printf("  m_const  = %s\n", fmt12(m.m_const()).c_str());
        std::printf("  n_const  = %s\n", fmt12(m.n_const()).c_str());
        const double cbar = m.costs.cbar();
        const double psi_cap_m = psi(m, cbar, PsiVariant::M);
        const double psi_cap_n = psi(m, cbar, PsiVariant::N);
        std::printf("  interior assumption (Psi(cbar) < 0 both variants): %s\n",
                    (psi_cap_m < 0.0 && psi_cap_n < 0.0) ? "true" : "false");
        return;
    }
    throw ConfigError("[model] kind must be 'continuous' or 'discrete', got '" + kind + "'");
}

/// Maps exceptions from a command body to the documented exit codes.
inline int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return 2;
    } catch (const InvariantError& err) {
        std::fprintf(stderr, "invariant violation: %s\n", err.what());
        return 3;
    } catch (const SolverError& err) {
        std::fprintf(stderr, "solver failure: %s\n", err.what());
        return 4;
    } catch (const std::domain_error& err) {
        std::fprintf(stderr, "invariant violation: %s\n", err.what());
        return 3;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 4;
    }
}

/// CLI entry point: parses the subcommand and dispatches under guarded().
inline int cli_main(int argc, char** argv) {
    CLI::App app{"Dynamic-pricing and review-bonus solver with Monte Carlo validation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    const auto add_command = [&](const char* name, const char* description) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("config", config_path,
                        "configuration file (INI key=value, or a summary.json to replay)")
            ->required();
        sub->add_option("--out", out_override, "override the [output] dir from the config");
        return sub;
    };

    CLI::App* solve_continuous = add_command(
        "solve-continuous",
        "Solve the continuous-learning model: optimal bonus/value curves and regime "
        "cutoffs (policy.csv, summary.json)");
    CLI::App* solve_discrete = add_command(
        "solve-discrete",
        "Solve the discrete perfect-learning model: optimal bonus schedule, per-strategy "
        "profits and fixed points (policy.csv, summary.json)");
    CLI::App* solve_planner = add_command(
        "solve-planner",
        "Solve the social-planner benchmark: welfare curve, report-subsidy cutoffs and the "
        "direct-mechanism table (policy.csv, mechanism.csv, summary.json)");
    CLI::App* compare_welfare = add_command(
        "compare-welfare",
        "Tabulate planner welfare W, surplus under the monopolist Lambda, and monopolist "
        "profit Pi on a common belief grid (welfare.csv, summary.json)");
    CLI::App* sweep = add_command(
        "sweep",
        "Sweep the discrete model's safe value R2 and tabulate per-strategy profits and "
        "the winning strategy (sweep.csv, summary.json)");
    CLI::App* simulate = add_command(
        "simulate",
        "Monte Carlo evaluation of the solved policy against the analytic value "
        "(summary.json, optional trace.csv)");
    CLI::App* validate = add_command(
        "validate",
        "Dry-run configuration check: report every model assumption and the selected "
        "regime path without solving");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err);
    }

    const auto with_config = [&](void (*body)(RunConfig)) {
        return guarded([&] {
            RunConfig cfg = load_config(config_path);
            cli_detail::apply_out_override(cfg, out_override);
            body(std::move(cfg));
        });
    };

    if (solve_continuous->parsed()) return with_config(run_solve_continuous);
    if (solve_discrete->parsed()) return with_config(run_solve_discrete);
    if (solve_planner->parsed()) return with_config(run_solve_planner);
    if (compare_welfare->parsed()) return with_config(run_compare_welfare);
    if (sweep->parsed()) return with_config(run_sweep);
    if (simulate->parsed()) return with_config(run_simulate);
    if (validate->parsed()) return with_config(run_validate);
    return 2;
}

} // namespace bb

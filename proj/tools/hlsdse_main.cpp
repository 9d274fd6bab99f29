// SPDX-License-Identifier: Apache-2.0
// hlsdse: benchmarks, experiment runs, one-shot ILP solves and scoring.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hlsdse/bench.hpp"
#include "hlsdse/design_json.hpp"
#include "hlsdse/errors.hpp"
#include "hlsdse/experiment.hpp"
#include "hlsdse/ilp.hpp"
#include "hlsdse/latency.hpp"
#include "hlsdse/task1.hpp"

namespace {

using namespace hlsdse;

constexpr int kConfigError = 2;

struct IlpArgs {
    std::string latency_model = "correct";
    bool include_top_in_max = false;
    std::string objective = "constrained";
    double alpha = 1.0;
    double relax_step = 0.1;
    int max_retries = 16;

    agent::IlpSettings settings() const {
        agent::IlpSettings s;
        const auto kind = parse_latency_model(latency_model);
        if (!kind) {
            throw std::invalid_argument(fmt::format("unknown latency model '{}'", latency_model));
        }
        s.latency_model = {*kind, include_top_in_max};
        const auto mode = ilp::parse_objective_mode(objective);
        if (!mode) {
            throw std::invalid_argument(fmt::format("unknown objective '{}'", objective));
        }
        s.mode = *mode;
        if (!(alpha > 0.0)) {
            throw std::invalid_argument("--alpha must be positive");
        }
        s.alpha = ilp::Alpha::from_double(alpha);
        s.relax = {relax_step, max_retries};
        return s;
    }
};

void add_ilp_options(CLI::App& cmd, IlpArgs& args) {
    cmd.add_option("--latency-model", args.latency_model, "correct|top-only|sum-all|sum-mult|top-plus-max")
        ->capture_default_str();
    cmd.add_flag("--include-top-in-max", args.include_top_in_max, "top-plus-max: max(top, children)");
    cmd.add_option("--objective", args.objective, "constrained|lagrangian")->capture_default_str();
    cmd.add_option("--alpha", args.alpha, "latency weight of the lagrangian objective")->capture_default_str();
    cmd.add_option("--relax-step", args.relax_step, "area target growth per infeasible retry")
        ->capture_default_str();
    cmd.add_option("--max-retries", args.max_retries, "infeasible retries before giving up")->capture_default_str();
}

int bench_list() {
    for (const auto& name : bench::builtin_names()) {
        const auto b = bench::builtin(name);
        fmt::print("{:<9} {}/{:<3} {:<38} {}\n", b.name, b.design.kernels.size(), static_call_count(b.design),
                   b.formula.value_or("-"), b.description);
    }
    return 0;
}

int bench_export(const std::string& out, const std::vector<std::string>& names) {
    std::filesystem::create_directories(out);
    const auto& list = names.empty() ? bench::builtin_names() : names;
    for (const auto& name : list) {
        const auto path = std::filesystem::path(out) / (name + ".json");
        bench::save(bench::builtin(name), path);
        fmt::print("{}\n", path.string());
    }
    return 0;
}

void print_scores(const experiment::ScoreTable& table) {
    fmt::print("{:<10} {:<32} {:>5} {:>8} {:>6} {:>5} {:>5}\n", "benchmark", "policy", "runs", "success", "meets",
               "S1", "S2");
    for (const auto& row : table.rows) {
        fmt::print("{:<10} {:<32} {:>5} {:>8} {:>6} {:>5} {:>5}\n", row.benchmark, row.policy, row.runs,
                   fmt::format("{}/{}", row.successes, row.runs), row.runs_meeting_target, row.scenario1_points,
                   row.scenario2_points);
    }
}

struct SolveArgs {
    std::string benchmark = "SYN1";
    IlpArgs ilp;
    double area_target_frac = 0.9;
    std::uint64_t seed = 0;
    std::size_t k = synth::kDefaultVariantCount;
    bool print_model = false;
};

int solve(const SolveArgs& args) {
    const auto settings = args.ilp.settings();
    const auto benchmark = bench::resolve(args.benchmark);
    auto t1 = task1::optimize_bottom_up(benchmark.design, {args.k, 0.0, args.seed});
    const auto target = task1::derive_area_target(t1.baseline.area, args.area_target_frac);
    const auto model =
        ilp::build_model(t1.design, {settings.mode, target, settings.alpha}, settings.latency_model);
    if (args.print_model) {
        fmt::print("{}", ilp::to_lp_string(model));
    }
    const auto solution = ilp::solve(model);
    const auto oracle = brute_force_optimum(t1.design, target);

    fmt::print("benchmark {}  baseline area {} latency {}  target {}\n", benchmark.name,
               t1.baseline.area.to_string(), t1.baseline.latency, target.to_string());
    fmt::print("model: {} binaries, {} auxiliaries, {} constraints\n", model.count(ilp::VarKind::Binary),
               model.aux_count(), model.constraints.size());
    if (!solution.optimal()) {
        fmt::print("ilp: infeasible ({} nodes)\n", solution.nodes);
    } else {
        const auto truth = evaluate(t1.design, *solution.configuration);
        fmt::print("ilp: {}  predicted latency {} area {}  true latency {}  objective {} ({} nodes)\n",
                   to_json(*solution.configuration).dump(), solution.predicted_latency,
                   solution.predicted_area.to_string(), truth.latency, solution.objective, solution.nodes);
    }
    if (oracle.best_feasible) {
        const auto& best = *oracle.best_feasible;
        fmt::print("oracle: {}  latency {} area {}\n", to_json(best.configuration).dump(), best.result.latency,
                   best.result.area.to_string());
    } else {
        fmt::print("oracle: no configuration meets the target; min area {} at latency {}\n",
                   oracle.min_area.result.area.to_string(), oracle.min_area.result.latency);
    }
    if (settings.mode == ilp::ObjectiveMode::ConstrainedArea) {
        const bool match = solution.optimal() == oracle.best_feasible.has_value() &&
                           (!solution.optimal() || *solution.configuration == oracle.best_feasible->configuration);
        fmt::print("match: {}\n", match ? "yes" : "no");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel variant selection: benchmarks, agent sessions, ILP and scoring"};
    app.require_subcommand(1);

    auto* bench_cmd = app.add_subcommand("bench", "builtin benchmarks");
    bench_cmd->require_subcommand(1);
    auto* list_cmd = bench_cmd->add_subcommand("list", "list builtin benchmarks");
    auto* export_cmd = bench_cmd->add_subcommand("export", "write builtin benchmarks as JSON files");
    std::string export_dir = "benchmarks";
    std::vector<std::string> export_names;
    export_cmd->add_option("--out", export_dir, "output directory")->capture_default_str();
    export_cmd->add_option("names", export_names, "benchmarks to export (default: all)");

    auto* run_cmd = app.add_subcommand("run", "run policies on benchmarks and write reports");
    experiment::RunConfig config;
    IlpArgs run_ilp;
    std::string out_dir = "results";
    std::vector<std::string> policies;
    run_cmd->add_option("--benchmark", config.benchmarks, "builtin name or file (repeatable; default: all)");
    run_cmd->add_option("--policy", policies, "oracle|ilp-first|trial-error|external:CMD (repeatable)");
    add_ilp_options(*run_cmd, run_ilp);
    run_cmd->add_option("--reps", config.reps, "repetitions per benchmark and policy")->capture_default_str();
    run_cmd->add_option("--seed", config.seed, "master seed")->capture_default_str();
    run_cmd->add_option("--area-target-frac", config.area_target_frac, "target = frac x baseline area")
        ->capture_default_str();
    run_cmd->add_option("--max-actions", config.budget.max_actions)->capture_default_str();
    run_cmd->add_option("--max-transcript-chars", config.budget.max_transcript_chars)->capture_default_str();
    run_cmd->add_option("--fault-rate", config.fault_rate, "per-kernel generation fault probability")
        ->capture_default_str();
    run_cmd->add_option("--k", config.k, "variants kept per kernel")->capture_default_str();
    run_cmd->add_option("--jobs", config.jobs, "worker threads")->capture_default_str();
    run_cmd->add_option("--out", out_dir, "report directory")->capture_default_str();

    auto* solve_cmd = app.add_subcommand("solve", "one-shot ILP solve compared with the oracle");
    SolveArgs solve_args;
    solve_cmd->add_option("--benchmark", solve_args.benchmark, "builtin name or file")->capture_default_str();
    add_ilp_options(*solve_cmd, solve_args.ilp);
    solve_cmd->add_option("--area-target-frac", solve_args.area_target_frac)->capture_default_str();
    solve_cmd->add_option("--seed", solve_args.seed)->capture_default_str();
    solve_cmd->add_option("--k", solve_args.k)->capture_default_str();
    solve_cmd->add_flag("--print-model", solve_args.print_model, "dump the model in LP form");

    auto* score_cmd = app.add_subcommand("score", "score a runs.jsonl file");
    std::string runs_path;
    score_cmd->add_option("--runs", runs_path, "runs.jsonl")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*list_cmd) {
            return bench_list();
        }
        if (*export_cmd) {
            return bench_export(export_dir, export_names);
        }
        if (*run_cmd) {
            if (config.benchmarks.empty()) {
                config.benchmarks = bench::builtin_names();
            }
            if (!policies.empty()) {
                config.policies = policies;
            }
            config.ilp = run_ilp.settings();
            const auto records = experiment::run_experiment(config);
            const auto table = experiment::score(records);
            experiment::report(records, table, out_dir);
            print_scores(table);
            fmt::print("wrote {}\n", std::filesystem::path(out_dir).string());
            return 0;
        }
        if (*solve_cmd) {
            return solve(solve_args);
        }
        if (*score_cmd) {
            const auto records = experiment::load_runs(runs_path);
            const auto table = experiment::score(records);
            print_scores(table);
            return 0;
        }
    } catch (const UnknownBenchmark& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfigError;
    } catch (const ParseError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfigError;
    } catch (const ValidationError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfigError;
    } catch (const EmptyInput& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}

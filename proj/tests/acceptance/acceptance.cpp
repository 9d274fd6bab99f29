// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "hlsdse/agent.hpp"
#include "hlsdse/bench.hpp"
#include "hlsdse/experiment.hpp"
#include "hlsdse/ilp.hpp"
#include "hlsdse/latency.hpp"
#include "hlsdse/policies.hpp"
#include "hlsdse/task1.hpp"
#include "support/fixtures.hpp"
#include "support/formula.hpp"
#include "support/random_design.hpp"
#include "support/score_fixture.hpp"

using namespace hlsdse;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Configuration random_configuration(std::mt19937_64& rng, const Design& d) {
    Configuration c;
    for (const auto& [id, k] : d.kernels) {
        c.choice[id] = std::uniform_int_distribution<std::size_t>(0, k.variants.size() - 1)(rng);
    }
    return c;
}

struct Prepared {
    Design design;
    Area target;
};

Prepared prepare(const std::string& name, double frac = 0.9) {
    const auto r = task1::optimize_bottom_up(bench::builtin(name).design);
    return {r.design, task1::derive_area_target(r.baseline.area, frac)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict formula_suite() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1);
    std::size_t benchmarks = 0;
    std::size_t mismatches = 0;
    for (const auto& name : {"SYN2", "SYN3", "SYN4", "SYN6", "AES_LIKE", "NW_LIKE"}) {
        const auto b = bench::builtin(name);
        if (!b.formula) {
            return {false, fmt::format("{} has no stored formula", name)};
        }
        ++benchmarks;
        auto d = task1::optimize_bottom_up(b.design).design;
        for (int i = 0; i < 50; ++i) {
            testsupport::randomize_latencies(rng, d, 10000);
            const auto c = random_configuration(rng, d);
            std::map<std::string, std::int64_t> values;
            for (const auto& [id, k] : d.kernels) {
                values[id] = k.variants[c.at(id)].latency;
            }
            if (eval_latency(d, c) != testsupport::Formula(*b.formula, values).evaluate()) {
                ++mismatches;
            }
        }
    }
    const auto t = seconds_since(start);
    return {mismatches == 0 && t < 1.0,
            fmt::format("{} benchmarks x 50 assignments, {} mismatches, {:.3f} s (limit 1 s)", benchmarks, mismatches,
                        t)};
}

Verdict faulty_ordering() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2);
    const int designs = 1000;
    int violations = 0;
    for (int i = 0; i < designs; ++i) {
        const auto d = testsupport::random_design(rng);
        const auto c = random_configuration(rng, d);
        const auto top = eval_faulty_latency({LatencyModelKind::TopOnly}, d, c);
        const auto tpm = eval_faulty_latency({LatencyModelKind::TopPlusMaxChildren}, d, c);
        const auto correct = eval_latency(d, c);
        const auto swm = eval_faulty_latency({LatencyModelKind::SumWithMultipliers}, d, c);
        if (!(top <= tpm && tpm <= correct && correct <= swm)) {
            ++violations;
        }
    }
    const auto t = seconds_since(start);
    return {violations == 0 && t < 5.0,
            fmt::format("{} random designs, {} violations, {:.3f} s (limit 5 s)", designs, violations, t)};
}

bool solver_matches_oracle(const Design& d, Area target) {
    const auto sol = ilp::solve(ilp::build_model(d, ilp::ObjectiveSpec::constrained(target)));
    const auto truth = brute_force_optimum(d, target);
    if (sol.optimal() != truth.best_feasible.has_value()) {
        return false;
    }
    return !sol.optimal() || *sol.configuration == truth.best_feasible->configuration;
}

Verdict solver_oracle() {
    const auto start = Clock::now();
    int cases = 0;
    int mismatches = 0;
    for (const auto& name : bench::builtin_names()) {
        for (double frac : {0.9, 1.0}) {
            const auto p = prepare(name, frac);
            ++cases;
            mismatches += solver_matches_oracle(p.design, p.target) ? 0 : 1;
        }
    }
    std::mt19937_64 rng(3);
    testsupport::RandomDesignOptions o;
    o.max_kernels = 6;
    o.max_variants = 5;
    for (int i = 0; i < 100; ++i) {
        const auto d = testsupport::random_design(rng, o);
        std::int64_t widest = 0;
        for (const auto& [id, k] : d.kernels) {
            std::int64_t m = 0;
            for (const auto& v : k.variants) {
                m = std::max(m, v.area.tenths());
            }
            widest += m;
        }
        const auto target = Area::from_tenths(std::uniform_int_distribution<std::int64_t>(0, widest)(rng));
        ++cases;
        mismatches += solver_matches_oracle(d, target) ? 0 : 1;
    }
    const auto t = seconds_since(start);
    return {mismatches == 0 && t < 10.0,
            fmt::format("{} cases (builtins at 0.9 and 1.0, 100 random), {} mismatches, {:.3f} s (limit 10 s)", cases,
                        mismatches, t)};
}

Verdict lagrangian_pareto() {
    int violations = 0;
    std::uint64_t compared = 0;
    for (const auto& name : bench::builtin_names()) {
        const auto p = prepare(name);
        const auto sol = ilp::solve(
            ilp::build_model(p.design, ilp::ObjectiveSpec::lagrangian(p.target, ilp::Alpha::ratio(1, 1))));
        if (!sol.optimal()) {
            ++violations;
            continue;
        }
        const auto mine = evaluate(p.design, *sol.configuration);
        const auto dev = [&](Area a) { return std::llabs((a - p.target).tenths()); };
        const auto range = enumerate_configurations(p.design);
        for (const auto& c : range) {
            ++compared;
            const auto other = evaluate(p.design, c);
            const bool le = other.latency <= mine.latency && dev(other.area) <= dev(mine.area);
            const bool lt = other.latency < mine.latency || dev(other.area) < dev(mine.area);
            if (le && lt) {
                ++violations;
                break;
            }
        }
    }
    return {violations == 0,
            fmt::format("{} builtins, {} configurations compared, {} dominated solutions",
                        bench::builtin_names().size(), compared, violations)};
}

Verdict faulty_gap() {
    const agent::Task task{"SYN2-gap", testsupport::syn2_gap_fixture(), Area::parse(testsupport::kGapTarget), 0};
    const auto truth = brute_force_optimum(task.design, task.area_target);
    if (!truth.best_feasible) {
        return {false, "gap fixture has no feasible configuration"};
    }
    auto selected = [&](LatencyModelKind kind) -> std::optional<Configuration> {
        agent::IlpSettings s;
        s.latency_model = {kind};
        agent::IlpFirstPolicy policy(s);
        const auto r = agent::run(policy, task);
        if (const auto* ok = std::get_if<agent::Success>(&r.outcome)) {
            return ok->configuration;
        }
        return std::nullopt;
    };
    const auto faulty = selected(LatencyModelKind::SumAll);
    const auto correct = selected(LatencyModelKind::Correct);
    if (!faulty || !correct) {
        return {false, "a policy run did not end in Success"};
    }
    const auto faulty_latency = eval_latency(task.design, *faulty);
    const auto optimum = truth.best_feasible->result.latency;
    const bool gap = faulty_latency > optimum;
    const bool match = *correct == truth.best_feasible->configuration;
    return {gap && match, fmt::format("sum-all selects true latency {} vs optimum {}; correct model {} the oracle",
                                      faulty_latency, optimum, match ? "matches" : "misses")};
}

Verdict target_miss() {
    std::vector<std::string> problems;
    for (const auto& name : {"SYN2", "SYN4"}) {
        const auto p = prepare(name);
        if (brute_force_optimum(p.design, p.target).best_feasible) {
            problems.push_back(fmt::format("{} has a feasible configuration", name));
        }
    }
    experiment::RunConfig config;
    config.benchmarks = {"SYN2", "SYN4"};
    config.reps = 10;
    const auto records = experiment::run_experiment(config);
    std::size_t successes = 0;
    std::size_t met = 0;
    for (const auto& r : records) {
        if (r.success()) {
            ++successes;
            met += r.met_target ? 1 : 0;
        }
    }
    if (successes == 0) {
        problems.push_back("no successful runs");
    }
    if (met > 0) {
        problems.push_back(fmt::format("{} runs met the target", met));
    }
    return {problems.empty(),
            problems.empty()
                ? fmt::format("SYN2 and SYN4 infeasible at 0.9; {} successful runs, none met the target", successes)
                : fmt::format("{}", fmt::join(problems, "; "))};
}

Verdict action_ordering() {
    experiment::RunConfig config;
    config.benchmarks = {"SYN1", "SYN2", "SYN3", "SYN4", "SYN5", "SYN6"};
    config.policies = {"ilp-first", "trial-error"};
    config.reps = 10;
    const auto records = experiment::run_experiment(config);
    std::map<std::pair<std::string, std::string>, double> sums;
    std::map<std::pair<std::string, std::string>, int> counts;
    for (const auto& r : records) {
        const auto key = std::pair{r.benchmark, r.policy};
        sums[key] += static_cast<double>(r.actions_by_kind.at("synthesize") + r.actions_by_kind.at("inspect"));
        ++counts[key];
    }
    bool pass = true;
    std::vector<std::string> parts;
    for (const auto& b : config.benchmarks) {
        const double te = sums[{b, "trial-error"}] / counts[{b, "trial-error"}];
        const double il = sums[{b, "ilp-first"}] / counts[{b, "ilp-first"}];
        pass = pass && te > il;
        parts.push_back(fmt::format("{} {:.1f}>{:.1f}", b, te, il));
    }
    return {pass, fmt::format("mean synthesize+inspect, trial-error vs ilp-first: {}", fmt::join(parts, ", "))};
}

Verdict scoring_rules() {
    const auto records = testsupport::score_fixture();
    const auto table = experiment::score(records);
    int wrong = 0;
    for (const auto& e : testsupport::kExpectedScores) {
        const auto* row = table.find(e.benchmark, e.policy);
        if (!row || row->runs_meeting_target != e.meets || row->scenario1_points != e.s1 ||
            row->scenario2_points != e.s2) {
            ++wrong;
        }
    }
    return {wrong == 0 && records.size() == 9,
            fmt::format("{} records, {} rows scored differently than expected", records.size(), wrong)};
}

Verdict determinism(const std::filesystem::path& root) {
    experiment::RunConfig config;
    config.benchmarks = bench::builtin_names();
    config.seed = 1234;
    config.jobs = 4;
    std::vector<std::filesystem::path> dirs{root / "det-a", root / "det-b"};
    for (const auto& dir : dirs) {
        std::filesystem::remove_all(dir);
        const auto records = experiment::run_experiment(config);
        experiment::report(records, experiment::score(records), dir);
    }
    const bool runs = slurp(dirs[0] / "runs.jsonl") == slurp(dirs[1] / "runs.jsonl");
    const bool summary = slurp(dirs[0] / "summary.csv") == slurp(dirs[1] / "summary.csv");
    return {runs && summary, fmt::format("runs.jsonl {}, summary.csv {}", runs ? "identical" : "differs",
                                         summary ? "identical" : "differs")};
}

Verdict end_to_end(const std::filesystem::path& root) {
    const auto start = Clock::now();
    experiment::RunConfig config;
    config.benchmarks = bench::builtin_names();
    const auto records = experiment::run_experiment(config);
    const auto table = experiment::score(records);
    experiment::report(records, table, root / "e2e");
    const auto t = seconds_since(start);
    std::map<std::string, std::pair<std::size_t, std::size_t>> rate;
    for (const auto& r : records) {
        auto& [ok, n] = rate[r.policy];
        ok += r.success() ? 1 : 0;
        ++n;
    }
    const bool full = records.size() == 8 * 3 * 10;
    const bool oracle = rate["oracle"].first == rate["oracle"].second;
    const bool ilp = rate["ilp-first"].first == rate["ilp-first"].second;
    return {full && oracle && ilp && t < 60.0,
            fmt::format("{} runs in {:.3f} s (limit 60 s); success oracle {}/{}, ilp-first {}/{}, trial-error {}/{}",
                        records.size(), t, rate["oracle"].first, rate["oracle"].second, rate["ilp-first"].first,
                        rate["ilp-first"].second, rate["trial-error"].first, rate["trial-error"].second)};
}

} // namespace

int main() {
    const auto root = std::filesystem::temp_directory_path() / "hlsdse_acceptance";
    std::filesystem::create_directories(root);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"formula suite", formula_suite},
        {"faulty-model ordering", faulty_ordering},
        {"solver-oracle equivalence", solver_oracle},
        {"lagrangian pareto property", lagrangian_pareto},
        {"faulty-ILP gap", faulty_gap},
        {"target miss on SYN2/SYN4", target_miss},
        {"action-count ordering", action_ordering},
        {"scoring rules", scoring_rules},
        {"determinism", [&] { return determinism(root); }},
        {"end to end", [&] { return end_to_end(root); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, fmt::format("threw: {}", e.what())};
        }
        failed += v.pass ? 0 : 1;
        fmt::print("criterion {:>2} {} {}: {}\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first, v.detail);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}

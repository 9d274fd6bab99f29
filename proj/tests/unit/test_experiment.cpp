// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "hlsdse/bench.hpp"
#include "hlsdse/errors.hpp"
#include "hlsdse/experiment.hpp"
#include "support/score_fixture.hpp"

using namespace hlsdse;
using namespace hlsdse::experiment;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hlsdse_test_experiment" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

std::vector<std::string> dumps(const std::vector<RunRecord>& records) {
    std::vector<std::string> out;
    for (const auto& r : records) {
        out.push_back(to_json(r).dump());
    }
    return out;
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("scoring rules on the hand-built records") {
    const auto table = score(testsupport::score_fixture());
    CHECK(table.rows.size() == 9);
    for (const auto& e : testsupport::kExpectedScores) {
        const auto* row = table.find(e.benchmark, e.policy);
        REQUIRE(row);
        CHECK_MESSAGE(row->runs_meeting_target == e.meets, e.benchmark << "/" << e.policy);
        CHECK_MESSAGE(row->scenario1_points == e.s1, e.benchmark << "/" << e.policy);
        CHECK_MESSAGE(row->scenario2_points == e.s2, e.benchmark << "/" << e.policy);
    }
    CHECK(table.find("meets", "nobody") == nullptr);
    CHECK_THROWS_AS(score({}), EmptyInput);
}

TEST_CASE("single run meeting the target takes the point") {
    const auto table = score({testsupport::scored_run("b", "p", std::pair{50.0, 7})});
    CHECK(table.rows.at(0).scenario1_points == 1);
}

TEST_CASE("small experiment is deterministic") {
    RunConfig config;
    config.benchmarks = {"SYN3"};
    config.policies = {"trial-error"};
    config.reps = 3;
    config.seed = 11;
    const auto a = run_experiment(config);
    REQUIRE(a.size() == 3);
    std::set<std::uint64_t> seeds;
    for (const auto& r : a) {
        seeds.insert(r.seed);
        CHECK(r.success());
    }
    CHECK(seeds.size() == 3);
    CHECK(dumps(a) == dumps(run_experiment(config)));
    config.jobs = 4;
    CHECK(dumps(a) == dumps(run_experiment(config)));
}

TEST_CASE("record invariants over every builtin") {
    RunConfig config;
    config.benchmarks = bench::builtin_names();
    config.reps = 1;
    config.jobs = 4;
    const auto records = run_experiment(config);
    CHECK(records.size() == bench::builtin_names().size() * 3);
    for (const auto& r : records) {
        REQUIRE(r.transcript.has_value());
        const auto total = std::accumulate(r.actions_by_kind.begin(), r.actions_by_kind.end(), std::size_t{0},
                                           [](std::size_t s, const auto& kv) { return s + kv.second; });
        CHECK(total == r.transcript->entries.size());
        CHECK(r.actions_by_kind.size() == 4);
        if (r.success()) {
            CHECK(r.met_target == (r.final_result->area <= r.area_target));
        }
        if (r.policy == "oracle") {
            CHECK(r.success());
        }
    }
    const auto table = score(records);
    std::set<std::string> benchmarks;
    for (const auto& row : table.rows) {
        benchmarks.insert(row.benchmark);
    }
    for (const auto& b : benchmarks) {
        std::size_t s1 = 0;
        std::size_t s2 = 0;
        std::size_t meets = 0;
        for (const auto& row : table.rows) {
            if (row.benchmark == b) {
                s1 += row.scenario1_points;
                s2 += row.scenario2_points;
                meets += row.runs_meeting_target;
            }
        }
        CHECK((s1 == 0 || s2 == 0));
        if (meets > 0) {
            CHECK(s1 >= 1);
        }
    }
}

TEST_CASE("fault rate one fails every run") {
    RunConfig config;
    config.benchmarks = {"SYN1", "AES_LIKE"};
    config.reps = 2;
    config.fault_rate = 1.0;
    const auto records = run_experiment(config);
    CHECK(records.size() == 12);
    for (const auto& r : records) {
        CHECK(r.outcome == "FunctionalityBroken");
        CHECK_FALSE(r.final_result.has_value());
        CHECK(r.fault_log.size() == 3);
    }
    const auto table = score(records);
    for (const auto& row : table.rows) {
        CHECK(row.successes == 0);
    }
}

TEST_CASE("configuration errors") {
    RunConfig config;
    config.benchmarks = {"SYN9"};
    CHECK_THROWS_AS(run_experiment(config), UnknownBenchmark);
    config.benchmarks = {"SYN1"};
    config.policies = {"coin-flip"};
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("report files") {
    RunConfig config;
    config.benchmarks = {"SYN1", "SYN2"};
    config.policies = {"oracle", "ilp-first"};
    config.reps = 2;
    const auto records = run_experiment(config);
    const auto table = score(records);
    const auto dir = scratch("report");
    report(records, table, dir);

    const auto summary = slurp(dir / "summary.csv");
    CHECK(count_lines(summary) == 1 + 4);
    CHECK(summary.rfind("benchmark,policy,runs,success_rate,", 0) == 0);
    const auto runs = slurp(dir / "runs.jsonl");
    CHECK(count_lines(runs) == records.size());
    CHECK(count_lines(slurp(dir / "timing.csv")) == records.size() + 1);
    for (const auto& r : records) {
        const auto transcript = slurp(dir / "transcripts" / (r.run_id() + ".jsonl"));
        CHECK(count_lines(transcript) == r.transcript->entries.size() + 2);
    }

    const auto loaded = load_runs(dir / "runs.jsonl");
    CHECK(dumps(loaded) == dumps(records));
    CHECK(summary_csv(loaded, score(loaded)) == summary);

    const auto again = scratch("report-again");
    report(run_experiment(config), table, again);
    CHECK(slurp(again / "summary.csv") == summary);
    CHECK(slurp(again / "runs.jsonl") == runs);

    CHECK_THROWS_AS(report({}, table, scratch("empty")), EmptyInput);
}

TEST_CASE("malformed runs files") {
    const auto dir = scratch("bad-runs");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "runs.jsonl") << "{\"benchmark\": 3}\n";
    CHECK_THROWS_AS(load_runs(dir / "runs.jsonl"), ParseError);
    std::ofstream(dir / "empty.jsonl") << "";
    CHECK(load_runs(dir / "empty.jsonl").empty());
    CHECK_THROWS_AS(load_runs(dir / "missing.jsonl"), Error);
}

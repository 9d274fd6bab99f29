// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlsdse/agent.hpp"
#include "hlsdse/policies.hpp"
#include "hlsdse/task1.hpp"

namespace hlsdse::experiment {

struct RunConfig {
    std::vector<std::string> benchmarks; // builtin names or benchmark files
    std::vector<std::string> policies{"oracle", "ilp-first", "trial-error"};
    agent::IlpSettings ilp;
    std::size_t reps = 10;
    std::uint64_t seed = 0;
    double area_target_frac = 0.9;
    agent::Budget budget;
    double fault_rate = 0.0;
    std::size_t k = synth::kDefaultVariantCount;
    unsigned jobs = 1;
};

struct RunRecord {
    std::string benchmark;
    std::string policy;
    std::uint64_t seed = 0;
    std::size_t rep = 0;
    std::string outcome; // "Success" or a failure reason
    std::string detail;
    std::map<std::string, std::size_t> actions_by_kind;
    std::optional<Configuration> configuration;
    std::optional<EvalResult> final_result;
    Area area_target;
    bool met_target = false;
    double wall_seconds = 0.0; // timing.csv only
    std::optional<agent::Transcript> transcript;
    nlohmann::json task_message;
    std::vector<task1::FaultEntry> fault_log;

    bool success() const { return outcome == "Success"; }
    std::size_t action_count() const;
    /// "<benchmark>__<policy>__rep<r>", file-name safe.
    std::string run_id() const;
};

/// Task 1 per (benchmark, repetition), then every policy on the same task.
/// Per-run failures become records; the batch itself does not abort.
/// Records come back sorted by (benchmark, policy, seed, rep). Throws
/// UnknownBenchmark, ParseError, ValidationError and std::invalid_argument
/// for configuration problems.
std::vector<RunRecord> run_experiment(const RunConfig& config);

/// runs.jsonl line (no wall time, no transcript).
nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);
std::vector<RunRecord> load_runs(const std::filesystem::path& path);

struct ScoreRow {
    std::string benchmark;
    std::string policy;
    std::size_t runs = 0;
    std::size_t successes = 0;
    std::size_t runs_meeting_target = 0;
    std::size_t scenario1_points = 0;
    std::size_t scenario2_points = 0;
};

struct ScoreTable {
    std::vector<ScoreRow> rows; // sorted by (benchmark, policy)

    const ScoreRow* find(const std::string& benchmark, const std::string& policy) const;
};

/// Per benchmark: scenario 1 gives a point to every target-meeting run with
/// the lowest latency among target-meeting runs; only when no run of any
/// policy meets the target, scenario 2 gives a point to every successful run
/// with the lowest area. Throws EmptyInput.
ScoreTable score(const std::vector<RunRecord>& records);

/// Writes summary.csv, runs.jsonl, timing.csv and transcripts/<run-id>.jsonl
/// under `dir`. Throws EmptyInput and IoError.
void report(const std::vector<RunRecord>& records, const ScoreTable& table, const std::filesystem::path& dir);

std::string summary_csv(const std::vector<RunRecord>& records, const ScoreTable& table);

} // namespace hlsdse::experiment

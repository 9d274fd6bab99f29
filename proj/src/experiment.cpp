// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "hlsdse/bench.hpp"
#include "hlsdse/design_json.hpp"
#include "hlsdse/errors.hpp"
#include "hlsdse/seed.hpp"

namespace hlsdse::experiment {

using nlohmann::json;

std::size_t RunRecord::action_count() const {
    std::size_t total = 0;
    for (const auto& [kind, count] : actions_by_kind) {
        total += count;
    }
    return total;
}

std::string RunRecord::run_id() const {
    auto safe = [](std::string text) {
        for (auto& c : text) {
            const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                            c == '-' || c == '_' || c == '.';
            if (!ok) {
                c = '_';
            }
        }
        return text;
    };
    return fmt::format("{}__{}__rep{}", safe(benchmark), safe(policy), rep);
}

namespace {

/// Everything the policies of one (benchmark, repetition) share.
struct Prepared {
    std::string benchmark;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::optional<agent::Task> task;
    std::vector<task1::FaultEntry> fault_log;
    std::string failure; // FunctionalityBroken detail
};

bool has_variants(const Design& design) {
    return std::all_of(design.kernels.begin(), design.kernels.end(),
                       [](const auto& entry) { return !entry.second.variants.empty(); });
}

Prepared prepare(const bench::Benchmark& benchmark, std::size_t rep, const RunConfig& config) {
    Prepared p;
    p.benchmark = benchmark.name;
    p.rep = rep;
    p.seed = derive_seed(config.seed, fmt::format("{}#{}", benchmark.name, rep));

    Design design;
    EvalResult baseline;
    if (has_variants(benchmark.design)) {
        design = benchmark.design;
        baseline = evaluate(design, task1::greedy_configuration(design));
    } else {
        try {
            auto result = task1::optimize_bottom_up(benchmark.design, {config.k, config.fault_rate, p.seed});
            design = std::move(result.design);
            baseline = result.baseline;
            p.fault_log = std::move(result.fault_log);
        } catch (const task1::FunctionalityBroken& e) {
            p.fault_log = e.log();
            p.failure = e.what();
            return p;
        }
    }
    p.task = agent::Task{benchmark.name, std::move(design),
                         task1::derive_area_target(baseline.area, config.area_target_frac), p.seed};
    return p;
}

RunRecord execute(const Prepared& prepared, const std::string& policy_spec, const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    auto policy = agent::make_policy(policy_spec, config.ilp);

    RunRecord record;
    record.benchmark = prepared.benchmark;
    record.policy = policy->id();
    record.seed = prepared.seed;
    record.rep = prepared.rep;
    record.fault_log = prepared.fault_log;
    for (auto kind : agent::kActionKinds) {
        record.actions_by_kind[std::string(agent::to_string(kind))] = 0;
    }

    if (!prepared.task) {
        record.outcome = std::string(agent::to_string(agent::FailureReason::FunctionalityBroken));
        record.detail = prepared.failure;
    } else {
        const auto& task = *prepared.task;
        record.area_target = task.area_target;
        record.task_message = agent::task_message(task);
        auto result = agent::run(*policy, task, config.budget);
        record.outcome = agent::outcome_label(result.outcome);
        if (const auto* success = std::get_if<agent::Success>(&result.outcome)) {
            record.configuration = success->configuration;
            record.final_result = success->result;
            record.met_target = success->met_target;
        } else {
            record.detail = std::get<agent::Failure>(result.outcome).detail;
        }
        for (const auto& entry : result.transcript.entries) {
            ++record.actions_by_kind[std::string(agent::to_string(agent::kind_of(entry.action)))];
        }
        record.transcript = std::move(result.transcript);
    }
    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; the first exception
/// is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& worker : workers) {
        worker.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace

std::vector<RunRecord> run_experiment(const RunConfig& config) {
    if (config.benchmarks.empty() || config.policies.empty()) {
        throw std::invalid_argument("need at least one benchmark and one policy");
    }
    if (config.reps == 0) {
        throw std::invalid_argument("repetitions must be positive");
    }
    if (!(config.fault_rate >= 0.0 && config.fault_rate <= 1.0)) {
        throw std::invalid_argument("fault rate must be within [0, 1]");
    }
    if (!(config.area_target_frac > 0.0)) {
        throw std::invalid_argument("area target fraction must be positive");
    }
    // Resolve everything up front so configuration errors surface before any run.
    std::vector<bench::Benchmark> benchmarks;
    for (const auto& name : config.benchmarks) {
        benchmarks.push_back(bench::resolve(name));
    }
    for (const auto& spec : config.policies) {
        agent::make_policy(spec, config.ilp);
    }

    std::vector<Prepared> prepared(benchmarks.size() * config.reps);
    parallel_for(prepared.size(), config.jobs, [&](std::size_t i) {
        prepared[i] = prepare(benchmarks[i / config.reps], i % config.reps, config);
    });

    std::vector<RunRecord> records(prepared.size() * config.policies.size());
    parallel_for(records.size(), config.jobs, [&](std::size_t i) {
        records[i] = execute(prepared[i / config.policies.size()], config.policies[i % config.policies.size()],
                             config);
    });

    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.benchmark, a.policy, a.seed, a.rep) < std::tie(b.benchmark, b.policy, b.seed, b.rep);
    });
    return records;
}

// Serialization -------------------------------------------------------------

json to_json(const RunRecord& record) {
    json faults = json::array();
    for (const auto& f : record.fault_log) {
        faults.push_back({{"kernel", f.kernel}, {"attempt", f.attempt}, {"repaired", f.repaired}});
    }
    json j{{"run_id", record.run_id()},
           {"benchmark", record.benchmark},
           {"policy", record.policy},
           {"seed", record.seed},
           {"rep", record.rep},
           {"outcome", record.outcome},
           {"actions_by_kind", record.actions_by_kind},
           {"actions", record.action_count()},
           {"area_target", area_json(record.area_target)},
           {"met_target", record.met_target},
           {"choice", record.configuration ? to_json(*record.configuration) : json(nullptr)},
           {"area", record.final_result ? area_json(record.final_result->area) : json(nullptr)},
           {"latency", record.final_result ? json(record.final_result->latency) : json(nullptr)},
           {"fault_log", std::move(faults)}};
    if (!record.detail.empty()) {
        j["detail"] = record.detail;
    }
    return j;
}

RunRecord record_from_json(const json& j) {
    using namespace json_detail;
    const std::string path = "run";
    RunRecord r;
    r.benchmark = get_string(require(j, path, "benchmark"), "run.benchmark");
    r.policy = get_string(require(j, path, "policy"), "run.policy");
    const auto& seed = require(j, path, "seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
        throw ParseError("run.seed: expected an integer");
    }
    r.seed = seed.get<std::uint64_t>();
    r.rep = static_cast<std::size_t>(get_uint32(require(j, path, "rep"), "run.rep"));
    r.outcome = get_string(require(j, path, "outcome"), "run.outcome");
    if (auto it = j.find("detail"); it != j.end()) {
        r.detail = get_string(*it, "run.detail");
    }
    if (auto it = j.find("actions_by_kind"); it != j.end()) {
        if (!it->is_object()) {
            throw ParseError("run.actions_by_kind: expected an object");
        }
        for (const auto& [kind, count] : it->items()) {
            r.actions_by_kind[kind] = get_uint32(count, "run.actions_by_kind." + kind);
        }
    }
    r.area_target = get_area(require(j, path, "area_target"), "run.area_target");
    const auto& met = require(j, path, "met_target");
    if (!met.is_boolean()) {
        throw ParseError("run.met_target: expected a boolean");
    }
    r.met_target = met.get<bool>();
    if (auto it = j.find("choice"); it != j.end() && !it->is_null()) {
        r.configuration = configuration_from_json(*it, "run.choice");
    }
    const auto area = j.find("area");
    const auto latency = j.find("latency");
    if (area != j.end() && !area->is_null() && latency != j.end() && !latency->is_null()) {
        r.final_result = EvalResult{get_int(*latency, "run.latency"), get_area(*area, "run.area")};
    }
    if (auto it = j.find("fault_log"); it != j.end() && it->is_array()) {
        for (const auto& f : *it) {
            r.fault_log.push_back({get_string(require(f, "run.fault_log", "kernel"), "run.fault_log.kernel"),
                                   static_cast<int>(get_int(require(f, "run.fault_log", "attempt"),
                                                            "run.fault_log.attempt")),
                                   require(f, "run.fault_log", "repaired").get<bool>()});
        }
    }
    if (r.met_target && !(r.final_result && r.final_result->area <= r.area_target)) {
        throw ParseError(fmt::format("run {}: met_target disagrees with area and target", r.run_id()));
    }
    return r;
}

std::vector<RunRecord> load_runs(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("{}: cannot open runs file", path.string()));
    }
    std::vector<RunRecord> records;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto origin = fmt::format("{}:{}", path.string(), number);
        try {
            records.push_back(record_from_json(parse_json_text(line, origin)));
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("{}: {}", origin, e.what()));
        }
    }
    return records;
}

// Scoring -------------------------------------------------------------------

const ScoreRow* ScoreTable::find(const std::string& benchmark, const std::string& policy) const {
    for (const auto& row : rows) {
        if (row.benchmark == benchmark && row.policy == policy) {
            return &row;
        }
    }
    return nullptr;
}

ScoreTable score(const std::vector<RunRecord>& records) {
    if (records.empty()) {
        throw EmptyInput("no run records to score");
    }
    std::map<std::pair<std::string, std::string>, ScoreRow> rows;
    std::map<std::string, std::vector<const RunRecord*>> by_benchmark;
    for (const auto& r : records) {
        auto& row = rows[{r.benchmark, r.policy}];
        row.benchmark = r.benchmark;
        row.policy = r.policy;
        ++row.runs;
        if (r.success()) {
            ++row.successes;
        }
        if (r.success() && r.met_target) {
            ++row.runs_meeting_target;
        }
        by_benchmark[r.benchmark].push_back(&r);
    }

    for (const auto& [benchmark, runs] : by_benchmark) {
        constexpr auto kInf = std::numeric_limits<Cycles>::max();
        Cycles best_latency = kInf;
        for (const auto* r : runs) {
            if (r->success() && r->met_target) {
                best_latency = std::min(best_latency, r->final_result->latency);
            }
        }
        if (best_latency != kInf) {
            for (const auto* r : runs) {
                if (r->success() && r->met_target && r->final_result->latency == best_latency) {
                    ++rows[{benchmark, r->policy}].scenario1_points;
                }
            }
            continue;
        }
        std::optional<Area> best_area;
        for (const auto* r : runs) {
            if (r->success() && r->final_result && (!best_area || r->final_result->area < *best_area)) {
                best_area = r->final_result->area;
            }
        }
        for (const auto* r : runs) {
            if (best_area && r->success() && r->final_result && r->final_result->area == *best_area) {
                ++rows[{benchmark, r->policy}].scenario2_points;
            }
        }
    }

    ScoreTable table;
    for (auto& [key, row] : rows) {
        table.rows.push_back(std::move(row));
    }
    return table;
}

// Reports -------------------------------------------------------------------

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("{}: cannot open for writing", path.string()));
    }
    out << content;
    if (!out) {
        throw IoError(fmt::format("{}: write failed", path.string()));
    }
}

std::string fixed(double value) {
    return fmt::format("{:.3f}", value);
}

} // namespace

std::string summary_csv(const std::vector<RunRecord>& records, const ScoreTable& table) {
    std::string out =
        "benchmark,policy,runs,success_rate,mean_inspect,mean_solve_ilp,mean_synthesize,mean_select,"
        "mean_area,min_area,max_area,mean_latency,min_latency,max_latency,runs_meeting_target,"
        "scenario1_points,scenario2_points\n";
    for (const auto& row : table.rows) {
        std::map<std::string, double> actions;
        double area_sum = 0;
        double latency_sum = 0;
        std::optional<Area> min_area;
        std::optional<Area> max_area;
        std::optional<Cycles> min_latency;
        std::optional<Cycles> max_latency;
        std::size_t n = 0;
        std::size_t measured = 0;
        for (const auto& r : records) {
            if (r.benchmark != row.benchmark || r.policy != row.policy) {
                continue;
            }
            ++n;
            for (const auto& [kind, count] : r.actions_by_kind) {
                actions[kind] += static_cast<double>(count);
            }
            if (r.success() && r.final_result) {
                const auto& f = *r.final_result;
                ++measured;
                area_sum += f.area.units();
                latency_sum += static_cast<double>(f.latency);
                min_area = min_area ? std::min(*min_area, f.area) : f.area;
                max_area = max_area ? std::max(*max_area, f.area) : f.area;
                min_latency = min_latency ? std::min(*min_latency, f.latency) : f.latency;
                max_latency = max_latency ? std::max(*max_latency, f.latency) : f.latency;
            }
        }
        auto mean_action = [&](std::string_view kind) {
            const auto it = actions.find(std::string(kind));
            return fixed(it == actions.end() ? 0.0 : it->second / static_cast<double>(n));
        };
        const auto empty = std::string();
        out += fmt::format(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", row.benchmark, row.policy, row.runs,
            fixed(static_cast<double>(row.successes) / static_cast<double>(row.runs)), mean_action("inspect"),
            mean_action("solve_ilp"), mean_action("synthesize"), mean_action("select"),
            measured ? fixed(area_sum / static_cast<double>(measured)) : empty,
            min_area ? min_area->to_string() : empty, max_area ? max_area->to_string() : empty,
            measured ? fixed(latency_sum / static_cast<double>(measured)) : empty,
            min_latency ? std::to_string(*min_latency) : empty, max_latency ? std::to_string(*max_latency) : empty,
            row.runs_meeting_target, row.scenario1_points, row.scenario2_points);
    }
    return out;
}

void report(const std::vector<RunRecord>& records, const ScoreTable& table, const std::filesystem::path& dir) {
    if (records.empty()) {
        throw EmptyInput("no run records to report");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir / "transcripts", ec);
    if (ec) {
        throw IoError(fmt::format("{}: {}", (dir / "transcripts").string(), ec.message()));
    }

    write_file(dir / "summary.csv", summary_csv(records, table));

    std::string runs;
    std::string timing = "run_id,wall_seconds\n";
    for (const auto& r : records) {
        runs += to_json(r).dump() + "\n";
        timing += fmt::format("{},{:.6f}\n", r.run_id(), r.wall_seconds);

        std::string transcript;
        if (!r.task_message.is_null()) {
            transcript += r.task_message.dump() + "\n";
        }
        if (r.transcript) {
            for (const auto& e : r.transcript->entries) {
                transcript += json{{"step", e.step},
                                   {"action", agent::to_json(e.action)},
                                   {"observation", agent::to_json(e.observation)},
                                   {"chars", e.chars}}
                                  .dump() +
                              "\n";
            }
        }
        transcript += json{{"type", "outcome"}, {"outcome", r.outcome}, {"detail", r.detail}}.dump() + "\n";
        write_file(dir / "transcripts" / (r.run_id() + ".jsonl"), transcript);
    }
    write_file(dir / "runs.jsonl", runs);
    write_file(dir / "timing.csv", timing);
}

} // namespace hlsdse::experiment

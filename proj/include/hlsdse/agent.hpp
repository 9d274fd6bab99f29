// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hlsdse/design.hpp"
#include "hlsdse/ilp.hpp"
#include "hlsdse/latency.hpp"

namespace hlsdse::agent {

// Actions ----------------------------------------------------------------

struct Inspect {
    std::string kernel;
    bool operator==(const Inspect&) const = default;
};
struct SolveIlp {
    ilp::ObjectiveSpec objective;
    LatencyModel latency_model;
    bool operator==(const SolveIlp&) const = default;
};
struct Synthesize {
    Configuration configuration;
    bool operator==(const Synthesize&) const = default;
};
struct Select {
    Configuration configuration;
    bool operator==(const Select&) const = default;
};
using Action = std::variant<Inspect, SolveIlp, Synthesize, Select>;

enum class ActionKind { Inspect, SolveIlp, Synthesize, Select };
inline constexpr ActionKind kActionKinds[] = {ActionKind::Inspect, ActionKind::SolveIlp, ActionKind::Synthesize,
                                              ActionKind::Select};

ActionKind kind_of(const Action& action);
std::string_view to_string(ActionKind kind); // inspect, solve_ilp, synthesize, select

// Observations -----------------------------------------------------------

struct KernelView {
    std::string kernel;
    KernelSource source;
    std::optional<std::string> body_summary;
    std::vector<std::string> children;
    std::vector<KernelVariant> variants;
};
struct IlpOutcome {
    ilp::IlpSolution solution; // status Infeasible carries no configuration
    ilp::ObjectiveSpec objective;
    LatencyModel latency_model;
};
struct SynthResult {
    Configuration configuration;
    EvalResult result;
};
struct Ack {};
using Observation = std::variant<KernelView, IlpOutcome, SynthResult, Ack>;

// Wire format --------------------------------------------------------------
//   {"inspect": {"kernel": id}}
//   {"solve_ilp": {"mode": "constrained"|"lagrangian", "alpha": x,
//                  "latency_model": name, "area_target": x}}   (all optional)
//   {"synthesize": {"choice": {id: index, ...}}}
//   {"select": {"choice": {id: index, ...}}}

nlohmann::json to_json(const Action& action);
/// Throws ParseError. A solve_ilp without area_target uses `default_target`.
Action action_from_json(const nlohmann::json& j, Area default_target);
nlohmann::json to_json(const Observation& observation);

// Session ----------------------------------------------------------------

struct Budget {
    std::size_t max_actions = 40;
    std::size_t max_transcript_chars = 200'000;
};

/// Consecutive invalid actions tolerated before the session fails.
inline constexpr int kMaxConsecutiveInvalid = 3;

struct Task {
    std::string design_id;
    Design design; // variants installed
    Area area_target;
    std::uint64_t seed = 0;
};

/// Opening message of every session; its size counts toward the transcript.
nlohmann::json task_message(const Task& task);

struct TranscriptEntry {
    std::size_t step = 0; // 1-based
    Action action;
    Observation observation;
    std::size_t chars = 0; // cumulative, including the task message
};

struct Transcript {
    std::string design_id;
    std::uint64_t seed = 0;
    std::string policy_id;
    std::vector<TranscriptEntry> entries;

    std::size_t chars() const { return entries.empty() ? initial_chars : entries.back().chars; }
    std::size_t initial_chars = 0;
};

enum class FailureReason { ContextExceeded, BudgetExhausted, PolicyError, FunctionalityBroken };
std::string_view to_string(FailureReason reason);

struct Success {
    Configuration configuration;
    EvalResult result;
    bool met_target = false;
};
struct Failure {
    FailureReason reason = FailureReason::PolicyError;
    std::string detail;
};
using Outcome = std::variant<Success, Failure>;

/// Outcome label: "Success" or the failure reason.
std::string outcome_label(const Outcome& outcome);

class Session {
public:
    Session(Task task, Budget budget, std::string policy_id);

    /// Validates and executes one action. Throws SessionTerminated once the
    /// session has ended and InvalidAction for an action that does not fit
    /// the design (the third in a row also ends the session).
    Observation step(const Action& action);

    /// Counts an unusable policy response that never became an action.
    void reject(const std::string& reason);
    void fail(FailureReason reason, std::string detail);

    bool terminated() const { return outcome_.has_value(); }
    const std::optional<Outcome>& outcome() const { return outcome_; }
    const Transcript& transcript() const { return transcript_; }
    const Task& task() const { return task_; }
    const Budget& budget() const { return budget_; }

private:
    void validate(const Action& action) const;
    Observation execute(const Action& action);

    Task task_;
    Budget budget_;
    SystemEvaluator evaluator_;
    Transcript transcript_;
    std::optional<Outcome> outcome_;
    int consecutive_invalid_ = 0;
};

// Policies ---------------------------------------------------------------

class Policy {
public:
    virtual ~Policy() = default;

    virtual std::string id() const = 0;
    virtual void begin(const Task& task) = 0;
    /// May throw InvalidAction (an unusable response) or PolicyError (the
    /// policy cannot continue).
    virtual Action next_action(const Transcript& transcript) = 0;
    virtual void notify_invalid(const std::string& /*reason*/) {}
};

struct RunResult {
    Outcome outcome;
    Transcript transcript;
};

/// Drives `policy` until the session ends. Never throws for policy
/// misbehaviour; that becomes a Failure outcome.
RunResult run(Policy& policy, const Task& task, const Budget& budget = {});

/// Replays recorded actions against a fresh session.
std::vector<Observation> replay(const Task& task, const Budget& budget, const std::vector<Action>& actions);

} // namespace hlsdse::agent

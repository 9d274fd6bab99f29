// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>

#include "hlsdse/agent.hpp"

namespace hlsdse::agent {

/// Selects the exhaustive optimum (best feasible, else minimum area) in one
/// action.
class OraclePolicy : public Policy {
public:
    std::string id() const override { return "oracle"; }
    void begin(const Task& task) override;
    Action next_action(const Transcript& transcript) override;

private:
    Configuration answer_;
};

struct IlpSettings {
    LatencyModel latency_model;
    ilp::ObjectiveMode mode = ilp::ObjectiveMode::ConstrainedArea;
    ilp::Alpha alpha;
    ilp::RelaxOptions relax;
};

/// Synthesize the fastest configuration, solve the ILP, select its answer.
/// An infeasible ILP is retried with a relaxed area target; when retries run
/// out the fastest configuration is selected.
class IlpFirstPolicy : public Policy {
public:
    explicit IlpFirstPolicy(IlpSettings settings = {}) : settings_(settings) {}

    std::string id() const override;
    void begin(const Task& task) override;
    Action next_action(const Transcript& transcript) override;

private:
    Action solve_action() const;

    IlpSettings settings_;
    Configuration greedy_;
    Area target_;
    int retries_ = 0;
};

/// Greedy start, inspect every kernel, then shrink the largest kernel one
/// variant at a time while over the target. Falls back to the ILP only when
/// no swap is left, then selects the best configuration it has synthesized.
class TrialAndErrorPolicy : public Policy {
public:
    explicit TrialAndErrorPolicy(IlpSettings settings = {}) : settings_(settings) {}

    std::string id() const override;
    void begin(const Task& task) override;
    Action next_action(const Transcript& transcript) override;

private:
    enum class Phase { Start, Inspecting, Swapping, Solving, Done };

    std::optional<Action> next_swap();
    Action select_best() const;

    IlpSettings settings_;
    Design design_;
    Area task_target_;
    Area ilp_target_;
    Phase phase_ = Phase::Start;
    Configuration current_;
    std::vector<std::string> inspect_queue_;
    std::optional<SynthResult> best_;
    std::optional<SynthResult> last_;
    int retries_ = 0;
};

/// Runs `/bin/sh -c command` and exchanges one JSON object per line over its
/// standard input and output.
class ExternalPolicy : public Policy {
public:
    explicit ExternalPolicy(std::string command,
                            std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ~ExternalPolicy() override;
    ExternalPolicy(const ExternalPolicy&) = delete;
    ExternalPolicy& operator=(const ExternalPolicy&) = delete;

    std::string id() const override { return "external:" + command_; }
    void begin(const Task& task) override;
    Action next_action(const Transcript& transcript) override;
    void notify_invalid(const std::string& reason) override;

private:
    void start();
    void stop();
    void send(const nlohmann::json& message);
    std::string read_line();

    std::string command_;
    std::chrono::milliseconds timeout_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::size_t sent_entries_ = 0;
    Area target_;
};

/// oracle | ilp-first | trial-error | external:CMD. Throws std::invalid_argument.
std::unique_ptr<Policy> make_policy(std::string_view spec, const IlpSettings& settings = {});

/// The three scripted policies, in report order.
inline constexpr std::string_view kScriptedPolicies[] = {"oracle", "ilp-first", "trial-error"};

} // namespace hlsdse::agent

// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/policies.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"
#include "hlsdse/task1.hpp"

namespace hlsdse::agent {

namespace {

/// "ilp-first", or "ilp-first[sum-all,lagrangian]" when not the defaults.
std::string decorated(std::string_view base, const IlpSettings& s) {
    std::vector<std::string> tags;
    if (s.latency_model.kind != LatencyModelKind::Correct || s.latency_model.include_top_in_max) {
        tags.emplace_back(to_string(s.latency_model.kind));
        if (s.latency_model.include_top_in_max) {
            tags.back() += "+top";
        }
    }
    if (s.mode != ilp::ObjectiveMode::ConstrainedArea) {
        tags.push_back(fmt::format("{}@{}", ilp::to_string(s.mode), s.alpha.value()));
    }
    if (tags.empty()) {
        return std::string(base);
    }
    return fmt::format("{}[{}]", base, fmt::join(tags, ","));
}

const Observation* last_observation(const Transcript& transcript) {
    return transcript.entries.empty() ? nullptr : &transcript.entries.back().observation;
}

SolveIlp solve_action(const IlpSettings& s, Area target) {
    ilp::ObjectiveSpec objective{s.mode, target, s.alpha};
    return SolveIlp{objective, s.latency_model};
}

} // namespace

// Oracle ------------------------------------------------------------------

void OraclePolicy::begin(const Task& task) {
    const auto report = brute_force_optimum(task.design, task.area_target);
    answer_ = report.best_feasible ? report.best_feasible->configuration : report.min_area.configuration;
}

Action OraclePolicy::next_action(const Transcript&) {
    return Select{answer_};
}

// ILP first -----------------------------------------------------------------

std::string IlpFirstPolicy::id() const {
    return decorated("ilp-first", settings_);
}

void IlpFirstPolicy::begin(const Task& task) {
    greedy_ = task1::greedy_configuration(task.design);
    target_ = task.area_target;
    retries_ = 0;
}

Action IlpFirstPolicy::solve_action() const {
    return agent::solve_action(settings_, target_);
}

Action IlpFirstPolicy::next_action(const Transcript& transcript) {
    const auto* last = last_observation(transcript);
    if (last == nullptr) {
        return Synthesize{greedy_};
    }
    if (std::holds_alternative<SynthResult>(*last)) {
        return solve_action();
    }
    if (const auto* outcome = std::get_if<IlpOutcome>(last)) {
        if (outcome->solution.optimal()) {
            return Select{*outcome->solution.configuration};
        }
        if (retries_ < settings_.relax.max_retries) {
            target_ = ilp::relax_area_target(target_, settings_.relax.step_fraction);
            ++retries_;
            return solve_action();
        }
        return Select{greedy_};
    }
    throw PolicyError("ilp-first: unexpected observation");
}

// Trial and error -----------------------------------------------------------

std::string TrialAndErrorPolicy::id() const {
    return decorated("trial-error", settings_);
}

void TrialAndErrorPolicy::begin(const Task& task) {
    design_ = task.design;
    task_target_ = task.area_target;
    ilp_target_ = task.area_target;
    phase_ = Phase::Start;
    current_ = task1::greedy_configuration(design_);
    inspect_queue_.clear();
    best_.reset();
    last_.reset();
    retries_ = 0;
}

Action TrialAndErrorPolicy::select_best() const {
    return Select{best_ ? best_->configuration : current_};
}

std::optional<Action> TrialAndErrorPolicy::next_swap() {
    // Largest current area first; ties by kernel id.
    std::vector<std::pair<Area, std::string>> ranked;
    for (const auto& [id, kernel] : design_.kernels) {
        ranked.emplace_back(kernel.variants[current_.at(id)].area, id);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [area, id] : ranked) {
        const auto& variants = design_.kernel(id).variants;
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < variants.size(); ++i) {
            if (variants[i].area >= area) {
                continue;
            }
            if (!pick || std::tie(variants[*pick].area, variants[i].latency) <
                             std::tie(variants[i].area, variants[*pick].latency)) {
                pick = i;
            }
        }
        if (pick) {
            current_.choice[id] = *pick;
            return Synthesize{current_};
        }
    }
    return std::nullopt;
}

Action TrialAndErrorPolicy::next_action(const Transcript& transcript) {
    const auto* last = last_observation(transcript);
    if (last != nullptr) {
        if (const auto* synth = std::get_if<SynthResult>(last)) {
            last_ = *synth;
            const auto& r = synth->result;
            const bool meets = r.area <= task_target_;
            bool better = !best_;
            if (best_) {
                const auto& b = best_->result;
                const bool best_meets = b.area <= task_target_;
                if (meets != best_meets) {
                    better = meets;
                } else if (meets) {
                    better = std::tie(r.latency, r.area, synth->configuration) <
                             std::tie(b.latency, b.area, best_->configuration);
                } else {
                    better = std::tie(r.area, r.latency, synth->configuration) <
                             std::tie(b.area, b.latency, best_->configuration);
                }
            }
            if (better) {
                best_ = *synth;
            }
        }
    }

    switch (phase_) {
    case Phase::Start:
        phase_ = Phase::Inspecting;
        {
            std::vector<std::pair<Area, std::string>> ranked;
            for (const auto& [id, kernel] : design_.kernels) {
                ranked.emplace_back(kernel.variants[current_.at(id)].area, id);
            }
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            for (auto& [area, id] : ranked) {
                inspect_queue_.push_back(std::move(id));
            }
        }
        return Synthesize{current_};
    case Phase::Inspecting:
        if (!inspect_queue_.empty()) {
            auto kernel = inspect_queue_.front();
            inspect_queue_.erase(inspect_queue_.begin());
            return Inspect{std::move(kernel)};
        }
        phase_ = Phase::Swapping;
        [[fallthrough]];
    case Phase::Swapping:
        if (last_ && last_->result.area <= task_target_) {
            phase_ = Phase::Done;
            return select_best();
        }
        if (auto swap = next_swap()) {
            return *swap;
        }
        phase_ = Phase::Solving;
        return solve_action(settings_, ilp_target_);
    case Phase::Solving:
        if (const auto* outcome = last ? std::get_if<IlpOutcome>(last) : nullptr) {
            if (outcome->solution.optimal()) {
                phase_ = Phase::Done;
                return Synthesize{*outcome->solution.configuration};
            }
            if (retries_ < settings_.relax.max_retries) {
                ilp_target_ = ilp::relax_area_target(ilp_target_, settings_.relax.step_fraction);
                ++retries_;
                return solve_action(settings_, ilp_target_);
            }
        }
        phase_ = Phase::Done;
        return select_best();
    case Phase::Done:
        return select_best();
    }
    throw PolicyError("trial-error: unreachable state");
}

// Factory -------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(std::string_view spec, const IlpSettings& settings) {
    if (spec == "oracle") {
        return std::make_unique<OraclePolicy>();
    }
    if (spec == "ilp-first") {
        return std::make_unique<IlpFirstPolicy>(settings);
    }
    if (spec == "trial-error") {
        return std::make_unique<TrialAndErrorPolicy>(settings);
    }
    constexpr std::string_view external = "external:";
    if (spec.starts_with(external) && spec.size() > external.size()) {
        return std::make_unique<ExternalPolicy>(std::string(spec.substr(external.size())));
    }
    throw std::invalid_argument(
        fmt::format("unknown policy '{}' (expected oracle, ilp-first, trial-error or external:CMD)", spec));
}

} // namespace hlsdse::agent

// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/agent.hpp"

#include <fmt/format.h>

#include "hlsdse/design_json.hpp"
#include "hlsdse/errors.hpp"

namespace hlsdse::agent {

using nlohmann::json;

ActionKind kind_of(const Action& action) {
    return static_cast<ActionKind>(action.index());
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
    case ActionKind::Inspect: return "inspect";
    case ActionKind::SolveIlp: return "solve_ilp";
    case ActionKind::Synthesize: return "synthesize";
    case ActionKind::Select: return "select";
    }
    return "unknown";
}

std::string_view to_string(FailureReason reason) {
    switch (reason) {
    case FailureReason::ContextExceeded: return "ContextExceeded";
    case FailureReason::BudgetExhausted: return "BudgetExhausted";
    case FailureReason::PolicyError: return "PolicyError";
    case FailureReason::FunctionalityBroken: return "FunctionalityBroken";
    }
    return "unknown";
}

std::string outcome_label(const Outcome& outcome) {
    if (std::holds_alternative<Success>(outcome)) {
        return "Success";
    }
    return std::string(to_string(std::get<Failure>(outcome).reason));
}

// Wire format ---------------------------------------------------------------

namespace {

json alpha_json(const ilp::Alpha& alpha) {
    if (alpha.denominator() == 1) {
        return alpha.numerator();
    }
    return alpha.value();
}

json choice_json(const Configuration& config) {
    return json{{"choice", to_json(config)}};
}

} // namespace

json to_json(const Action& action) {
    struct Visitor {
        json operator()(const Inspect& a) const { return {{"inspect", {{"kernel", a.kernel}}}}; }
        json operator()(const SolveIlp& a) const {
            json body{{"mode", ilp::to_string(a.objective.mode)},
                      {"latency_model", to_string(a.latency_model.kind)},
                      {"area_target", area_json(a.objective.area_target)}};
            if (a.objective.mode == ilp::ObjectiveMode::Lagrangian) {
                body["alpha"] = alpha_json(a.objective.alpha);
            }
            if (a.latency_model.include_top_in_max) {
                body["include_top_in_max"] = true;
            }
            return {{"solve_ilp", std::move(body)}};
        }
        json operator()(const Synthesize& a) const { return {{"synthesize", choice_json(a.configuration)}}; }
        json operator()(const Select& a) const { return {{"select", choice_json(a.configuration)}}; }
    };
    return std::visit(Visitor{}, action);
}

Action action_from_json(const json& j, Area default_target) {
    using namespace json_detail;
    if (!j.is_object() || j.size() != 1) {
        throw ParseError("action: expected an object with exactly one of inspect/solve_ilp/synthesize/select");
    }
    const auto it = j.begin();
    const std::string key = it.key();
    const json& body = it.value();
    const auto path = "action." + key;
    if (key == "inspect") {
        reject_unknown(body, path, {"kernel"});
        return Inspect{get_string(require(body, path, "kernel"), path + ".kernel")};
    }
    if (key == "solve_ilp") {
        reject_unknown(body, path, {"mode", "alpha", "latency_model", "area_target", "include_top_in_max"});
        SolveIlp action;
        action.objective.area_target = default_target;
        if (auto f = body.find("mode"); f != body.end()) {
            const auto mode = ilp::parse_objective_mode(get_string(*f, path + ".mode"));
            if (!mode) {
                throw ParseError(fmt::format("{}.mode: expected constrained or lagrangian", path));
            }
            action.objective.mode = *mode;
        }
        if (auto f = body.find("alpha"); f != body.end()) {
            if (!f->is_number() || !(f->get<double>() > 0.0)) {
                throw ParseError(fmt::format("{}.alpha: expected a positive number", path));
            }
            action.objective.alpha = ilp::Alpha::from_double(f->get<double>());
        }
        if (auto f = body.find("latency_model"); f != body.end()) {
            const auto kind = parse_latency_model(get_string(*f, path + ".latency_model"));
            if (!kind) {
                throw ParseError(fmt::format("{}.latency_model: unknown latency model", path));
            }
            action.latency_model.kind = *kind;
        }
        if (auto f = body.find("include_top_in_max"); f != body.end()) {
            if (!f->is_boolean()) {
                throw ParseError(fmt::format("{}.include_top_in_max: expected a boolean", path));
            }
            action.latency_model.include_top_in_max = f->get<bool>();
        }
        if (auto f = body.find("area_target"); f != body.end()) {
            action.objective.area_target = get_area(*f, path + ".area_target");
        }
        return action;
    }
    if (key == "synthesize" || key == "select") {
        reject_unknown(body, path, {"choice"});
        auto config = configuration_from_json(require(body, path, "choice"), path + ".choice");
        if (key == "synthesize") {
            return Synthesize{std::move(config)};
        }
        return Select{std::move(config)};
    }
    throw ParseError(fmt::format("action: unknown kind '{}'", key));
}

json to_json(const Observation& observation) {
    struct Visitor {
        json operator()(const KernelView& v) const {
            json variants = json::array();
            for (const auto& variant : v.variants) {
                variants.push_back({{"index", variant.index},
                                    {"area", area_json(variant.area)},
                                    {"latency", variant.latency},
                                    {"pragma", to_json(variant.pragma)}});
            }
            return {{"kind", "kernel_view"},
                    {"kernel", v.kernel},
                    {"source", to_json(v.source)},
                    {"body", v.body_summary ? json(*v.body_summary) : json(nullptr)},
                    {"children", v.children},
                    {"variants", std::move(variants)}};
        }
        json operator()(const IlpOutcome& o) const {
            json j{{"kind", "ilp_outcome"},
                   {"status", o.solution.optimal() ? "optimal" : "infeasible"},
                   {"mode", ilp::to_string(o.objective.mode)},
                   {"latency_model", to_string(o.latency_model.kind)},
                   {"area_target", area_json(o.objective.area_target)},
                   {"nodes", o.solution.nodes}};
            if (o.solution.optimal()) {
                j["choice"] = to_json(*o.solution.configuration);
                j["objective"] = o.solution.objective;
                j["predicted_latency"] = o.solution.predicted_latency;
                j["predicted_area"] = area_json(o.solution.predicted_area);
            }
            return j;
        }
        json operator()(const SynthResult& r) const {
            return {{"kind", "synth_result"},
                    {"choice", to_json(r.configuration)},
                    {"area", area_json(r.result.area)},
                    {"latency", r.result.latency}};
        }
        json operator()(const Ack&) const { return {{"kind", "ack"}}; }
    };
    return std::visit(Visitor{}, observation);
}

json task_message(const Task& task) {
    json kernels = json::array();
    for (const auto& [id, kernel] : task.design.kernels) {
        json variants = json::array();
        for (const auto& v : kernel.variants) {
            variants.push_back({{"area", area_json(v.area)}, {"latency", v.latency}});
        }
        kernels.push_back({{"id", id},
                           {"body", kernel.body ? json(kernel.body->summary()) : json(nullptr)},
                           {"children", direct_callees(kernel)},
                           {"variants", std::move(variants)}});
    }
    return json{{"type", "task"},
                {"design_summary", {{"name", task.design_id}, {"top", task.design.top}, {"kernels", kernels}}},
                {"area_target", area_json(task.area_target)}};
}

// Session -----------------------------------------------------------------

Session::Session(Task task, Budget budget, std::string policy_id)
    : task_(std::move(task)), budget_(budget), evaluator_(task_.design) {
    if (budget_.max_actions == 0 || budget_.max_transcript_chars == 0) {
        throw std::invalid_argument("budget limits must be positive");
    }
    transcript_.design_id = task_.design_id;
    transcript_.seed = task_.seed;
    transcript_.policy_id = std::move(policy_id);
    transcript_.initial_chars = task_message(task_).dump().size();
}

void Session::validate(const Action& action) const {
    auto check_config = [this](const Configuration& config) {
        const auto problems = check_configuration(task_.design, config);
        if (!problems.empty()) {
            throw InvalidAction(problems.front());
        }
    };
    if (const auto* a = std::get_if<Inspect>(&action)) {
        if (!task_.design.kernels.contains(a->kernel)) {
            throw InvalidAction(fmt::format("no kernel '{}'", a->kernel));
        }
    } else if (const auto* a = std::get_if<Synthesize>(&action)) {
        check_config(a->configuration);
    } else if (const auto* a = std::get_if<Select>(&action)) {
        check_config(a->configuration);
    } else if (const auto* a = std::get_if<SolveIlp>(&action)) {
        if (a->objective.area_target < Area{}) {
            throw InvalidAction("area target must not be negative");
        }
    }
}

Observation Session::execute(const Action& action) {
    struct Visitor {
        Session& s;
        Observation operator()(const Inspect& a) const {
            const auto& kernel = s.task_.design.kernel(a.kernel);
            KernelView view{kernel.id, kernel.source, std::nullopt, direct_callees(kernel), kernel.variants};
            if (kernel.body) {
                view.body_summary = kernel.body->summary();
            }
            return view;
        }
        Observation operator()(const SolveIlp& a) const {
            const auto model = ilp::build_model(s.task_.design, a.objective, a.latency_model);
            return IlpOutcome{ilp::solve(model), a.objective, a.latency_model};
        }
        Observation operator()(const Synthesize& a) const {
            const auto choice = s.evaluator_.indices(a.configuration);
            return SynthResult{a.configuration, s.evaluator_.evaluate(choice)};
        }
        Observation operator()(const Select&) const { return Ack{}; }
    };
    return std::visit(Visitor{*this}, action);
}

Observation Session::step(const Action& action) {
    if (terminated()) {
        throw SessionTerminated("the session has already ended");
    }
    try {
        validate(action);
    } catch (const InvalidAction& e) {
        reject(e.what());
        throw;
    }
    consecutive_invalid_ = 0;

    auto observation = execute(action);
    const auto chars = transcript_.chars() + to_json(action).dump().size() + to_json(observation).dump().size();
    transcript_.entries.push_back({transcript_.entries.size() + 1, action, observation, chars});

    if (const auto* select = std::get_if<Select>(&action)) {
        const auto result = evaluator_.evaluate(evaluator_.indices(select->configuration));
        outcome_ = Success{select->configuration, result, result.area <= task_.area_target};
    } else if (chars > budget_.max_transcript_chars) {
        fail(FailureReason::ContextExceeded,
             fmt::format("transcript reached {} characters (limit {})", chars, budget_.max_transcript_chars));
    } else if (transcript_.entries.size() >= budget_.max_actions) {
        fail(FailureReason::BudgetExhausted,
             fmt::format("{} actions without a selection", transcript_.entries.size()));
    }
    return observation;
}

void Session::reject(const std::string& reason) {
    if (terminated()) {
        throw SessionTerminated("the session has already ended");
    }
    if (++consecutive_invalid_ >= kMaxConsecutiveInvalid) {
        fail(FailureReason::PolicyError,
             fmt::format("{} consecutive invalid actions; last: {}", consecutive_invalid_, reason));
    }
}

void Session::fail(FailureReason reason, std::string detail) {
    if (!terminated()) {
        outcome_ = Failure{reason, std::move(detail)};
    }
}

RunResult run(Policy& policy, const Task& task, const Budget& budget) {
    Session session(task, budget, policy.id());
    try {
        policy.begin(session.task());
    } catch (const Error& e) {
        session.fail(FailureReason::PolicyError, e.what());
    }
    while (!session.terminated()) {
        std::optional<Action> action;
        try {
            action = policy.next_action(session.transcript());
        } catch (const InvalidAction& e) {
            session.reject(e.what());
            policy.notify_invalid(e.what());
            continue;
        } catch (const Error& e) {
            // PolicyError, or anything else the policy could not recover from.
            session.fail(FailureReason::PolicyError, e.what());
            break;
        }
        try {
            session.step(*action);
        } catch (const InvalidAction& e) {
            policy.notify_invalid(e.what());
        }
    }
    return {*session.outcome(), session.transcript()};
}

std::vector<Observation> replay(const Task& task, const Budget& budget, const std::vector<Action>& actions) {
    Session session(task, budget, "replay");
    std::vector<Observation> observations;
    for (const auto& action : actions) {
        observations.push_back(session.step(action));
    }
    return observations;
}

} // namespace hlsdse::agent

// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/latency.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"

namespace hlsdse {

std::string_view to_string(LatencyModelKind kind) {
    switch (kind) {
    case LatencyModelKind::Correct: return "correct";
    case LatencyModelKind::TopOnly: return "top-only";
    case LatencyModelKind::SumAll: return "sum-all";
    case LatencyModelKind::SumWithMultipliers: return "sum-mult";
    case LatencyModelKind::TopPlusMaxChildren: return "top-plus-max";
    }
    return "unknown";
}

std::optional<LatencyModelKind> parse_latency_model(std::string_view name) {
    for (auto kind : {LatencyModelKind::Correct, LatencyModelKind::TopOnly, LatencyModelKind::SumAll,
                      LatencyModelKind::SumWithMultipliers, LatencyModelKind::TopPlusMaxChildren}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

SystemEvaluator::SystemEvaluator(const Design& design) {
    require_valid(design);
    std::map<std::string, std::size_t> index_of;
    for (const auto& [id, kernel] : design.kernels) {
        index_of.emplace(id, ids_.size());
        ids_.push_back(id);
    }
    top_ = index_of.at(design.top);

    std::vector<const Kernel*> kernels;
    for (const auto& [id, kernel] : design.kernels) {
        kernels.push_back(&kernel);
    }
    latency_.resize(ids_.size());
    area_.resize(ids_.size());
    body_.resize(ids_.size());
    direct_callees_.resize(ids_.size());
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        for (const auto& variant : kernels[k]->variants) {
            latency_[k].push_back(variant.latency);
            area_[k].push_back(variant.area);
        }
        for (const auto& callee : direct_callees(*kernels[k])) {
            direct_callees_[k].push_back(index_of.at(callee));
        }
    }
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        if (kernels[k]->body) {
            body_[k] = compile(*kernels[k]->body);
        }
    }
    for (const auto& id : leaves_first_order(design)) {
        leaves_first_.push_back(index_of.at(id));
    }
}

std::size_t SystemEvaluator::compile(const CompositionNode& node) {
    Node compiled{node.kind(), 0, 1, {}};
    switch (node.kind()) {
    case NodeKind::Call: {
        // ids_ is sorted; validation guarantees the callee exists.
        auto it = std::lower_bound(ids_.begin(), ids_.end(), node.kernel());
        compiled.callee = static_cast<std::size_t>(it - ids_.begin());
        compiled.factor = node.multiplicity();
        break;
    }
    case NodeKind::Loop:
        compiled.factor = node.trip_count();
        break;
    default:
        break;
    }
    for (const auto& child : node.children()) {
        compiled.children.push_back(compile(child));
    }
    nodes_.push_back(std::move(compiled));
    return nodes_.size() - 1;
}

std::vector<std::size_t> SystemEvaluator::indices(const Configuration& config) const {
    std::vector<std::size_t> out;
    out.reserve(ids_.size());
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        auto it = config.choice.find(ids_[k]);
        if (it == config.choice.end() || it->second >= latency_[k].size()) {
            throw ValidationError(fmt::format("configuration has no valid choice for kernel '{}'", ids_[k]));
        }
        out.push_back(it->second);
    }
    if (config.choice.size() != ids_.size()) {
        throw ValidationError("configuration names kernels outside the design");
    }
    return out;
}

Configuration SystemEvaluator::configuration(std::span<const std::size_t> choice) const {
    Configuration config;
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        config.choice.emplace(ids_[k], choice[k]);
    }
    return config;
}

Cycles SystemEvaluator::self_latency(std::size_t kernel, std::span<const std::size_t> choice) const {
    return latency_[kernel][choice[kernel]];
}

Cycles SystemEvaluator::eval_node(std::size_t index, std::span<const Cycles> totals, bool par_as_sum) const {
    const auto& node = nodes_[index];
    switch (node.kind) {
    case NodeKind::Call:
        return node.factor * totals[node.callee];
    case NodeKind::Loop:
        return node.factor * eval_node(node.children.front(), totals, par_as_sum);
    case NodeKind::Seq: {
        Cycles sum = 0;
        for (auto child : node.children) {
            sum += eval_node(child, totals, par_as_sum);
        }
        return sum;
    }
    case NodeKind::Par: {
        Cycles acc = 0;
        for (auto child : node.children) {
            const auto value = eval_node(child, totals, par_as_sum);
            acc = par_as_sum ? acc + value : std::max(acc, value);
        }
        return acc;
    }
    }
    return 0;
}

std::vector<Cycles> SystemEvaluator::totals(std::span<const std::size_t> choice, bool par_as_sum) const {
    std::vector<Cycles> out(ids_.size(), 0);
    for (auto k : leaves_first_) {
        out[k] = self_latency(k, choice) + (body_[k] ? eval_node(*body_[k], out, par_as_sum) : 0);
    }
    return out;
}

std::vector<Cycles> SystemEvaluator::kernel_totals(std::span<const std::size_t> choice) const {
    return totals(choice, false);
}

Cycles SystemEvaluator::latency(std::span<const std::size_t> choice) const {
    return totals(choice, false)[top_];
}

Area SystemEvaluator::area(std::span<const std::size_t> choice) const {
    Area sum;
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        sum += area_[k][choice[k]];
    }
    return sum;
}

Cycles SystemEvaluator::latency(LatencyModel model, std::span<const std::size_t> choice) const {
    switch (model.kind) {
    case LatencyModelKind::Correct:
        return latency(choice);
    case LatencyModelKind::TopOnly:
        return self_latency(top_, choice);
    case LatencyModelKind::SumAll: {
        Cycles sum = 0;
        for (std::size_t k = 0; k < ids_.size(); ++k) {
            sum += self_latency(k, choice);
        }
        return sum;
    }
    case LatencyModelKind::SumWithMultipliers:
        return totals(choice, true)[top_];
    case LatencyModelKind::TopPlusMaxChildren: {
        const auto all = totals(choice, false);
        const auto top_self = self_latency(top_, choice);
        Cycles widest = 0;
        for (auto callee : direct_callees_[top_]) {
            widest = std::max(widest, all[callee]);
        }
        return model.include_top_in_max ? std::max(top_self, widest) : top_self + widest;
    }
    }
    return 0;
}

Cycles eval_latency(const Design& design, const Configuration& config) {
    SystemEvaluator evaluator(design);
    return evaluator.latency(evaluator.indices(config));
}

Area eval_area(const Design& design, const Configuration& config) {
    SystemEvaluator evaluator(design);
    return evaluator.area(evaluator.indices(config));
}

EvalResult evaluate(const Design& design, const Configuration& config) {
    SystemEvaluator evaluator(design);
    return evaluator.evaluate(evaluator.indices(config));
}

Cycles eval_faulty_latency(LatencyModel model, const Design& design, const Configuration& config) {
    SystemEvaluator evaluator(design);
    return evaluator.latency(model, evaluator.indices(config));
}

OracleReport brute_force_optimum(const Design& design, Area area_target, std::uint64_t cap) {
    const SystemEvaluator evaluator(design);
    const auto range = enumerate_configurations(design, cap);

    OracleReport report;
    std::optional<std::pair<EvalResult, std::vector<std::size_t>>> best;
    std::optional<std::pair<EvalResult, std::vector<std::size_t>>> smallest;
    for (auto it = range.begin(); it != range.end(); ++it) {
        ++report.enumerated;
        const auto& choice = it.indices();
        const auto result = evaluator.evaluate(choice);
        // Enumeration is lexicographic, so strict improvement keeps the
        // lexicographically first configuration among exact ties.
        if (result.area <= area_target &&
            (!best || std::tie(result.latency, result.area) < std::tie(best->first.latency, best->first.area))) {
            best.emplace(result, choice);
        }
        if (!smallest ||
            std::tie(result.area, result.latency) < std::tie(smallest->first.area, smallest->first.latency)) {
            smallest.emplace(result, choice);
        }
    }
    if (best) {
        report.best_feasible = ScoredConfiguration{evaluator.configuration(best->second), best->first};
    }
    report.min_area = ScoredConfiguration{evaluator.configuration(smallest->second), smallest->first};
    return report;
}

} // namespace hlsdse

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hlsdse/design.hpp"

namespace hlsdse {

/// The exact series-parallel model plus common incorrect formulations.
enum class LatencyModelKind {
    Correct,            // top + max over parallel branches, sums over sequences
    TopOnly,            // top kernel's own latency
    SumAll,             // every kernel's own latency once
    SumWithMultipliers, // every call counted, parallel branches summed
    TopPlusMaxChildren, // top + max over the totals of top's direct callees
};

struct LatencyModel {
    LatencyModelKind kind = LatencyModelKind::Correct;
    /// TopPlusMaxChildren only: max(top, children...) instead of top + max(children...).
    bool include_top_in_max = false;

    bool operator==(const LatencyModel&) const = default;
};

/// CLI spelling: correct, top-only, sum-all, sum-mult, top-plus-max.
std::string_view to_string(LatencyModelKind kind);
std::optional<LatencyModelKind> parse_latency_model(std::string_view name);

struct EvalResult {
    Cycles latency = 0;
    Area area;

    bool operator==(const EvalResult&) const = default;
};

/// Compiled, index-based view of a valid design for repeated evaluation.
/// Kernels are numbered in id order; choices are variant indices in that order.
class SystemEvaluator {
public:
    explicit SystemEvaluator(const Design& design);

    std::size_t kernel_count() const { return ids_.size(); }
    const std::vector<std::string>& kernel_ids() const { return ids_; }
    std::size_t top() const { return top_; }

    std::vector<std::size_t> indices(const Configuration& config) const;
    Configuration configuration(std::span<const std::size_t> choice) const;

    Cycles latency(std::span<const std::size_t> choice) const;
    Area area(std::span<const std::size_t> choice) const;
    EvalResult evaluate(std::span<const std::size_t> choice) const {
        return {latency(choice), area(choice)};
    }
    Cycles latency(LatencyModel model, std::span<const std::size_t> choice) const;

    /// Self latency plus body latency for every kernel, by kernel index.
    std::vector<Cycles> kernel_totals(std::span<const std::size_t> choice) const;

private:
    struct Node {
        NodeKind kind;
        std::size_t callee = 0;
        std::int64_t factor = 1; // multiplicity or trip count
        std::vector<std::size_t> children;
    };

    std::size_t compile(const CompositionNode& node);
    Cycles eval_node(std::size_t node, std::span<const Cycles> totals, bool par_as_sum) const;
    std::vector<Cycles> totals(std::span<const std::size_t> choice, bool par_as_sum) const;
    Cycles self_latency(std::size_t kernel, std::span<const std::size_t> choice) const;

    std::vector<std::string> ids_;
    std::size_t top_ = 0;
    std::vector<std::vector<Cycles>> latency_;
    std::vector<std::vector<Area>> area_;
    std::vector<std::optional<std::size_t>> body_;
    std::vector<std::vector<std::size_t>> direct_callees_;
    std::vector<std::size_t> leaves_first_;
    std::vector<Node> nodes_;
};

Cycles eval_latency(const Design& design, const Configuration& config);

/// Each kernel's selected area counted once, however often it is called.
Area eval_area(const Design& design, const Configuration& config);

EvalResult evaluate(const Design& design, const Configuration& config);

/// Correct delegates to eval_latency.
Cycles eval_faulty_latency(LatencyModel model, const Design& design, const Configuration& config);

struct ScoredConfiguration {
    Configuration configuration;
    EvalResult result;

    bool operator==(const ScoredConfiguration&) const = default;
};

struct OracleReport {
    /// Latency-minimal among area <= target; ties by smaller area, then
    /// lexicographic configuration.
    std::optional<ScoredConfiguration> best_feasible;
    /// Area-minimal overall; ties by smaller latency, then lexicographic.
    ScoredConfiguration min_area;
    std::uint64_t enumerated = 0;
};

/// Exhaustive ground truth. Throws CapExceeded.
OracleReport brute_force_optimum(const Design& design, Area area_target,
                                 std::uint64_t cap = kDefaultEnumerationCap);

} // namespace hlsdse

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlsdse/area.hpp"

namespace hlsdse {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Unroll factor plus optional pipelining; the provenance of a variant.
struct PragmaConfig {
    std::uint32_t unroll = 1;
    std::optional<std::uint32_t> pipeline_ii; // nullopt = pipeline off

    bool operator==(const PragmaConfig&) const = default;
};

/// Abstract cost descriptor of a kernel, consumed by the synthesizer model.
struct KernelSource {
    std::uint32_t trip_count = 0; // 0 = straight-line code
    Cycles body_latency = 1;      // per iteration, or total when trip_count == 0
    std::uint32_t op_count = 1;
    Area base_area;
    Area op_area = Area::from_units(1);

    bool operator==(const KernelSource&) const = default;
};

struct KernelVariant {
    std::size_t index = 0;
    Area area;
    Cycles latency = 0;
    PragmaConfig pragma;

    bool operator==(const KernelVariant&) const = default;
};

enum class NodeKind { Call, Seq, Par, Loop };

/// Series-parallel body of a kernel. Seq children add, Par children take the
/// max, Loop multiplies its single child by the trip count, and a Call
/// contributes multiplicity times the callee's total latency.
class CompositionNode {
public:
    static CompositionNode call(std::string kernel, std::uint32_t multiplicity = 1);
    static CompositionNode seq(std::vector<CompositionNode> children);
    static CompositionNode par(std::vector<CompositionNode> children);
    static CompositionNode loop(std::uint32_t trip_count, CompositionNode child);

    NodeKind kind() const { return kind_; }
    const std::string& kernel() const { return kernel_; }
    std::uint32_t multiplicity() const { return multiplicity_; }
    std::uint32_t trip_count() const { return trip_count_; }
    const std::vector<CompositionNode>& children() const { return children_; }
    const CompositionNode& child() const { return children_.front(); }

    /// Compact rendering, e.g. "seq(par(A, B), C x2)".
    std::string summary() const;

    bool operator==(const CompositionNode&) const = default;

private:
    CompositionNode() = default;

    NodeKind kind_ = NodeKind::Seq;
    std::string kernel_;
    std::uint32_t multiplicity_ = 1;
    std::uint32_t trip_count_ = 1;
    std::vector<CompositionNode> children_;
};

struct Kernel {
    std::string id;
    std::vector<KernelVariant> variants;
    KernelSource source;
    std::optional<CompositionNode> body; // absent for leaf kernels

    bool operator==(const Kernel&) const = default;
};

struct Design {
    std::map<std::string, Kernel> kernels;
    std::string top;

    const Kernel& kernel(const std::string& id) const;
    bool operator==(const Design&) const = default;
};

/// One variant index per kernel; a kernel's choice applies to all of its call
/// sites. Ordered lexicographically by (kernel id, variant index).
struct Configuration {
    std::map<std::string, std::size_t> choice;

    std::size_t at(const std::string& kernel) const { return choice.at(kernel); }
    auto operator<=>(const Configuration&) const = default;
};

enum class ViolationKind {
    MissingTop,
    IdMismatch,
    EmptyVariants,
    VariantIndexMismatch,
    NegativeArea,
    NegativeLatency,
    InvalidSource,
    UnresolvedCall,
    ParArity,
    ZeroMultiplicity,
    ZeroTripCount,
    CycleDetected,
    Unreachable,
};

struct Violation {
    ViolationKind kind;
    std::string path;
    std::string detail;

    /// e.g. UnresolvedCall("top/body/0", "fA")
    std::string to_string() const;
    auto operator<=>(const Violation&) const = default;
};

struct ValidateOptions {
    /// Skeletons (benchmarks before variant generation) have no variants yet.
    bool require_variants = true;
};

std::vector<Violation> validate(const Design& design, ValidateOptions options = {});

/// Throws ValidationError listing every violation.
void require_valid(const Design& design, ValidateOptions options = {});

/// Problems with a configuration against a design; empty means usable.
std::vector<std::string> check_configuration(const Design& design, const Configuration& config);

/// Kernel ids called anywhere in `kernel`'s body, sorted and de-duplicated.
std::vector<std::string> direct_callees(const Kernel& kernel);

/// Reverse topological order over the call graph: every kernel appears after
/// all of its callees. Ties resolve by kernel id. Throws ValidationError on
/// cycles.
std::vector<std::string> leaves_first_order(const Design& design);

/// Static call count: one for the top invocation plus the multiplicity of
/// every Call leaf in every body.
std::uint64_t static_call_count(const Design& design);

/// Product of per-kernel variant counts, saturating at UINT64_MAX.
std::uint64_t configuration_count(const Design& design);

/// Forward range over every configuration in lexicographic order, the last
/// kernel id varying fastest. Each step mutates one shared Configuration in
/// place, so dereferenced values are only valid until the next increment.
class ConfigurationRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Configuration;
        using difference_type = std::ptrdiff_t;
        using pointer = const Configuration*;
        using reference = const Configuration&;

        iterator() = default;

        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        /// Variant indices in kernel-id order.
        const std::vector<std::size_t>& indices() const { return indices_; }

        iterator& operator++();
        void operator++(int) { ++*this; }
        bool operator==(const iterator& other) const { return done_ == other.done_; }

    private:
        friend class ConfigurationRange;

        const ConfigurationRange* range_ = nullptr;
        Configuration current_;
        std::vector<std::size_t> indices_;
        bool done_ = true;
    };

    iterator begin() const;
    iterator end() const { return {}; }
    std::uint64_t size() const { return size_; }
    const std::vector<std::string>& kernel_ids() const { return ids_; }

private:
    friend ConfigurationRange enumerate_configurations(const Design&, std::uint64_t);

    std::vector<std::string> ids_;
    std::vector<std::size_t> radix_;
    std::uint64_t size_ = 0;
};

/// Throws CapExceeded when the configuration count exceeds `cap`.
ConfigurationRange enumerate_configurations(const Design& design,
                                            std::uint64_t cap = kDefaultEnumerationCap);

} // namespace hlsdse

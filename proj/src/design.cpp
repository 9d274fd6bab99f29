// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/design.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"

namespace hlsdse {

CompositionNode CompositionNode::call(std::string kernel, std::uint32_t multiplicity) {
    CompositionNode node;
    node.kind_ = NodeKind::Call;
    node.kernel_ = std::move(kernel);
    node.multiplicity_ = multiplicity;
    return node;
}

CompositionNode CompositionNode::seq(std::vector<CompositionNode> children) {
    CompositionNode node;
    node.kind_ = NodeKind::Seq;
    node.children_ = std::move(children);
    return node;
}

CompositionNode CompositionNode::par(std::vector<CompositionNode> children) {
    CompositionNode node;
    node.kind_ = NodeKind::Par;
    node.children_ = std::move(children);
    return node;
}

CompositionNode CompositionNode::loop(std::uint32_t trip_count, CompositionNode child) {
    CompositionNode node;
    node.kind_ = NodeKind::Loop;
    node.trip_count_ = trip_count;
    node.children_.push_back(std::move(child));
    return node;
}

std::string CompositionNode::summary() const {
    auto join = [this] {
        std::string out;
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (i != 0) {
                out += ", ";
            }
            out += children_[i].summary();
        }
        return out;
    };
    switch (kind_) {
    case NodeKind::Call:
        return multiplicity_ == 1 ? kernel_ : fmt::format("{} x{}", kernel_, multiplicity_);
    case NodeKind::Seq:
        return fmt::format("seq({})", join());
    case NodeKind::Par:
        return fmt::format("par({})", join());
    case NodeKind::Loop:
        return fmt::format("loop{}({})", trip_count_, join());
    }
    return {};
}

const Kernel& Design::kernel(const std::string& id) const {
    auto it = kernels.find(id);
    if (it == kernels.end()) {
        throw ValidationError(fmt::format("unknown kernel '{}'", id));
    }
    return it->second;
}

namespace {

std::string_view kind_name(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::MissingTop: return "MissingTop";
    case ViolationKind::IdMismatch: return "IdMismatch";
    case ViolationKind::EmptyVariants: return "EmptyVariants";
    case ViolationKind::VariantIndexMismatch: return "VariantIndexMismatch";
    case ViolationKind::NegativeArea: return "NegativeArea";
    case ViolationKind::NegativeLatency: return "NegativeLatency";
    case ViolationKind::InvalidSource: return "InvalidSource";
    case ViolationKind::UnresolvedCall: return "UnresolvedCall";
    case ViolationKind::ParArity: return "ParArity";
    case ViolationKind::ZeroMultiplicity: return "ZeroMultiplicity";
    case ViolationKind::ZeroTripCount: return "ZeroTripCount";
    case ViolationKind::CycleDetected: return "CycleDetected";
    case ViolationKind::Unreachable: return "Unreachable";
    }
    return "Unknown";
}

void collect_callees(const CompositionNode& node, std::set<std::string>& out) {
    if (node.kind() == NodeKind::Call) {
        out.insert(node.kernel());
        return;
    }
    for (const auto& child : node.children()) {
        collect_callees(child, out);
    }
}

void check_node(const Design& design, const CompositionNode& node, const std::string& path,
                std::vector<Violation>& out) {
    switch (node.kind()) {
    case NodeKind::Call:
        if (!design.kernels.contains(node.kernel())) {
            out.push_back({ViolationKind::UnresolvedCall, path, node.kernel()});
        }
        if (node.multiplicity() == 0) {
            out.push_back({ViolationKind::ZeroMultiplicity, path, node.kernel()});
        }
        return;
    case NodeKind::Par:
        if (node.children().size() < 2) {
            out.push_back({ViolationKind::ParArity, path, std::to_string(node.children().size())});
        }
        break;
    case NodeKind::Loop:
        if (node.trip_count() == 0) {
            out.push_back({ViolationKind::ZeroTripCount, path, {}});
        }
        break;
    case NodeKind::Seq:
        break;
    }
    for (std::size_t i = 0; i < node.children().size(); ++i) {
        check_node(design, node.children()[i], fmt::format("{}/{}", path, i), out);
    }
}

void check_kernel(const std::string& key, const Kernel& kernel, ValidateOptions options,
                  std::vector<Violation>& out) {
    if (kernel.id != key) {
        out.push_back({ViolationKind::IdMismatch, key, kernel.id});
    }
    if (options.require_variants && kernel.variants.empty()) {
        out.push_back({ViolationKind::EmptyVariants, key + "/variants", {}});
    }
    for (std::size_t i = 0; i < kernel.variants.size(); ++i) {
        const auto& variant = kernel.variants[i];
        const auto path = fmt::format("{}/variants/{}", key, i);
        if (variant.index != i) {
            out.push_back({ViolationKind::VariantIndexMismatch, path, std::to_string(variant.index)});
        }
        if (variant.area < Area{}) {
            out.push_back({ViolationKind::NegativeArea, path, variant.area.to_string()});
        }
        if (variant.latency < 0) {
            out.push_back({ViolationKind::NegativeLatency, path, std::to_string(variant.latency)});
        }
    }
    const auto& src = kernel.source;
    const auto source_path = key + "/source";
    if (src.body_latency < 1) {
        out.push_back({ViolationKind::InvalidSource, source_path, "body_latency"});
    }
    if (src.op_count < 1) {
        out.push_back({ViolationKind::InvalidSource, source_path, "op_count"});
    }
    if (src.base_area < Area{}) {
        out.push_back({ViolationKind::InvalidSource, source_path, "base_area"});
    }
    if (src.op_area <= Area{}) {
        out.push_back({ViolationKind::InvalidSource, source_path, "op_area"});
    }
}

} // namespace

std::string Violation::to_string() const {
    if (detail.empty()) {
        return fmt::format("{}(\"{}\")", kind_name(kind), path);
    }
    return fmt::format("{}(\"{}\", \"{}\")", kind_name(kind), path, detail);
}

std::vector<std::string> direct_callees(const Kernel& kernel) {
    std::set<std::string> ids;
    if (kernel.body) {
        collect_callees(*kernel.body, ids);
    }
    return {ids.begin(), ids.end()};
}

std::vector<Violation> validate(const Design& design, ValidateOptions options) {
    std::vector<Violation> out;
    const bool has_top = !design.top.empty() && design.kernels.contains(design.top);
    if (!has_top) {
        out.push_back({ViolationKind::MissingTop, "top", design.top});
    }

    for (const auto& [key, kernel] : design.kernels) {
        check_kernel(key, kernel, options, out);
        if (kernel.body) {
            check_node(design, *kernel.body, key + "/body", out);
        }
    }

    // Cycle detection by three-colour DFS over resolved call edges.
    enum class Colour { White, Grey, Black };
    std::map<std::string, Colour> colour;
    std::set<std::string> cyclic;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        colour[id] = Colour::Grey;
        for (const auto& callee : direct_callees(design.kernels.at(id))) {
            if (!design.kernels.contains(callee)) {
                continue;
            }
            const auto state = colour[callee];
            if (state == Colour::Grey) {
                cyclic.insert(callee);
            } else if (state == Colour::White) {
                visit(callee);
            }
        }
        colour[id] = Colour::Black;
    };
    for (const auto& [key, kernel] : design.kernels) {
        if (colour[key] == Colour::White) {
            visit(key);
        }
    }
    for (const auto& id : cyclic) {
        out.push_back({ViolationKind::CycleDetected, id, {}});
    }

    if (has_top) {
        std::set<std::string> reached{design.top};
        std::vector<std::string> stack{design.top};
        while (!stack.empty()) {
            const auto id = stack.back();
            stack.pop_back();
            for (const auto& callee : direct_callees(design.kernels.at(id))) {
                if (design.kernels.contains(callee) && reached.insert(callee).second) {
                    stack.push_back(callee);
                }
            }
        }
        for (const auto& [key, kernel] : design.kernels) {
            if (!reached.contains(key)) {
                out.push_back({ViolationKind::Unreachable, key, {}});
            }
        }
    }

    std::sort(out.begin(), out.end());
    return out;
}

void require_valid(const Design& design, ValidateOptions options) {
    const auto violations = validate(design, options);
    if (violations.empty()) {
        return;
    }
    std::string message = "invalid design:";
    for (const auto& v : violations) {
        message += " " + v.to_string();
    }
    throw ValidationError(message);
}

std::vector<std::string> check_configuration(const Design& design, const Configuration& config) {
    std::vector<std::string> problems;
    for (const auto& [id, kernel] : design.kernels) {
        auto it = config.choice.find(id);
        if (it == config.choice.end()) {
            problems.push_back(fmt::format("missing choice for kernel '{}'", id));
        } else if (it->second >= kernel.variants.size()) {
            problems.push_back(fmt::format("kernel '{}' has no variant {}", id, it->second));
        }
    }
    for (const auto& [id, index] : config.choice) {
        if (!design.kernels.contains(id)) {
            problems.push_back(fmt::format("unknown kernel '{}'", id));
        }
    }
    return problems;
}

std::vector<std::string> leaves_first_order(const Design& design) {
    std::map<std::string, std::size_t> pending;
    std::map<std::string, std::vector<std::string>> callers;
    for (const auto& [id, kernel] : design.kernels) {
        auto& count = pending[id];
        for (const auto& callee : direct_callees(kernel)) {
            if (design.kernels.contains(callee)) {
                ++count;
                callers[callee].push_back(id);
            }
        }
    }
    std::set<std::string> ready;
    for (const auto& [id, count] : pending) {
        if (count == 0) {
            ready.insert(id);
        }
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        const auto id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& caller : callers[id]) {
            if (--pending[caller] == 0) {
                ready.insert(caller);
            }
        }
    }
    if (order.size() != design.kernels.size()) {
        throw ValidationError("call graph contains a cycle");
    }
    return order;
}

std::uint64_t static_call_count(const Design& design) {
    std::uint64_t calls = design.kernels.contains(design.top) ? 1 : 0;
    std::function<void(const CompositionNode&)> walk = [&](const CompositionNode& node) {
        if (node.kind() == NodeKind::Call) {
            calls += node.multiplicity();
            return;
        }
        for (const auto& child : node.children()) {
            walk(child);
        }
    };
    for (const auto& [id, kernel] : design.kernels) {
        if (kernel.body) {
            walk(*kernel.body);
        }
    }
    return calls;
}

std::uint64_t configuration_count(const Design& design) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t product = 1;
    for (const auto& [id, kernel] : design.kernels) {
        const std::uint64_t n = kernel.variants.size();
        if (n == 0) {
            return 0;
        }
        if (product > kMax / n) {
            return kMax;
        }
        product *= n;
    }
    return product;
}

ConfigurationRange enumerate_configurations(const Design& design, std::uint64_t cap) {
    ConfigurationRange range;
    range.size_ = configuration_count(design);
    if (range.size_ > cap) {
        throw CapExceeded(fmt::format("design has {} configurations, cap is {}", range.size_, cap));
    }
    for (const auto& [id, kernel] : design.kernels) {
        range.ids_.push_back(id);
        range.radix_.push_back(kernel.variants.size());
    }
    return range;
}

ConfigurationRange::iterator ConfigurationRange::begin() const {
    iterator it;
    if (size_ == 0) {
        return it;
    }
    it.range_ = this;
    it.done_ = false;
    it.indices_.assign(ids_.size(), 0);
    for (const auto& id : ids_) {
        it.current_.choice.emplace(id, 0);
    }
    return it;
}

ConfigurationRange::iterator& ConfigurationRange::iterator::operator++() {
    const auto& radix = range_->radix_;
    for (std::size_t pos = indices_.size(); pos-- > 0;) {
        auto& slot = current_.choice[range_->ids_[pos]];
        if (++indices_[pos] < radix[pos]) {
            slot = indices_[pos];
            return *this;
        }
        indices_[pos] = 0;
        slot = 0;
    }
    done_ = true;
    return *this;
}

} // namespace hlsdse

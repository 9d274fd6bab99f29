// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "hlsdse/design.hpp"

namespace testsupport {

using Point = std::pair<double, hlsdse::Cycles>; // (area units, latency)

inline hlsdse::Kernel make_kernel(std::string id, const std::vector<Point>& points,
                                  std::optional<hlsdse::CompositionNode> body = std::nullopt) {
    hlsdse::Kernel k;
    k.id = std::move(id);
    for (std::size_t i = 0; i < points.size(); ++i) {
        k.variants.push_back({i, hlsdse::Area::parse(points[i].first), points[i].second, {}});
    }
    k.body = std::move(body);
    return k;
}

inline hlsdse::Design make_design(std::vector<hlsdse::Kernel> kernels, std::string top = "top") {
    hlsdse::Design d;
    d.top = std::move(top);
    for (auto& k : kernels) {
        auto id = k.id;
        d.kernels.emplace(std::move(id), std::move(k));
    }
    return d;
}

/// top -> par(A, B)
inline hlsdse::Design syn2_shaped(const std::vector<Point>& top, const std::vector<Point>& a,
                                  const std::vector<Point>& b) {
    using hlsdse::CompositionNode;
    return make_design({make_kernel("top", top,
                                    CompositionNode::par({CompositionNode::call("A"), CompositionNode::call("B")})),
                        make_kernel("A", a), make_kernel("B", b)});
}

/// The latency-model example: A {(50,20), (80,12)}, B {(60,15)}, top {(100,10)}.
inline hlsdse::Design syn2_example() {
    return syn2_shaped({{100, 10}}, {{50, 20}, {80, 12}}, {{60, 15}});
}

/// A design where summing every kernel's own latency picks the wrong point:
/// target 250 admits A0B0 (210, 30), A0B1 (240, 30) and A1B0 (240, 25).
inline hlsdse::Design syn2_gap_fixture() {
    return syn2_shaped({{100, 10}}, {{50, 20}, {80, 12}}, {{60, 15}, {90, 5}});
}
inline constexpr double kGapTarget = 250.0;

/// top -> seq(par(OF, Fib), ES x2) with single variants.
inline hlsdse::Design syn6_shaped(hlsdse::Cycles top, hlsdse::Cycles of, hlsdse::Cycles fib, hlsdse::Cycles es) {
    using hlsdse::CompositionNode;
    return make_design(
        {make_kernel("top", {{10, top}},
                     CompositionNode::seq({CompositionNode::par({CompositionNode::call("OF"),
                                                                 CompositionNode::call("Fib")}),
                                           CompositionNode::call("ES", 2)})),
         make_kernel("OF", {{10, of}}), make_kernel("Fib", {{10, fib}}), make_kernel("ES", {{10, es}})});
}

inline hlsdse::Configuration all_zero(const hlsdse::Design& d) {
    hlsdse::Configuration c;
    for (const auto& [id, k] : d.kernels) {
        c.choice[id] = 0;
    }
    return c;
}

} // namespace testsupport

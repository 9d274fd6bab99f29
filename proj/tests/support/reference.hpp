// SPDX-License-Identifier: Apache-2.0
// Straightforward re-implementations used as oracles: plain recursion over the
// composition tree and a recursive enumerator. Slow and obvious on purpose.
#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <tuple>
#include <vector>

#include "hlsdse/design.hpp"
#include "hlsdse/latency.hpp"

namespace testsupport {

using hlsdse::Configuration;
using hlsdse::CompositionNode;
using hlsdse::Cycles;
using hlsdse::Design;
using hlsdse::NodeKind;

inline Cycles self(const Design& d, const Configuration& c, const std::string& k) {
    return d.kernel(k).variants.at(c.at(k)).latency;
}

inline Cycles ref_total(const Design& d, const Configuration& c, const std::string& k, bool par_as_sum);

inline Cycles ref_node(const Design& d, const Configuration& c, const CompositionNode& n, bool par_as_sum) {
    switch (n.kind()) {
    case NodeKind::Call:
        return static_cast<Cycles>(n.multiplicity()) * ref_total(d, c, n.kernel(), par_as_sum);
    case NodeKind::Loop:
        return static_cast<Cycles>(n.trip_count()) * ref_node(d, c, n.child(), par_as_sum);
    case NodeKind::Seq: {
        Cycles s = 0;
        for (const auto& ch : n.children()) {
            s += ref_node(d, c, ch, par_as_sum);
        }
        return s;
    }
    case NodeKind::Par: {
        Cycles s = 0;
        for (const auto& ch : n.children()) {
            const auto v = ref_node(d, c, ch, par_as_sum);
            s = par_as_sum ? s + v : std::max(s, v);
        }
        return s;
    }
    }
    return 0;
}

inline Cycles ref_total(const Design& d, const Configuration& c, const std::string& k, bool par_as_sum) {
    const auto& kernel = d.kernel(k);
    return self(d, c, k) + (kernel.body ? ref_node(d, c, *kernel.body, par_as_sum) : 0);
}

inline Cycles ref_latency(const Design& d, const Configuration& c, hlsdse::LatencyModel m = {}) {
    using hlsdse::LatencyModelKind;
    switch (m.kind) {
    case LatencyModelKind::Correct:
        return ref_total(d, c, d.top, false);
    case LatencyModelKind::SumWithMultipliers:
        return ref_total(d, c, d.top, true);
    case LatencyModelKind::TopOnly:
        return self(d, c, d.top);
    case LatencyModelKind::SumAll: {
        Cycles s = 0;
        for (const auto& [id, k] : d.kernels) {
            s += self(d, c, id);
        }
        return s;
    }
    case LatencyModelKind::TopPlusMaxChildren: {
        Cycles widest = 0;
        for (const auto& callee : hlsdse::direct_callees(d.kernel(d.top))) {
            widest = std::max(widest, ref_total(d, c, callee, false));
        }
        const auto top = self(d, c, d.top);
        return m.include_top_in_max ? std::max(top, widest) : top + widest;
    }
    }
    return 0;
}

inline std::int64_t ref_area_tenths(const Design& d, const Configuration& c) {
    std::int64_t s = 0;
    for (const auto& [id, k] : d.kernels) {
        s += k.variants.at(c.at(id)).area.tenths();
    }
    return s;
}

/// Calls fn on every configuration, last kernel id varying fastest.
inline void for_each_configuration(const Design& d, const std::function<void(const Configuration&)>& fn) {
    std::vector<std::string> ids;
    for (const auto& [id, k] : d.kernels) {
        ids.push_back(id);
    }
    Configuration c;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == ids.size()) {
            fn(c);
            return;
        }
        for (std::size_t v = 0; v < d.kernel(ids[i]).variants.size(); ++v) {
            c.choice[ids[i]] = v;
            rec(i + 1);
        }
    };
    rec(0);
}

/// Lowest (latency, area, configuration) with area <= target, Correct model.
inline std::optional<Configuration> ref_best_feasible(const Design& d, std::int64_t target_tenths) {
    std::optional<std::tuple<Cycles, std::int64_t, Configuration>> best;
    for_each_configuration(d, [&](const Configuration& c) {
        const auto area = ref_area_tenths(d, c);
        if (area > target_tenths) {
            return;
        }
        std::tuple<Cycles, std::int64_t, Configuration> key{ref_latency(d, c), area, c};
        if (!best || key < *best) {
            best = key;
        }
    });
    if (!best) {
        return std::nullopt;
    }
    return std::get<2>(*best);
}

} // namespace testsupport

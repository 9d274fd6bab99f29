// SPDX-License-Identifier: Apache-2.0
// Random valid designs: kernel k_i only calls k_j with j > i, every kernel
// but k0 (the top) has at least one caller, and each body is a random
// series-parallel tree over its calls.
#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "hlsdse/design.hpp"

namespace testsupport {

struct RandomDesignOptions {
    int min_kernels = 2;
    int max_kernels = 6;
    int min_variants = 1;
    int max_variants = 5;
    hlsdse::Cycles max_latency = 60;
    std::int64_t max_area_tenths = 2000;
    std::uint32_t max_multiplicity = 3;
    std::uint32_t max_trip = 4;
    double extra_call_probability = 0.25;
};

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::string kernel_name(int i) {
    return "k" + std::to_string(i);
}

inline hlsdse::CompositionNode random_tree(std::mt19937_64& rng, std::vector<hlsdse::CompositionNode> leaves,
                                           const RandomDesignOptions& o) {
    using hlsdse::CompositionNode;
    if (leaves.size() == 1) {
        if (uniform_int(rng, 0, 4) == 0) {
            return CompositionNode::loop(static_cast<std::uint32_t>(uniform_int(rng, 1, static_cast<int>(o.max_trip))),
                                         std::move(leaves.front()));
        }
        return std::move(leaves.front());
    }
    std::shuffle(leaves.begin(), leaves.end(), rng);
    const auto groups = static_cast<std::size_t>(uniform_int(rng, 2, static_cast<int>(leaves.size())));
    std::vector<std::vector<CompositionNode>> parts(groups);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        // First `groups` leaves seed one group each so none is empty.
        const auto g = i < groups ? i : static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(groups) - 1));
        parts[g].push_back(std::move(leaves[i]));
    }
    std::vector<CompositionNode> children;
    for (auto& part : parts) {
        children.push_back(random_tree(rng, std::move(part), o));
    }
    auto node = uniform_int(rng, 0, 1) == 0 ? CompositionNode::seq(std::move(children))
                                            : CompositionNode::par(std::move(children));
    if (uniform_int(rng, 0, 5) == 0) {
        return CompositionNode::loop(static_cast<std::uint32_t>(uniform_int(rng, 1, static_cast<int>(o.max_trip))),
                                     std::move(node));
    }
    return node;
}

inline hlsdse::Design random_design(std::mt19937_64& rng, const RandomDesignOptions& o = {}) {
    using namespace hlsdse;
    const int n = uniform_int(rng, o.min_kernels, o.max_kernels);
    std::vector<std::vector<int>> callees(static_cast<std::size_t>(n));
    for (int j = 1; j < n; ++j) {
        callees[static_cast<std::size_t>(uniform_int(rng, 0, j - 1))].push_back(j);
    }
    std::bernoulli_distribution extra(o.extra_call_probability);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            auto& list = callees[static_cast<std::size_t>(i)];
            if (std::find(list.begin(), list.end(), j) == list.end() && extra(rng)) {
                list.push_back(j);
            }
        }
    }

    Design design;
    design.top = kernel_name(0);
    for (int i = 0; i < n; ++i) {
        Kernel kernel;
        kernel.id = kernel_name(i);
        const int variants = uniform_int(rng, o.min_variants, o.max_variants);
        for (int v = 0; v < variants; ++v) {
            KernelVariant variant;
            variant.index = static_cast<std::size_t>(v);
            variant.latency = std::uniform_int_distribution<Cycles>(0, o.max_latency)(rng);
            variant.area = Area::from_tenths(std::uniform_int_distribution<std::int64_t>(0, o.max_area_tenths)(rng));
            kernel.variants.push_back(variant);
        }
        const auto& mine = callees[static_cast<std::size_t>(i)];
        if (!mine.empty()) {
            std::vector<CompositionNode> leaves;
            for (int j : mine) {
                const auto m = static_cast<std::uint32_t>(uniform_int(rng, 1, static_cast<int>(o.max_multiplicity)));
                leaves.push_back(CompositionNode::call(kernel_name(j), m));
            }
            kernel.body = random_tree(rng, std::move(leaves), o);
        }
        design.kernels.emplace(kernel.id, std::move(kernel));
    }
    return design;
}

/// Fresh random latencies for every variant of `design`.
inline void randomize_latencies(std::mt19937_64& rng, hlsdse::Design& design, hlsdse::Cycles max_latency) {
    for (auto& [id, kernel] : design.kernels) {
        for (auto& variant : kernel.variants) {
            variant.latency = std::uniform_int_distribution<hlsdse::Cycles>(0, max_latency)(rng);
        }
    }
}

} // namespace testsupport

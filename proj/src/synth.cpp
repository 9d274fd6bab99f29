// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/synth.hpp"

#include <algorithm>
#include <bit>
#include <tuple>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"

namespace hlsdse::synth {

namespace {

std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
    return (num + den - 1) / den;
}

// Tie order among identical (area, latency) points: pipeline off first, then
// the smaller unroll factor.
auto tie_key(const PragmaConfig& pragma) {
    return std::make_tuple(pragma.pipeline_ii.has_value(), pragma.unroll);
}

} // namespace

bool is_valid(const KernelSource& source, const PragmaConfig& pragma) {
    const std::uint32_t max_unroll = std::max<std::uint32_t>(source.trip_count, 1);
    if (pragma.unroll < 1 || !std::has_single_bit(pragma.unroll) || pragma.unroll > max_unroll) {
        return false;
    }
    return !pragma.pipeline_ii || *pragma.pipeline_ii >= 1;
}

KernelVariant synthesize(const KernelSource& source, const PragmaConfig& pragma) {
    if (!is_valid(source, pragma)) {
        throw InvalidPragma(fmt::format("unroll {} / ii {} is not valid for trip count {}", pragma.unroll,
                                        pragma.pipeline_ii.value_or(0), source.trip_count));
    }
    const std::int64_t trips = source.trip_count;
    const std::int64_t unroll = pragma.unroll;

    KernelVariant variant;
    variant.pragma = pragma;
    if (trips == 0) {
        variant.latency = source.body_latency;
    } else if (!pragma.pipeline_ii) {
        variant.latency = ceil_div(trips, unroll) * source.body_latency;
    } else {
        variant.latency = (ceil_div(trips, unroll) - 1) * *pragma.pipeline_ii + source.body_latency;
    }

    // a*M*U in tenths; the pipeline overhead is rounded up to whole units.
    const std::int64_t replicated = source.op_area.tenths() * source.op_count * unroll;
    std::int64_t tenths = source.base_area.tenths() + replicated;
    if (pragma.pipeline_ii) {
        tenths += 10 * ceil_div(replicated, 100);
    }
    variant.area = Area::from_tenths(tenths);
    return variant;
}

std::vector<PragmaConfig> pragma_sweep(const KernelSource& source) {
    std::vector<PragmaConfig> sweep;
    const std::uint32_t max_unroll = std::max<std::uint32_t>(source.trip_count, 1);
    for (std::uint32_t unroll = 1; unroll <= max_unroll; unroll *= 2) {
        sweep.push_back({unroll, std::nullopt});
        sweep.push_back({unroll, 1});
        if (unroll > max_unroll / 2) {
            break;
        }
    }
    return sweep;
}

std::vector<KernelVariant> generate_variants(const KernelSource& source, std::size_t k) {
    if (k == 0) {
        throw InvalidPragma("at least one variant must be requested");
    }
    std::vector<KernelVariant> points;
    for (const auto& pragma : pragma_sweep(source)) {
        points.push_back(synthesize(source, pragma));
    }
    std::sort(points.begin(), points.end(), [](const KernelVariant& a, const KernelVariant& b) {
        return std::make_tuple(a.area, a.latency, tie_key(a.pragma)) <
               std::make_tuple(b.area, b.latency, tie_key(b.pragma));
    });

    // Ascending area: a point survives only if it is strictly faster than
    // everything no more expensive.
    std::vector<KernelVariant> front;
    for (const auto& p : points) {
        if (front.empty() || p.latency < front.back().latency) {
            front.push_back(p);
        }
    }

    if (front.size() > k) {
        std::vector<KernelVariant> thinned;
        if (k == 1) {
            thinned.push_back(front.front());
        } else {
            const std::size_t last = front.size() - 1;
            for (std::size_t j = 0; j < k; ++j) {
                // round(j * last / (k - 1)), halves rounding up
                thinned.push_back(front[(2 * j * last + (k - 1)) / (2 * (k - 1))]);
            }
        }
        front = std::move(thinned);
    }
    for (std::size_t i = 0; i < front.size(); ++i) {
        front[i].index = i;
    }
    return front;
}

} // namespace hlsdse::synth

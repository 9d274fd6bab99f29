// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "hlsdse/design.hpp"

namespace hlsdse::synth {

inline constexpr std::size_t kDefaultVariantCount = 5;

/// Deterministic stand-in for the HLS tool.
///
/// With trip count N, per-iteration latency L0, M operations, base area A0
/// and per-operation area a, an unroll factor U gives
///
///   latency = ceil(N/U) * L0                 pipeline off, N >= 1
///           = (ceil(N/U) - 1) * II + L0      pipeline on,  N >= 1
///           = L0                             N == 0
///   area    = A0 + a*M*U  (+ ceil(0.1*a*M*U) units when pipelined)
///
/// Throws InvalidPragma when U is not a power of two in [1, max(N,1)] or the
/// initiation interval is zero.
KernelVariant synthesize(const KernelSource& source, const PragmaConfig& pragma);

bool is_valid(const KernelSource& source, const PragmaConfig& pragma);

/// Every unroll factor 1, 2, 4, ... up to max(N,1), each with pipelining off
/// and with II=1.
std::vector<PragmaConfig> pragma_sweep(const KernelSource& source);

/// Pareto front of the sweep, thinned to at most `k` points (area-extreme,
/// latency-extreme and evenly spaced interior points). Sorted by ascending
/// area with strictly descending latency; indices follow that order.
std::vector<KernelVariant> generate_variants(const KernelSource& source,
                                             std::size_t k = kDefaultVariantCount);

} // namespace hlsdse::synth

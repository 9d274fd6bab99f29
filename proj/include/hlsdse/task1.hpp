// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hlsdse/design.hpp"
#include "hlsdse/errors.hpp"
#include "hlsdse/latency.hpp"
#include "hlsdse/synth.hpp"

namespace hlsdse::task1 {

inline constexpr int kMaxAttempts = 3;

struct FaultEntry {
    std::string kernel;
    int attempt = 0; // 1-based
    bool repaired = false;

    bool operator==(const FaultEntry&) const = default;
};

/// Per-kernel generation broke the kernel and no retry repaired it.
class FunctionalityBroken : public Error {
public:
    FunctionalityBroken(std::string kernel, std::vector<FaultEntry> log);

    const std::string& kernel() const { return kernel_; }
    const std::vector<FaultEntry>& log() const { return log_; }

private:
    std::string kernel_;
    std::vector<FaultEntry> log_;
};

struct Options {
    std::size_t k = synth::kDefaultVariantCount;
    double fault_rate = 0.0; // in [0, 1]
    std::uint64_t seed = 0;
};

struct Task1Result {
    Design design; // the skeleton with every kernel's variants installed
    std::map<std::string, std::vector<KernelVariant>> options;
    Configuration greedy_config;
    EvalResult baseline;
    std::vector<FaultEntry> fault_log;
    /// Total latency of each kernel with its callees bound to their fastest
    /// options, as seen when that kernel was processed.
    std::map<std::string, Cycles> context_latency;
};

/// Leaves first: generates variants for every kernel, binding already
/// processed children greedily. Throws FunctionalityBroken, ValidationError
/// (including call cycles) and std::invalid_argument for a bad fault rate.
Task1Result optimize_bottom_up(const Design& skeleton, const Options& options = {});

/// Per kernel, the lowest-latency variant; ties go to the smaller area.
Configuration greedy_configuration(const Design& design);

/// floor(fraction * baseline), computed on tenths with the fraction taken to
/// six decimal places.
Area derive_area_target(Area baseline, double fraction = 0.9);

/// Independent PRNG seed for one kernel's fault draws.
std::uint64_t kernel_seed(std::uint64_t master, const std::string& kernel);

} // namespace hlsdse::task1

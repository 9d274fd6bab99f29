// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/task1.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "hlsdse/seed.hpp"

namespace hlsdse::task1 {

FunctionalityBroken::FunctionalityBroken(std::string kernel, std::vector<FaultEntry> log)
    : Error(fmt::format("kernel '{}' lost its functionality and was not repaired after {} attempts", kernel,
                        kMaxAttempts)),
      kernel_(std::move(kernel)),
      log_(std::move(log)) {}

std::uint64_t kernel_seed(std::uint64_t master, const std::string& kernel) {
    return derive_seed(master, kernel);
}

namespace {

/// Uniform in [0, 1) from the top 53 bits.
double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

Configuration greedy_configuration(const Design& design) {
    Configuration config;
    for (const auto& [id, kernel] : design.kernels) {
        if (kernel.variants.empty()) {
            throw ValidationError(fmt::format("kernel '{}' has no variants", id));
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < kernel.variants.size(); ++i) {
            const auto& v = kernel.variants[i];
            const auto& b = kernel.variants[best];
            if (std::tie(v.latency, v.area) < std::tie(b.latency, b.area)) {
                best = i;
            }
        }
        config.choice.emplace(id, best);
    }
    return config;
}

Task1Result optimize_bottom_up(const Design& skeleton, const Options& options) {
    if (!(options.fault_rate >= 0.0 && options.fault_rate <= 1.0)) {
        throw std::invalid_argument("fault rate must be within [0, 1]");
    }
    if (options.k == 0) {
        throw std::invalid_argument("k must be at least 1");
    }
    require_valid(skeleton, ValidateOptions{.require_variants = false});

    Task1Result result;
    result.design = skeleton;
    for (const auto& id : leaves_first_order(skeleton)) {
        // Draws for one kernel never depend on the others, so the processing
        // order (or parallelism) cannot change the outcome.
        std::mt19937_64 rng(kernel_seed(options.seed, id));
        bool faulted = false;
        bool done = false;
        for (int attempt = 1; attempt <= kMaxAttempts && !done; ++attempt) {
            if (options.fault_rate > 0.0 && uniform(rng) < options.fault_rate) {
                result.fault_log.push_back({id, attempt, false});
                faulted = true;
                continue;
            }
            if (faulted) {
                result.fault_log.push_back({id, attempt, true});
            }
            done = true;
        }
        if (!done) {
            throw FunctionalityBroken(id, result.fault_log);
        }
        auto& kernel = result.design.kernels.at(id);
        kernel.variants = synth::generate_variants(kernel.source, options.k);
        result.options.emplace(id, kernel.variants);
    }

    result.greedy_config = greedy_configuration(result.design);
    const SystemEvaluator evaluator(result.design);
    const auto choice = evaluator.indices(result.greedy_config);
    result.baseline = evaluator.evaluate(choice);
    const auto totals = evaluator.kernel_totals(choice);
    for (std::size_t k = 0; k < evaluator.kernel_count(); ++k) {
        result.context_latency.emplace(evaluator.kernel_ids()[k], totals[k]);
    }
    return result;
}

Area derive_area_target(Area baseline, double fraction) {
    const auto ppm = std::llround(fraction * 1'000'000.0);
    if (!std::isfinite(fraction) || ppm < 0) {
        throw std::invalid_argument("area target fraction must be a non-negative number");
    }
    const auto scaled = baseline.tenths() * ppm;
    auto floored = scaled / 1'000'000;
    if (scaled < 0 && floored * 1'000'000 != scaled) {
        --floored;
    }
    return Area::from_tenths(floored);
}

} // namespace hlsdse::task1

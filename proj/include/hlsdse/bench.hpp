// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hlsdse/design.hpp"

namespace hlsdse::bench {

struct Benchmark {
    std::string name;
    Design design; // skeleton unless loaded from a file with variants
    /// Correct system latency over f_<kernel> symbols, e.g.
    /// "f_top + max(f_A, f_B)". Bare kernel ids are also accepted.
    std::optional<std::string> formula;
    std::string description;

    bool operator==(const Benchmark&) const = default;
};

/// SYN1 ... SYN6, AES_LIKE, NW_LIKE.
const std::vector<std::string>& builtin_names();

/// Throws UnknownBenchmark.
Benchmark builtin(std::string_view name);

nlohmann::json to_json(const Benchmark& benchmark);

/// Design schema plus "name" (required), "formula" and "description".
/// Throws ParseError or ValidationError.
Benchmark from_json(const nlohmann::json& j);
Benchmark load_string(std::string_view text, std::string_view origin = "<string>");
Benchmark load(const std::filesystem::path& path);

/// Throws IoError.
void save(const Benchmark& benchmark, const std::filesystem::path& path);

/// A builtin name, or otherwise a path to a benchmark file.
Benchmark resolve(std::string_view name_or_path);

} // namespace hlsdse::bench

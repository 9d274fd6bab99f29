// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "hlsdse/design.hpp"

namespace hlsdse {

// Design documents:
//   {"top": id,
//    "kernels": [{"id", "source": {...}, "variants": [{"area", "latency", "pragma"}],
//                 "body": node}]}
//   node := {"call": {"kernel", "multiplicity"}} | {"seq": [node...]}
//         | {"par": [node...]} | {"loop": {"trip_count", "child": node}}
// Unknown fields are rejected. Errors carry the JSON path of the offending
// field.

nlohmann::json to_json(const PragmaConfig& pragma);
nlohmann::json to_json(const KernelSource& source);
nlohmann::json to_json(const CompositionNode& node);
nlohmann::json to_json(const Kernel& kernel);
nlohmann::json to_json(const Design& design);
nlohmann::json to_json(const Configuration& config);

/// Area as a JSON number with one decimal of precision.
nlohmann::json area_json(Area area);

KernelSource source_from_json(const nlohmann::json& j, const std::string& path);
CompositionNode node_from_json(const nlohmann::json& j, const std::string& path);
Kernel kernel_from_json(const nlohmann::json& j, const std::string& path);

/// Parses the design fields of `j`. `extra_fields` lists additional top-level
/// keys the caller consumes itself (e.g. a benchmark's "name").
Design design_from_json(const nlohmann::json& j,
                        std::initializer_list<std::string_view> extra_fields = {});

Configuration configuration_from_json(const nlohmann::json& j, const std::string& path);

/// Parses text, reporting syntax errors with line and column.
nlohmann::json parse_json_text(std::string_view text, std::string_view origin);

namespace json_detail {

void reject_unknown(const nlohmann::json& object, const std::string& path,
                    std::initializer_list<std::string_view> allowed,
                    std::initializer_list<std::string_view> also_allowed = {});
const nlohmann::json& require(const nlohmann::json& object, const std::string& path,
                              std::string_view key);
std::int64_t get_int(const nlohmann::json& j, const std::string& path);
std::uint32_t get_uint32(const nlohmann::json& j, const std::string& path);
Area get_area(const nlohmann::json& j, const std::string& path);
std::string get_string(const nlohmann::json& j, const std::string& path);

} // namespace json_detail

} // namespace hlsdse

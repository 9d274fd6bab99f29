// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/design_json.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"

namespace hlsdse {

using nlohmann::json;

namespace json_detail {

void reject_unknown(const json& object, const std::string& path,
                    std::initializer_list<std::string_view> allowed,
                    std::initializer_list<std::string_view> also_allowed) {
    if (!object.is_object()) {
        throw ParseError(fmt::format("{}: expected an object", path));
    }
    for (const auto& [key, value] : object.items()) {
        const bool known = std::find(allowed.begin(), allowed.end(), key) != allowed.end() ||
                           std::find(also_allowed.begin(), also_allowed.end(), key) != also_allowed.end();
        if (!known) {
            throw ParseError(fmt::format("{}: unknown field '{}'", path, key));
        }
    }
}

const json& require(const json& object, const std::string& path, std::string_view key) {
    auto it = object.find(key);
    if (it == object.end()) {
        throw ParseError(fmt::format("{}: missing field '{}'", path, key));
    }
    return *it;
}

std::int64_t get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        throw ParseError(fmt::format("{}: expected an integer", path));
    }
    return j.get<std::int64_t>();
}

std::uint32_t get_uint32(const json& j, const std::string& path) {
    const auto value = get_int(j, path);
    if (value < 0 || value > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError(fmt::format("{}: expected a non-negative 32-bit integer", path));
    }
    return static_cast<std::uint32_t>(value);
}

Area get_area(const json& j, const std::string& path) {
    if (!j.is_number()) {
        throw ParseError(fmt::format("{}: expected a number", path));
    }
    try {
        return Area::parse(j.get<double>());
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path, e.what()));
    }
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) {
        throw ParseError(fmt::format("{}: expected a string", path));
    }
    return j.get<std::string>();
}

} // namespace json_detail

using namespace json_detail;

json area_json(Area area) {
    return area.units();
}

json to_json(const PragmaConfig& pragma) {
    json j{{"unroll", pragma.unroll}};
    if (pragma.pipeline_ii) {
        j["pipeline_ii"] = *pragma.pipeline_ii;
    }
    return j;
}

json to_json(const KernelSource& source) {
    return json{{"trip_count", source.trip_count},
                {"body_latency", source.body_latency},
                {"op_count", source.op_count},
                {"base_area", area_json(source.base_area)},
                {"op_area", area_json(source.op_area)}};
}

json to_json(const CompositionNode& node) {
    switch (node.kind()) {
    case NodeKind::Call:
        return json{{"call", {{"kernel", node.kernel()}, {"multiplicity", node.multiplicity()}}}};
    case NodeKind::Seq:
    case NodeKind::Par: {
        json children = json::array();
        for (const auto& child : node.children()) {
            children.push_back(to_json(child));
        }
        return json{{node.kind() == NodeKind::Seq ? "seq" : "par", std::move(children)}};
    }
    case NodeKind::Loop:
        return json{{"loop", {{"trip_count", node.trip_count()}, {"child", to_json(node.child())}}}};
    }
    return {};
}

json to_json(const Kernel& kernel) {
    json variants = json::array();
    for (const auto& v : kernel.variants) {
        variants.push_back(
            {{"area", area_json(v.area)}, {"latency", v.latency}, {"pragma", to_json(v.pragma)}});
    }
    json j{{"id", kernel.id}, {"source", to_json(kernel.source)}, {"variants", std::move(variants)}};
    if (kernel.body) {
        j["body"] = to_json(*kernel.body);
    }
    return j;
}

json to_json(const Design& design) {
    json kernels = json::array();
    for (const auto& [id, kernel] : design.kernels) {
        kernels.push_back(to_json(kernel));
    }
    return json{{"top", design.top}, {"kernels", std::move(kernels)}};
}

json to_json(const Configuration& config) {
    json j = json::object();
    for (const auto& [id, index] : config.choice) {
        j[id] = index;
    }
    return j;
}

namespace {

PragmaConfig pragma_from_json(const json& j, const std::string& path) {
    reject_unknown(j, path, {"unroll", "pipeline_ii"});
    PragmaConfig pragma;
    pragma.unroll = get_uint32(require(j, path, "unroll"), path + ".unroll");
    if (auto it = j.find("pipeline_ii"); it != j.end() && !it->is_null()) {
        pragma.pipeline_ii = get_uint32(*it, path + ".pipeline_ii");
    }
    return pragma;
}

std::vector<CompositionNode> children_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) {
        throw ParseError(fmt::format("{}: expected an array", path));
    }
    std::vector<CompositionNode> children;
    for (std::size_t i = 0; i < j.size(); ++i) {
        children.push_back(node_from_json(j[i], fmt::format("{}[{}]", path, i)));
    }
    return children;
}

} // namespace

KernelSource source_from_json(const json& j, const std::string& path) {
    reject_unknown(j, path, {"trip_count", "body_latency", "op_count", "base_area", "op_area"});
    KernelSource source;
    source.trip_count = get_uint32(require(j, path, "trip_count"), path + ".trip_count");
    source.body_latency = get_int(require(j, path, "body_latency"), path + ".body_latency");
    source.op_count = get_uint32(require(j, path, "op_count"), path + ".op_count");
    source.base_area = get_area(require(j, path, "base_area"), path + ".base_area");
    source.op_area = get_area(require(j, path, "op_area"), path + ".op_area");
    return source;
}

CompositionNode node_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || j.size() != 1) {
        throw ParseError(fmt::format("{}: a node is an object with exactly one of call/seq/par/loop", path));
    }
    const auto first = j.begin();
    const std::string key = first.key();
    const json& value = first.value();
    const auto inner = fmt::format("{}.{}", path, key);
    if (key == "call") {
        reject_unknown(value, inner, {"kernel", "multiplicity"});
        std::uint32_t multiplicity = 1;
        if (auto it = value.find("multiplicity"); it != value.end()) {
            multiplicity = get_uint32(*it, inner + ".multiplicity");
        }
        return CompositionNode::call(get_string(require(value, inner, "kernel"), inner + ".kernel"),
                                     multiplicity);
    }
    if (key == "seq") {
        return CompositionNode::seq(children_from_json(value, inner));
    }
    if (key == "par") {
        return CompositionNode::par(children_from_json(value, inner));
    }
    if (key == "loop") {
        reject_unknown(value, inner, {"trip_count", "child"});
        return CompositionNode::loop(get_uint32(require(value, inner, "trip_count"), inner + ".trip_count"),
                                     node_from_json(require(value, inner, "child"), inner + ".child"));
    }
    throw ParseError(fmt::format("{}: unknown node kind '{}'", path, key));
}

Kernel kernel_from_json(const json& j, const std::string& path) {
    reject_unknown(j, path, {"id", "source", "variants", "body"});
    Kernel kernel;
    kernel.id = get_string(require(j, path, "id"), path + ".id");
    kernel.source = source_from_json(require(j, path, "source"), path + ".source");
    const auto& variants = require(j, path, "variants");
    if (!variants.is_array()) {
        throw ParseError(fmt::format("{}.variants: expected an array", path));
    }
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto vpath = fmt::format("{}.variants[{}]", path, i);
        const auto& v = variants[i];
        reject_unknown(v, vpath, {"area", "latency", "pragma"});
        KernelVariant variant;
        variant.index = i;
        variant.area = get_area(require(v, vpath, "area"), vpath + ".area");
        variant.latency = get_int(require(v, vpath, "latency"), vpath + ".latency");
        if (auto it = v.find("pragma"); it != v.end()) {
            variant.pragma = pragma_from_json(*it, vpath + ".pragma");
        }
        kernel.variants.push_back(variant);
    }
    if (auto it = j.find("body"); it != j.end() && !it->is_null()) {
        kernel.body = node_from_json(*it, path + ".body");
    }
    return kernel;
}

Design design_from_json(const json& j, std::initializer_list<std::string_view> extra_fields) {
    reject_unknown(j, "$", {"top", "kernels"}, extra_fields);
    Design design;
    design.top = get_string(require(j, "$", "top"), "$.top");
    const auto& kernels = require(j, "$", "kernels");
    if (!kernels.is_array()) {
        throw ParseError("$.kernels: expected an array");
    }
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        const auto path = fmt::format("$.kernels[{}]", i);
        auto kernel = kernel_from_json(kernels[i], path);
        const auto id = kernel.id;
        if (!design.kernels.emplace(id, std::move(kernel)).second) {
            throw ParseError(fmt::format("{}.id: duplicate kernel id '{}'", path, id));
        }
    }
    return design;
}

Configuration configuration_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) {
        throw ParseError(fmt::format("{}: expected an object of kernel -> variant index", path));
    }
    Configuration config;
    for (const auto& [id, index] : j.items()) {
        config.choice[id] = get_uint32(index, fmt::format("{}.{}", path, id));
    }
    return config;
}

json parse_json_text(std::string_view text, std::string_view origin) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto prefix = text.substr(0, offset);
        const auto line = std::count(prefix.begin(), prefix.end(), '\n') + 1;
        const auto last_newline = prefix.rfind('\n');
        const auto column = last_newline == std::string_view::npos ? offset + 1 : offset - last_newline;
        throw ParseError(fmt::format("{}:{}:{}: malformed JSON ({})", origin, line, column, e.what()));
    }
}

} // namespace hlsdse

// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/bench.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hlsdse/design_json.hpp"
#include "hlsdse/errors.hpp"

namespace hlsdse::bench {

namespace {

using Node = CompositionNode;

/// Trip count, per-iteration latency, op count, base area and op area
/// (areas in tenths).
KernelSource source(std::uint32_t n, Cycles l0, std::uint32_t m, std::int64_t a0, std::int64_t a) {
    return KernelSource{n, l0, m, Area::from_tenths(a0), Area::from_tenths(a)};
}

Kernel kernel(std::string id, KernelSource src, std::optional<Node> body = std::nullopt) {
    Kernel k;
    k.id = std::move(id);
    k.source = src;
    k.body = std::move(body);
    return k;
}

Design design(std::vector<Kernel> kernels) {
    Design d;
    d.top = "top";
    for (auto& k : kernels) {
        auto id = k.id;
        d.kernels.emplace(std::move(id), std::move(k));
    }
    return d;
}

// Kernel constants shared by several SYN designs.
const KernelSource kA = source(16, 3, 4, 200, 50);
const KernelSource kB = source(8, 5, 3, 250, 60);
const KernelSource kC = source(12, 2, 5, 150, 40);
const KernelSource kParA = source(8, 4, 3, 400, 15);
const KernelSource kParB = source(8, 5, 2, 400, 20);

Node par_of_pairs() {
    return Node::par({Node::seq({Node::call("A"), Node::call("C")}), Node::seq({Node::call("B"), Node::call("A")})});
}

Node par_then_calls() {
    return Node::seq({Node::par({Node::call("A"), Node::call("B")}), Node::call("C", 2)});
}

Benchmark make(std::string_view name) {
    if (name == "SYN1") {
        return {"SYN1",
                design({kernel("top", source(2, 4, 2, 300, 30), Node::seq({Node::call("A"), Node::call("B")})),
                        kernel("A", kA), kernel("B", kB)}),
                "f_top + f_A + f_B", "2 sequential functions"};
    }
    if (name == "SYN2") {
        return {"SYN2",
                design({kernel("top", source(2, 6, 2, 9000, 20), Node::par({Node::call("A"), Node::call("B")})),
                        kernel("A", kParA), kernel("B", kParB)}),
                "f_top + max(f_A, f_B)", "2 parallel functions"};
    }
    if (name == "SYN3") {
        return {"SYN3",
                design({kernel("top", source(2, 4, 2, 300, 30), par_of_pairs()), kernel("A", kA), kernel("B", kB),
                        kernel("C", kC)}),
                "f_top + max(f_A + f_C, f_B + f_A)", "2 parallel pairs of sequential functions"};
    }
    if (name == "SYN4") {
        return {"SYN4",
                design({kernel("top", source(2, 6, 2, 14000, 20), par_then_calls()), kernel("A", kParA),
                        kernel("B", kParB), kernel("C", source(4, 3, 2, 300, 20))}),
                "f_top + max(f_A, f_B) + 2*f_C", "2 parallel functions followed by 2 sequential functions"};
    }
    if (name == "SYN5") {
        return {"SYN5",
                design({kernel("top", source(4, 3, 2, 400, 30), Node::loop(4, par_of_pairs())), kernel("A", kA),
                        kernel("B", kB), kernel("C", kC)}),
                "f_top + 4*max(f_A + f_C, f_B + f_A)", "SYN3 in a loop of 4"};
    }
    if (name == "SYN6") {
        return {"SYN6",
                design({kernel("top", source(4, 3, 2, 400, 30), Node::loop(4, par_then_calls())), kernel("A", kA),
                        kernel("B", kB), kernel("C", kC)}),
                "f_top + 4*(max(f_A, f_B) + 2*f_C)", "SYN4 in a loop of 4"};
    }
    if (name == "AES_LIKE") {
        return {"AES_LIKE",
                design({kernel("top", source(4, 2, 3, 600, 40),
                               Node::seq({Node::call("AK"), Node::call("SB"), Node::call("SR"), Node::call("MC")})),
                        kernel("AK", source(16, 1, 2, 100, 25)), kernel("SB", source(16, 4, 6, 1200, 80)),
                        kernel("SR", source(4, 2, 1, 150, 20)), kernel("MC", source(4, 6, 12, 800, 35))}),
                "f_top + AK + SB + SR + MC", "round-stage chain: add key, substitute, shift, mix"};
    }
    if (name == "NW_LIKE") {
        return {"NW_LIKE",
                design({kernel("top", source(2, 3, 2, 500, 40),
                               Node::seq({Node::call("FM"), Node::call("TB"), Node::call("RS")})),
                        kernel("FM", source(64, 5, 9, 1500, 32)), kernel("TB", source(32, 4, 5, 600, 24)),
                        kernel("RS", source(16, 1, 1, 100, 15))}),
                "f_top + FM + TB + RS", "alignment chain: fill matrix, traceback, emit result"};
    }
    throw UnknownBenchmark(fmt::format("unknown benchmark '{}'", name));
}

} // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"SYN1", "SYN2", "SYN3", "SYN4",
                                                "SYN5", "SYN6", "AES_LIKE", "NW_LIKE"};
    return names;
}

Benchmark builtin(std::string_view name) {
    return make(name);
}

nlohmann::json to_json(const Benchmark& benchmark) {
    auto j = hlsdse::to_json(benchmark.design);
    j["name"] = benchmark.name;
    if (benchmark.formula) {
        j["formula"] = *benchmark.formula;
    }
    if (!benchmark.description.empty()) {
        j["description"] = benchmark.description;
    }
    return j;
}

Benchmark from_json(const nlohmann::json& j) {
    using namespace json_detail;
    Benchmark benchmark;
    benchmark.design = design_from_json(j, {"name", "formula", "description"});
    benchmark.name = get_string(require(j, "$", "name"), "$.name");
    if (benchmark.name.empty()) {
        throw ParseError("$.name: must not be empty");
    }
    if (auto it = j.find("formula"); it != j.end()) {
        benchmark.formula = get_string(*it, "$.formula");
    }
    if (auto it = j.find("description"); it != j.end()) {
        benchmark.description = get_string(*it, "$.description");
    }
    // Skeletons carry no variants; a file may also ship them pre-generated.
    bool any_variants = false;
    for (const auto& [id, kernel] : benchmark.design.kernels) {
        any_variants = any_variants || !kernel.variants.empty();
    }
    require_valid(benchmark.design, ValidateOptions{.require_variants = any_variants});
    return benchmark;
}

Benchmark load_string(std::string_view text, std::string_view origin) {
    return from_json(parse_json_text(text, origin));
}

Benchmark load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(fmt::format("{}: cannot open benchmark file", path.string()));
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return load_string(text.str(), path.string());
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void save(const Benchmark& benchmark, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("{}: cannot write benchmark file", path.string()));
    }
    out << to_json(benchmark).dump(2) << '\n';
    if (!out) {
        throw IoError(fmt::format("{}: write failed", path.string()));
    }
}

Benchmark resolve(std::string_view name_or_path) {
    for (const auto& name : builtin_names()) {
        if (name == name_or_path) {
            return builtin(name);
        }
    }
    const std::filesystem::path path{std::string(name_or_path)};
    if (std::filesystem::exists(path)) {
        return load(path);
    }
    throw UnknownBenchmark(fmt::format("'{}' is neither a builtin benchmark nor a readable file", name_or_path));
}

} // namespace hlsdse::bench

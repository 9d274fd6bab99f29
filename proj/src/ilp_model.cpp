// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"
#include "hlsdse/ilp.hpp"

namespace hlsdse::ilp {

Alpha Alpha::ratio(std::int64_t numerator, std::int64_t denominator) {
    if (numerator <= 0 || denominator <= 0) {
        throw std::invalid_argument("alpha must be positive");
    }
    const auto g = std::gcd(numerator, denominator);
    Alpha alpha;
    alpha.num_ = numerator / g;
    alpha.den_ = denominator / g;
    return alpha;
}

Alpha Alpha::from_double(double value) {
    if (!std::isfinite(value) || value > 1e9) {
        throw std::invalid_argument("alpha must be a finite positive number");
    }
    return ratio(std::llround(value * 1'000'000.0), 1'000'000);
}

std::string_view to_string(ObjectiveMode mode) {
    return mode == ObjectiveMode::ConstrainedArea ? "constrained" : "lagrangian";
}

std::optional<ObjectiveMode> parse_objective_mode(std::string_view name) {
    if (name == "constrained") {
        return ObjectiveMode::ConstrainedArea;
    }
    if (name == "lagrangian") {
        return ObjectiveMode::Lagrangian;
    }
    return std::nullopt;
}

std::string IlpVariable::name() const {
    struct Namer {
        std::string operator()(const SelectionVar& v) const { return fmt::format("x[{},{}]", v.kernel, v.variant); }
        std::string operator()(const AuxMaxVar& v) const { return fmt::format("t[{}]", v.label); }
        std::string operator()(const AreaSlackPlus&) const { return "d+"; }
        std::string operator()(const AreaSlackMinus&) const { return "d-"; }
    };
    return std::visit(Namer{}, annotation);
}

std::size_t IlpModel::count(VarKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(variables.begin(), variables.end(), [kind](const auto& v) { return v.kind == kind; }));
}

std::size_t IlpModel::count(ConstraintRole role) const {
    return static_cast<std::size_t>(
        std::count_if(constraints.begin(), constraints.end(), [role](const auto& c) { return c.role == role; }));
}

std::size_t IlpModel::aux_count() const {
    return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(), [](const auto& v) {
        return std::holds_alternative<AuxMaxVar>(v.annotation);
    }));
}

IlpModel IlpModel::with_area_target(Area target) const {
    IlpModel copy = *this;
    copy.objective.area_target = target;
    for (auto& row : copy.constraints) {
        if (row.role == ConstraintRole::AreaBudget || row.role == ConstraintRole::AreaDeviation) {
            row.rhs = target.tenths();
        }
    }
    return copy;
}

namespace {

/// Sparse accumulator keyed by variable id.
using Accumulator = std::map<std::size_t, std::int64_t>;

void add_scaled(Accumulator& into, const Accumulator& from, std::int64_t factor) {
    for (const auto& [var, coef] : from) {
        into[var] += factor * coef;
    }
}

std::vector<Term> to_terms(const Accumulator& acc, bool keep_zero = false) {
    std::vector<Term> terms;
    for (const auto& [var, coef] : acc) {
        if (coef != 0 || keep_zero) {
            terms.push_back({coef, var});
        }
    }
    return terms;
}

class Builder {
public:
    Builder(const Design& design, IlpModel& model) : design_(design), model_(model) {}

    void add_selection_vars() {
        for (const auto& [id, kernel] : design_.kernels) {
            model_.kernels.push_back(id);
            LinearConstraint row{fmt::format("onehot[{}]", id), {}, Relation::Equal, 1, ConstraintRole::OneHot};
            for (const auto& variant : kernel.variants) {
                const auto var = add_var(VarKind::Binary, SelectionVar{id, variant.index});
                selection_[id].push_back(var);
                row.terms.push_back({1, var});
            }
            model_.constraints.push_back(std::move(row));
        }
    }

    Accumulator self_latency(const std::string& kernel) const {
        Accumulator acc;
        const auto& variants = design_.kernel(kernel).variants;
        for (std::size_t o = 0; o < variants.size(); ++o) {
            acc[selection_.at(kernel)[o]] += variants[o].latency;
        }
        return acc;
    }

    Accumulator area() const {
        Accumulator acc;
        for (const auto& [id, kernel] : design_.kernels) {
            for (std::size_t o = 0; o < kernel.variants.size(); ++o) {
                acc[selection_.at(id)[o]] += kernel.variants[o].area.tenths();
            }
        }
        return acc;
    }

    /// Kernel total latency: own latency plus its body. With par_as_sum the
    /// parallel branches are added instead of max-ed (no auxiliaries).
    const Accumulator& kernel_total(const std::string& kernel, bool par_as_sum) {
        auto& cache = par_as_sum ? summed_ : exact_;
        if (auto it = cache.find(kernel); it != cache.end()) {
            return it->second;
        }
        Accumulator acc = self_latency(kernel);
        const auto& body = design_.kernel(kernel).body;
        if (body) {
            add_scaled(acc, node(*body, kernel + "/body", par_as_sum), 1);
        }
        return cache.emplace(kernel, std::move(acc)).first->second;
    }

    std::size_t add_max(const std::string& label, const std::vector<Accumulator>& operands) {
        const auto t = add_var(VarKind::NonnegInteger, AuxMaxVar{label});
        for (std::size_t i = 0; i < operands.size(); ++i) {
            Accumulator row;
            row[t] = 1;
            add_scaled(row, operands[i], -1);
            model_.constraints.push_back({fmt::format("max[{}]#{}", label, i), to_terms(row), Relation::GreaterEqual,
                                          0, ConstraintRole::AuxBound});
        }
        return t;
    }

    std::size_t add_var(VarKind kind, VarAnnotation annotation) {
        const auto id = model_.variables.size();
        model_.variables.push_back({id, kind, std::move(annotation)});
        return id;
    }

private:
    Accumulator node(const CompositionNode& n, const std::string& path, bool par_as_sum) {
        Accumulator acc;
        switch (n.kind()) {
        case NodeKind::Call:
            add_scaled(acc, kernel_total(n.kernel(), par_as_sum), n.multiplicity());
            break;
        case NodeKind::Loop:
            add_scaled(acc, node(n.child(), path + "/0", par_as_sum), n.trip_count());
            break;
        case NodeKind::Seq:
            for (std::size_t i = 0; i < n.children().size(); ++i) {
                add_scaled(acc, node(n.children()[i], fmt::format("{}/{}", path, i), par_as_sum), 1);
            }
            break;
        case NodeKind::Par: {
            std::vector<Accumulator> branches;
            for (std::size_t i = 0; i < n.children().size(); ++i) {
                branches.push_back(node(n.children()[i], fmt::format("{}/{}", path, i), par_as_sum));
            }
            if (par_as_sum) {
                for (const auto& b : branches) {
                    add_scaled(acc, b, 1);
                }
            } else {
                // Children are built first, so nested auxiliaries get lower ids.
                acc[add_max(path, branches)] = 1;
            }
            break;
        }
        }
        return acc;
    }

    const Design& design_;
    IlpModel& model_;
    std::map<std::string, std::vector<std::size_t>> selection_;
    std::map<std::string, Accumulator> exact_;
    std::map<std::string, Accumulator> summed_;
};

} // namespace

IlpModel build_model(const Design& design, const ObjectiveSpec& objective, LatencyModel latency_model) {
    for (const auto& [id, kernel] : design.kernels) {
        if (kernel.variants.empty()) {
            throw UnsupportedModel(fmt::format("kernel '{}' has no variants to select from", id));
        }
    }
    if (!design.kernels.contains(design.top)) {
        throw UnsupportedModel(fmt::format("top kernel '{}' is not defined", design.top));
    }
    if (design.kernels.size() > 1 && !design.kernel(design.top).body) {
        throw UnsupportedModel("the top kernel has no composition body; latency cannot be modelled");
    }
    require_valid(design);
    if (objective.mode == ObjectiveMode::Lagrangian &&
        (objective.alpha.numerator() <= 0 || objective.alpha.denominator() <= 0)) {
        throw std::invalid_argument("alpha must be positive");
    }

    IlpModel model;
    model.objective = objective;
    model.latency_model = latency_model;
    Builder builder(design, model);
    builder.add_selection_vars();

    Accumulator latency;
    switch (latency_model.kind) {
    case LatencyModelKind::Correct:
        latency = builder.kernel_total(design.top, false);
        break;
    case LatencyModelKind::SumWithMultipliers:
        latency = builder.kernel_total(design.top, true);
        break;
    case LatencyModelKind::TopOnly:
        latency = builder.self_latency(design.top);
        break;
    case LatencyModelKind::SumAll:
        for (const auto& [id, kernel] : design.kernels) {
            add_scaled(latency, builder.self_latency(id), 1);
        }
        break;
    case LatencyModelKind::TopPlusMaxChildren: {
        std::vector<Accumulator> operands;
        if (latency_model.include_top_in_max) {
            operands.push_back(builder.self_latency(design.top));
        }
        for (const auto& callee : direct_callees(design.kernel(design.top))) {
            operands.push_back(builder.kernel_total(callee, false));
        }
        const auto t = builder.add_max("top-max", operands);
        if (!latency_model.include_top_in_max) {
            latency = builder.self_latency(design.top);
        }
        latency[t] += 1;
        break;
    }
    }
    model.latency.terms = to_terms(latency);

    const auto area = builder.area();
    model.area.terms = to_terms(area, true);
    if (objective.mode == ObjectiveMode::ConstrainedArea) {
        model.constraints.push_back({"area_budget", to_terms(area, true), Relation::LessEqual,
                                     objective.area_target.tenths(), ConstraintRole::AreaBudget});
    } else {
        const auto plus = builder.add_var(VarKind::NonnegInteger, AreaSlackPlus{});
        const auto minus = builder.add_var(VarKind::NonnegInteger, AreaSlackMinus{});
        auto terms = to_terms(area, true);
        terms.push_back({-1, plus});
        terms.push_back({1, minus});
        model.constraints.push_back({"area_deviation", std::move(terms), Relation::Equal,
                                     objective.area_target.tenths(), ConstraintRole::AreaDeviation});
    }
    return model;
}

std::string to_lp_string(const IlpModel& model) {
    auto render = [&model](const std::vector<Term>& terms) {
        std::string out;
        for (const auto& term : terms) {
            out += fmt::format(" {}{} {}", term.coefficient < 0 ? "- " : "+ ",
                               term.coefficient < 0 ? -term.coefficient : term.coefficient,
                               model.variables[term.variable].name());
        }
        return out.empty() ? std::string(" 0") : out;
    };
    std::string out = fmt::format("\\ latency model: {}{}\n", to_string(model.latency_model.kind),
                                  model.latency_model.include_top_in_max ? " (top in max)" : "");
    out += fmt::format("\\ objective: {}, area target {} (tenths {})\n", to_string(model.objective.mode),
                       model.objective.area_target.to_string(), model.objective.area_target.tenths());
    out += "minimize\n";
    if (model.objective.mode == ObjectiveMode::ConstrainedArea) {
        out += fmt::format("  latency:{}\n", render(model.latency.terms));
    } else {
        out += fmt::format("  {}/{} * latency + d+ + d-\n", model.objective.alpha.numerator(),
                           model.objective.alpha.denominator());
        out += fmt::format("  latency:{}\n", render(model.latency.terms));
    }
    out += "subject to\n";
    for (const auto& row : model.constraints) {
        const char* rel = row.relation == Relation::Equal ? "=" : row.relation == Relation::LessEqual ? "<=" : ">=";
        out += fmt::format("  {}:{} {} {}\n", row.name, render(row.terms), rel, row.rhs);
    }
    std::string binaries;
    std::string generals;
    for (const auto& var : model.variables) {
        (var.kind == VarKind::Binary ? binaries : generals) += " " + var.name();
    }
    out += fmt::format("binary\n {}\ngeneral\n {}\nend\n", binaries, generals);
    return out;
}

} // namespace hlsdse::ilp

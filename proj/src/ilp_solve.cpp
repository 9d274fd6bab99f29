// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"
#include "hlsdse/ilp.hpp"

namespace hlsdse::ilp {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

/// A linear expression over one-hot groups and auxiliaries, in the shape
/// the bound computation needs.
struct CompiledExpr {
    struct GroupPart {
        std::size_t group;
        std::vector<std::int64_t> coef; // by option
        std::int64_t min;
        std::int64_t max;
    };
    std::int64_t constant = 0;
    std::vector<GroupPart> groups;
    std::vector<std::pair<std::size_t, std::int64_t>> aux; // aux index, coefficient
};

class Solver {
public:
    explicit Solver(const IlpModel& model) : model_(model) {
        const auto n = model.variables.size();
        group_of_.assign(n, kNone);
        option_of_.assign(n, 0);
        aux_of_.assign(n, kNone);

        std::map<std::string, std::size_t> group_index;
        for (const auto& id : model.kernels) {
            group_index.emplace(id, groups_.size());
            groups_.emplace_back();
        }
        for (const auto& var : model.variables) {
            if (const auto* sel = std::get_if<SelectionVar>(&var.annotation)) {
                const auto g = group_index.at(sel->kernel);
                group_of_[var.id] = g;
                option_of_[var.id] = groups_[g].size();
                groups_[g].push_back(var.id);
            } else if (std::holds_alternative<AuxMaxVar>(var.annotation)) {
                aux_of_[var.id] = aux_vars_.size();
                aux_vars_.push_back(var.id);
            }
        }
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (groups_[g].empty()) {
                throw UnsupportedModel(fmt::format("kernel '{}' has no selection variables", model.kernels[g]));
            }
        }

        aux_bounds_.resize(aux_vars_.size());
        for (const auto& row : model.constraints) {
            if (row.role != ConstraintRole::AuxBound) {
                continue;
            }
            // t + sum(c v) >= rhs  becomes  t >= rhs - sum(c v).
            std::size_t owner = kNone;
            std::vector<Term> rest;
            for (const auto& term : row.terms) {
                if (aux_of_[term.variable] != kNone && term.coefficient > 0) {
                    if (owner != kNone || term.coefficient != 1) {
                        throw UnsupportedModel(fmt::format("constraint {} is not a max() bound", row.name));
                    }
                    owner = aux_of_[term.variable];
                } else {
                    rest.push_back({-term.coefficient, term.variable});
                }
            }
            if (owner == kNone || row.relation != Relation::GreaterEqual) {
                throw UnsupportedModel(fmt::format("constraint {} is not a max() bound", row.name));
            }
            auto expr = compile(rest, row.rhs);
            for (const auto& [aux, coef] : expr.aux) {
                if (aux >= owner) {
                    throw UnsupportedModel(fmt::format("constraint {} refers to a later auxiliary", row.name));
                }
            }
            aux_bounds_[owner].push_back(std::move(expr));
        }

        latency_ = compile(model.latency.terms, 0);
        area_ = compile(model.area.terms, 0);
        if (!area_.aux.empty()) {
            throw UnsupportedModel("area expression may only use selection variables");
        }

        // Most options first keeps the tree shallow where it fans out widest.
        order_.resize(groups_.size());
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(),
                         [this](std::size_t a, std::size_t b) { return groups_[a].size() > groups_[b].size(); });
    }

    IlpSolution run() {
        choice_.assign(groups_.size(), -1);
        aux_values_.assign(aux_vars_.size(), 0);
        search(0);

        IlpSolution solution;
        solution.nodes = nodes_;
        if (!best_) {
            solution.status = SolveStatus::Infeasible;
            return solution;
        }
        choice_ = best_->choice;
        solution.status = SolveStatus::Optimal;
        solution.scaled_objective = best_->objective;
        solution.objective = model_.objective.mode == ObjectiveMode::Lagrangian
                                 ? static_cast<double>(best_->objective) /
                                       static_cast<double>(model_.objective.alpha.denominator())
                                 : static_cast<double>(best_->objective);
        solution.predicted_latency = bound();
        solution.predicted_area = Area::from_tenths(best_->area);

        Configuration config;
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            config.choice.emplace(model_.kernels[g], static_cast<std::size_t>(choice_[g]));
        }
        solution.configuration = std::move(config);

        solution.values.assign(model_.variables.size(), 0);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            solution.values[groups_[g][static_cast<std::size_t>(choice_[g])]] = 1;
        }
        for (std::size_t a = 0; a < aux_vars_.size(); ++a) {
            solution.values[aux_vars_[a]] = aux_values_[a];
        }
        const auto deviation = best_->area - model_.objective.area_target.tenths();
        for (const auto& var : model_.variables) {
            if (std::holds_alternative<AreaSlackPlus>(var.annotation)) {
                solution.values[var.id] = std::max<std::int64_t>(deviation, 0);
            } else if (std::holds_alternative<AreaSlackMinus>(var.annotation)) {
                solution.values[var.id] = std::max<std::int64_t>(-deviation, 0);
            }
        }
        return solution;
    }

private:
    struct Incumbent {
        std::int64_t objective;
        std::int64_t area;
        std::vector<int> choice;
    };

    CompiledExpr compile(const std::vector<Term>& terms, std::int64_t constant) const {
        CompiledExpr expr;
        expr.constant = constant;
        std::map<std::size_t, std::vector<std::int64_t>> by_group;
        for (const auto& term : terms) {
            const auto var = term.variable;
            if (var >= model_.variables.size()) {
                throw UnsupportedModel(fmt::format("term refers to unknown variable {}", var));
            }
            if (group_of_[var] != kNone) {
                auto& coef = by_group[group_of_[var]];
                coef.resize(groups_[group_of_[var]].size(), 0);
                coef[option_of_[var]] += term.coefficient;
            } else if (aux_of_[var] != kNone) {
                if (term.coefficient < 0) {
                    throw UnsupportedModel("negative auxiliary coefficient in a bound expression");
                }
                expr.aux.emplace_back(aux_of_[var], term.coefficient);
            } else {
                throw UnsupportedModel(
                    fmt::format("variable {} cannot appear here", model_.variables[var].name()));
            }
        }
        for (auto& [group, coef] : by_group) {
            const auto [lo, hi] = std::minmax_element(coef.begin(), coef.end());
            expr.groups.push_back({group, coef, *lo, *hi});
        }
        return expr;
    }

    /// Lowest value the expression can take below the current node; exact
    /// once every group is decided.
    std::int64_t low(const CompiledExpr& expr) const {
        std::int64_t sum = expr.constant;
        for (const auto& part : expr.groups) {
            const auto c = choice_[part.group];
            sum += c < 0 ? part.min : part.coef[static_cast<std::size_t>(c)];
        }
        for (const auto& [aux, coef] : expr.aux) {
            sum += coef * aux_values_[aux];
        }
        return sum;
    }

    std::int64_t high_area() const {
        std::int64_t sum = area_.constant;
        for (const auto& part : area_.groups) {
            const auto c = choice_[part.group];
            sum += c < 0 ? part.max : part.coef[static_cast<std::size_t>(c)];
        }
        return sum;
    }

    /// Refreshes auxiliary bounds (each is the max of its operands and 0)
    /// and returns the latency lower bound.
    std::int64_t bound() {
        for (std::size_t a = 0; a < aux_bounds_.size(); ++a) {
            std::int64_t value = 0;
            for (const auto& expr : aux_bounds_[a]) {
                value = std::max(value, low(expr));
            }
            aux_values_[a] = value;
        }
        return low(latency_);
    }

    std::int64_t objective(std::int64_t latency, std::int64_t area_lo, std::int64_t area_hi) const {
        if (model_.objective.mode == ObjectiveMode::ConstrainedArea) {
            return latency;
        }
        const auto target = model_.objective.area_target.tenths();
        const auto deviation = std::max<std::int64_t>({0, area_lo - target, target - area_hi});
        return model_.objective.alpha.numerator() * latency + model_.objective.alpha.denominator() * deviation;
    }

    void search(std::size_t depth) {
        ++nodes_;
        const auto latency = bound();
        const auto area_lo = low(area_);
        const auto area_hi = high_area();
        if (model_.objective.mode == ObjectiveMode::ConstrainedArea && area_lo > model_.objective.area_target.tenths()) {
            return;
        }
        const auto obj = objective(latency, area_lo, area_hi);
        if (best_ && std::tie(obj, area_lo) > std::tie(best_->objective, best_->area)) {
            return;
        }
        if (depth == order_.size()) {
            if (!best_ || std::tie(obj, area_lo, choice_) < std::tie(best_->objective, best_->area, best_->choice)) {
                best_ = Incumbent{obj, area_lo, choice_};
            }
            return;
        }
        const auto g = order_[depth];
        for (std::size_t o = 0; o < groups_[g].size(); ++o) {
            choice_[g] = static_cast<int>(o);
            search(depth + 1);
        }
        choice_[g] = -1;
    }

    const IlpModel& model_;
    std::vector<std::vector<std::size_t>> groups_; // group -> option -> variable id
    std::vector<std::size_t> group_of_;
    std::vector<std::size_t> option_of_;
    std::vector<std::size_t> aux_of_;
    std::vector<std::size_t> aux_vars_;
    std::vector<std::vector<CompiledExpr>> aux_bounds_;
    CompiledExpr latency_;
    CompiledExpr area_;
    std::vector<std::size_t> order_;

    std::vector<int> choice_;
    std::vector<std::int64_t> aux_values_;
    std::optional<Incumbent> best_;
    std::uint64_t nodes_ = 0;
};

} // namespace

IlpSolution solve(const IlpModel& model) {
    return Solver(model).run();
}

std::vector<std::string> verify_solution(const IlpModel& model, const IlpSolution& solution) {
    std::vector<std::string> violated;
    if (solution.values.size() != model.variables.size()) {
        violated.push_back("values");
        return violated;
    }
    for (const auto& var : model.variables) {
        const auto v = solution.values[var.id];
        if (v < 0 || (var.kind == VarKind::Binary && v > 1)) {
            violated.push_back(fmt::format("domain[{}]", var.name()));
        }
    }
    for (const auto& row : model.constraints) {
        std::int64_t lhs = 0;
        for (const auto& term : row.terms) {
            lhs += term.coefficient * solution.values[term.variable];
        }
        const bool ok = row.relation == Relation::Equal       ? lhs == row.rhs
                        : row.relation == Relation::LessEqual ? lhs <= row.rhs
                                                              : lhs >= row.rhs;
        if (!ok) {
            violated.push_back(row.name);
        }
    }
    return violated;
}

Area relax_area_target(Area target, double step_fraction) {
    const auto step_ppm = std::llround(step_fraction * 1'000'000.0);
    if (!(step_fraction > 0.0) || step_ppm <= 0) {
        throw std::invalid_argument("relaxation step must be positive");
    }
    constexpr std::int64_t kMillion = 1'000'000;
    const auto t = target.tenths();
    const auto scaled = t * (kMillion + step_ppm);
    auto relaxed = scaled >= 0 ? (scaled + kMillion - 1) / kMillion : scaled / kMillion;
    // A zero (or tiny) target would otherwise never move.
    relaxed = std::max<std::int64_t>(relaxed, t + 1);
    return Area::from_tenths(relaxed);
}

RelaxResult retry_relax(const IlpModel& model, RelaxOptions options) {
    if (model.objective.mode != ObjectiveMode::ConstrainedArea) {
        throw std::invalid_argument("retry_relax needs a constrained-area model");
    }
    RelaxResult result;
    result.area_target = model.objective.area_target;
    IlpModel current = model;
    for (;;) {
        result.solution = solve(current);
        if (result.solution.optimal()) {
            return result;
        }
        if (!(options.step_fraction > 0.0)) {
            throw RetriesExhausted(fmt::format("infeasible at area target {} and a step of {} cannot relax it",
                                               result.area_target.to_string(), options.step_fraction));
        }
        if (result.retries >= options.max_retries) {
            throw RetriesExhausted(fmt::format("no feasible configuration after {} relaxations (area target {})",
                                               result.retries, result.area_target.to_string()));
        }
        result.area_target = relax_area_target(result.area_target, options.step_fraction);
        ++result.retries;
        current = current.with_area_target(result.area_target);
    }
}

} // namespace hlsdse::ilp

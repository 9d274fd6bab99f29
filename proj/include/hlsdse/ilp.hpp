// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hlsdse/design.hpp"
#include "hlsdse/latency.hpp"

namespace hlsdse::ilp {

/// Positive rational weight on latency in the Lagrangian objective. Kept
/// exact so the solver never compares floating-point objectives.
class Alpha {
public:
    constexpr Alpha() = default;

    /// Throws std::invalid_argument unless numerator, denominator > 0.
    static Alpha ratio(std::int64_t numerator, std::int64_t denominator);
    /// Rounds to a multiple of 1e-6; throws std::invalid_argument if the
    /// result is not positive.
    static Alpha from_double(double value);

    constexpr std::int64_t numerator() const { return num_; }
    constexpr std::int64_t denominator() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    bool operator==(const Alpha&) const = default;

private:
    std::int64_t num_ = 1;
    std::int64_t den_ = 1;
};

enum class ObjectiveMode {
    ConstrainedArea, // min latency s.t. area <= target
    Lagrangian,      // min alpha*latency + |area - target|
};

std::string_view to_string(ObjectiveMode mode);
std::optional<ObjectiveMode> parse_objective_mode(std::string_view name); // constrained | lagrangian

struct ObjectiveSpec {
    ObjectiveMode mode = ObjectiveMode::ConstrainedArea;
    Area area_target;
    Alpha alpha;

    static ObjectiveSpec constrained(Area target) { return {ObjectiveMode::ConstrainedArea, target, {}}; }
    static ObjectiveSpec lagrangian(Area target, Alpha alpha = {}) {
        return {ObjectiveMode::Lagrangian, target, alpha};
    }
    bool operator==(const ObjectiveSpec&) const = default;
};

enum class VarKind { Binary, NonnegInteger, NonnegContinuous };

struct SelectionVar {
    std::string kernel;
    std::size_t variant = 0;
    bool operator==(const SelectionVar&) const = default;
};
/// max() auxiliary: a Par node (labelled by its body path) or the top-level
/// max of the TopPlusMaxChildren formulation.
struct AuxMaxVar {
    std::string label;
    bool operator==(const AuxMaxVar&) const = default;
};
struct AreaSlackPlus {
    bool operator==(const AreaSlackPlus&) const = default;
};
struct AreaSlackMinus {
    bool operator==(const AreaSlackMinus&) const = default;
};
using VarAnnotation = std::variant<SelectionVar, AuxMaxVar, AreaSlackPlus, AreaSlackMinus>;

struct IlpVariable {
    std::size_t id = 0;
    VarKind kind = VarKind::Binary;
    VarAnnotation annotation;

    /// x[A,1], t[top/body], d+, d-
    std::string name() const;
};

struct Term {
    std::int64_t coefficient = 0;
    std::size_t variable = 0;
    bool operator==(const Term&) const = default;
};

enum class Relation { LessEqual, Equal, GreaterEqual };

enum class ConstraintRole {
    OneHot,        // sum_o x[k,o] = 1
    AuxBound,      // t - expr >= 0
    AreaBudget,    // area <= target
    AreaDeviation, // area - d+ + d- = target
};

struct LinearConstraint {
    std::string name;
    std::vector<Term> terms;
    Relation relation = Relation::Equal;
    std::int64_t rhs = 0;
    ConstraintRole role = ConstraintRole::OneHot;
};

struct LinearExpr {
    std::vector<Term> terms;
};

/// Kernel-selection ILP. Latency is in cycles and area in tenths of a unit,
/// so every coefficient is an exact integer.
struct IlpModel {
    std::vector<IlpVariable> variables;
    std::vector<LinearConstraint> constraints;
    LinearExpr latency;
    LinearExpr area;
    ObjectiveSpec objective;
    LatencyModel latency_model;
    std::vector<std::string> kernels; // one one-hot group each, in id order

    std::size_t count(VarKind kind) const;
    std::size_t count(ConstraintRole role) const;
    std::size_t aux_count() const;

    /// Same model with the area target moved (budget or deviation row).
    IlpModel with_area_target(Area target) const;
};

/// Emits one-hot rows, the area expression, the latency expression for the
/// requested formulation (Par nodes and the TopPlusMaxChildren max become
/// auxiliaries bounded below by each operand), and the objective rows.
/// Throws UnsupportedModel when the design lacks variants or, for a
/// multi-kernel design, a top-level body.
IlpModel build_model(const Design& design, const ObjectiveSpec& objective, LatencyModel latency_model = {});

enum class SolveStatus { Optimal, Infeasible };

struct IlpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::optional<Configuration> configuration;
    /// Objective multiplied by alpha's denominator (exact).
    std::int64_t scaled_objective = 0;
    double objective = 0.0;
    Cycles predicted_latency = 0;
    Area predicted_area;
    std::vector<std::int64_t> values; // indexed by variable id
    std::uint64_t nodes = 0;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Exact branch and bound over the one-hot groups. Ties on the objective
/// break toward smaller area, then the lexicographically smaller
/// configuration, matching brute_force_optimum.
IlpSolution solve(const IlpModel& model);

/// Names of constraints the solution violates; empty for a valid solution.
std::vector<std::string> verify_solution(const IlpModel& model, const IlpSolution& solution);

struct RelaxOptions {
    double step_fraction = 0.1;
    int max_retries = 16;
};

struct RelaxResult {
    IlpSolution solution;
    int retries = 0;
    Area area_target;
};

/// target * (1 + step), rounded up to the next tenth.
Area relax_area_target(Area target, double step_fraction);

/// Re-solves with a growing area target until feasible. ConstrainedArea
/// models only. Throws RetriesExhausted.
RelaxResult retry_relax(const IlpModel& model, RelaxOptions options = {});

/// LP-like dump, one constraint per line; for logs, not interchange.
std::string to_lp_string(const IlpModel& model);

} // namespace hlsdse::ilp

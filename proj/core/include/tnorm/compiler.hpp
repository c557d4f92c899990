// Translation of norms and exceptions into prioritized production rules.
//
// Every norm yields an activation rule, a regulated rule, and (with ELSE)
// an else rule; every exception yields one rule. Priorities: norm rules 1,
// exception rules 2, exceptions-to-exceptions 3; the engine fires higher
// priorities first so inhibitor facts land before the rules they guard.
//
// Variables that the inner rule or an exception needs from the activation
// context are "threaded": recovered by querying the lifecycle facts the
// activation rule asserted (activated, debtor, end, ...) and, transitively,
// the trigger's own condition atoms.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "tnorm/ast.hpp"

namespace tnorm {

struct ComputeAction {
    ComputeStmt stmt;
    bool operator==(const ComputeAction&) const = default;
};

// Mints fresh_id(norm, slot=var, trigger event) and binds it to `var`.
struct CreateAction {
    std::string class_name;
    std::string var;
    bool operator==(const CreateAction&) const = default;
};

struct AssertAction {
    AssertStmt stmt;
    bool operator==(const AssertAction&) const = default;
};

using RuleAction = std::variant<ComputeAction, CreateAction, AssertAction>;

struct ProductionRule {
    std::string id;        // "<norm>/activation|regulated|else" or the exception name
    int priority = 1;
    std::string norm;      // owning norm; for exceptions, the (ultimate) target norm
    std::string trigger_var;  // variable whose binding names the causing event
    Pattern conditions;
    std::vector<RuleAction> actions;
    std::size_t presentation = 0;  // source order, conflict-resolution tiebreak

    bool operator==(const ProductionRule&) const = default;
};

struct RuleSet {
    std::vector<ProductionRule> rules;
};

std::vector<ProductionRule> compile_norm(const NormAst& n);
ProductionRule compile_exception(const ExceptionAst& e, const NormAst& target);

// Full translation in presentation order. Exceptions-to-exceptions need the
// target exception's compiled rule, so use this for whole files.
RuleSet compile_rules(const std::vector<RuleItem>& items);

// Stable human-readable listing, one block per rule.
std::string dump(const RuleSet& rules);

} // namespace tnorm

#include "tnorm/engine.hpp"

#include <algorithm>

#include "tnorm/vocab.hpp"

namespace tnorm {

std::string dedup_key(const ProductionRule& rule, const Binding& binding) {
    std::string key = rule.id;
    for (const auto& [var, value] : binding) {
        key += '|';
        key += var;
        key += '=';
        key += value.canonical();
    }
    return key;
}

Agenda Engine::match(const RuleSet& rules, const Kb& kb) const {
    Agenda agenda;
    for (const auto& rule : rules.rules) {
        for (auto& b : kb.query(rule.conditions)) {
            std::string key = dedup_key(rule, b);
            if (fired_.contains(key)) continue;
            agenda.push_back({&rule, std::move(b), std::move(key)});
        }
    }
    std::sort(agenda.begin(), agenda.end(), [](const RuleInstance& a, const RuleInstance& b) {
        if (a.rule->priority != b.rule->priority) return a.rule->priority > b.rule->priority;
        if (a.rule->presentation != b.rule->presentation) return a.rule->presentation < b.rule->presentation;
        return a.dedup_key < b.dedup_key;
    });
    return agenda;
}

namespace {

Value substitute(const Term& t, const Binding& b, const ProductionRule& rule) {
    if (!t.is_var) return t.value;
    auto it = b.find(t.var);
    if (it == b.end())
        throw ActionError(rule.id + ": unbound variable ?" + t.var + " at action time");
    return it->second;
}

Resource subject_of(const Term& t, const Binding& b, const ProductionRule& rule) {
    Value v = substitute(t, b, rule);
    if (!v.is_resource())
        throw ActionError(rule.id + ": fact subject must be an individual, got " + v.display());
    return v.as_resource();
}

} // namespace

std::vector<Fact> Engine::fire(const RuleInstance& instance, Kb& kb) {
    const ProductionRule& rule = *instance.rule;
    fired_.insert(instance.dedup_key);

    Binding b = instance.binding;
    std::vector<Fact> added;
    auto push_new = [&](Fact f) {
        Fact copy = f;
        if (kb.assert_fact(std::move(f))) added.push_back(std::move(copy));
    };

    for (const auto& action : rule.actions) {
        if (const auto* comp = std::get_if<ComputeAction>(&action)) {
            auto v = eval_expr(comp->stmt.expr, b);
            if (!v)
                throw ActionError(rule.id + ": COMPUTE ?" + comp->stmt.target +
                                  " failed (type error or unbound operand)");
            b[comp->stmt.target] = std::move(*v);
        } else if (const auto* create = std::get_if<CreateAction>(&action)) {
            auto it = b.find(rule.trigger_var);
            if (it == b.end() || !it->second.is_resource())
                throw ActionError(rule.id + ": CREATE needs the trigger event ?" + rule.trigger_var);
            Resource id{fresh_id(rule.norm, create->var, it->second.as_resource().id)};
            b[create->var] = Value(id);
            push_new(Fact{id, "a", Value(Resource{create->class_name}), Partition::Deontic,
                          Origin::Asserted});
        } else {
            const AssertStmt& s = std::get<AssertAction>(action).stmt;
            push_new(Fact{subject_of(s.subject, b, rule), s.predicate, substitute(s.object, b, rule),
                          Partition::Deontic, Origin::Asserted});
        }
    }
    return added;
}

FiringTrace Engine::run_to_fixpoint(const RuleSet& rules, Kb& kb, const Schema& schema) {
    FiringTrace trace;
    std::size_t fired_this_run = 0;
    while (true) {
        kb.materialize(schema);
        Agenda agenda = match(rules, kb);
        if (agenda.empty()) break;
        if (++fired_this_run > budget_)
            throw FixpointBudgetExceeded("fixpoint did not settle within " + std::to_string(budget_) +
                                         " firings");
        Firing f;
        f.seq = seq_++;
        f.rule_id = agenda.front().rule->id;
        f.binding = agenda.front().binding;
        f.added = fire(agenda.front(), kb);
        trace.push_back(std::move(f));
    }
    return trace;
}

} // namespace tnorm

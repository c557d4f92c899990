#include "tnorm/compiler.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "tnorm/vocab.hpp"

namespace tnorm {

namespace {

Term var_term(const std::string& v) { return Term::variable(v); }
Term res_term(const std::string& r) { return Term::constant(Value(Resource{r})); }

Atom assert_atom(const AssertStmt& s) {
    return Atom::prop(s.predicate, s.subject, s.object);
}

void rename_in(Term& t, const std::string& from, const std::string& to) {
    if (t.is_var && t.var == from) t.var = to;
}

void rename_in(Expr& e, const std::string& from, const std::string& to) {
    if (e.kind == Expr::Kind::Var && e.var == from) e.var = to;
    for (auto& a : e.args) rename_in(a, from, to);
}

void rename_in(Atom& a, const std::string& from, const std::string& to) {
    for (auto& t : a.terms) rename_in(t, from, to);
    rename_in(a.lhs, from, to);
    rename_in(a.rhs, from, to);
    for (auto& b : a.body) rename_in(b, from, to);
}

void rename_in(Pattern& p, const std::string& from, const std::string& to) {
    if (from == to) return;
    for (auto& a : p.atoms) rename_in(a, from, to);
}

void atom_vars(const Atom& a, std::vector<std::string>& out) {
    for (const auto& t : a.terms)
        if (t.is_var) out.push_back(t.var);
    collect_vars(a.lhs, out);
    collect_vars(a.rhs, out);
    for (const auto& b : a.body) atom_vars(b, out);
}

bool mentions(const Atom& a, const std::string& v) {
    std::vector<std::string> vars;
    atom_vars(a, vars);
    return std::find(vars.begin(), vars.end(), v) != vars.end();
}

void dedup_atoms(Pattern& p) {
    std::vector<Atom> out;
    for (auto& a : p.atoms)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
    p.atoms = std::move(out);
}

// Negation guard helpers. A guard is a single-atom NOT over one property.
Atom not_prop(std::string pred, Term subj, Term obj) {
    return Atom::negation({Atom::prop(std::move(pred), std::move(subj), std::move(obj))});
}

bool is_guard(const Atom& a, std::string_view pred, const std::string& subject_const) {
    if (a.kind != Atom::Kind::Not || a.body.size() != 1) return false;
    const Atom& b = a.body[0];
    return b.kind == Atom::Kind::Property && b.name == pred && !b.terms[0].is_var &&
           b.terms[0].value.is_resource() && b.terms[0].value.as_resource().id == subject_const;
}

void erase_guard(Pattern& p, std::string_view pred, const std::string& subject_const) {
    std::erase_if(p.atoms, [&](const Atom& a) { return is_guard(a, pred, subject_const); });
}

// Finds the atTime/inXSDDateTimeStamp chain for an event variable inside a
// pattern, appending synthesized links when absent. Returns the timestamp
// variable of the chain's end.
struct TimeChain {
    std::string instant_var;
    std::string time_var;
};

TimeChain ensure_time_chain(Pattern& p, const std::string& event_var, const std::string& synth_instant,
                            const std::string& synth_time) {
    TimeChain c;
    for (const auto& a : p.atoms)
        if (a.kind == Atom::Kind::Property && a.name == vocab::atTime && a.terms[0].is_var &&
            a.terms[0].var == event_var && a.terms[1].is_var) {
            c.instant_var = a.terms[1].var;
            break;
        }
    if (!c.instant_var.empty())
        for (const auto& a : p.atoms)
            if (a.kind == Atom::Kind::Property && a.name == vocab::inXSDDateTimeStamp && a.terms[0].is_var &&
                a.terms[0].var == c.instant_var && a.terms[1].is_var) {
                c.time_var = a.terms[1].var;
                break;
            }
    if (c.instant_var.empty()) {
        c.instant_var = synth_instant;
        p.atoms.push_back(Atom::prop(std::string(vocab::atTime), var_term(event_var), var_term(c.instant_var)));
    }
    if (c.time_var.empty()) {
        c.time_var = synth_time;
        p.atoms.push_back(Atom::prop(std::string(vocab::inXSDDateTimeStamp), var_term(c.instant_var),
                                     var_term(c.time_var)));
    }
    return c;
}

// Threading: recover activation-context variables by querying facts the
// activation rule left behind. The pool is ordered so lifecycle asserts win
// over trigger conditions (a debtor comes from debtor(?dr,?agent), not from
// re-matching the whole trigger).
class Threader {
public:
    explicit Threader(const NormAst& n) : owner_(n.name) {
        for (const auto& s : n.asserts) pool_.push_back(assert_atom(s));
        for (const auto& c : n.creates) pool_.push_back(Atom::cls(c.class_name, var_term(c.var)));
        for (const auto& a : n.outer.conditions.atoms)
            if (a.kind == Atom::Kind::Class || a.kind == Atom::Kind::Property) pool_.push_back(a);

        auto outer = outer_scope_vars(n);
        reachable_.insert(outer.begin(), outer.end());
        for (const auto& c : n.computes) reachable_.insert(c.target);
        for (const auto& c : n.creates) reachable_.insert(c.var);
    }

    // Variables the activation context can supply at all.
    bool reachable(const std::string& v) const { return reachable_.contains(v); }

    // Atoms (in pool order) binding every needed variable, walking
    // transitively: an atom pulled in for one variable may itself need more.
    std::vector<Atom> thread(const std::vector<std::string>& needed, std::set<std::string> covered) const {
        std::vector<std::size_t> included;
        std::set<std::size_t> included_set;
        std::deque<std::string> work(needed.begin(), needed.end());
        while (!work.empty()) {
            std::string v = std::move(work.front());
            work.pop_front();
            if (covered.contains(v)) continue;
            std::size_t idx = pool_.size();
            for (std::size_t i = 0; i < pool_.size(); ++i)
                if (mentions(pool_[i], v)) {
                    idx = i;
                    break;
                }
            if (idx == pool_.size())
                throw CompileError(owner_ + ": unthreadable variable ?" + v +
                                   " (not recoverable from the activation context)");
            covered.insert(v);
            if (included_set.insert(idx).second) {
                included.push_back(idx);
                std::vector<std::string> vars;
                atom_vars(pool_[idx], vars);
                for (auto& w : vars)
                    if (!covered.contains(w)) work.push_back(std::move(w));
            }
        }
        std::sort(included.begin(), included.end());
        std::vector<Atom> out;
        out.reserve(included.size());
        for (auto i : included) out.push_back(pool_[i]);
        return out;
    }

private:
    std::string owner_;
    std::vector<Atom> pool_;
    std::set<std::string> reachable_;
};

void collect_assert_vars(const std::vector<AssertStmt>& stmts, std::vector<std::string>& out) {
    for (const auto& s : stmts) {
        if (s.subject.is_var) out.push_back(s.subject.var);
        if (s.object.is_var) out.push_back(s.object.var);
    }
}

const AssertStmt* find_pred(const std::vector<AssertStmt>& stmts, std::string_view pred) {
    for (const auto& s : stmts)
        if (s.predicate == pred) return &s;
    return nullptr;
}

bool is_agent_level(const AssertStmt& s) {
    return s.predicate == vocab::fulfills || s.predicate == vocab::violates;
}

// Shared construction context for one norm's three rules and for the merge
// step of its exceptions.
struct NormCompiler {
    const NormAst& n;
    Threader threader;
    std::string drv;
    bool created_deadline = false;  // BEFORE names a created TimeEvent

    explicit NormCompiler(const NormAst& norm) : n(norm), threader(norm), drv(norm.dr_var()) {
        if (n.inner.before)
            created_deadline = std::any_of(n.creates.begin(), n.creates.end(), [&](const CreateStmt& c) {
                return c.var == n.inner.before->event_var;
            });
    }

    Atom anchor() const { return Atom::prop(std::string(vocab::isGenerated), var_term(drv), res_term(n.name)); }

    // Rule 1 conditions: the outer trigger, the enactment-time guard, and
    // the type-1 exception guard.
    Pattern activation_conditions() const {
        Pattern p = n.outer.conditions;
        if (!n.outer.synthesized) {
            TimeChain t1 = ensure_time_chain(p, n.outer.event_var, "__inst1", "__t1");
            p.atoms.push_back(Atom::cls(std::string(vocab::NormEnactment), var_term("__enact")));
            p.atoms.push_back(Atom::prop(std::string(vocab::enacts), var_term("__enact"), res_term(n.name)));
            p.atoms.push_back(Atom::prop(std::string(vocab::atTime), var_term("__enact"), var_term("__enactI")));
            p.atoms.push_back(Atom::prop(std::string(vocab::inXSDDateTimeStamp), var_term("__enactI"),
                                         var_term("__enactT")));
            p.atoms.push_back(Atom::compare(Expr::variable(t1.time_var), CmpOp::Ge, Expr::variable("__enactT")));
        }
        p.atoms.push_back(not_prop(std::string(vocab::exceptionToNorm), res_term(n.name),
                                   var_term(n.outer.event_var)));
        return p;
    }

    std::vector<RuleAction> activation_actions() const {
        std::vector<RuleAction> actions;
        for (const auto& c : n.computes) actions.push_back(ComputeAction{c});
        for (const auto& c : n.creates) actions.push_back(CreateAction{c.class_name, c.var});
        for (const auto& s : n.asserts) actions.push_back(AssertAction{s});
        if (!find_pred(n.asserts, vocab::activated))
            actions.push_back(AssertAction{{std::string(vocab::activated), var_term(drv),
                                            var_term(n.outer.event_var)}});
        return actions;
    }

    // Deadline chain recorded by the activation asserts (created TimeEvent).
    TimeChain deadline_chain() const {
        TimeChain c;
        const std::string& tev = n.inner.before->event_var;
        for (const auto& s : n.asserts)
            if (s.predicate == vocab::atTime && s.subject.is_var && s.subject.var == tev && s.object.is_var)
                c.instant_var = s.object.var;
        for (const auto& s : n.asserts)
            if (s.predicate == vocab::inXSDDateTimeStamp && s.subject.is_var &&
                s.subject.var == c.instant_var && s.object.is_var)
                c.time_var = s.object.var;
        return c;
    }

    // Variables from `vars` that only the activation context can bind.
    void need_reachable(const std::vector<std::string>& vars, const std::set<std::string>& local,
                        std::vector<std::string>& out) const {
        for (const auto& v : vars)
            if (threader.reachable(v) && !local.contains(v)) out.push_back(v);
    }

    // Rule 2 conditions up to (and including) the BEFORE timing, without
    // the exception and refraction guards. Type-2 exceptions merge onto
    // exactly this prefix.
    Pattern regulated_prefix() const {
        Pattern p;
        p.atoms.push_back(anchor());

        // Every activation-scope variable the inner rule mentions is
        // threaded, even when an inner atom also binds it: the inner
        // occurrence must join the relation's own context (a payment
        // referencing access A may not fulfil the obligation from access B).
        std::vector<std::string> needed;
        need_reachable(free_vars(n.inner.conditions), {}, needed);
        {
            std::vector<std::string> avars;
            collect_assert_vars(n.inner.then_asserts, avars);
            need_reachable(avars, {}, needed);
        }

        Pattern inner = n.inner.conditions;
        std::optional<TimeChain> t2;
        std::vector<Atom> timing_tail;
        if (n.inner.before) {
            t2 = ensure_time_chain(inner, n.inner.event_var, "__i2", "__t2");
            if (created_deadline) {
                TimeChain due = deadline_chain();
                needed.push_back(n.inner.before->event_var);
                needed.push_back(due.instant_var);
                needed.push_back(due.time_var);
                timing_tail.push_back(
                    Atom::compare(Expr::variable(t2->time_var), CmpOp::Lt, Expr::variable(due.time_var)));
            } else {
                const BeforeClause& b = *n.inner.before;
                std::vector<Atom> body = b.conditions.atoms;
                body.push_back(Atom::prop(std::string(vocab::happened), var_term(b.event_var),
                                          var_term("__t3")));
                body.push_back(Atom::compare(Expr::variable("__t3"), CmpOp::Le, Expr::variable(t2->time_var)));
                timing_tail.push_back(Atom::negation(std::move(body)));
                need_reachable(free_vars(b.conditions), {}, needed);
            }
        }

        for (auto& a : threader.thread(needed, {drv})) p.atoms.push_back(std::move(a));
        for (auto& a : inner.atoms) p.atoms.push_back(std::move(a));
        for (auto& a : timing_tail) p.atoms.push_back(std::move(a));
        dedup_atoms(p);
        return p;
    }

    Pattern regulated_conditions() const {
        Pattern p = regulated_prefix();
        p.atoms.push_back(not_prop(std::string(vocab::exceptionToDR), var_term(drv),
                                   var_term(n.inner.event_var)));
        p.atoms.push_back(not_prop(std::string(vocab::exceptionToDR), var_term(drv), var_term("__anyex")));
        const AssertStmt* agent = nullptr;
        for (const auto& s : n.inner.then_asserts)
            if (is_agent_level(s)) agent = &s;
        // One outcome per (agent, relation): a second matching event by (or
        // for) the same agent neither fulfils nor violates again.
        p.atoms.push_back(not_prop(agent->predicate, agent->subject, var_term(drv)));
        return p;
    }

    Pattern else_conditions() const {
        Pattern p;
        p.atoms.push_back(anchor());

        // The negated "a qualifying regulated event happened in time" body.
        Pattern body = n.inner.conditions;
        TimeChain t2 = ensure_time_chain(body, n.inner.event_var, "__i2", "__t2");
        body.atoms.push_back(Atom::compare(Expr::variable(t2.time_var), CmpOp::Lt, Expr::variable("__t3")));

        std::vector<std::string> needed;
        need_reachable(free_vars(n.inner.conditions), {}, needed);
        {
            std::vector<std::string> avars;
            collect_assert_vars(else_asserts_kept(), avars);
            need_reachable(avars, {}, needed);
        }

        const BeforeClause& b = *n.inner.before;
        std::vector<Atom> positives;
        if (created_deadline) {
            needed.push_back(b.event_var);
        } else {
            need_reachable(free_vars(b.conditions), {}, needed);
            positives = b.conditions.atoms;
        }

        for (auto& a : threader.thread(needed, {drv})) p.atoms.push_back(std::move(a));
        for (auto& a : positives) p.atoms.push_back(std::move(a));
        p.atoms.push_back(Atom::prop(std::string(vocab::happened), var_term(b.event_var), var_term("__t3")));
        p.atoms.push_back(Atom::negation(std::move(body.atoms)));
        p.atoms.push_back(not_prop(std::string(vocab::exceptionToDR), var_term(drv), var_term("__anyex")));
        p.atoms.push_back(not_prop(std::string(vocab::fulfilled), var_term(drv), var_term("__f")));
        p.atoms.push_back(not_prop(std::string(vocab::violated), var_term(drv), var_term("__v")));
        dedup_atoms(p);
        return p;
    }

    // ELSE asserts that survive translation: general relations record only
    // the dr-level outcome (there is no bindable agent at the deadline).
    std::vector<AssertStmt> else_asserts_kept() const {
        std::vector<AssertStmt> out;
        for (const auto& s : *n.inner.else_asserts)
            if (n.is_specific() || !is_agent_level(s)) out.push_back(s);
        return out;
    }
};

ProductionRule make_rule(std::string id, int priority, std::string norm, std::string trigger_var,
                         Pattern conditions, std::vector<RuleAction> actions) {
    ProductionRule r;
    r.id = std::move(id);
    r.priority = priority;
    r.norm = std::move(norm);
    r.trigger_var = std::move(trigger_var);
    r.conditions = std::move(conditions);
    r.actions = std::move(actions);
    return r;
}

std::vector<RuleAction> assert_actions(const std::vector<AssertStmt>& stmts) {
    std::vector<RuleAction> out;
    for (const auto& s : stmts) out.push_back(AssertAction{s});
    return out;
}

} // namespace

std::vector<ProductionRule> compile_norm(const NormAst& n) {
    NormCompiler c(n);
    std::vector<ProductionRule> rules;
    rules.push_back(make_rule(n.name + "/activation", 1, n.name, n.outer.event_var,
                              c.activation_conditions(), c.activation_actions()));
    rules.push_back(make_rule(n.name + "/regulated", 1, n.name, n.inner.event_var, c.regulated_conditions(),
                              assert_actions(n.inner.then_asserts)));
    if (n.inner.else_asserts)
        rules.push_back(make_rule(n.name + "/else", 1, n.name, n.inner.before->event_var,
                                  c.else_conditions(), assert_actions(c.else_asserts_kept())));
    return rules;
}

ProductionRule compile_exception(const ExceptionAst& e, const NormAst& target) {
    NormCompiler c(target);

    if (e.kind == ExceptionKind::ToActivation) {
        Pattern p = c.activation_conditions();
        erase_guard(p, vocab::exceptionToNorm, target.name);
        Pattern exc = e.conditions;
        rename_in(exc, e.event_var, target.outer.event_var);
        for (auto& a : exc.atoms) p.atoms.push_back(std::move(a));
        dedup_atoms(p);
        p.atoms.push_back(not_prop(std::string(vocab::exceptionToException), res_term(e.name),
                                   var_term(target.outer.event_var)));
        AssertStmt consequent{std::string(vocab::exceptionToNorm), res_term(target.name),
                              var_term(target.outer.event_var)};
        return make_rule(e.name, 2, target.name, target.outer.event_var, std::move(p),
                         {AssertAction{std::move(consequent)}});
    }

    if (e.kind == ExceptionKind::ToRegulated) {
        Pattern p = c.regulated_prefix();
        Pattern exc = e.conditions;
        rename_in(exc, e.event_var, target.inner.event_var);
        rename_in(exc, e.consequent_subject.var, c.drv);
        for (auto& a : exc.atoms) p.atoms.push_back(std::move(a));
        dedup_atoms(p);
        p.atoms.push_back(not_prop(std::string(vocab::exceptionToException), res_term(e.name),
                                   var_term(target.inner.event_var)));
        AssertStmt consequent{std::string(vocab::exceptionToDR), var_term(c.drv),
                              var_term(target.inner.event_var)};
        return make_rule(e.name, 2, target.name, target.inner.event_var, std::move(p),
                         {AssertAction{std::move(consequent)}});
    }

    // Type 3: the exception's own pattern, dr-anchored, with any norm-scope
    // variables it mentions threaded in (threading atoms the pattern already
    // contains disappear in dedup, so a self-contained exception compiles
    // verbatim).
    Pattern exc = e.conditions;
    rename_in(exc, e.consequent_subject.var, c.drv);
    std::vector<std::string> mentioned = free_vars(exc);
    mentioned.push_back(c.drv);
    std::vector<std::string> needed;
    for (const auto& v : mentioned)
        if (c.threader.reachable(v) && v != e.event_var) needed.push_back(v);
    Pattern p;
    for (auto& a : c.threader.thread(needed, {c.drv})) p.atoms.push_back(std::move(a));
    for (auto& a : exc.atoms) p.atoms.push_back(std::move(a));
    dedup_atoms(p);
    p.atoms.push_back(not_prop(std::string(vocab::exceptionToException), res_term(e.name),
                               var_term(e.event_var)));
    AssertStmt consequent{std::string(vocab::exceptionToDR), var_term(c.drv), var_term(e.event_var)};
    return make_rule(e.name, 2, target.name, e.event_var, std::move(p), {AssertAction{std::move(consequent)}});
}

RuleSet compile_rules(const std::vector<RuleItem>& items) {
    std::map<std::string, const NormAst*> norms;
    for (const auto& item : items)
        if (const auto* n = std::get_if<NormAst>(&item)) norms.emplace(n->name, n);

    // Per-item rule blocks in source order; exceptions-to-exceptions filled
    // in a second sweep once their targets are compiled.
    std::vector<std::vector<ProductionRule>> blocks(items.size());
    std::map<std::string, const ProductionRule*> compiled_exceptions;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (const auto* n = std::get_if<NormAst>(&items[i])) {
            blocks[i] = compile_norm(*n);
        } else {
            const auto& e = std::get<ExceptionAst>(items[i]);
            if (e.kind == ExceptionKind::ToException) continue;
            auto it = norms.find(e.target);
            if (it == norms.end()) throw CompileError(e.name + ": unknown norm '" + e.target + "'");
            blocks[i] = {compile_exception(e, *it->second)};
            compiled_exceptions.emplace(e.name, &blocks[i][0]);
        }
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto* e = std::get_if<ExceptionAst>(&items[i]);
        if (!e || e->kind != ExceptionKind::ToException) continue;
        auto it = compiled_exceptions.find(e->target);
        if (it == compiled_exceptions.end())
            throw CompileError(e->name + ": unknown exception '" + e->target + "'");
        const ProductionRule& target = *it->second;
        Pattern p = target.conditions;
        erase_guard(p, vocab::exceptionToException, target.id);
        Pattern exc = e->conditions;
        rename_in(exc, e->event_var, target.trigger_var);
        for (auto& a : exc.atoms) p.atoms.push_back(std::move(a));
        dedup_atoms(p);
        p.atoms.push_back(not_prop(std::string(vocab::exceptionToException), res_term(e->name),
                                   var_term(target.trigger_var)));
        AssertStmt consequent{std::string(vocab::exceptionToException), res_term(target.id),
                              var_term(target.trigger_var)};
        blocks[i] = {make_rule(e->name, 3, target.norm, target.trigger_var, std::move(p),
                               {AssertAction{std::move(consequent)}})};
    }

    RuleSet out;
    for (auto& block : blocks)
        for (auto& r : block) {
            r.presentation = out.rules.size();
            out.rules.push_back(std::move(r));
        }
    return out;
}

std::string dump(const RuleSet& rules) {
    std::string out;
    for (const auto& r : rules.rules) {
        out += "RULE " + r.id + "\n";
        out += "PRIORITY " + std::to_string(r.priority) + "\n";
        out += "NORM " + r.norm + "\n";
        out += "TRIGGER ?" + r.trigger_var + "\n";
        out += "IF\n";
        for (const auto& a : r.conditions.atoms) out += "  " + to_string(a) + "\n";
        out += "DO\n";
        for (const auto& action : r.actions) {
            if (const auto* comp = std::get_if<ComputeAction>(&action))
                out += "  COMPUTE ?" + comp->stmt.target + " = " + to_string(comp->stmt.expr) + "\n";
            else if (const auto* create = std::get_if<CreateAction>(&action))
                out += "  CREATE " + create->class_name + "(?" + create->var + ")\n";
            else
                out += "  ASSERT " + to_string(assert_atom(std::get<AssertAction>(action).stmt)) + "\n";
        }
        out += "\n";
    }
    return out;
}

} // namespace tnorm

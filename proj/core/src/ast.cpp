#include "tnorm/ast.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tnorm/vocab.hpp"

namespace tnorm {

const std::string& NormAst::dr_var() const {
    for (const auto& c : creates)
        if (c.class_name == vocab::DeonticRelation) return c.var;
    static const std::string none;
    return none;
}

bool NormAst::is_specific() const {
    for (const auto& a : asserts)
        if (a.predicate == vocab::debtor) return true;
    return false;
}

bool NormAst::operator==(const NormAst& o) const {
    return name == o.name && outer == o.outer && computes == o.computes && creates == o.creates &&
           asserts == o.asserts && inner == o.inner;
}

bool ExceptionAst::operator==(const ExceptionAst& o) const {
    return name == o.name && target == o.target && kind == o.kind && event_var == o.event_var &&
           conditions == o.conditions && consequent_predicate == o.consequent_predicate &&
           consequent_subject == o.consequent_subject && consequent_object == o.consequent_object;
}

// ---- pretty printer ---------------------------------------------------------

namespace {

int precedence(Expr::Kind k) {
    switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    default: return 3;
    }
}

std::string dsl_duration(Duration d) {
    std::int64_t ms = d.ms;
    std::string sign;
    if (ms < 0) {
        sign = "-";
        ms = -ms;
    }
    if (ms % 86'400'000 == 0) return sign + std::to_string(ms / 86'400'000) + " days";
    if (ms % 3'600'000 == 0) return sign + std::to_string(ms / 3'600'000) + " hours";
    if (ms % 60'000 == 0) return sign + std::to_string(ms / 60'000) + " minutes";
    if (ms % 1000 == 0) return sign + std::to_string(ms / 1000) + " seconds";
    return sign + std::to_string(ms) + " ms";
}

std::string dsl_expr(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Var: return "?" + e.var;
    case K::Lit:
        if (e.lit.is_duration()) return dsl_duration(e.lit.as_duration());
        return e.lit.display();
    case K::HourOf: return dsl_expr(e.args[0]) + ".hour";
    case K::MinuteOf: return dsl_expr(e.args[0]) + ".minute";
    case K::DayOf: return dsl_expr(e.args[0]) + ".day";
    case K::YearOf: return dsl_expr(e.args[0]) + ".year";
    case K::AddYears: return dsl_expr(e.args[0]) + ".year + " + std::to_string(e.years);
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div: {
        const char* op = e.kind == K::Add ? " + " : e.kind == K::Sub ? " - " : e.kind == K::Mul ? " * " : " / ";
        auto wrap = [&](const Expr& child) {
            std::string s = dsl_expr(child);
            if (precedence(child.kind) < precedence(e.kind)) return "(" + s + ")";
            return s;
        };
        return wrap(e.args[0]) + op + wrap(e.args[1]);
    }
    }
    return "";
}

std::string dsl_term(const Term& t) {
    if (t.is_var) return "?" + t.var;
    return t.value.display();
}

std::string dsl_atom(const Atom& a) {
    switch (a.kind) {
    case Atom::Kind::Class: return a.name + "(" + dsl_term(a.terms[0]) + ")";
    case Atom::Kind::Property: return a.name + "(" + dsl_term(a.terms[0]) + "," + dsl_term(a.terms[1]) + ")";
    case Atom::Kind::Compare: return dsl_expr(a.lhs) + " " + to_string(a.op) + " " + dsl_expr(a.rhs);
    case Atom::Kind::Not: return "NOT " + dsl_atom(a.body.at(0)); // source negations are single atoms
    }
    return "";
}

std::string dsl_conditions(const Pattern& p) {
    std::string out;
    for (size_t i = 0; i < p.atoms.size(); ++i) {
        if (i) out += " AND ";
        out += dsl_atom(p.atoms[i]);
    }
    return out;
}

std::string dsl_asserts(const std::vector<AssertStmt>& stmts) {
    std::string out;
    for (size_t i = 0; i < stmts.size(); ++i) {
        if (i) out += " ";
        out += stmts[i].predicate + "(" + dsl_term(stmts[i].subject) + "," + dsl_term(stmts[i].object) + ");";
    }
    return out;
}

} // namespace

std::string pretty_print(const NormAst& n) {
    std::string out = "NORM " + n.name + "\n";
    if (!n.outer.synthesized) {
        out += "ON ?" + n.outer.event_var + "\n";
        out += "  WHERE " + dsl_conditions(n.outer.conditions) + "\n";
        out += "THEN\n";
    }
    if (!n.computes.empty()) {
        out += "  COMPUTE ";
        for (size_t i = 0; i < n.computes.size(); ++i) {
            if (i) out += " ";
            out += "?" + n.computes[i].target + " = " + dsl_expr(n.computes[i].expr) + ";";
        }
        out += "\n";
    }
    if (!n.creates.empty()) {
        out += "  CREATE ";
        for (size_t i = 0; i < n.creates.size(); ++i) {
            if (i) out += " ";
            out += n.creates[i].class_name + "(?" + n.creates[i].var + ");";
        }
        out += "\n";
    }
    if (!n.asserts.empty()) out += "  ASSERT " + dsl_asserts(n.asserts) + "\n";
    out += "  ON ?" + n.inner.event_var;
    if (n.inner.before) {
        out += " BEFORE ?" + n.inner.before->event_var;
        if (!n.inner.before->conditions.atoms.empty())
            out += "\n    WHERE " + dsl_conditions(n.inner.before->conditions);
    }
    out += "\n    WHERE " + dsl_conditions(n.inner.conditions) + "\n";
    out += "  THEN ASSERT " + dsl_asserts(n.inner.then_asserts) + "\n";
    if (n.inner.else_asserts) out += "  ELSE ASSERT " + dsl_asserts(*n.inner.else_asserts) + "\n";
    return out;
}

std::string pretty_print(const ExceptionAst& e) {
    std::string out = "EXCEPTION";
    if (!e.name.empty() && e.name.find('/') == std::string::npos) out += " " + e.name;
    out += " TO " + e.target;
    if (e.kind_explicit) out += " TYPE " + std::to_string(static_cast<int>(e.kind));
    out += "\nON ?" + e.event_var + "\n";
    out += "  WHERE " + dsl_conditions(e.conditions) + "\n";
    out += "THEN " + e.consequent_predicate + "(" + dsl_term(e.consequent_subject) + "," +
           dsl_term(e.consequent_object) + ")\n";
    return out;
}

std::string pretty_print(const std::vector<RuleItem>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += "\n";
        out += std::visit([](const auto& item) { return pretty_print(item); }, items[i]);
    }
    return out;
}

// ---- scopes -----------------------------------------------------------------

namespace {

void push_unique(std::vector<std::string>& out, std::set<std::string>& seen, const std::string& v) {
    if (seen.insert(v).second) out.push_back(v);
}

} // namespace

std::vector<std::string> outer_scope_vars(const NormAst& n) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    push_unique(out, seen, n.outer.event_var);
    for (const auto& v : positive_vars(n.outer.conditions)) push_unique(out, seen, v);
    return out;
}

std::vector<std::string> norm_scope_vars(const NormAst& n) {
    std::vector<std::string> out = outer_scope_vars(n);
    std::set<std::string> seen(out.begin(), out.end());
    for (const auto& c : n.computes) push_unique(out, seen, c.target);
    for (const auto& c : n.creates) push_unique(out, seen, c.var);
    if (n.inner.before) {
        push_unique(out, seen, n.inner.before->event_var);
        for (const auto& v : positive_vars(n.inner.before->conditions)) push_unique(out, seen, v);
    }
    push_unique(out, seen, n.inner.event_var);
    for (const auto& v : positive_vars(n.inner.conditions)) push_unique(out, seen, v);
    return out;
}

// ---- validation -------------------------------------------------------------

namespace {

[[noreturn]] void fail(const std::string& owner, const std::string& message, const SourcePos& pos) {
    throw ValidationError(owner + ": " + message, pos);
}

// Compute-expression typing. Unknown absorbs: checks only reject operations
// that are wrong for every possible runtime value.
enum class Ty { Num, Ts, Dur, Other, Unknown };

Ty type_of_value(const Value& v) {
    if (v.is_numeric()) return Ty::Num;
    if (v.is_timestamp()) return Ty::Ts;
    if (v.is_duration()) return Ty::Dur;
    return Ty::Other;
}

Ty check_expr_type(const Expr& e, const std::map<std::string, Ty>& var_types, const std::string& owner,
                   const SourcePos& pos) {
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Var: {
        auto it = var_types.find(e.var);
        return it == var_types.end() ? Ty::Unknown : it->second;
    }
    case K::Lit: return type_of_value(e.lit);
    case K::HourOf:
    case K::MinuteOf:
    case K::DayOf:
    case K::YearOf: {
        Ty sub = check_expr_type(e.args[0], var_types, owner, pos);
        if (sub != Ty::Ts && sub != Ty::Unknown) fail(owner, "time-field accessor on a non-timestamp", pos);
        return Ty::Num;
    }
    case K::AddYears: {
        Ty sub = check_expr_type(e.args[0], var_types, owner, pos);
        if (sub != Ty::Ts && sub != Ty::Unknown) fail(owner, ".year arithmetic on a non-timestamp", pos);
        return Ty::Ts;
    }
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div: {
        Ty l = check_expr_type(e.args[0], var_types, owner, pos);
        Ty r = check_expr_type(e.args[1], var_types, owner, pos);
        if (l == Ty::Other || r == Ty::Other) fail(owner, "arithmetic on a non-numeric value", pos);
        if (e.kind == K::Add || e.kind == K::Sub) {
            if (l == Ty::Ts && r == Ty::Ts) {
                if (e.kind == K::Add) fail(owner, "timestamp + timestamp is not defined", pos);
                return Ty::Dur; // timestamp difference
            }
            if (l == Ty::Ts && r == Ty::Dur) return Ty::Ts;
            if (l == Ty::Dur && r == Ty::Ts) {
                if (e.kind == K::Sub) fail(owner, "duration - timestamp is not defined", pos);
                return Ty::Ts;
            }
            if (l == Ty::Dur && r == Ty::Dur) return Ty::Dur;
            if (l == Ty::Num && r == Ty::Num) return Ty::Num;
            if ((l == Ty::Ts && r == Ty::Num) || (l == Ty::Num && r == Ty::Ts))
                fail(owner, "timestamp and bare number cannot be added; use a duration literal", pos);
            if ((l == Ty::Dur && r == Ty::Num) || (l == Ty::Num && r == Ty::Dur))
                fail(owner, "duration and bare number cannot be added", pos);
            return Ty::Unknown;
        }
        // Mul / Div
        if (l == Ty::Ts || r == Ty::Ts) fail(owner, "timestamps cannot be multiplied or divided", pos);
        if (l == Ty::Dur && r == Ty::Dur) fail(owner, "duration * duration is not defined", pos);
        if (l == Ty::Dur || r == Ty::Dur) {
            if (e.kind == K::Div && r == Ty::Dur && l != Ty::Dur)
                fail(owner, "number / duration is not defined", pos);
            return Ty::Dur;
        }
        if (l == Ty::Num && r == Ty::Num) return Ty::Num;
        return Ty::Unknown;
    }
    }
    return Ty::Unknown;
}

// Variables whose type is evident from condition atoms: the object of an
// inXSDDateTimeStamp atom is a timestamp.
void infer_types_from(const Pattern& p, std::map<std::string, Ty>& types) {
    for (const auto& a : p.atoms) {
        if (a.kind == Atom::Kind::Property && a.name == vocab::inXSDDateTimeStamp && a.terms[1].is_var)
            types[a.terms[1].var] = Ty::Ts;
    }
}

void collect_term_vars(const AssertStmt& s, std::vector<std::string>& out) {
    if (s.subject.is_var) out.push_back(s.subject.var);
    if (s.object.is_var) out.push_back(s.object.var);
}

bool is_outcome_agent_pred(const std::string& p) { return p == vocab::fulfills || p == vocab::violates; }
bool is_outcome_dr_pred(const std::string& p) { return p == vocab::fulfilled || p == vocab::violated; }
bool is_exception_pred(const std::string& p) {
    return p == vocab::exceptionToNorm || p == vocab::exceptionToDR || p == vocab::exceptionToException;
}

struct OutcomePair {
    bool is_violation;        // violates/violated vs fulfills/fulfilled
    const AssertStmt* agent;  // fulfills/violates
    const AssertStmt* dr;     // fulfilled/violated
};

OutcomePair validate_outcome_branch(const NormAst& n, const std::vector<AssertStmt>& stmts,
                                    const std::set<std::string>& scope, const char* branch) {
    const AssertStmt* agent = nullptr;
    const AssertStmt* dr = nullptr;
    for (const auto& s : stmts) {
        if (is_outcome_agent_pred(s.predicate)) {
            if (agent) fail(n.name, std::string(branch) + " has more than one fulfills/violates assert", n.pos);
            agent = &s;
        } else if (is_outcome_dr_pred(s.predicate)) {
            if (dr) fail(n.name, std::string(branch) + " has more than one fulfilled/violated assert", n.pos);
            dr = &s;
        } else if (is_exception_pred(s.predicate) || s.predicate == vocab::isGenerated) {
            fail(n.name, std::string(branch) + " may not assert '" + s.predicate + "'", n.pos);
        } else if (!is_rule_assertable(s.predicate)) {
            fail(n.name, "'" + s.predicate + "' cannot be asserted by rules", n.pos);
        }
        std::vector<std::string> vars;
        collect_term_vars(s, vars);
        for (const auto& v : vars)
            if (!scope.contains(v)) fail(n.name, "unbound variable ?" + v + " in " + branch + " assert", n.pos);
    }
    if (!agent || !dr)
        fail(n.name, std::string(branch) + " must assert exactly one outcome pair "
                     "(fulfills+fulfilled or violates+violated)", n.pos);
    bool agent_viol = agent->predicate == vocab::violates;
    bool dr_viol = dr->predicate == vocab::violated;
    if (agent_viol != dr_viol)
        fail(n.name, std::string(branch) + " mixes outcome kinds (" + agent->predicate + " with " + dr->predicate +
                     ")", n.pos);
    // Both halves must speak about the norm's deontic relation.
    const std::string& drv = n.dr_var();
    if (!(agent->object.is_var && agent->object.var == drv))
        fail(n.name, agent->predicate + " must name the created relation ?" + drv + " as its object", n.pos);
    if (!(dr->subject.is_var && dr->subject.var == drv))
        fail(n.name, dr->predicate + " must name the created relation ?" + drv + " as its subject", n.pos);
    return {agent_viol, agent, dr};
}

void validate_norm(const NormAst& n) {
    // Outer trigger: the event variable must be constrained by at least one
    // positive atom, or nothing anchors the activation.
    const auto outer_pos = positive_vars(n.outer.conditions);
    if (std::find(outer_pos.begin(), outer_pos.end(), n.outer.event_var) == outer_pos.end())
        fail(n.name, "trigger variable ?" + n.outer.event_var + " does not appear in any positive condition",
             n.pos);
    if (auto bad = check_range_restriction(n.outer.conditions))
        fail(n.name, "variable ?" + *bad + " used before being bound in the trigger conditions", n.pos);

    std::set<std::string> scope(outer_pos.begin(), outer_pos.end());
    scope.insert(n.outer.event_var);

    // Computes: sequential scoping, no shadowing, type discipline.
    std::map<std::string, Ty> types;
    infer_types_from(n.outer.conditions, types);
    for (const auto& c : n.computes) {
        std::vector<std::string> vars;
        collect_vars(c.expr, vars);
        for (const auto& v : vars)
            if (!scope.contains(v)) fail(n.name, "unbound variable ?" + v + " in COMPUTE", n.pos);
        if (scope.contains(c.target)) fail(n.name, "COMPUTE target ?" + c.target + " is already bound", n.pos);
        types[c.target] = check_expr_type(c.expr, types, n.name, n.pos);
        scope.insert(c.target);
    }

    // Creates.
    int dr_creates = 0;
    for (const auto& c : n.creates) {
        if (!is_rule_creatable(c.class_name)) fail(n.name, "CREATE may not mint '" + c.class_name + "'", n.pos);
        if (scope.contains(c.var)) fail(n.name, "CREATE variable ?" + c.var + " is already bound", n.pos);
        scope.insert(c.var);
        if (c.class_name == vocab::DeonticRelation) ++dr_creates;
    }
    if (dr_creates != 1) fail(n.name, "a norm must CREATE exactly one DeonticRelation", n.pos);
    const std::string& drv = n.dr_var();

    // Outer asserts.
    bool has_is_generated = false;
    for (const auto& s : n.asserts) {
        if (is_outcome_agent_pred(s.predicate) || is_outcome_dr_pred(s.predicate))
            fail(n.name, "outcome predicate '" + s.predicate + "' outside the inner rule", n.pos);
        if (is_exception_pred(s.predicate))
            fail(n.name, "'" + s.predicate + "' may only be asserted by exceptions", n.pos);
        if (!is_rule_assertable(s.predicate))
            fail(n.name, "'" + s.predicate + "' cannot be asserted by rules", n.pos);
        std::vector<std::string> vars;
        collect_term_vars(s, vars);
        for (const auto& v : vars)
            if (!scope.contains(v)) fail(n.name, "unbound variable ?" + v + " in ASSERT", n.pos);
        if (s.predicate == vocab::isGenerated) {
            if (!(s.subject.is_var && s.subject.var == drv && !s.object.is_var && s.object.value.is_resource() &&
                  s.object.value.as_resource().id == n.name))
                fail(n.name, "isGenerated must link the created relation to this norm's own name", n.pos);
            has_is_generated = true;
        }
        if (s.predicate == vocab::activated || s.predicate == vocab::debtor || s.predicate == vocab::end) {
            if (!(s.subject.is_var && s.subject.var == drv))
                fail(n.name, s.predicate + " must have the created relation as its subject", n.pos);
        }
        if (s.predicate == vocab::activated &&
            !(s.object.is_var && s.object.var == n.outer.event_var))
            fail(n.name, "activated must record the trigger event ?" + n.outer.event_var, n.pos);
        if (s.predicate == vocab::inXSDDateTimeStamp && s.object.is_var) {
            auto it = types.find(s.object.var);
            if (it != types.end() && it->second != Ty::Ts && it->second != Ty::Unknown)
                fail(n.name, "inXSDDateTimeStamp needs a timestamp value, ?" + s.object.var + " is not one",
                     n.pos);
        }
    }
    if (!has_is_generated) fail(n.name, "missing ASSERT isGenerated(?" + drv + "," + n.name + ")", n.pos);

    // Inner rule.
    if (n.inner.event_var == n.outer.event_var)
        fail(n.name, "inner event variable must differ from the trigger variable", n.pos);
    if (scope.contains(n.inner.event_var))
        fail(n.name, "inner event variable ?" + n.inner.event_var + " is already bound", n.pos);

    std::vector<std::string> pre(scope.begin(), scope.end());
    if (n.inner.before) {
        const auto& b = *n.inner.before;
        bool is_created = std::any_of(n.creates.begin(), n.creates.end(),
                                      [&](const CreateStmt& c) { return c.var == b.event_var; });
        if (is_created) {
            auto it = std::find_if(n.creates.begin(), n.creates.end(),
                                   [&](const CreateStmt& c) { return c.var == b.event_var; });
            if (it->class_name != vocab::TimeEvent)
                fail(n.name, "BEFORE on a created individual requires a TimeEvent, got " + it->class_name, n.pos);
            // The translation recovers the deadline through this chain, so
            // its three links are mandatory for a created deadline event.
            bool has_end = false;
            std::string instant_var;
            for (const auto& s : n.asserts)
                if (s.predicate == vocab::end && s.object.is_var && s.object.var == b.event_var &&
                    s.subject.is_var && s.subject.var == drv)
                    has_end = true;
            for (const auto& s : n.asserts)
                if (s.predicate == vocab::atTime && s.subject.is_var && s.subject.var == b.event_var &&
                    s.object.is_var)
                    instant_var = s.object.var;
            bool has_due = false;
            for (const auto& s : n.asserts)
                if (s.predicate == vocab::inXSDDateTimeStamp && s.subject.is_var &&
                    s.subject.var == instant_var)
                    has_due = true;
            if (!has_end || instant_var.empty() || !has_due)
                fail(n.name, "a created deadline needs ASSERT end(?" + drv + ",?" + b.event_var + "), atTime(?" +
                             b.event_var + ",?i) and inXSDDateTimeStamp(?i,?t)", n.pos);
        } else {
            const auto before_pos = positive_vars(b.conditions);
            if (std::find(before_pos.begin(), before_pos.end(), b.event_var) == before_pos.end())
                fail(n.name, "BEFORE event ?" + b.event_var + " is neither created nor bound by its conditions",
                     n.pos);
        }
        std::vector<std::string> before_pre = pre;
        before_pre.push_back(b.event_var);
        if (auto bad = check_range_restriction(b.conditions, before_pre))
            fail(n.name, "variable ?" + *bad + " used before being bound in BEFORE conditions", n.pos);
        scope.insert(b.event_var);
        for (const auto& v : positive_vars(b.conditions)) scope.insert(v);
    }

    const auto inner_pos = positive_vars(n.inner.conditions);
    if (std::find(inner_pos.begin(), inner_pos.end(), n.inner.event_var) == inner_pos.end())
        fail(n.name, "regulated event ?" + n.inner.event_var + " does not appear in any positive condition",
             n.pos);
    std::vector<std::string> inner_pre(scope.begin(), scope.end());
    if (auto bad = check_range_restriction(n.inner.conditions, inner_pre))
        fail(n.name, "variable ?" + *bad + " used before being bound in the regulated conditions", n.pos);

    bool has_actor = false;
    for (const auto& a : n.inner.conditions.atoms)
        if (a.kind == Atom::Kind::Property && a.name == vocab::actor && a.terms[0].is_var &&
            a.terms[0].var == n.inner.event_var && a.terms[1].is_var)
            has_actor = true;
    if (!has_actor)
        fail(n.name, "regulated conditions must bind an actor via actor(?" + n.inner.event_var + ",?agent)",
             n.pos);

    for (const auto& v : inner_pos) scope.insert(v);
    scope.insert(n.inner.event_var);

    OutcomePair then_pair = validate_outcome_branch(n, n.inner.then_asserts, scope, "THEN");
    if (n.inner.else_asserts) {
        if (!n.inner.before) fail(n.name, "ELSE requires a BEFORE clause", n.pos);
        OutcomePair else_pair = validate_outcome_branch(n, *n.inner.else_asserts, scope, "ELSE");
        if (else_pair.is_violation == then_pair.is_violation)
            fail(n.name, "THEN and ELSE must carry opposite outcomes", n.pos);
    }
}

std::set<std::string> exception_target_scope(const ExceptionAst& e,
                                             const std::map<std::string, const NormAst*>& norms,
                                             const std::map<std::string, const ExceptionAst*>& exceptions) {
    std::set<std::string> scope;
    if (e.kind == ExceptionKind::ToException) {
        const ExceptionAst& t = *exceptions.at(e.target);
        auto inherited = exception_target_scope(t, norms, exceptions);
        scope.insert(inherited.begin(), inherited.end());
        scope.insert(t.event_var);
        for (const auto& v : positive_vars(t.conditions)) scope.insert(v);
        return scope;
    }
    const NormAst& n = *norms.at(e.target);
    auto vars = e.kind == ExceptionKind::ToActivation ? outer_scope_vars(n) : norm_scope_vars(n);
    scope.insert(vars.begin(), vars.end());
    return scope;
}

// Reconcile the TYPE clause with the consequent predicate; infer the kind
// when no TYPE was written. Runs before any cross-item validation so kinds
// are settled regardless of declaration order.
void resolve_kind(ExceptionAst& e) {
    if (e.consequent_predicate == vocab::exceptionToNorm) {
        if (e.kind_explicit && e.kind != ExceptionKind::ToActivation)
            throw CompileError(e.name + ": TYPE " + std::to_string(static_cast<int>(e.kind)) +
                               " cannot conclude exceptionToNorm");
        e.kind = ExceptionKind::ToActivation;
    } else if (e.consequent_predicate == vocab::exceptionToException) {
        if (e.kind_explicit)
            throw CompileError(e.name + ": exceptions to exceptions take no TYPE clause");
        e.kind = ExceptionKind::ToException;
    } else if (e.consequent_predicate == vocab::exceptionToDR) {
        if (!e.kind_explicit)
            fail(e.name, "exceptionToDR requires an explicit TYPE 2 or TYPE 3 clause", e.pos);
        if (e.kind != ExceptionKind::ToRegulated && e.kind != ExceptionKind::ToUnrelated)
            throw CompileError(e.name + ": TYPE 1 cannot conclude exceptionToDR");
    } else {
        fail(e.name, "exception consequent must be exceptionToNorm, exceptionToDR or exceptionToException",
             e.pos);
    }
}

void validate_exception(ExceptionAst& e, const std::map<std::string, const NormAst*>& norms,
                        const std::map<std::string, const ExceptionAst*>& exceptions) {
    // Target resolution.
    if (e.kind == ExceptionKind::ToException) {
        auto it = exceptions.find(e.target);
        if (it == exceptions.end())
            throw UnknownTarget(e.name + ": unknown exception '" + e.target + "'", e.pos);
        if (it->second->kind == ExceptionKind::ToException)
            fail(e.name, "exceptions to exceptions cannot be nested further", e.pos);
    } else if (!norms.contains(e.target)) {
        throw UnknownTarget(e.name + ": unknown norm '" + e.target + "'", e.pos);
    }

    // Scope: local positives + the event variable + the target's variables.
    std::set<std::string> allowed = exception_target_scope(e, norms, exceptions);
    allowed.insert(e.event_var);
    std::vector<std::string> allowed_list(allowed.begin(), allowed.end());
    if (auto bad = check_range_restriction(e.conditions, allowed_list))
        throw UnboundExceptionVariable(e.name + ": variable ?" + *bad +
                                           " is neither bound locally nor in scope of '" + e.target + "'",
                                       e.pos);

    std::set<std::string> bound = allowed;
    for (const auto& v : positive_vars(e.conditions)) bound.insert(v);

    // Consequent shape.
    const Term& subj = e.consequent_subject;
    const Term& obj = e.consequent_object;
    if (!(obj.is_var && obj.var == e.event_var))
        fail(e.name, "consequent must name the triggering event ?" + e.event_var, e.pos);
    std::string dr_var;
    if (e.kind == ExceptionKind::ToActivation || e.kind == ExceptionKind::ToException) {
        if (!(!subj.is_var && subj.value.is_resource() && subj.value.as_resource().id == e.target))
            fail(e.name, "consequent must name the target '" + e.target + "'", e.pos);
    } else {
        if (!subj.is_var) fail(e.name, "exceptionToDR must name a deontic-relation variable", e.pos);
        dr_var = subj.var;
        bool anchored = false;
        for (const auto& a : e.conditions.atoms)
            if (a.kind == Atom::Kind::Property && a.name == vocab::isGenerated && a.terms[0].is_var &&
                a.terms[0].var == dr_var && !a.terms[1].is_var && a.terms[1].value.is_resource() &&
                a.terms[1].value.as_resource().id == e.target)
                anchored = true;
        if (!anchored)
            fail(e.name, "conditions must include isGenerated(?" + dr_var + "," + e.target + ")", e.pos);
    }

    // Type 3 safety guards: without them a late exception would rewrite
    // history. Insert any the author omitted.
    if (e.kind == ExceptionKind::ToUnrelated) {
        bool has_f = false, has_v = false;
        for (const auto& a : e.conditions.atoms) {
            if (a.kind != Atom::Kind::Not || a.body.size() != 1) continue;
            const Atom& b = a.body[0];
            if (b.kind == Atom::Kind::Property && b.terms[1].is_var && b.terms[1].var == dr_var) {
                if (b.name == vocab::fulfills) has_f = true;
                if (b.name == vocab::violates) has_v = true;
            }
        }
        if (!has_f)
            e.conditions.atoms.push_back(Atom::negation({Atom::prop(std::string(vocab::fulfills),
                                                                    Term::variable("__gf"),
                                                                    Term::variable(dr_var))}));
        if (!has_v)
            e.conditions.atoms.push_back(Atom::negation({Atom::prop(std::string(vocab::violates),
                                                                    Term::variable("__gv"),
                                                                    Term::variable(dr_var))}));
    }
}

} // namespace

void validate_items(std::vector<RuleItem>& items) {
    // Names: synthesize anonymous exception names, then enforce uniqueness
    // across norms and exceptions together (they share the rule-id space).
    std::map<std::string, int> per_target;
    for (auto& item : items) {
        if (auto* e = std::get_if<ExceptionAst>(&item)) {
            if (e->name.empty())
                e->name = e->target + "/exception" + std::to_string(++per_target[e->target]);
        }
    }
    std::set<std::string> names;
    std::map<std::string, const NormAst*> norms;
    std::map<std::string, const ExceptionAst*> exceptions;
    for (const auto& item : items) {
        const std::string& name = std::visit([](const auto& x) -> const std::string& { return x.name; }, item);
        const SourcePos& pos = std::visit([](const auto& x) -> const SourcePos& { return x.pos; }, item);
        if (!names.insert(name).second) fail(name, "duplicate norm/exception name", pos);
        if (const auto* n = std::get_if<NormAst>(&item)) norms.emplace(n->name, n);
        if (const auto* e = std::get_if<ExceptionAst>(&item)) exceptions.emplace(e->name, e);
    }

    for (auto& item : items) {
        if (auto* e = std::get_if<ExceptionAst>(&item)) resolve_kind(*e);
    }
    for (auto& item : items) {
        if (auto* n = std::get_if<NormAst>(&item)) validate_norm(*n);
    }
    // Exceptions last: scope checks need resolved kinds on every target, and
    // an exception may target an item declared later in the file.
    for (auto& item : items) {
        if (auto* e = std::get_if<ExceptionAst>(&item)) validate_exception(*e, norms, exceptions);
    }
}

} // namespace tnorm

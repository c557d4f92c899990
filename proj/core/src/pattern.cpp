#include "tnorm/pattern.hpp"

#include <cmath>
#include <set>

namespace tnorm {

Expr Expr::variable(std::string name) {
    Expr e;
    e.kind = Kind::Var;
    e.var = std::move(name);
    return e;
}

Expr Expr::literal(Value v) {
    Expr e;
    e.kind = Kind::Lit;
    e.lit = std::move(v);
    return e;
}

Expr Expr::accessor(Kind k, Expr sub) {
    Expr e;
    e.kind = k;
    e.args.push_back(std::move(sub));
    return e;
}

Expr Expr::binary(Kind k, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = k;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
}

Expr Expr::add_years(Expr sub, int years) {
    Expr e;
    e.kind = Kind::AddYears;
    e.years = years;
    e.args.push_back(std::move(sub));
    return e;
}

Atom Atom::cls(std::string name, Term t) {
    Atom a;
    a.kind = Kind::Class;
    a.name = std::move(name);
    a.terms.push_back(std::move(t));
    return a;
}

Atom Atom::prop(std::string name, Term subject, Term object) {
    Atom a;
    a.kind = Kind::Property;
    a.name = std::move(name);
    a.terms.push_back(std::move(subject));
    a.terms.push_back(std::move(object));
    return a;
}

Atom Atom::compare(Expr lhs, CmpOp op, Expr rhs) {
    Atom a;
    a.kind = Kind::Compare;
    a.lhs = std::move(lhs);
    a.rhs = std::move(rhs);
    a.op = op;
    return a;
}

Atom Atom::negation(std::vector<Atom> body) {
    Atom a;
    a.kind = Kind::Not;
    a.body = std::move(body);
    return a;
}

namespace {

std::optional<Value> eval_binary(Expr::Kind k, const Value& a, const Value& b) {
    using K = Expr::Kind;
    // Time arithmetic first; everything else is numeric.
    if (a.is_timestamp()) {
        if (b.is_duration()) {
            if (k == K::Add) return Value(a.as_timestamp() + b.as_duration());
            if (k == K::Sub) return Value(a.as_timestamp() - b.as_duration());
        }
        if (b.is_timestamp() && k == K::Sub) return Value(a.as_timestamp() - b.as_timestamp());
        return std::nullopt;
    }
    if (a.is_duration()) {
        if (b.is_duration()) {
            if (k == K::Add) return Value(a.as_duration() + b.as_duration());
            if (k == K::Sub) return Value(Duration{a.as_duration().ms - b.as_duration().ms});
        }
        if (b.is_timestamp() && k == K::Add) return Value(b.as_timestamp() + a.as_duration());
        if (b.is_numeric() && (k == K::Mul || k == K::Div)) {
            if (b.is_int()) {
                std::int64_t n = b.as_int();
                if (k == K::Mul) return Value(Duration{a.as_duration().ms * n});
                if (n == 0) return std::nullopt;
                return Value(Duration{a.as_duration().ms / n});
            }
            double n = b.as_decimal();
            if (k == K::Div && n == 0.0) return std::nullopt;
            double scaled = k == K::Mul ? a.as_duration().ms * n : a.as_duration().ms / n;
            return Value(Duration{static_cast<std::int64_t>(std::llround(scaled))});
        }
        return std::nullopt;
    }
    if (a.is_numeric() && b.is_duration() && k == K::Mul)
        return eval_binary(K::Mul, b, a);
    if (!a.is_numeric() || !b.is_numeric()) return std::nullopt;
    if (a.is_int() && b.is_int()) {
        std::int64_t x = a.as_int(), y = b.as_int();
        switch (k) {
        case K::Add: return Value(x + y);
        case K::Sub: return Value(x - y);
        case K::Mul: return Value(x * y);
        case K::Div:
            if (y == 0) return std::nullopt;
            if (x % y == 0) return Value(x / y);
            return Value(static_cast<double>(x) / static_cast<double>(y));
        default: return std::nullopt;
        }
    }
    double x = a.as_double(), y = b.as_double();
    switch (k) {
    case K::Add: return Value(x + y);
    case K::Sub: return Value(x - y);
    case K::Mul: return Value(x * y);
    case K::Div:
        if (y == 0.0) return std::nullopt;
        return Value(x / y);
    default: return std::nullopt;
    }
}

} // namespace

std::optional<Value> eval_expr(const Expr& e, const Binding& b) {
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Var: {
        auto it = b.find(e.var);
        if (it == b.end()) return std::nullopt;
        return it->second;
    }
    case K::Lit: return e.lit;
    case K::HourOf:
    case K::MinuteOf:
    case K::DayOf:
    case K::YearOf: {
        auto sub = eval_expr(e.args[0], b);
        if (!sub || !sub->is_timestamp()) return std::nullopt;
        Timestamp t = sub->as_timestamp();
        switch (e.kind) {
        case K::HourOf: return Value(static_cast<std::int64_t>(hour_of(t)));
        case K::MinuteOf: return Value(static_cast<std::int64_t>(minute_of(t)));
        case K::DayOf: return Value(static_cast<std::int64_t>(day_of(t)));
        default: return Value(static_cast<std::int64_t>(year_of(t)));
        }
    }
    case K::AddYears: {
        auto sub = eval_expr(e.args[0], b);
        if (!sub || !sub->is_timestamp()) return std::nullopt;
        return Value(add_years(sub->as_timestamp(), e.years));
    }
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div: {
        auto lhs = eval_expr(e.args[0], b);
        auto rhs = eval_expr(e.args[1], b);
        if (!lhs || !rhs) return std::nullopt;
        return eval_binary(e.kind, *lhs, *rhs);
    }
    }
    return std::nullopt;
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == Expr::Kind::Var) out.push_back(e.var);
    for (const auto& a : e.args) collect_vars(a, out);
}

std::vector<std::string> positive_vars(const Pattern& p) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& a : p.atoms) {
        if (a.kind != Atom::Kind::Class && a.kind != Atom::Kind::Property) continue;
        for (const auto& t : a.terms)
            if (t.is_var && seen.insert(t.var).second) out.push_back(t.var);
    }
    return out;
}

namespace {

void free_vars_of_atoms(const std::vector<Atom>& atoms, std::set<std::string>& local,
                        std::vector<std::string>& out, std::set<std::string>& seen) {
    auto emit = [&](const std::string& v) {
        if (!local.contains(v) && seen.insert(v).second) out.push_back(v);
    };
    for (const auto& a : atoms) {
        switch (a.kind) {
        case Atom::Kind::Class:
        case Atom::Kind::Property:
            for (const auto& t : a.terms)
                if (t.is_var) emit(t.var);
            break;
        case Atom::Kind::Compare: {
            std::vector<std::string> vars;
            collect_vars(a.lhs, vars);
            collect_vars(a.rhs, vars);
            for (const auto& v : vars) emit(v);
            break;
        }
        case Atom::Kind::Not: {
            // Body positives are existential; anything else leaks out.
            std::set<std::string> body_local = local;
            for (const auto& inner : a.body)
                if (inner.kind == Atom::Kind::Class || inner.kind == Atom::Kind::Property)
                    for (const auto& t : inner.terms)
                        if (t.is_var) body_local.insert(t.var);
            // Variables already free outside stay free; report only those the
            // body could not have bound itself and the enclosing scope knows.
            std::vector<std::string> inner_out;
            std::set<std::string> inner_seen;
            free_vars_of_atoms(a.body, body_local, inner_out, inner_seen);
            for (const auto& v : inner_out) emit(v);
            // Shared variables (bound outside, used inside) are free uses too.
            for (const auto& inner : a.body)
                if (inner.kind == Atom::Kind::Class || inner.kind == Atom::Kind::Property)
                    for (const auto& t : inner.terms)
                        if (t.is_var && local.contains(t.var)) emit(t.var);
            break;
        }
        }
    }
}

} // namespace

std::vector<std::string> free_vars(const Pattern& p) {
    // Top-level positives bind; they are still "free" in the sense of being
    // the pattern's own variables, so collect them first.
    std::vector<std::string> out = positive_vars(p);
    std::set<std::string> seen(out.begin(), out.end());
    std::set<std::string> local(out.begin(), out.end());
    free_vars_of_atoms(p.atoms, local, out, seen);
    return out;
}

namespace {

// Adds variables a positive atom would bind.
void positive_vars(const Atom& a, std::set<std::string>& bound) {
    if (a.kind == Atom::Kind::Class || a.kind == Atom::Kind::Property) {
        for (const auto& t : a.terms)
            if (t.is_var) bound.insert(t.var);
    }
}

std::optional<std::string> check_atoms(const std::vector<Atom>& atoms, std::set<std::string> bound) {
    for (const auto& a : atoms) {
        switch (a.kind) {
        case Atom::Kind::Class:
        case Atom::Kind::Property:
            positive_vars(a, bound);
            break;
        case Atom::Kind::Compare: {
            std::vector<std::string> vars;
            collect_vars(a.lhs, vars);
            collect_vars(a.rhs, vars);
            for (const auto& v : vars)
                if (!bound.contains(v)) return v;
            break;
        }
        case Atom::Kind::Not: {
            // Local variables: introduced by the body's own positive atoms.
            std::set<std::string> local = bound;
            for (const auto& inner : a.body) positive_vars(inner, local);
            for (const auto& inner : a.body) {
                if (inner.kind == Atom::Kind::Compare) {
                    std::vector<std::string> vars;
                    collect_vars(inner.lhs, vars);
                    collect_vars(inner.rhs, vars);
                    for (const auto& v : vars)
                        if (!local.contains(v)) return v;
                } else if (inner.kind == Atom::Kind::Not) {
                    if (auto bad = check_atoms(inner.body, local)) return bad;
                } else {
                    for (const auto& t : inner.terms)
                        if (t.is_var && !local.contains(t.var)) return t.var;
                }
            }
            break;
        }
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<std::string> check_range_restriction(const Pattern& p, const std::vector<std::string>& pre_bound) {
    std::set<std::string> bound(pre_bound.begin(), pre_bound.end());
    return check_atoms(p.atoms, std::move(bound));
}

std::string to_string(const Term& t) {
    if (t.is_var) return "?" + t.var;
    return t.value.display();
}

std::string to_string(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Var: return "?" + e.var;
    case K::Lit: return e.lit.display();
    case K::HourOf: return to_string(e.args[0]) + ".hour";
    case K::MinuteOf: return to_string(e.args[0]) + ".minute";
    case K::DayOf: return to_string(e.args[0]) + ".day";
    case K::YearOf: return to_string(e.args[0]) + ".year";
    case K::AddYears: return to_string(e.args[0]) + ".year + " + std::to_string(e.years);
    case K::Add: return to_string(e.args[0]) + " + " + to_string(e.args[1]);
    case K::Sub: return to_string(e.args[0]) + " - " + to_string(e.args[1]);
    case K::Mul: return to_string(e.args[0]) + " * " + to_string(e.args[1]);
    case K::Div: return to_string(e.args[0]) + " / " + to_string(e.args[1]);
    }
    return "?";
}

std::string to_string(const Atom& a) {
    switch (a.kind) {
    case Atom::Kind::Class: return a.name + "(" + to_string(a.terms[0]) + ")";
    case Atom::Kind::Property: return a.name + "(" + to_string(a.terms[0]) + "," + to_string(a.terms[1]) + ")";
    case Atom::Kind::Compare: return to_string(a.lhs) + " " + to_string(a.op) + " " + to_string(a.rhs);
    case Atom::Kind::Not: {
        std::string out = "NOT (";
        for (size_t i = 0; i < a.body.size(); ++i) {
            if (i) out += " AND ";
            out += to_string(a.body[i]);
        }
        out += ")";
        return out;
    }
    }
    return "?";
}

} // namespace tnorm

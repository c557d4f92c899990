// Conjunctive patterns: the condition language of rules and queries.
//
// A Pattern is an ordered atom list. Positive atoms (class / property) bind
// variables by matching facts; comparisons and negated sub-patterns only
// consume bindings. Negation is closed-world at evaluation time and may
// introduce local (existential) variables inside its own atom list.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnorm/value.hpp"

namespace tnorm {

struct Term {
    bool is_var = false;
    std::string var;  // without the '?' sigil
    Value value;      // constant when !is_var

    static Term variable(std::string name) {
        Term t;
        t.is_var = true;
        t.var = std::move(name);
        return t;
    }
    static Term constant(Value v) {
        Term t;
        t.value = std::move(v);
        return t;
    }
    friend bool operator==(const Term&, const Term&) = default;
};

// Arithmetic / accessor expressions inside comparisons and computations.
// `args` holds the children: one for accessors and AddYears, two for binary
// operators. Time arithmetic is closed under these shapes:
//   Timestamp + Duration, Timestamp - Duration -> Timestamp
//   Timestamp - Timestamp -> Duration
//   AddYears(Timestamp)   -> Timestamp (calendar-aware)
//   HourOf/MinuteOf/DayOf/YearOf(Timestamp) -> integer
struct Expr {
    enum class Kind { Var, Lit, HourOf, MinuteOf, DayOf, YearOf, Add, Sub, Mul, Div, AddYears };

    Kind kind = Kind::Lit;
    std::string var;  // Kind::Var
    Value lit;        // Kind::Lit
    int years = 0;    // Kind::AddYears
    std::vector<Expr> args;

    static Expr variable(std::string name);
    static Expr literal(Value v);
    static Expr accessor(Kind k, Expr sub);
    static Expr binary(Kind k, Expr lhs, Expr rhs);
    static Expr add_years(Expr sub, int years);

    bool operator==(const Expr&) const = default;
};

struct Atom {
    enum class Kind { Class, Property, Compare, Not };

    Kind kind = Kind::Class;
    std::string name;         // class or property name
    std::vector<Term> terms;  // 1 term (Class) or 2 (Property)
    Expr lhs, rhs;            // Compare
    CmpOp op = CmpOp::Eq;     // Compare
    std::vector<Atom> body;   // Not: the negated atom list

    static Atom cls(std::string name, Term t);
    static Atom prop(std::string name, Term subject, Term object);
    static Atom compare(Expr lhs, CmpOp op, Expr rhs);
    static Atom negation(std::vector<Atom> body);

    bool operator==(const Atom&) const = default;
};

struct Pattern {
    std::vector<Atom> atoms;
    bool operator==(const Pattern&) const = default;
};

// Variable -> value map. std::map keeps serialization deterministic.
using Binding = std::map<std::string, Value>;

// Evaluates an expression under a binding. nullopt on unbound variables or
// type-invalid operations (callers decide whether that is "condition false"
// or a hard ActionError).
std::optional<Value> eval_expr(const Expr& e, const Binding& b);

// Variables of the expression, appended in evaluation order.
void collect_vars(const Expr& e, std::vector<std::string>& out);

// Variables bound by the pattern's top-level positive atoms, in first-
// occurrence order, without duplicates.
std::vector<std::string> positive_vars(const Pattern& p);

// Free variables of the pattern: positives, comparison operands, and
// negated-body variables not bound by the body's own positives.
std::vector<std::string> free_vars(const Pattern& p);

// Range restriction: every variable consumed by a Comparison, and every
// non-local variable inside a Negated body, must be bound by a preceding
// positive atom (or listed in `pre_bound`). Local variables of a Negated
// body are those its own positive atoms introduce. Returns the offending
// variable name, or nullopt when the pattern is well-formed.
std::optional<std::string> check_range_restriction(const Pattern& p,
                                                   const std::vector<std::string>& pre_bound = {});

// One-line rendering used by traces and the REPL.
std::string to_string(const Term& t);
std::string to_string(const Expr& e);
std::string to_string(const Atom& a);

} // namespace tnorm

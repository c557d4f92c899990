// Abstract syntax of norms and exceptions.
//
// A norm is a nested rule: an outer trigger (ON ?event1 WHERE ...) whose
// firing computes parameters, creates the deontic relation and its deadline
// entities, and asserts lifecycle facts; plus an inner rule (ON ?event2
// [BEFORE ?event3] WHERE ... THEN ... [ELSE ...]) producing the outcome.
// Norms written without an outer trigger ("unconditional") get a synthesized
// trigger on the built-in enactment event so one translation scheme covers
// everything.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tnorm/errors.hpp"
#include "tnorm/pattern.hpp"

namespace tnorm {

struct ComputeStmt {
    std::string target; // variable name, no sigil
    Expr expr;          // normalized (surface sugar like ".hour + 24" resolved)
    bool operator==(const ComputeStmt&) const = default;
};

struct CreateStmt {
    std::string class_name;
    std::string var; // doubles as the id slot in fresh_id
    bool operator==(const CreateStmt&) const = default;
};

struct AssertStmt {
    std::string predicate;
    Term subject;
    Term object;
    bool operator==(const AssertStmt&) const = default;
};

struct OuterTrigger {
    std::string event_var;
    Pattern conditions;
    bool synthesized = false; // norm was written unconditional
    bool operator==(const OuterTrigger&) const = default;
};

struct BeforeClause {
    std::string event_var; // created TimeEvent var, or bound by own conditions
    Pattern conditions;    // conditions on ?event3 (non-time BEFORE)
    bool operator==(const BeforeClause&) const = default;
};

struct InnerRule {
    std::string event_var;
    std::optional<BeforeClause> before;
    Pattern conditions;
    std::vector<AssertStmt> then_asserts;
    std::optional<std::vector<AssertStmt>> else_asserts;
    bool operator==(const InnerRule&) const = default;
};

struct NormAst {
    std::string name;
    OuterTrigger outer;
    std::vector<ComputeStmt> computes;
    std::vector<CreateStmt> creates;
    std::vector<AssertStmt> asserts;
    InnerRule inner;
    SourcePos pos;

    // The variable of the single DeonticRelation CREATE.
    const std::string& dr_var() const;
    // Specific relations fix a debtor at activation; general ones do not.
    bool is_specific() const;

    bool operator==(const NormAst& o) const;
};

enum class ExceptionKind {
    ToActivation = 1,    // inhibits norm activation (exceptionToNorm)
    ToRegulated = 2,     // inhibits outcome, triggered by the regulated event
    ToUnrelated = 3,     // inhibits outcome, triggered by an unrelated event
    ToException = 4,     // inhibits another exception (exceptionToException)
};

struct ExceptionAst {
    std::string name;   // explicit, or synthesized "<target>/exception<n>"
    std::string target; // norm name; exception name for ToException
    ExceptionKind kind = ExceptionKind::ToActivation;
    bool kind_explicit = false; // TYPE clause given in source
    std::string event_var;
    Pattern conditions;
    std::string consequent_predicate; // exceptionToNorm/exceptionToDR/exceptionToException
    Term consequent_subject;
    Term consequent_object;
    SourcePos pos;

    bool operator==(const ExceptionAst& o) const;
};

using RuleItem = std::variant<NormAst, ExceptionAst>;

// Canonical DSL text. parse(pretty_print(parse(text))) equals parse(text)
// structurally; synthesized triggers and auto-inserted guards are not
// printed for norms but are re-derived on reparse.
std::string pretty_print(const NormAst& n);
std::string pretty_print(const ExceptionAst& e);
std::string pretty_print(const std::vector<RuleItem>& items);

// Per-item semantic validation plus cross-item checks (unique names, known
// targets, exception variable scoping). Normalizes in place: infers missing
// exception kinds, inserts type-3 NOT guards, names anonymous exceptions.
// Call order: parser runs this at the end of parse().
void validate_items(std::vector<RuleItem>& items);

// Variables visible at a given point of a norm, used by validation and by
// exception scope checks.
std::vector<std::string> outer_scope_vars(const NormAst& n);   // trigger event + outer positives
std::vector<std::string> norm_scope_vars(const NormAst& n);    // + computes, creates, inner, before

} // namespace tnorm

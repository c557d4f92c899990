// Error taxonomy shared by every layer. Each condition that callers are
// expected to distinguish gets its own type; everything derives from Error
// so the CLI can map "any tnorm failure" to a stable exit code.
#pragma once

#include <stdexcept>
#include <string>

namespace tnorm {

// Source position of a diagnostic, 1-based. line == 0 means "no position"
// (errors raised outside of file parsing).
struct SourcePos {
    std::string file;
    int line = 0;
    int column = 0;
};

class Error : public std::runtime_error {
  public:
    explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
    Error(std::string message, SourcePos pos)
        : std::runtime_error(render(message, pos)), pos_(std::move(pos)) {}

    const SourcePos& pos() const { return pos_; }

  private:
    static std::string render(const std::string& message, const SourcePos& pos) {
        if (pos.line == 0) return message;
        std::string out = pos.file.empty() ? "input" : pos.file;
        out += ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
        return out;
    }

    SourcePos pos_;
};

// Input-shaped problems: the user gave us something malformed.
class SyntaxError : public Error {
  public:
    using Error::Error;
};

// Structurally valid input that breaks a semantic rule (scoping, arity,
// missing actor binding, unknown exception target, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

// An exception names a norm (or exception) that does not exist.
class UnknownTarget : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

// An exception condition uses a variable bound neither locally nor in the
// target's scope.
class UnboundExceptionVariable : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

// Norm/exception text that parses and validates but cannot be turned into
// production rules (e.g. an outer variable unreachable from the relation).
class CompileError : public Error {
  public:
    using Error::Error;
};

// Writes that would forge lifecycle facts: user input asserting reserved
// vocabulary into the knowledge base directly.
class ReservedVocabularyMisuse : public Error {
  public:
    using Error::Error;
};

// rdfs:subClassOf / rdfs:subPropertyOf graph has a cycle.
class CyclicHierarchy : public Error {
  public:
    using Error::Error;
};

// Strict-vocabulary mode only: a query names a predicate or class that no
// fact or schema axiom has ever mentioned.
class UnknownPredicate : public Error {
  public:
    using Error::Error;
};

// A rule action failed to execute under its binding (type error in an
// arithmetic expression, unbound variable in an assert, ...).
class ActionError : public Error {
  public:
    using Error::Error;
};

// Forward chaining exceeded the firing budget without reaching a fixpoint.
class FixpointBudgetExceeded : public Error {
  public:
    using Error::Error;
};

// Event stream violations.
class ScenarioError : public Error {
  public:
    using Error::Error;
};
class StaleEvent : public ScenarioError {
  public:
    using ScenarioError::ScenarioError;
};
class PastEvent : public ScenarioError {
  public:
    using ScenarioError::ScenarioError;
};

// advance_to_next_instant() with nothing left to wake up for.
class SimulationExhausted : public Error {
  public:
    using Error::Error;
};

} // namespace tnorm

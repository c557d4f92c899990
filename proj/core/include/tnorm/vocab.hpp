// Reserved lifecycle vocabulary.
//
// A fixed set of class and property names carries the deontic bookkeeping.
// Rules and the runtime write them; user input (triple files, event streams)
// may not, except for the descriptive subset every event legitimately uses
// (atTime, inXSDDateTimeStamp, actor, Instant, Event). Everything outside
// the reserved set is open vocabulary and needs no declaration.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tnorm {

namespace vocab {

// Classes.
inline constexpr std::string_view DeonticRelation = "DeonticRelation";
inline constexpr std::string_view TimeEvent = "TimeEvent";
inline constexpr std::string_view Instant = "Instant";
inline constexpr std::string_view Event = "Event";
inline constexpr std::string_view NormEnactment = "NormEnactment";

// Properties.
inline constexpr std::string_view isGenerated = "isGenerated";
inline constexpr std::string_view activated = "activated";
inline constexpr std::string_view debtor = "debtor";
inline constexpr std::string_view end = "end";
inline constexpr std::string_view atTime = "atTime";
inline constexpr std::string_view inXSDDateTimeStamp = "inXSDDateTimeStamp";
inline constexpr std::string_view fulfills = "fulfills";
inline constexpr std::string_view violates = "violates";
inline constexpr std::string_view fulfilled = "fulfilled";
inline constexpr std::string_view violated = "violated";
inline constexpr std::string_view exceptionToNorm = "exceptionToNorm";
inline constexpr std::string_view exceptionToDR = "exceptionToDR";
inline constexpr std::string_view exceptionToException = "exceptionToException";
inline constexpr std::string_view actor = "actor";
inline constexpr std::string_view happened = "happened";
inline constexpr std::string_view enacts = "enacts";

// The rdf:type shorthand used throughout the fact store.
inline constexpr std::string_view a = "a";

} // namespace vocab

// Lifecycle names: forbidden in user STATE facts and in schema axioms.
// atTime/inXSDDateTimeStamp/actor are vocabulary but not lifecycle; events
// carry them.
bool is_lifecycle_property(std::string_view name);
// DeonticRelation, TimeEvent, NormEnactment. Instant/Event stay writable:
// ingested events are Events located at Instants.
bool is_lifecycle_class(std::string_view name);

// Full vocabulary membership, for cross-arity redeclaration checks
// (a vocabulary class name may never appear where a property is expected
// and vice versa).
bool is_vocab_class(std::string_view name);
bool is_vocab_property(std::string_view name);

// Properties a rule consequent may assert. happened/enacts are runtime-only.
bool is_rule_assertable(std::string_view name);
// Classes a CREATE statement may mint. NormEnactment is runtime-only.
bool is_rule_creatable(std::string_view name);

// Deterministic id for entities minted by a rule firing:
//   "<norm>#<slot>#<event-id>", e.g. "Norm01#dr#e1".
std::string fresh_id(std::string_view norm, std::string_view slot, std::string_view event_id);

// Built-in schema axioms every knowledge base starts from:
// TimeEvent is a kind of Event.
struct PreludeAxiom {
    std::string_view subject, predicate, object;
};
const std::vector<PreludeAxiom>& prelude_axioms();

} // namespace tnorm

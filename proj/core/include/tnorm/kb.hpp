// Fact store and schema reasoning.
//
// One store holds both partitions: STATE (domain events and data) and
// DEONTIC (norm lifecycle). Facts are never retracted; growth is the only
// mutation, which is what makes the engine's fixpoint argument work.
// Materialization physically adds the subsumption closure, so pattern
// evaluation never consults the schema.
#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tnorm/errors.hpp"
#include "tnorm/pattern.hpp"
#include "tnorm/value.hpp"

namespace tnorm {

enum class Partition { State, Deontic };
enum class Origin { Asserted, Inferred };

struct Fact {
    Resource subject;
    std::string predicate;  // "a" carries class membership
    Value object;
    Partition partition = Partition::State;
    Origin origin = Origin::Asserted;

    // Identity is (subject, predicate, object); partition and origin are
    // attributes fixed by the first assertion.
    std::string key() const;
    // "subject predicate object" for traces and dumps.
    std::string display() const;
};

struct SchemaAxiom {
    enum class Kind { SubClassOf, SubPropertyOf };
    Kind kind;
    std::string sub, super;
    friend bool operator==(const SchemaAxiom&, const SchemaAxiom&) = default;
};

class Schema {
  public:
    // Reflexive-transitive subsumption.
    bool is_subclass(const std::string& sub, const std::string& super) const;
    bool is_subproperty(const std::string& sub, const std::string& super) const;

    // Strict ancestors, deterministically ordered.
    const std::vector<std::string>& class_supers(const std::string& name) const;
    const std::vector<std::string>& property_supers(const std::string& name) const;

    const std::vector<SchemaAxiom>& axioms() const { return axioms_; }

  private:
    friend Schema load_schema(const std::vector<SchemaAxiom>& axioms);

    std::vector<SchemaAxiom> axioms_;
    std::unordered_map<std::string, std::vector<std::string>> class_supers_;
    std::unordered_map<std::string, std::vector<std::string>> prop_supers_;
};

// Indexes the axiom set; the built-in prelude (TimeEvent ⊑ Event) is always
// included. Throws CyclicHierarchy on cyclic graphs (self-loops are dropped
// first) and ValidationError when an axiom redeclares reserved vocabulary.
Schema load_schema(const std::vector<SchemaAxiom>& axioms);

class Kb {
  public:
    // True when the fact was new. Idempotent: re-asserting an existing
    // triple is a no-op even if partition or origin differ. Throws
    // ReservedVocabularyMisuse for STATE facts carrying lifecycle names.
    bool assert_fact(Fact f);

    // Closes the store under (x a C) ∧ C ⊑* D ⊢ (x a D) and
    // (x p y) ∧ p ⊑* q ⊢ (x q y). Inferred facts inherit the premise's
    // partition. Idempotent.
    void materialize(const Schema& schema);

    // All bindings satisfying the pattern against the current store,
    // closed-world for negation, ordered lexicographically by variable
    // values. `seed` pre-binds variables.
    std::vector<Binding> query(const Pattern& p) const;
    std::vector<Binding> query(const Pattern& p, const Binding& seed) const;

    bool has(const Resource& subject, std::string_view predicate, const Value& object) const;
    bool has_subject(const Resource& subject) const;

    std::size_t size() const { return facts_.size(); }
    const std::vector<Fact>& facts() const { return facts_; }

    // Sorted fact keys of one partition; the runtime uses this to prove
    // rule firings never touched STATE.
    std::vector<std::string> partition_snapshot(Partition part) const;

    // With strict vocabulary on, querying a predicate or class that no fact
    // or declaration mentions raises UnknownPredicate.
    void set_strict_vocabulary(bool on) { strict_ = on; }
    // Registers schema axiom names as declared, for strict-mode lookups.
    void declare_names(const Schema& schema);

  private:
    friend class QueryEval;

    std::vector<Fact> facts_;
    std::unordered_map<std::string, std::size_t> index_;               // key -> facts_ position
    std::unordered_map<std::string, std::vector<std::size_t>> by_predicate_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_class_;  // "a"-facts by class name
    std::unordered_set<std::string> declared_classes_;
    std::unordered_set<std::string> declared_properties_;
    bool strict_ = false;
};

} // namespace tnorm

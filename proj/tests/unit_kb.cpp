#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tnorm/kb.hpp"
#include "tnorm/vocab.hpp"

using namespace tnorm;

namespace {

Term v(const char* name) { return Term::variable(name); }

Fact state(const char* s, const char* p, Value o) {
    return Fact{Resource{s}, p, std::move(o), Partition::State, Origin::Asserted};
}
Fact deontic(const char* s, const char* p, Value o) {
    return Fact{Resource{s}, p, std::move(o), Partition::Deontic, Origin::Asserted};
}

} // namespace

TEST_CASE("schema closure is reflexive-transitive and deterministic") {
    Schema s = load_schema({{SchemaAxiom::Kind::SubClassOf, "ReproduceAction", "UseAction"},
                            {SchemaAxiom::Kind::SubClassOf, "UseAction", "Action"},
                            {SchemaAxiom::Kind::SubPropertyOf, "owns", "controls"}});
    CHECK(s.is_subclass("ReproduceAction", "UseAction"));
    CHECK(s.is_subclass("ReproduceAction", "Action"));   // transitive
    CHECK(s.is_subclass("UseAction", "UseAction"));      // reflexive
    CHECK(!s.is_subclass("UseAction", "ReproduceAction")); // no inversion
    CHECK(!s.is_subclass("Unrelated", "Action"));
    CHECK(s.is_subproperty("owns", "controls"));
    CHECK(s.is_subproperty("owns", "owns"));

    auto supers = s.class_supers("ReproduceAction");
    CHECK(supers == std::vector<std::string>{"Action", "UseAction"});

    // The empty schema still carries the built-in prelude.
    Schema empty = load_schema({});
    CHECK(empty.is_subclass("TimeEvent", "Event"));
    CHECK(empty.is_subclass("X", "X"));
}

TEST_CASE("schema axioms may not repurpose reserved vocabulary") {
    CHECK_THROWS_AS(load_schema({{SchemaAxiom::Kind::SubClassOf, "MyThing", "DeonticRelation"}}),
                    ValidationError);
    CHECK_THROWS_AS(load_schema({{SchemaAxiom::Kind::SubClassOf, "fulfills", "Action"}}),
                    ValidationError);
    CHECK_THROWS_AS(load_schema({{SchemaAxiom::Kind::SubPropertyOf, "myProp", "fulfills"}}),
                    ValidationError);
    // Extending the hierarchy under Event is the supported pattern.
    Schema s = load_schema({{SchemaAxiom::Kind::SubClassOf, "PayAction", "Event"}});
    CHECK(s.is_subclass("PayAction", "Event"));
}

TEST_CASE("cyclic hierarchies are rejected, self-loops dropped") {
    CHECK_THROWS_AS(load_schema({{SchemaAxiom::Kind::SubClassOf, "A", "B"},
                                 {SchemaAxiom::Kind::SubClassOf, "B", "A"}}),
                    CyclicHierarchy);
    CHECK_THROWS_AS(load_schema({{SchemaAxiom::Kind::SubPropertyOf, "p", "q"},
                                 {SchemaAxiom::Kind::SubPropertyOf, "q", "r"},
                                 {SchemaAxiom::Kind::SubPropertyOf, "r", "p"}}),
                    CyclicHierarchy);
    // A self-loop alone is not a cycle.
    Schema s = load_schema({{SchemaAxiom::Kind::SubClassOf, "A", "A"},
                            {SchemaAxiom::Kind::SubClassOf, "A", "B"}});
    CHECK(s.is_subclass("A", "B"));
}

TEST_CASE("assert_fact is idempotent set insertion") {
    Kb kb;
    CHECK(kb.assert_fact(state("e1", "a", Value::resource("PayAction"))));
    CHECK(!kb.assert_fact(state("e1", "a", Value::resource("PayAction"))));
    CHECK(kb.size() == 1);
    // Identity is (subject, predicate, object); a different object is new.
    CHECK(kb.assert_fact(state("e1", "price", Value(std::int64_t{6}))));
    CHECK(kb.size() == 2);
    CHECK(kb.has(Resource{"e1"}, "price", Value(std::int64_t{6})));
    CHECK(!kb.has(Resource{"e1"}, "price", Value(std::int64_t{7})));
    CHECK(kb.has_subject(Resource{"e1"}));
    CHECK(!kb.has_subject(Resource{"e2"}));
}

TEST_CASE("lifecycle predicates are rejected in the STATE partition") {
    Kb kb;
    CHECK_THROWS_AS(kb.assert_fact(state("e1", "fulfills", Value::resource("dr1"))),
                    ReservedVocabularyMisuse);
    CHECK_THROWS_AS(kb.assert_fact(state("e1", "a", Value::resource("DeonticRelation"))),
                    ReservedVocabularyMisuse);
    // The same names are fine in the DEONTIC partition.
    CHECK(kb.assert_fact(deontic("a1", "fulfills", Value::resource("dr1"))));
    // Non-lifecycle STATE facts pass.
    CHECK(kb.assert_fact(state("e1", "atTime", Value::resource("i1"))));
}

TEST_CASE("materialize closes under subclass and subproperty rules") {
    Schema s = load_schema({{SchemaAxiom::Kind::SubClassOf, "SellAction", "TransferAction"},
                            {SchemaAxiom::Kind::SubClassOf, "TransferAction", "Action"},
                            {SchemaAxiom::Kind::SubPropertyOf, "sells", "transfers"}});
    Kb kb;
    kb.assert_fact(state("e1", "a", Value::resource("SellAction")));
    kb.assert_fact(state("e1", "sells", Value::resource("product1")));
    kb.materialize(s);

    CHECK(kb.has(Resource{"e1"}, "a", Value::resource("TransferAction")));
    CHECK(kb.has(Resource{"e1"}, "a", Value::resource("Action")));
    CHECK(kb.has(Resource{"e1"}, "transfers", Value::resource("product1")));

    // Inferred facts carry their origin and the premise's partition.
    bool saw_inferred = false;
    for (const auto& f : kb.facts())
        if (f.predicate == "a" && f.object == Value::resource("TransferAction")) {
            CHECK(f.origin == Origin::Inferred);
            CHECK(f.partition == Partition::State);
            saw_inferred = true;
        }
    CHECK(saw_inferred);

    // Idempotence: a second run adds nothing.
    std::size_t n = kb.size();
    kb.materialize(s);
    CHECK(kb.size() == n);
}

// Independent closure oracle: naive fixpoint over explicit pair sets,
// sharing no code with Kb::materialize.
TEST_CASE("materialization agrees with a naive fixpoint oracle") {
    std::vector<std::pair<std::string, std::string>> sub_class = {
        {"A", "B"}, {"B", "C"}, {"D", "C"}, {"E", "A"}};
    Schema s = load_schema({{SchemaAxiom::Kind::SubClassOf, "A", "B"},
                            {SchemaAxiom::Kind::SubClassOf, "B", "C"},
                            {SchemaAxiom::Kind::SubClassOf, "D", "C"},
                            {SchemaAxiom::Kind::SubClassOf, "E", "A"}});

    std::vector<std::pair<std::string, std::string>> membership = {
        {"x", "A"}, {"y", "E"}, {"z", "D"}, {"w", "C"}};

    // Oracle: saturate (individual, class) pairs by one-step axiom application.
    std::set<std::pair<std::string, std::string>> closed(membership.begin(), membership.end());
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [ind, cls] : std::set<std::pair<std::string, std::string>>(closed))
            for (const auto& [sub, super] : sub_class)
                if (cls == sub && closed.insert({ind, super}).second) grew = true;
    }

    Kb kb;
    for (const auto& [ind, cls] : membership)
        kb.assert_fact(state(ind.c_str(), "a", Value::resource(cls)));
    kb.materialize(s);

    std::set<std::pair<std::string, std::string>> got;
    for (const auto& f : kb.facts())
        if (f.predicate == "a") got.insert({f.subject.id, f.object.as_resource().id});
    CHECK(got == closed);
}

TEST_CASE("query matches conjunctions with constants and joins") {
    Kb kb;
    kb.assert_fact(state("pay1", "a", Value::resource("PayAction")));
    kb.assert_fact(state("pay1", "price", Value(std::int64_t{6})));
    kb.assert_fact(state("pay1", "reason", Value::resource("e1")));
    kb.assert_fact(state("pay2", "a", Value::resource("PayAction")));
    kb.assert_fact(state("pay2", "price", Value(std::int64_t{9})));

    Pattern p;
    p.atoms.push_back(Atom::cls("PayAction", v("e")));
    p.atoms.push_back(Atom::prop("price", v("e"), Term::constant(Value(std::int64_t{6}))));
    auto rows = kb.query(p);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("e") == Value::resource("pay1"));

    // Empty store, no bindings.
    Kb empty;
    CHECK(empty.query(p).empty());

    // Comparisons filter bindings.
    Pattern q;
    q.atoms.push_back(Atom::cls("PayAction", v("e")));
    q.atoms.push_back(Atom::prop("price", v("e"), v("p")));
    q.atoms.push_back(Atom::compare(Expr::variable("p"), CmpOp::Gt, Expr::literal(Value(std::int64_t{7}))));
    rows = kb.query(q);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("e") == Value::resource("pay2"));

    // Seeds pre-bind variables.
    Binding seed;
    seed["e"] = Value::resource("pay1");
    Pattern all;
    all.atoms.push_back(Atom::cls("PayAction", v("e")));
    rows = kb.query(all, seed);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("e") == Value::resource("pay1"));
}

TEST_CASE("query results are deterministic and lexicographically ordered") {
    Kb forward, backward;
    const char* ids[] = {"m", "a", "z", "k", "b"};
    for (const char* id : ids) forward.assert_fact(state(id, "a", Value::resource("Thing")));
    for (int i = 4; i >= 0; --i) backward.assert_fact(state(ids[i], "a", Value::resource("Thing")));

    Pattern p;
    p.atoms.push_back(Atom::cls("Thing", v("x")));
    auto rows1 = forward.query(p);
    auto rows2 = backward.query(p);
    REQUIRE(rows1.size() == 5);
    CHECK(rows1 == rows2); // insertion order does not leak
    for (std::size_t i = 1; i < rows1.size(); ++i)
        CHECK(rows1[i - 1].at("x") < rows1[i].at("x"));
}

// Negation oracle: brute-force enumeration. For every candidate ?d, the
// negated query must say yes exactly when no fulfills edge exists.
TEST_CASE("negation as failure agrees with brute-force enumeration") {
    Kb kb;
    for (const char* d : {"dr1", "dr2", "dr3", "dr4"})
        kb.assert_fact(deontic(d, "a", Value::resource("DeonticRelation")));
    kb.assert_fact(deontic("ag1", "fulfills", Value::resource("dr2")));
    kb.assert_fact(deontic("ag2", "fulfills", Value::resource("dr4")));

    Pattern neg;
    neg.atoms.push_back(Atom::cls("DeonticRelation", v("d")));
    neg.atoms.push_back(Atom::negation({Atom::prop("fulfills", v("a"), v("d"))}));
    auto rows = kb.query(neg);

    std::set<std::string> got;
    for (const auto& b : rows) got.insert(b.at("d").as_resource().id);

    std::set<std::string> expect;
    for (const char* d : {"dr1", "dr2", "dr3", "dr4"}) {
        bool has_edge = false;
        for (const auto& f : kb.facts())
            if (f.predicate == "fulfills" && f.object == Value::resource(d)) has_edge = true;
        if (!has_edge) expect.insert(d);
    }
    CHECK(got == expect);
    CHECK(got == std::set<std::string>{"dr1", "dr3"});

    // Positive and negated partitions of the same base query are disjoint
    // and together cover it.
    Pattern pos;
    pos.atoms.push_back(Atom::cls("DeonticRelation", v("d")));
    pos.atoms.push_back(Atom::prop("fulfills", v("a"), v("d")));
    std::set<std::string> pos_ids;
    for (const auto& b : kb.query(pos)) pos_ids.insert(b.at("d").as_resource().id);
    for (const auto& id : got) CHECK(!pos_ids.contains(id));
    CHECK(pos_ids.size() + got.size() == 4);
}

TEST_CASE("monotonicity: operations never remove facts") {
    Schema s = load_schema({{SchemaAxiom::Kind::SubClassOf, "A", "B"}});
    Kb kb;
    std::size_t last = 0;
    auto check_grew = [&] {
        CHECK(kb.size() >= last);
        last = kb.size();
    };
    kb.assert_fact(state("x", "a", Value::resource("A")));
    check_grew();
    kb.materialize(s);
    check_grew();
    Pattern p;
    p.atoms.push_back(Atom::cls("B", v("x")));
    (void)kb.query(p);
    check_grew();
    kb.assert_fact(state("x", "a", Value::resource("A"))); // duplicate
    CHECK(kb.size() == last);
}

TEST_CASE("partition snapshots are sorted keys of one partition only") {
    Kb kb;
    kb.assert_fact(state("e1", "a", Value::resource("PayAction")));
    kb.assert_fact(deontic("dr1", "isGenerated", Value::resource("Norm01")));
    kb.assert_fact(state("e1", "price", Value(std::int64_t{6})));

    auto st = kb.partition_snapshot(Partition::State);
    auto de = kb.partition_snapshot(Partition::Deontic);
    CHECK(st.size() == 2);
    CHECK(de.size() == 1);
    CHECK(std::is_sorted(st.begin(), st.end()));
    // Same content, different insertion order, identical snapshot.
    Kb kb2;
    kb2.assert_fact(state("e1", "price", Value(std::int64_t{6})));
    kb2.assert_fact(state("e1", "a", Value::resource("PayAction")));
    kb2.assert_fact(deontic("dr1", "isGenerated", Value::resource("Norm01")));
    CHECK(kb2.partition_snapshot(Partition::State) == st);
}

TEST_CASE("strict vocabulary flags unknown predicates at query time") {
    Schema s = load_schema({{SchemaAxiom::Kind::SubClassOf, "PayAction", "Action"}});
    Kb kb;
    kb.declare_names(s);
    kb.assert_fact(state("e1", "a", Value::resource("PayAction")));
    kb.set_strict_vocabulary(true);

    Pattern known;
    known.atoms.push_back(Atom::cls("PayAction", v("e")));
    CHECK(kb.query(known).size() == 1);

    Pattern typo;
    typo.atoms.push_back(Atom::prop("pricee", v("e"), v("p")));
    CHECK_THROWS_AS((void)kb.query(typo), UnknownPredicate);

    // Default mode treats the same query as simply empty.
    kb.set_strict_vocabulary(false);
    CHECK(kb.query(typo).empty());
}

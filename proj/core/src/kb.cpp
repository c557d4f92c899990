#include "tnorm/kb.hpp"

#include <algorithm>
#include <set>

#include "tnorm/vocab.hpp"

namespace tnorm {

std::string Fact::key() const {
    std::string out;
    out.reserve(subject.id.size() + predicate.size() + 24);
    out += subject.id;
    out += '\x1f';
    out += predicate;
    out += '\x1f';
    out += object.canonical();
    return out;
}

std::string Fact::display() const { return subject.id + " " + predicate + " " + object.display(); }

// ---- schema ---------------------------------------------------------------

namespace {

using Edges = std::unordered_map<std::string, std::vector<std::string>>;

// DFS over `edges` computing strict-ancestor lists; throws on a cycle.
struct ClosureBuilder {
    const Edges& edges;
    std::unordered_map<std::string, int> mark;  // 0 unvisited, 1 in progress, 2 done
    std::unordered_map<std::string, std::vector<std::string>> closure;

    const std::vector<std::string>& visit(const std::string& node) {
        int& m = mark[node];
        if (m == 1) throw CyclicHierarchy("cyclic hierarchy through '" + node + "'");
        if (m == 2) return closure[node];
        m = 1;
        std::set<std::string> supers;
        auto it = edges.find(node);
        if (it != edges.end()) {
            for (const auto& parent : it->second) {
                supers.insert(parent);
                for (const auto& anc : visit(parent)) supers.insert(anc);
            }
        }
        mark[node] = 2;
        auto& out = closure[node];
        out.assign(supers.begin(), supers.end());
        return out;
    }
};

void check_axiom_vocabulary(const SchemaAxiom& ax) {
    const bool is_class_axiom = ax.kind == SchemaAxiom::Kind::SubClassOf;
    for (const std::string* name : {&ax.sub, &ax.super}) {
        if (is_class_axiom && is_vocab_property(*name))
            throw ValidationError("property name '" + *name + "' used in a subclass axiom");
        if (!is_class_axiom && (is_vocab_class(*name) || *name == vocab::a))
            throw ValidationError("class name '" + *name + "' used in a subproperty axiom");
    }
    if (is_class_axiom) {
        // The one built-in class axiom is allowed; everything else may only
        // extend the hierarchy below user classes or directly under Event.
        if (ax.sub == vocab::TimeEvent && ax.super == vocab::Event) return;
        if (is_lifecycle_class(ax.sub) || ax.sub == vocab::Instant || ax.sub == vocab::Event)
            throw ValidationError("reserved class '" + ax.sub + "' cannot be subclassed away");
        if (is_lifecycle_class(ax.super) || ax.super == vocab::Instant)
            throw ValidationError("user classes cannot be placed under reserved class '" + ax.super + "'");
    } else {
        if (is_lifecycle_property(ax.sub) || is_lifecycle_property(ax.super) ||
            is_vocab_property(ax.sub) || is_vocab_property(ax.super))
            throw ValidationError("reserved property in subproperty axiom: '" + ax.sub + "' / '" + ax.super + "'");
    }
}

} // namespace

bool Schema::is_subclass(const std::string& sub, const std::string& super) const {
    if (sub == super) return true;
    auto it = class_supers_.find(sub);
    if (it == class_supers_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), super);
}

bool Schema::is_subproperty(const std::string& sub, const std::string& super) const {
    if (sub == super) return true;
    auto it = prop_supers_.find(sub);
    if (it == prop_supers_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), super);
}

const std::vector<std::string>& Schema::class_supers(const std::string& name) const {
    static const std::vector<std::string> empty;
    auto it = class_supers_.find(name);
    return it == class_supers_.end() ? empty : it->second;
}

const std::vector<std::string>& Schema::property_supers(const std::string& name) const {
    static const std::vector<std::string> empty;
    auto it = prop_supers_.find(name);
    return it == prop_supers_.end() ? empty : it->second;
}

Schema load_schema(const std::vector<SchemaAxiom>& axioms) {
    Schema schema;
    for (const auto& ax : axioms) check_axiom_vocabulary(ax);
    schema.axioms_ = axioms;
    for (const auto& pre : prelude_axioms()) {
        SchemaAxiom ax{SchemaAxiom::Kind::SubClassOf, std::string(pre.subject), std::string(pre.object)};
        if (std::find(schema.axioms_.begin(), schema.axioms_.end(), ax) == schema.axioms_.end())
            schema.axioms_.push_back(std::move(ax));
    }

    Edges class_edges, prop_edges;
    for (const auto& ax : schema.axioms_) {
        if (ax.sub == ax.super) continue; // self-loops are vacuous
        auto& edges = ax.kind == SchemaAxiom::Kind::SubClassOf ? class_edges : prop_edges;
        auto& out = edges[ax.sub];
        if (std::find(out.begin(), out.end(), ax.super) == out.end()) out.push_back(ax.super);
    }

    for (auto pair : {std::pair{&class_edges, &schema.class_supers_}, std::pair{&prop_edges, &schema.prop_supers_}}) {
        ClosureBuilder builder{*pair.first, {}, {}};
        for (const auto& [node, _] : *pair.first) builder.visit(node);
        *pair.second = std::move(builder.closure);
    }
    return schema;
}

// ---- fact store -------------------------------------------------------------

bool Kb::assert_fact(Fact f) {
    if (f.partition == Partition::State) {
        if (is_lifecycle_property(f.predicate))
            throw ReservedVocabularyMisuse("lifecycle property '" + f.predicate + "' asserted as state");
        if (f.predicate == vocab::a && f.object.is_resource() && is_lifecycle_class(f.object.as_resource().id))
            throw ReservedVocabularyMisuse("lifecycle class '" + f.object.as_resource().id +
                                           "' asserted as state");
    }
    std::string key = f.key();
    if (index_.contains(key)) return false;
    std::size_t pos = facts_.size();
    index_.emplace(std::move(key), pos);
    by_predicate_[f.predicate].push_back(pos);
    if (f.predicate == vocab::a && f.object.is_resource()) by_class_[f.object.as_resource().id].push_back(pos);
    facts_.push_back(std::move(f));
    return true;
}

void Kb::materialize(const Schema& schema) {
    // Closures are transitive, so one pass over the pre-pass snapshot is a
    // fixpoint: anything derivable from a derived fact was already derivable
    // from its premise.
    const std::size_t n = facts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Fact f = facts_[i]; // copy: assert_fact may reallocate facts_
        if (f.predicate == vocab::a && f.object.is_resource()) {
            for (const auto& super : schema.class_supers(f.object.as_resource().id))
                assert_fact({f.subject, std::string(vocab::a), Value::resource(super), f.partition, Origin::Inferred});
        } else {
            for (const auto& super : schema.property_supers(f.predicate))
                assert_fact({f.subject, super, f.object, f.partition, Origin::Inferred});
        }
    }
}

void Kb::declare_names(const Schema& schema) {
    for (const auto& ax : schema.axioms()) {
        auto& set = ax.kind == SchemaAxiom::Kind::SubClassOf ? declared_classes_ : declared_properties_;
        set.insert(ax.sub);
        set.insert(ax.super);
    }
}

bool Kb::has(const Resource& subject, std::string_view predicate, const Value& object) const {
    Fact probe{subject, std::string(predicate), object, Partition::State, Origin::Asserted};
    return index_.contains(probe.key());
}

bool Kb::has_subject(const Resource& subject) const {
    for (const auto& f : facts_)
        if (f.subject == subject) return true;
    return false;
}

std::vector<std::string> Kb::partition_snapshot(Partition part) const {
    std::vector<std::string> keys;
    for (const auto& f : facts_)
        if (f.partition == part) keys.push_back(f.key());
    std::sort(keys.begin(), keys.end());
    return keys;
}

// ---- query ------------------------------------------------------------------

class QueryEval {
  public:
    QueryEval(const Kb& kb) : kb_(kb) {}

    std::vector<Binding> run(const Pattern& p, Binding seed) {
        if (kb_.strict_) check_known(p.atoms);
        std::vector<Binding> out;
        step(p.atoms, 0, seed, out);
        std::sort(out.begin(), out.end(), binding_less);
        return out;
    }

  private:
    const Kb& kb_;

    static bool binding_less(const Binding& a, const Binding& b) {
        auto ia = a.begin(), ib = b.begin();
        for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return ia->first < ib->first;
            if (ia->second != ib->second) return ia->second < ib->second;
        }
        return a.size() < b.size();
    }

    void check_known(const std::vector<Atom>& atoms) const {
        for (const auto& a : atoms) {
            if (a.kind == Atom::Kind::Class) {
                if (!kb_.by_class_.contains(a.name) && !is_vocab_class(a.name) &&
                    !kb_.declared_classes_.contains(a.name))
                    throw UnknownPredicate("unknown class '" + a.name + "'");
            } else if (a.kind == Atom::Kind::Property) {
                if (!kb_.by_predicate_.contains(a.name) && !is_vocab_property(a.name) &&
                    !kb_.declared_properties_.contains(a.name))
                    throw UnknownPredicate("unknown property '" + a.name + "'");
            } else if (a.kind == Atom::Kind::Not) {
                check_known(a.body);
            }
        }
    }

    bool match_term(const Term& t, const Value& v, Binding& b, std::vector<std::string>& fresh) const {
        if (!t.is_var) return t.value == v;
        auto it = b.find(t.var);
        if (it != b.end()) return it->second == v;
        b.emplace(t.var, v);
        fresh.push_back(t.var);
        return true;
    }

    void step(const std::vector<Atom>& atoms, std::size_t idx, Binding& b, std::vector<Binding>& out) const {
        if (idx == atoms.size()) {
            out.push_back(b);
            return;
        }
        const Atom& a = atoms[idx];
        switch (a.kind) {
        case Atom::Kind::Class: {
            auto it = kb_.by_class_.find(a.name);
            if (it == kb_.by_class_.end()) return;
            for (std::size_t pos : it->second) {
                std::vector<std::string> fresh;
                if (match_term(a.terms[0], Value(kb_.facts_[pos].subject), b, fresh)) step(atoms, idx + 1, b, out);
                for (const auto& v : fresh) b.erase(v);
            }
            return;
        }
        case Atom::Kind::Property: {
            auto it = kb_.by_predicate_.find(a.name);
            if (it == kb_.by_predicate_.end()) return;
            for (std::size_t pos : it->second) {
                const Fact& f = kb_.facts_[pos];
                std::vector<std::string> fresh;
                if (match_term(a.terms[0], Value(f.subject), b, fresh) && match_term(a.terms[1], f.object, b, fresh))
                    step(atoms, idx + 1, b, out);
                for (const auto& v : fresh) b.erase(v);
            }
            return;
        }
        case Atom::Kind::Compare: {
            auto lhs = eval_expr(a.lhs, b);
            auto rhs = eval_expr(a.rhs, b);
            if (lhs && rhs && compare_values(*lhs, a.op, *rhs)) step(atoms, idx + 1, b, out);
            return;
        }
        case Atom::Kind::Not: {
            if (!satisfiable(a.body, b)) step(atoms, idx + 1, b, out);
            return;
        }
        }
    }

    // True when the atom list has at least one satisfying extension of `b`.
    bool satisfiable(const std::vector<Atom>& atoms, const Binding& b) const {
        std::vector<Binding> sols;
        Binding local = b;
        step_first(atoms, 0, local, sols);
        return !sols.empty();
    }

    // Like step() but stops at the first solution.
    void step_first(const std::vector<Atom>& atoms, std::size_t idx, Binding& b, std::vector<Binding>& out) const {
        if (!out.empty()) return;
        if (idx == atoms.size()) {
            out.push_back(b);
            return;
        }
        const Atom& a = atoms[idx];
        switch (a.kind) {
        case Atom::Kind::Class: {
            auto it = kb_.by_class_.find(a.name);
            if (it == kb_.by_class_.end()) return;
            for (std::size_t pos : it->second) {
                if (!out.empty()) return;
                std::vector<std::string> fresh;
                if (match_term(a.terms[0], Value(kb_.facts_[pos].subject), b, fresh))
                    step_first(atoms, idx + 1, b, out);
                for (const auto& v : fresh) b.erase(v);
            }
            return;
        }
        case Atom::Kind::Property: {
            auto it = kb_.by_predicate_.find(a.name);
            if (it == kb_.by_predicate_.end()) return;
            for (std::size_t pos : it->second) {
                if (!out.empty()) return;
                const Fact& f = kb_.facts_[pos];
                std::vector<std::string> fresh;
                if (match_term(a.terms[0], Value(f.subject), b, fresh) && match_term(a.terms[1], f.object, b, fresh))
                    step_first(atoms, idx + 1, b, out);
                for (const auto& v : fresh) b.erase(v);
            }
            return;
        }
        case Atom::Kind::Compare: {
            auto lhs = eval_expr(a.lhs, b);
            auto rhs = eval_expr(a.rhs, b);
            if (lhs && rhs && compare_values(*lhs, a.op, *rhs)) step_first(atoms, idx + 1, b, out);
            return;
        }
        case Atom::Kind::Not: {
            if (!satisfiable(a.body, b)) step_first(atoms, idx + 1, b, out);
            return;
        }
        }
    }
};

std::vector<Binding> Kb::query(const Pattern& p) const { return query(p, Binding{}); }

std::vector<Binding> Kb::query(const Pattern& p, const Binding& seed) const {
    return QueryEval(*this).run(p, seed);
}

} // namespace tnorm

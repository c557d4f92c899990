#include "tnorm/runtime.hpp"

#include <algorithm>

#include "tnorm/errors.hpp"
#include "tnorm/vocab.hpp"

namespace tnorm {

namespace {

std::string vs(std::string_view s) { return std::string(s); }

// Objects of lifecycle asserts are resources by construction; anything else
// is rendered for the log rather than dropped.
std::string object_name(const Value& v) {
    return v.is_resource() ? v.as_resource().id : v.display();
}

} // namespace

std::string to_string(DeonticKind kind) {
    switch (kind) {
        case DeonticKind::Activated: return "activated";
        case DeonticKind::Fulfilled: return "fulfilled";
        case DeonticKind::Violated: return "violated";
        case DeonticKind::Inhibited: return "inhibited";
    }
    return "?";
}

Runtime::Runtime(RuleSet rules, Schema schema, RuntimeOptions options)
    : rules_(std::move(rules)), schema_(std::move(schema)), options_(options),
      engine_(options.budget) {
    kb_.set_strict_vocabulary(options_.strict_vocabulary);
    kb_.declare_names(schema_);
}

void Runtime::load_facts(const std::vector<Fact>& facts) {
    for (const auto& f : facts) kb_.assert_fact(f);
}

void Runtime::set_start(Timestamp t) {
    ensure_enacted(t);
}

void Runtime::ensure_enacted(Timestamp t) {
    if (enacted_) return;
    enacted_ = true;
    if (!now_ || *now_ < t) now_ = t;

    // One enactment individual per norm; rule activation conditions anchor
    // "the event is not before enactment" on these facts.
    std::vector<std::string> norms;
    for (const auto& r : rules_.rules)
        if (std::find(norms.begin(), norms.end(), r.norm) == norms.end())
            norms.push_back(r.norm);
    for (const auto& n : norms) {
        const std::string id = n + "#enactment";
        const std::string inst = id + "#inst";
        kb_.assert_fact({Resource{id}, vs(vocab::a), Value::resource(vs(vocab::NormEnactment)),
                         Partition::Deontic, Origin::Asserted});
        kb_.assert_fact({Resource{id}, vs(vocab::enacts), Value::resource(n),
                         Partition::Deontic, Origin::Asserted});
        kb_.assert_fact({Resource{id}, vs(vocab::atTime), Value::resource(inst),
                         Partition::Deontic, Origin::Asserted});
        kb_.assert_fact({Resource{inst}, vs(vocab::a), Value::resource(vs(vocab::Instant)),
                         Partition::Deontic, Origin::Asserted});
        kb_.assert_fact({Resource{inst}, vs(vocab::inXSDDateTimeStamp), Value(t),
                         Partition::Deontic, Origin::Asserted});
        kb_.assert_fact({Resource{id}, vs(vocab::happened), Value(t),
                         Partition::Deontic, Origin::Asserted});
        happened_[id] = t;
    }
}

void Runtime::assert_event_facts(const EventRecord& ev) {
    if (ev.id.id.empty()) throw ScenarioError("event with empty id");
    if (kb_.has_subject(ev.id))
        throw ScenarioError("duplicate event id '" + ev.id.id + "'");

    const std::string inst = ev.id.id + "#inst";
    for (const auto& c : ev.classes)
        kb_.assert_fact({ev.id, vs(vocab::a), Value::resource(c),
                         Partition::State, Origin::Asserted});
    for (const auto& [p, v] : ev.properties)
        kb_.assert_fact({ev.id, p, v, Partition::State, Origin::Asserted});
    kb_.assert_fact({ev.id, vs(vocab::atTime), Value::resource(inst),
                     Partition::State, Origin::Asserted});
    kb_.assert_fact({Resource{inst}, vs(vocab::a), Value::resource(vs(vocab::Instant)),
                     Partition::State, Origin::Asserted});
    kb_.assert_fact({Resource{inst}, vs(vocab::inXSDDateTimeStamp), Value(ev.time),
                     Partition::State, Origin::Asserted});
    kb_.assert_fact({ev.id, vs(vocab::happened), Value(ev.time),
                     Partition::Deontic, Origin::Asserted});
    happened_[ev.id.id] = ev.time;
}

std::vector<DeonticEvent> Runtime::ingest(const EventRecord& ev) {
    if (options_.mode == ClockMode::Monitor) {
        ensure_enacted(ev.time);
        if (ev.time < *now_ - options_.skew)
            throw StaleEvent("event '" + ev.id.id + "' at " + format_timestamp(ev.time) +
                             " arrived after the clock passed " + format_timestamp(*now_) +
                             " (skew " + format_duration(options_.skew) + ")");
        if (*now_ < ev.time) now_ = ev.time;
        assert_event_facts(ev);
        return step();
    }

    // SIMULATE: hold the event until the clock reaches it.
    if (now_ && ev.time < *now_)
        throw PastEvent("event '" + ev.id.id + "' at " + format_timestamp(ev.time) +
                        " is before the simulation clock " + format_timestamp(*now_));
    auto it = std::find_if(scheduled_.begin(), scheduled_.end(),
                           [&](const EventRecord& e) { return ev.time < e.time; });
    scheduled_.insert(it, ev);
    return {};
}

void Runtime::refresh_deadlines() {
    // TimeEvents become known when a firing creates their class fact; the due
    // instant may land in a later firing of the same fixpoint, so rescan.
    static const Pattern probe{{
        Atom::cls(vs(vocab::TimeEvent), Term::variable("x")),
        Atom::prop(vs(vocab::atTime), Term::variable("x"), Term::variable("i")),
        Atom::prop(vs(vocab::inXSDDateTimeStamp), Term::variable("i"), Term::variable("t")),
    }};
    for (const auto& b : kb_.query(probe)) {
        const Value& xv = b.at("x");
        const Value& tv = b.at("t");
        if (!xv.is_resource() || !tv.is_timestamp()) continue;
        const std::string& id = xv.as_resource().id;
        if (known_time_events_.count(id)) continue;
        known_time_events_.emplace(id, tv.as_timestamp());
        if (!happened_.count(id))
            pending_[tv.as_timestamp()].push_back(id);
    }
}

bool Runtime::mark_due() {
    if (!now_) return false;
    bool any = false;
    while (!pending_.empty() && pending_.begin()->first <= *now_) {
        auto node = pending_.extract(pending_.begin());
        const Timestamp due = node.key();
        for (const auto& id : node.mapped()) {
            if (happened_.count(id)) continue;
            kb_.assert_fact({Resource{id}, vs(vocab::happened), Value(due),
                             Partition::Deontic, Origin::Asserted});
            happened_[id] = due;
            any = true;
        }
    }
    return any;
}

std::vector<DeonticEvent> Runtime::step() {
    std::vector<DeonticEvent> out;
    // A firing can mint a deadline that is already due (late activation);
    // loop until no new deadline falls on this side of the clock.
    for (;;) {
        refresh_deadlines();
        const bool marked = mark_due();
        kb_.materialize(schema_);
        FiringTrace fresh = engine_.run_to_fixpoint(rules_, kb_, schema_);
        refresh_deadlines();
        if (fresh.empty() && !marked &&
            (pending_.empty() || !(pending_.begin()->first <= now()))) {
            break;
        }
        auto events = extract(fresh);
        out.insert(out.end(), events.begin(), events.end());
        for (auto& f : fresh) trace_.push_back(std::move(f));
        if (pending_.empty() || !(pending_.begin()->first <= now())) break;
    }
    log_.insert(log_.end(), out.begin(), out.end());
    return out;
}

std::vector<DeonticEvent> Runtime::extract(const FiringTrace& fresh) {
    std::vector<DeonticEvent> out;
    auto norm_of_rule = [&](const std::string& rule_id) -> std::string {
        for (const auto& r : rules_.rules)
            if (r.id == rule_id) return r.norm;
        return {};
    };
    auto at_of = [&](const std::string& cause) -> Timestamp {
        auto it = happened_.find(cause);
        return it != happened_.end() ? it->second : now();
    };
    for (const auto& f : fresh) {
        // Companion asserts from the same firing carry the cause and agent.
        auto same = [&](std::string_view pred, const std::string& subject) -> std::string {
            for (const auto& fact : f.added)
                if (fact.predicate == pred && fact.subject.id == subject)
                    return object_name(fact.object);
            return {};
        };
        auto agent_for = [&](std::string_view pred, const std::string& dr) -> std::string {
            for (const auto& fact : f.added)
                if (fact.predicate == pred && object_name(fact.object) == dr)
                    return fact.subject.id;
            return {};
        };
        for (const auto& fact : f.added) {
            DeonticEvent ev;
            if (fact.predicate == vocab::isGenerated) {
                ev.kind = DeonticKind::Activated;
                ev.dr = fact.subject.id;
                ev.norm = object_name(fact.object);
                ev.cause = same(vocab::activated, ev.dr);
                ev.agent = same(vocab::debtor, ev.dr);
            } else if (fact.predicate == vocab::fulfilled || fact.predicate == vocab::violated) {
                const bool ful = fact.predicate == vocab::fulfilled;
                ev.kind = ful ? DeonticKind::Fulfilled : DeonticKind::Violated;
                ev.dr = fact.subject.id;
                ev.cause = object_name(fact.object);
                ev.agent = agent_for(ful ? vocab::fulfills : vocab::violates, ev.dr);
                ev.norm = norm_of_rule(f.rule_id);
            } else if (fact.predicate == vocab::exceptionToNorm) {
                ev.kind = DeonticKind::Inhibited;
                ev.norm = fact.subject.id;
                ev.cause = object_name(fact.object);
            } else if (fact.predicate == vocab::exceptionToDR) {
                ev.kind = DeonticKind::Inhibited;
                ev.dr = fact.subject.id;
                ev.cause = object_name(fact.object);
                ev.norm = norm_of_rule(f.rule_id);
            } else if (fact.predicate == vocab::exceptionToException) {
                ev.kind = DeonticKind::Inhibited;
                ev.cause = object_name(fact.object);
                ev.norm = norm_of_rule(f.rule_id);
            } else {
                continue;
            }
            ev.at = at_of(ev.cause);
            out.push_back(std::move(ev));
        }
    }
    return out;
}

std::vector<DeonticEvent> Runtime::advance_to(Timestamp t) {
    if (options_.mode != ClockMode::Simulate)
        throw ScenarioError("advance_to is a simulation operation");
    if (!enacted_) {
        Timestamp t0 = t;
        if (!scheduled_.empty() && scheduled_.front().time < t0) t0 = scheduled_.front().time;
        ensure_enacted(t0);
    }
    std::vector<DeonticEvent> out;
    // Replay chronologically: at each instant, deliver every event scheduled
    // there, then step (which also marks deadlines due at that instant).
    for (;;) {
        refresh_deadlines();
        std::optional<Timestamp> next;
        if (!scheduled_.empty()) next = scheduled_.front().time;
        if (!pending_.empty() && (!next || pending_.begin()->first < *next))
            next = pending_.begin()->first;
        if (!next || t < *next) break;
        if (*now_ < *next) now_ = *next;
        while (!scheduled_.empty() && scheduled_.front().time == *next) {
            assert_event_facts(scheduled_.front());
            scheduled_.pop_front();
        }
        auto events = step();
        out.insert(out.end(), events.begin(), events.end());
    }
    if (*now_ < t) now_ = t;
    auto tail = step();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

std::optional<Timestamp> Runtime::next_instant() const {
    std::optional<Timestamp> next;
    if (!scheduled_.empty()) next = scheduled_.front().time;
    for (const auto& [due, ids] : pending_) {
        bool live = false;
        for (const auto& id : ids)
            if (!happened_.count(id)) live = true;
        if (!live) continue;
        if (!next || due < *next) next = due;
        break;
    }
    return next;
}

bool Runtime::exhausted() const { return !next_instant().has_value(); }

Timestamp Runtime::advance_to_next_instant(std::vector<DeonticEvent>* out) {
    if (options_.mode != ClockMode::Simulate)
        throw ScenarioError("advance_to_next_instant is a simulation operation");
    auto next = next_instant();
    if (!next)
        throw SimulationExhausted("no scheduled events and no pending deadlines");
    auto events = advance_to(*next);
    if (out) out->insert(out->end(), events.begin(), events.end());
    return *now_;
}

bool Runtime::in_force(const std::string& dr) const {
    if (!kb_.has(Resource{dr}, vocab::a, Value::resource(vs(vocab::DeonticRelation))))
        return false;
    Pattern p;
    p.atoms = {Atom::prop(vs(vocab::fulfilled), Term::constant(Value::resource(dr)),
                          Term::variable("e"))};
    if (!kb_.query(p).empty()) return false;
    p.atoms[0].name = vs(vocab::violated);
    if (!kb_.query(p).empty()) return false;
    p.atoms[0].name = vs(vocab::exceptionToDR);
    return kb_.query(p).empty();
}

} // namespace tnorm

// Monitoring / simulation main loop.
//
// The runtime owns the working memory, the engine, the clock, and the
// deadline queue. Events enter as STATE facts; rule firings write DEONTIC
// facts; the deontic event log is a projection of those firings. Created
// TimeEvents "happen" when the clock reaches their due instant, which the
// runtime records with a `happened` marker carrying the DUE time, so logs
// are identical whether the clock jumps between instants or ticks through
// them.
//
// MONITOR mode consumes an externally timestamped stream: the clock follows
// the events, and an event older than now minus the configured skew is
// rejected. SIMULATE mode schedules events and replays them, interleaved
// with deadlines, in chronological order.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnorm/engine.hpp"
#include "tnorm/time.hpp"

namespace tnorm {

enum class ClockMode { Monitor, Simulate };

struct EventRecord {
    Resource id;
    std::vector<std::string> classes;
    std::vector<std::pair<std::string, Value>> properties;
    Timestamp time{0};
};

enum class DeonticKind { Activated, Fulfilled, Violated, Inhibited };

std::string to_string(DeonticKind kind);

struct DeonticEvent {
    DeonticKind kind = DeonticKind::Activated;
    std::string dr;     // empty when the inhibition precedes any relation
    std::string norm;
    std::string agent;  // empty when no agent is determined
    std::string cause;  // the event (or deadline) that produced this record
    Timestamp at{0};    // when the cause happened

    friend bool operator==(const DeonticEvent&, const DeonticEvent&) = default;
    friend auto operator<=>(const DeonticEvent&, const DeonticEvent&) = default;
};

struct RuntimeOptions {
    ClockMode mode = ClockMode::Simulate;
    Duration skew{};                           // MONITOR: tolerated lateness
    std::size_t budget = Engine::kDefaultBudget;
    bool strict_vocabulary = false;
};

class Runtime {
  public:
    Runtime(RuleSet rules, Schema schema, RuntimeOptions options = {});

    // Baseline facts (reference data) asserted before any event.
    void load_facts(const std::vector<Fact>& facts);

    // Fixes the enactment instant explicitly. Otherwise the runtime enacts
    // lazily at the first event's timestamp.
    void set_start(Timestamp t);

    // MONITOR: gate, advance the clock, assert, step; returns new records.
    // SIMULATE: schedule for replay (returns nothing until time advances).
    std::vector<DeonticEvent> ingest(const EventRecord& ev);

    // Mark due deadlines, materialize, run to fixpoint, extract records.
    std::vector<DeonticEvent> step();

    // SIMULATE: replay scheduled events and deadlines chronologically up to
    // and including t; the clock ends at t.
    std::vector<DeonticEvent> advance_to(Timestamp t);

    // SIMULATE: jump to the next scheduled event or pending deadline.
    // Throws SimulationExhausted when neither exists.
    Timestamp advance_to_next_instant(std::vector<DeonticEvent>* out = nullptr);

    bool exhausted() const;
    std::optional<Timestamp> next_instant() const;

    Timestamp now() const { return now_.value_or(Timestamp{0}); }
    bool started() const { return now_.has_value(); }
    ClockMode mode() const { return options_.mode; }

    const Kb& kb() const { return kb_; }
    const RuleSet& rules() const { return rules_; }
    const Schema& schema() const { return schema_; }
    const FiringTrace& trace() const { return trace_; }
    const std::vector<DeonticEvent>& log() const { return log_; }

    // A deontic relation is in force while nothing has resolved it.
    bool in_force(const std::string& dr) const;

  private:
    void ensure_enacted(Timestamp t);
    void assert_event_facts(const EventRecord& ev);
    std::vector<DeonticEvent> extract(const FiringTrace& fresh);
    void refresh_deadlines();
    bool mark_due();  // true when at least one deadline was marked

    RuleSet rules_;
    Schema schema_;
    RuntimeOptions options_;
    Kb kb_;
    Engine engine_;

    std::optional<Timestamp> now_;
    bool enacted_ = false;

    // Pending deadlines: due time -> TimeEvent ids (insertion-ordered per
    // instant via the map's value vector).
    std::map<Timestamp, std::vector<std::string>> pending_;
    std::map<std::string, Timestamp, std::less<>> known_time_events_;
    std::map<std::string, Timestamp, std::less<>> happened_;

    // SIMULATE: scheduled events in time order, stable on arrival.
    std::deque<EventRecord> scheduled_;

    FiringTrace trace_;
    std::vector<DeonticEvent> log_;
};

} // namespace tnorm

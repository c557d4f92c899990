// Forward-chaining production system.
//
// Matching is naive re-evaluation per cycle; conflict resolution is priority
// (descending), then rule presentation order, then dedup-key. The agenda is
// rebuilt after every firing so an exception fact asserted at priority 2
// falsifies the NOT-guards of norm instances that matched a moment earlier.
// Refraction: a (rule, binding) pair fires at most once per Engine lifetime.
#pragma once

#include <cstddef>
#include <unordered_set>
#include <vector>

#include "tnorm/compiler.hpp"
#include "tnorm/kb.hpp"

namespace tnorm {

struct RuleInstance {
    const ProductionRule* rule = nullptr;
    Binding binding;
    std::string dedup_key;  // rule id + canonical binding
};

using Agenda = std::vector<RuleInstance>;

struct Firing {
    std::size_t seq = 0;
    std::string rule_id;
    Binding binding;
    std::vector<Fact> added;  // facts that were actually new
};

using FiringTrace = std::vector<Firing>;

class Engine {
  public:
    static constexpr std::size_t kDefaultBudget = 100'000;

    explicit Engine(std::size_t budget = kDefaultBudget) : budget_(budget) {}

    // One RuleInstance per (rule, satisfying binding) not yet fired, in
    // conflict-resolution order.
    Agenda match(const RuleSet& rules, const Kb& kb) const;

    // Executes the instance's actions; returns the newly added facts and
    // consumes the dedup-key.
    std::vector<Fact> fire(const RuleInstance& instance, Kb& kb);

    // {materialize; match; fire first} until the agenda empties. The budget
    // bounds firings per call; exceeding it means a rule pathology.
    FiringTrace run_to_fixpoint(const RuleSet& rules, Kb& kb, const Schema& schema);

    void set_budget(std::size_t budget) { budget_ = budget; }
    std::size_t budget() const { return budget_; }
    std::size_t fired_count() const { return fired_.size(); }

  private:
    std::size_t budget_;
    std::size_t seq_ = 0;
    std::unordered_set<std::string> fired_;
};

std::string dedup_key(const ProductionRule& rule, const Binding& binding);

} // namespace tnorm

#ifndef SPOTTER_SEARCH_H
#define SPOTTER_SEARCH_H

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spotter/operators.h"

namespace spotter {

class NotApplicable : public std::runtime_error {
public:
    explicit NotApplicable(const std::string &what) : std::runtime_error(what) {}
};

class NotRelevant : public std::runtime_error {
public:
    explicit NotRelevant(const std::string &what) : std::runtime_error(what) {}
};

class SearchBudgetExceeded : public std::runtime_error {
public:
    explicit SearchBudgetExceeded(const std::string &what) : std::runtime_error(what) {}
};

bool applicable(const Operator &op, const PartialFluentState &state);

// eff(o) ∪ restrict(state, static(o)); requires applicable(op, state).
PartialFluentState successor(const PartialFluentState &state, const Operator &op);

/*
  An operator is relevant at a partial state when (1) everything the state
  asserts beyond the operator's effects lies in its static set, and (2) the
  state covers the effects plus the static part of the preconditions.
*/
bool relevant(const Operator &op, const PartialFluentState &state);

// pre(o) ∪ (state \ eff(o)); requires relevant(op, state).
PartialFluentState regress(const PartialFluentState &state, const Operator &op);

// Same formula without the relevance check. Plan regression applies this
// to goal subsets, where condition (2) of relevance need not hold.
PartialFluentState regress_unchecked(const PartialFluentState &state, const Operator &op);

struct SearchResult {
    std::optional<Plan> plan;
    // Every node enqueued during the search, in discovery order (the start
    // state first). Feeds the reachable-state set.
    std::vector<PartialFluentState> visited;
};

inline constexpr std::size_t kDefaultSearchCap = 1000000;

/*
  Breadth-first forward search over partial fluent states. Expands
  operators in their (name-sorted) task order, prunes duplicate states by
  canonical equality, and returns the first goal-satisfying node's plan.
  Throws SearchBudgetExceeded when more than `node_cap` distinct nodes are
  generated.
*/
SearchResult owfs(const StripsTask &task, const PartialFluentState &start,
                  std::size_t node_cap = kDefaultSearchCap);

// The state sequence induced by a plan: start, then each successor.
std::vector<PartialFluentState> plan_states(const StripsTask &task,
                                            const PartialFluentState &start,
                                            const Plan &plan);

} // namespace spotter

#endif

#include "spotter/search.h"

#include <cassert>
#include <deque>
#include <unordered_map>

namespace spotter {

bool applicable(const Operator &op, const PartialFluentState &state) {
    return op.pre.subset_of(state);
}

PartialFluentState successor(const PartialFluentState &state, const Operator &op) {
    if (!applicable(op, state))
        throw NotApplicable("operator " + op.name + " not applicable at " + state.to_string());
    // Cannot conflict: effects and statics are disjoint by invariant.
    return op.eff.unite(state.restricted_to(op.static_fluents));
}

bool relevant(const Operator &op, const PartialFluentState &state) {
    PartialFluentState rest = state.minus(op.eff);
    if (rest.restricted_to(op.static_fluents) != rest)
        return false;
    PartialFluentState required = op.eff.unite(op.pre.restricted_to(op.static_fluents));
    return required.subset_of(state);
}

PartialFluentState regress_unchecked(const PartialFluentState &state, const Operator &op) {
    return op.pre.unite(state.minus(op.eff));
}

PartialFluentState regress(const PartialFluentState &state, const Operator &op) {
    if (!relevant(op, state))
        throw NotRelevant("operator " + op.name + " not relevant at " + state.to_string());
    return regress_unchecked(state, op);
}

SearchResult owfs(const StripsTask &task, const PartialFluentState &start,
                  std::size_t node_cap) {
    SearchResult result;

    struct Node {
        int parent;
        int op; // operator applied to reach this node, -1 for the start
    };
    std::vector<Node> nodes;
    std::unordered_map<PartialFluentState, int, PartialFluentStateHash> seen;
    std::deque<int> queue;

    auto enqueue = [&](PartialFluentState state, int parent, int op) -> bool {
        auto [it, inserted] = seen.emplace(std::move(state), static_cast<int>(nodes.size()));
        if (!inserted)
            return false;
        if (nodes.size() >= node_cap)
            throw SearchBudgetExceeded("forward search exceeded node cap");
        result.visited.push_back(it->first);
        nodes.push_back({parent, op});
        queue.push_back(static_cast<int>(nodes.size() - 1));
        return true;
    };

    enqueue(start, -1, -1);

    while (!queue.empty()) {
        int index = queue.front();
        queue.pop_front();
        // Copy: enqueueing successors may reallocate the visited vector.
        PartialFluentState state = result.visited[index];

        if (task.goal.subset_of(state)) {
            Plan plan;
            for (int at = index; nodes[at].op >= 0; at = nodes[at].parent)
                plan.push_back(nodes[at].op);
            std::reverse(plan.begin(), plan.end());
            result.plan = std::move(plan);
            return result;
        }

        for (int op_index = 0; op_index < static_cast<int>(task.operators.size()); ++op_index) {
            const Operator &op = task.operators[op_index];
            if (applicable(op, state))
                enqueue(successor(state, op), index, op_index);
        }
    }
    return result;
}

std::vector<PartialFluentState> plan_states(const StripsTask &task,
                                            const PartialFluentState &start,
                                            const Plan &plan) {
    std::vector<PartialFluentState> states;
    states.push_back(start);
    for (int op_index : plan) {
        assert(op_index >= 0 && op_index < static_cast<int>(task.operators.size()));
        states.push_back(successor(states.back(), task.operators[op_index]));
    }
    return states;
}

} // namespace spotter

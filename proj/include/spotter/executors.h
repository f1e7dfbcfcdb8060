#ifndef SPOTTER_EXECUTORS_H
#define SPOTTER_EXECUTORS_H

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/gridworld.h"
#include "spotter/operators.h"
#include "spotter/rl.h"

namespace spotter {

class UnknownOperator : public std::runtime_error {
public:
    explicit UnknownOperator(const std::string &what) : std::runtime_error(what) {}
};

class StaticFluentsUnsupported : public std::runtime_error {
public:
    explicit StaticFluentsUnsupported(const std::string &what)
        : std::runtime_error(what) {}
};

/*
  Initiation set, policy and termination condition grounding an operator
  in the world. Policies may depend on the state the executor was
  initiated in; the ones built here do not, but the interface allows it.
*/
struct Executor {
    std::string label;
    std::function<bool(const GridState &)> initiation;
    std::function<PrimitiveAction(const GridState &init, const GridState &current)> policy;
    std::function<bool(const GridState &init, const GridState &current)> termination;
    int step_cap = 0;
};

// Live episode: owns the current state, the done flag and the running
// reward. All stepping during one episode goes through this object, so
// the step budget is shared between executors and exploration.
struct EpisodeContext {
    GridState state;
    bool done = false;
    double reward_total = 0.0;

    explicit EpisodeContext(GridState start) : state(std::move(start)) {}

    StepResult advance(PrimitiveAction action) {
        StepResult result = step(state, action);
        state = result.next;
        done = result.done;
        reward_total += result.reward;
        return result;
    }
};

struct Transition {
    GridState state;
    PrimitiveAction action;
    double reward;
    GridState next;
};

struct ExecutionResult {
    GridState final;
    std::vector<Transition> trajectory;
    bool success = false;  // termination fired
    bool env_done = false; // episode ended while executing
};

// Runs the executor in the live episode: checks termination before each
// action, stops on termination, episode end, or the step cap. The
// initiation set is reported by callers, not enforced here.
ExecutionResult execute(const Executor &x, EpisodeContext &ctx);

/*
  Hand-coded executor for a ground operator of one of the base schemas
  goToObj, pickUp, putDown, useKey, goToGoal. Navigation walks a
  breadth-first shortest path (actions in canonical order); the
  manipulation schemas emit their single primitive. Initiation is
  detection covering the preconditions; termination is detection covering
  the effects plus the preserved static part of the initial detection.
*/
Executor hand_executor(const Operator &op, int step_cap);

bool is_hand_schema(const std::string &schema_name);

// Greedy executor over a snapshot of the learner's q-table. Requires an
// operator without static fluents: termination is detection covering the
// effects alone. Unseen states fall back to the first canonical action.
Executor make_executor(const TabularLearner &learner, const Operator &op,
                       std::shared_ptr<const StateKeyInterner> interner, int step_cap);

// Same, over an already-shared policy table.
Executor make_executor(std::shared_ptr<const QTable> policy, const Operator &op,
                       std::shared_ptr<const StateKeyInterner> interner, int step_cap);

// First move of a shortest rotate/step path; used by the navigation
// schemas and exposed for tests.
PrimitiveAction navigation_action(const GridState &state, int target_x, int target_y,
                                  bool stand_on_target);

} // namespace spotter

#endif

#include "spotter/executors.h"

#include <array>
#include <deque>

namespace spotter {

ExecutionResult execute(const Executor &x, EpisodeContext &ctx) {
    ExecutionResult result;
    const GridState init = ctx.state;
    for (;;) {
        if (x.termination(init, ctx.state)) {
            result.success = true;
            break;
        }
        if (ctx.done)
            break;
        if (static_cast<int>(result.trajectory.size()) >= x.step_cap)
            break;
        PrimitiveAction action = x.policy(init, ctx.state);
        GridState before = ctx.state;
        StepResult r = ctx.advance(action);
        result.trajectory.push_back({std::move(before), action, r.reward, ctx.state});
    }
    result.final = ctx.state;
    result.env_done = ctx.done;
    return result;
}

namespace {

bool walkable(const GridState &state, int x, int y) {
    if (state.is_wall(x, y))
        return false;
    const GridObject *obj = state.object_at(x, y);
    if (obj == nullptr)
        return true;
    if (obj->kind == ObjectKind::Door)
        return obj->door == DoorStatus::Open;
    return obj->kind == ObjectKind::Goal;
}

constexpr std::array<int, 4> kDx = {0, 1, 0, -1}; // N E S W
constexpr std::array<int, 4> kDy = {-1, 0, 1, 0};

} // namespace

PrimitiveAction navigation_action(const GridState &state, int target_x, int target_y,
                                  bool stand_on_target) {
    struct Pose {
        int x, y, dir;
    };
    auto pose_index = [&](const Pose &p) {
        return (p.y * state.width + p.x) * 4 + p.dir;
    };
    auto satisfied = [&](const Pose &p) {
        if (stand_on_target)
            return p.x == target_x && p.y == target_y;
        return p.x + kDx[p.dir] == target_x && p.y + kDy[p.dir] == target_y;
    };

    Pose start{state.agent_x, state.agent_y, static_cast<int>(state.agent_dir)};
    std::vector<int8_t> first_action(static_cast<std::size_t>(state.width) *
                                         state.height * 4,
                                     -2);
    std::deque<Pose> queue;
    first_action[pose_index(start)] = -1;
    queue.push_back(start);

    while (!queue.empty()) {
        Pose at = queue.front();
        queue.pop_front();
        if (satisfied(at)) {
            int8_t action = first_action[pose_index(at)];
            if (action < 0) // already there; nothing sensible to do
                return PrimitiveAction::TurnLeft;
            return static_cast<PrimitiveAction>(action);
        }
        // Expansion in canonical action order keeps ties deterministic.
        std::array<std::pair<PrimitiveAction, Pose>, 3> moves = {{
            {PrimitiveAction::TurnLeft, {at.x, at.y, (at.dir + 3) % 4}},
            {PrimitiveAction::TurnRight, {at.x, at.y, (at.dir + 1) % 4}},
            {PrimitiveAction::Forward,
             {at.x + kDx[at.dir], at.y + kDy[at.dir], at.dir}},
        }};
        for (auto &[action, next] : moves) {
            if (action == PrimitiveAction::Forward && !walkable(state, next.x, next.y))
                continue;
            int index = pose_index(next);
            if (first_action[index] != -2)
                continue;
            int8_t inherited = first_action[pose_index(at)];
            first_action[index] =
                inherited == -1 ? static_cast<int8_t>(action) : inherited;
            queue.push_back(next);
        }
    }
    return PrimitiveAction::TurnLeft; // unreachable target: let the cap end it
}

namespace {

struct GroundName {
    std::string schema;
    std::vector<std::string> args;
};

GroundName split_ground_name(const std::string &name) {
    GroundName out;
    std::size_t paren = name.find('(');
    if (paren == std::string::npos) {
        out.schema = name;
        return out;
    }
    out.schema = name.substr(0, paren);
    std::string arg;
    for (std::size_t i = paren + 1; i < name.size(); ++i) {
        if (name[i] == ',' || name[i] == ')') {
            if (!arg.empty())
                out.args.push_back(arg);
            arg.clear();
        } else {
            arg += name[i];
        }
    }
    return out;
}

// Accuracy termination: detection covers the effects plus the preserved
// static slice of the initial detection.
std::function<bool(const GridState &, const GridState &)>
accuracy_termination(const Operator &op) {
    return [op](const GridState &init, const GridState &current) {
        PartialFluentState required =
            op.eff.unite(restrict_to(detect(init), op.static_fluents));
        return subsumes(required, detect(current));
    };
}

} // namespace

bool is_hand_schema(const std::string &schema_name) {
    return schema_name == "goToObj" || schema_name == "pickUp" ||
           schema_name == "putDown" || schema_name == "useKey" ||
           schema_name == "goToGoal";
}

Executor hand_executor(const Operator &op, int step_cap) {
    GroundName name = split_ground_name(op.name);
    if (!is_hand_schema(name.schema))
        throw UnknownOperator("no hand executor for schema '" + name.schema + "'");
    if (name.args.size() < 2)
        throw UnknownOperator("hand executor needs a ground target in '" + op.name + "'");
    std::string target = name.args[1];

    Executor x;
    x.label = op.name;
    x.step_cap = step_cap;
    x.initiation = [op](const GridState &s) { return subsumes(op.pre, detect(s)); };
    x.termination = accuracy_termination(op);

    if (name.schema == "goToObj") {
        x.policy = [target](const GridState &, const GridState &current) {
            const GridObject *obj = current.object(target);
            if (obj == nullptr || obj->x < 0)
                return PrimitiveAction::TurnLeft; // carried or missing: cap ends it
            return navigation_action(current, obj->x, obj->y, false);
        };
    } else if (name.schema == "goToGoal") {
        x.policy = [target](const GridState &, const GridState &current) {
            const GridObject *obj = current.object(target);
            if (obj == nullptr)
                return PrimitiveAction::TurnLeft;
            return navigation_action(current, obj->x, obj->y, true);
        };
    } else {
        PrimitiveAction primitive = name.schema == "pickUp" ? PrimitiveAction::Pickup
                                  : name.schema == "putDown" ? PrimitiveAction::Drop
                                                             : PrimitiveAction::UseKey;
        x.policy = [primitive](const GridState &, const GridState &) { return primitive; };
    }
    return x;
}

Executor make_executor(const TabularLearner &learner, const Operator &op,
                       std::shared_ptr<const StateKeyInterner> interner, int step_cap) {
    return make_executor(std::make_shared<const QTable>(learner.q), op,
                         std::move(interner), step_cap);
}

Executor make_executor(std::shared_ptr<const QTable> table, const Operator &op,
                       std::shared_ptr<const StateKeyInterner> interner, int step_cap) {
    if (!op.static_fluents.empty())
        throw StaticFluentsUnsupported("operator " + op.name +
                                       " has static fluents; executors built from "
                                       "learned policies cannot preserve them");
    Executor x;
    x.label = op.name;
    x.step_cap = step_cap;
    PartialFluentState pre = op.pre;
    PartialFluentState eff = op.eff;
    x.initiation = [pre](const GridState &s) { return subsumes(pre, detect(s)); };
    x.termination = [eff](const GridState &, const GridState &current) {
        return subsumes(eff, detect(current));
    };
    x.policy = [table, interner](const GridState &, const GridState &current) {
        auto id = interner->find(state_key(current));
        if (!id)
            return static_cast<PrimitiveAction>(0);
        return greedy_action(*table, *id);
    };
    return x;
}

} // namespace spotter

#include "spotter/gridworld.h"

#include <algorithm>
#include <cassert>

namespace spotter {

const char *action_name(PrimitiveAction a) {
    switch (a) {
    case PrimitiveAction::TurnLeft: return "turnLeft";
    case PrimitiveAction::TurnRight: return "turnRight";
    case PrimitiveAction::Forward: return "forward";
    case PrimitiveAction::Pickup: return "pickup";
    case PrimitiveAction::Drop: return "drop";
    case PrimitiveAction::UseKey: return "useKey";
    }
    return "?";
}

const GridObject *GridState::object(const std::string &id) const {
    for (const GridObject &obj : objects)
        if (obj.id == id)
            return &obj;
    return nullptr;
}

const GridObject *GridState::object_at(int x, int y) const {
    for (const GridObject &obj : objects) {
        if (carried && *carried == obj.id)
            continue;
        if (obj.x == x && obj.y == y)
            return &obj;
    }
    return nullptr;
}

bool GridState::is_wall(int x, int y) const {
    if (x <= 0 || y <= 0 || x >= width - 1 || y >= height - 1)
        return true;
    if (x == door_col) {
        const GridObject *door = object_at(x, y);
        return door == nullptr || door->kind != ObjectKind::Door;
    }
    return false;
}

void GridState::facing(int &fx, int &fy) const {
    fx = agent_x;
    fy = agent_y;
    switch (agent_dir) {
    case Direction::North: --fy; break;
    case Direction::East: ++fx; break;
    case Direction::South: ++fy; break;
    case Direction::West: --fx; break;
    }
}

bool GridState::agent_on_goal() const {
    for (const GridObject &obj : objects)
        if (obj.kind == ObjectKind::Goal && obj.x == agent_x && obj.y == agent_y)
            return true;
    return false;
}

GridState reset(const EnvConfig &config, Rng &rng) {
    if (config.puzzle < 1 || config.puzzle > 3)
        throw LayoutError("puzzle must be 1, 2 or 3");
    if (config.width < 7 || config.height < 5)
        throw LayoutError("grid must be at least 7x5");

    GridState state;
    state.width = config.width;
    state.height = config.height;
    state.door_col = config.width / 2;
    state.max_steps = config.effective_max_steps();
    state.puzzle = config.puzzle;

    int door_row = rng.next_int(1, config.height - 2);

    GridObject door;
    door.id = "door";
    door.kind = ObjectKind::Door;
    door.x = state.door_col;
    door.y = door_row;
    door.door = DoorStatus::Locked;

    std::optional<GridObject> ball;
    if (config.puzzle >= 2) {
        GridObject b;
        b.id = "ball";
        b.kind = ObjectKind::Ball;
        b.x = state.door_col - 1;
        b.y = door_row;
        ball = b;
    }

    // Free cells of the left room, row-major, minus the ball cell.
    std::vector<std::pair<int, int>> free_cells;
    for (int y = 1; y <= config.height - 2; ++y) {
        for (int x = 1; x < state.door_col; ++x) {
            if (ball && ball->x == x && ball->y == y)
                continue;
            free_cells.emplace_back(x, y);
        }
    }
    if (free_cells.size() < 2)
        throw LayoutError("left room too small for agent and key");

    std::size_t agent_cell = rng.next_below(free_cells.size());
    state.agent_x = free_cells[agent_cell].first;
    state.agent_y = free_cells[agent_cell].second;
    state.agent_dir = static_cast<Direction>(rng.next_int(0, 3));
    free_cells.erase(free_cells.begin() + static_cast<long>(agent_cell));

    std::size_t key_cell = rng.next_below(free_cells.size());
    GridObject key;
    key.id = "key";
    key.kind = ObjectKind::Key;
    key.x = free_cells[key_cell].first;
    key.y = free_cells[key_cell].second;

    state.objects.push_back(std::move(door));
    state.objects.push_back(std::move(key));
    if (ball)
        state.objects.push_back(std::move(*ball));
    if (config.puzzle == 3) {
        GridObject goal;
        goal.id = "goal";
        goal.kind = ObjectKind::Goal;
        goal.x = config.width - 2;
        goal.y = config.height - 2;
        state.objects.push_back(std::move(goal));
    }
    std::sort(state.objects.begin(), state.objects.end(),
              [](const GridObject &a, const GridObject &b) { return a.id < b.id; });
    return state;
}

namespace {

bool goal_condition(const GridState &state) {
    if (state.puzzle == 3)
        return state.agent_on_goal();
    const GridObject *door = state.object("door");
    return door != nullptr && door->door == DoorStatus::Open;
}

GridObject *mutable_object(GridState &state, const std::string &id) {
    for (GridObject &obj : state.objects)
        if (obj.id == id)
            return &obj;
    return nullptr;
}

} // namespace

StepResult step(const GridState &state, PrimitiveAction action) {
    StepResult result;
    result.next = state;
    GridState &next = result.next;

    int fx, fy;
    state.facing(fx, fy);

    switch (action) {
    case PrimitiveAction::TurnLeft:
        next.agent_dir = static_cast<Direction>((static_cast<int>(state.agent_dir) + 3) % 4);
        break;
    case PrimitiveAction::TurnRight:
        next.agent_dir = static_cast<Direction>((static_cast<int>(state.agent_dir) + 1) % 4);
        break;
    case PrimitiveAction::Forward: {
        if (state.is_wall(fx, fy))
            break;
        const GridObject *obj = state.object_at(fx, fy);
        if (obj != nullptr) {
            if (obj->kind == ObjectKind::Door && obj->door != DoorStatus::Open)
                break;
            if (obj->kind == ObjectKind::Key || obj->kind == ObjectKind::Ball)
                break;
        }
        next.agent_x = fx;
        next.agent_y = fy;
        break;
    }
    case PrimitiveAction::Pickup: {
        if (state.carried)
            break;
        const GridObject *obj = state.object_at(fx, fy);
        if (obj == nullptr ||
            (obj->kind != ObjectKind::Key && obj->kind != ObjectKind::Ball))
            break;
        next.carried = obj->id;
        GridObject *carried = mutable_object(next, obj->id);
        carried->x = -1;
        carried->y = -1;
        break;
    }
    case PrimitiveAction::Drop: {
        if (!state.carried)
            break;
        if (state.is_wall(fx, fy) || state.object_at(fx, fy) != nullptr)
            break;
        // Plain floor only: door and goal cells cannot hold dropped items.
        bool goal_cell = false;
        for (const GridObject &obj : state.objects)
            if (obj.kind == ObjectKind::Goal && obj.x == fx && obj.y == fy)
                goal_cell = true;
        if (goal_cell)
            break;
        GridObject *dropped = mutable_object(next, *state.carried);
        dropped->x = fx;
        dropped->y = fy;
        next.carried.reset();
        break;
    }
    case PrimitiveAction::UseKey: {
        const GridObject *obj = state.object_at(fx, fy);
        if (obj == nullptr || obj->kind != ObjectKind::Door ||
            obj->door != DoorStatus::Locked)
            break;
        if (!state.carried)
            break;
        const GridObject *held = state.object(*state.carried);
        if (held == nullptr || held->kind != ObjectKind::Key)
            break;
        mutable_object(next, obj->id)->door = DoorStatus::Open;
        break;
    }
    }

    ++next.steps;
    if (goal_condition(next)) {
        result.done = true;
        result.reward =
            1.0 - 0.9 * static_cast<double>(next.steps) / static_cast<double>(next.max_steps);
    } else if (next.steps >= next.max_steps) {
        result.done = true;
        result.reward = 0.0;
    }
    return result;
}

namespace {

// 0 = left room, 1 = right room, 2 = the door column (both rooms).
int room_of(const GridState &state, int x) {
    if (x < state.door_col)
        return 0;
    if (x > state.door_col)
        return 1;
    return 2;
}

bool same_room(const GridState &state, int ax, int ox) {
    int a = room_of(state, ax), o = room_of(state, ox);
    return a == o || a == 2 || o == 2;
}

} // namespace

FluentState detect(const GridState &state) {
    std::vector<Literal> lits;
    const std::string agent = "agent";

    int fx, fy;
    state.facing(fx, fy);

    for (const GridObject &obj : state.objects) {
        bool carried = state.carried && *state.carried == obj.id;

        bool in_room = carried || same_room(state, state.agent_x, obj.x);
        lits.emplace_back(Fluent("inRoom", {agent, obj.id}), in_room);

        bool faced = !carried && obj.x == fx && obj.y == fy;
        lits.emplace_back(Fluent("nextToFacing", {agent, obj.id}), faced);

        if (obj.kind == ObjectKind::Key || obj.kind == ObjectKind::Ball)
            lits.emplace_back(Fluent("holding", {agent, obj.id}), carried);

        if (obj.kind == ObjectKind::Door) {
            lits.emplace_back(Fluent("locked", {obj.id}), obj.door == DoorStatus::Locked);
            lits.emplace_back(Fluent("open", {obj.id}), obj.door == DoorStatus::Open);

            int approach_x = state.agent_x <= obj.x ? obj.x - 1 : obj.x + 1;
            bool blocked = false;
            const GridObject *blocker = state.object_at(approach_x, obj.y);
            if (blocker != nullptr && blocker->kind == ObjectKind::Ball)
                blocked = true;
            if (state.agent_x == obj.x) { // standing in the doorway: either side
                const GridObject *other = state.object_at(obj.x + 1, obj.y);
                if (other != nullptr && other->kind == ObjectKind::Ball)
                    blocked = true;
            }
            lits.emplace_back(Fluent("blocked", {obj.id}), blocked);
        }
    }

    lits.emplace_back(Fluent("handsFree", {agent}), !state.carried.has_value());
    lits.emplace_back(Fluent("atGoal", {agent}), state.agent_on_goal());
    return FluentState(lits);
}

std::string state_key(const GridState &state) {
    std::string key;
    key += std::to_string(state.agent_x);
    key += ',';
    key += std::to_string(state.agent_y);
    key += ',';
    key += "NESW"[static_cast<int>(state.agent_dir)];
    key += '|';
    key += state.carried ? *state.carried : "-";
    for (const GridObject &obj : state.objects) { // already sorted by id
        if (obj.kind == ObjectKind::Goal)
            continue;
        key += '|';
        key += obj.id;
        key += ':';
        if (state.carried && *state.carried == obj.id) {
            key += "held";
        } else {
            key += std::to_string(obj.x);
            key += ',';
            key += std::to_string(obj.y);
        }
        if (obj.kind == ObjectKind::Door)
            key += obj.door == DoorStatus::Locked ? ":L"
                 : obj.door == DoorStatus::Closed ? ":C"
                                                  : ":O";
    }
    return key;
}

std::string render_ascii(const GridState &state) {
    std::vector<std::string> rows(state.height, std::string(state.width, '.'));
    for (int y = 0; y < state.height; ++y)
        for (int x = 0; x < state.width; ++x)
            if (state.is_wall(x, y))
                rows[y][x] = '#';
    for (const GridObject &obj : state.objects) {
        if (state.carried && *state.carried == obj.id)
            continue;
        char c = '?';
        switch (obj.kind) {
        case ObjectKind::Key: c = 'K'; break;
        case ObjectKind::Ball: c = 'o'; break;
        case ObjectKind::Goal: c = 'G'; break;
        case ObjectKind::Door:
            c = obj.door == DoorStatus::Locked ? 'L'
              : obj.door == DoorStatus::Closed ? 'D'
                                               : '_';
            break;
        }
        rows[obj.y][obj.x] = c;
    }
    rows[state.agent_y][state.agent_x] = "^>v<"[static_cast<int>(state.agent_dir)];
    std::string out;
    for (const std::string &row : rows) {
        out += row;
        out += '\n';
    }
    return out;
}

} // namespace spotter

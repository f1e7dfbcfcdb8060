#ifndef SPOTTER_GRIDWORLD_H
#define SPOTTER_GRIDWORLD_H

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/fluents.h"
#include "spotter/random.h"

namespace spotter {

class LayoutError : public std::runtime_error {
public:
    explicit LayoutError(const std::string &what) : std::runtime_error(what) {}
};

enum class Direction : uint8_t { North, East, South, West };

// Canonical order; greedy tie-breaks and the unseen-state fallback use it.
enum class PrimitiveAction : uint8_t { TurnLeft, TurnRight, Forward, Pickup, Drop, UseKey };
inline constexpr int kNumActions = 6;
const char *action_name(PrimitiveAction a);

enum class ObjectKind : uint8_t { Key, Ball, Door, Goal };
enum class DoorStatus : uint8_t { Locked, Closed, Open };

struct GridObject {
    std::string id;
    ObjectKind kind;
    int x = -1; // carried objects have no position
    int y = -1;
    DoorStatus door = DoorStatus::Locked;
};

struct EnvConfig {
    int puzzle = 1;
    int width = 11;
    int height = 7;
    int max_steps = 0; // 0 means 4 * width * height
    uint64_t seed = 0;

    int effective_max_steps() const {
        return max_steps > 0 ? max_steps : 4 * width * height;
    }
};

/*
  Full state of the two-room world: a bordered grid split by a wall at
  column width/2 with a single door cell. Values are immutable; step()
  returns a fresh state.
*/
struct GridState {
    int width = 0;
    int height = 0;
    int door_col = 0;
    int max_steps = 0;
    int puzzle = 1;

    int agent_x = 0;
    int agent_y = 0;
    Direction agent_dir = Direction::North;
    std::optional<std::string> carried;
    std::vector<GridObject> objects; // sorted by id
    int steps = 0;

    const GridObject *object(const std::string &id) const;
    const GridObject *object_at(int x, int y) const; // ignores carried
    bool is_wall(int x, int y) const;
    void facing(int &fx, int &fy) const;
    bool agent_on_goal() const;
};

struct StepResult {
    GridState next;
    double reward = 0.0;
    bool done = false;
};

// Two-room layout: agent and key uniformly over distinct free cells of
// the left room with a uniform direction; puzzles 2 and 3 put a ball on
// the cell directly left of the door; puzzle 3 adds a goal square in the
// far corner of the right room.
GridState reset(const EnvConfig &config, Rng &rng);

/*
  Deterministic dynamics. Invalid actions are no-ops that still consume a
  step. The episode ends with reward 1 - 0.9 * steps / max_steps when the
  puzzle condition holds (door open for puzzles 1 and 2, agent on the goal
  square for puzzle 3), or with reward 0 on timeout.
*/
StepResult step(const GridState &state, PrimitiveAction action);

// Complete fluent state over the detector vocabulary: inRoom,
// nextToFacing per object; holding per carryable; blocked, locked, open
// per door; handsFree and atGoal for the agent. A door is blocked when a
// loose ball sits on its approach cell on the agent's side.
FluentState detect(const GridState &state);

// Serialization used as the learner's state key: excludes the step
// counter and goal squares so policies carry across goal relabelings.
std::string state_key(const GridState &state);

std::string render_ascii(const GridState &state);

} // namespace spotter

#endif

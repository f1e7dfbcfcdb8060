#ifndef SPOTTER_RL_H
#define SPOTTER_RL_H

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "spotter/fluents.h"
#include "spotter/gridworld.h"
#include "spotter/random.h"

namespace spotter {

using StateId = uint32_t;

// Shared string-to-id map so learners store compact keys.
class StateKeyInterner {
public:
    StateId intern(const std::string &key) {
        auto [it, inserted] = ids_.emplace(key, static_cast<StateId>(keys_.size()));
        if (inserted)
            keys_.push_back(key);
        return it->second;
    }
    std::optional<StateId> find(const std::string &key) const {
        auto it = ids_.find(key);
        if (it == ids_.end())
            return std::nullopt;
        return it->second;
    }
    const std::string &key(StateId id) const { return keys_[id]; }
    std::size_t size() const { return keys_.size(); }

private:
    std::unordered_map<std::string, StateId> ids_;
    std::vector<std::string> keys_;
};

using QRow = std::array<double, kNumActions>;
using QTable = std::unordered_map<StateId, QRow>;

/*
  Tabular Q-learner. The exploration learner has no subgoal; each subgoal
  learner is rewarded by whether the arrival state's detection covers its
  subgoal. Missing rows read as zero.
*/
struct TabularLearner {
    double alpha = 0.1;
    double gamma = 0.99;
    std::optional<PartialFluentState> subgoal;
    QTable q;
    std::unordered_set<StateId> visited;

    TabularLearner() = default;
    TabularLearner(double alpha, double gamma, std::optional<PartialFluentState> subgoal)
        : alpha(alpha), gamma(gamma), subgoal(std::move(subgoal)) {}
};

void q_update(TabularLearner &learner, StateId s, PrimitiveAction a, double reward,
              StateId s_next);

double greedy_value(const TabularLearner &learner, StateId s);

// Greedy action with first-maximum tie-breaking in canonical action
// order; unseen states fall back to the first action.
PrimitiveAction greedy_action(const QTable &q, StateId s);

PrimitiveAction select_action(const TabularLearner &learner, StateId s, double eps,
                              Rng &rng);

struct EpsSchedule {
    double eps_min = 0.05;
    double eps_max = 0.9;
    int horizon = 1; // N: episode count over which the range decays to 1%
};

// eps_min + (eps_max - eps_min) * exp(-lambda t), lambda = -ln(0.01) / N.
double epsilon(const EpsSchedule &schedule, int t);

// Snapshot file: plain text header (alpha, gamma, subgoal) followed by
// the visited state keys and the q entries.
void save_qtable(const TabularLearner &learner, const StateKeyInterner &interner,
                 const std::string &path);

struct LoadedQTable {
    double alpha = 0.0;
    double gamma = 0.0;
    std::optional<PartialFluentState> subgoal;
    std::vector<std::string> visited;
    std::vector<std::pair<std::string, QRow>> entries;
};

LoadedQTable load_qtable(const std::string &path);

} // namespace spotter

#endif

#ifndef SPOTTER_ENGINE_H
#define SPOTTER_ENGINE_H

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "spotter/executors.h"
#include "spotter/genprecon.h"
#include "spotter/gridworld.h"
#include "spotter/operators.h"
#include "spotter/owpddl.h"
#include "spotter/rl.h"
#include "spotter/search.h"

namespace spotter {

// A symbolic task grounded in the world: the STRIPS side, the environment
// configuration, and one executor per operator (detect() is the detector).
struct IntegratedPlanningTask {
    StripsTask strips;
    EnvConfig env;
    std::map<std::string, Executor> executor_map;
};

// Builds the task for env.puzzle from the built-in domain, with hand
// executors for every ground operator.
IntegratedPlanningTask make_integrated_task(const EnvConfig &env);

struct EngineConfig {
    double alpha = 0.1;
    double gamma = 0.99;
    double tau = 0.9;
    double eps_min = 0.05;
    double eps_max = 0.9;
    int eps_horizon = 20000;         // N in the decay schedule
    std::size_t genprecon_budget = 32;
    std::size_t owfs_cap = kDefaultSearchCap;
    bool defer_operators = false;    // analysis mode: never install
    bool render = false;
    uint64_t master_seed = 0;
};

struct DiscoveredOperator {
    Operator op;
    int episode = 0;
    double value = 0.0;
    std::shared_ptr<const QTable> policy;
};

struct EpisodeRow {
    double reward = 0.0;
    int steps = 0;
    bool impasse = false;
    int operators_known = 0;
    int learn_calls = 0;
    std::vector<std::string> executed; // operator names run by the planner
};

struct RunReport {
    bool impasse = true;
    int episodes_used = 0;
    int total_learn_calls = 0;
    std::vector<DiscoveredOperator> operators_added;
    std::vector<EpisodeRow> episodes;
};

struct SigmaPlanEntry {
    PartialFluentState state;
    int plan_length = 0; // length of the known plan suffix at insertion
};

/*
  Episode driver. Each episode starts from a fresh layout and runs the
  plan-execute-learn loop; the reachable and plannable state sets are
  rebuilt per episode while the learners persist across episodes (and,
  via the carried interner and learner vector, across puzzles).
*/
class Engine {
public:
    Engine(IntegratedPlanningTask task, EngineConfig config,
           std::shared_ptr<StateKeyInterner> interner = nullptr,
           std::vector<TabularLearner> learners = {});

    EpisodeRow run_episode();

    // Installs an operator whose executor runs an existing policy table;
    // used when loading dumped operators. No-op on a duplicate (pre, eff).
    bool install_external(const Operator &op, std::shared_ptr<const QTable> policy);

    // gen_precon over the current reachable set for one subgoal learner.
    std::vector<PreconditionCandidate> candidates_for(std::size_t learner_index,
                                                      std::size_t budget);

    const IntegratedPlanningTask &task() const { return task_; }
    const RunReport &report() const { return report_; }
    const std::vector<TabularLearner> &learners() const { return learners_; }
    std::vector<TabularLearner> take_learners() { return std::move(learners_); }
    std::shared_ptr<StateKeyInterner> interner() const { return interner_; }
    const DetectionView &detection_view() const { return view_; }
    const std::vector<PartialFluentState> &sigma_reach() const { return sigma_reach_; }
    const std::vector<SigmaPlanEntry> &sigma_plan() const { return sigma_plan_; }
    int episode() const { return episode_; }

private:
    enum class Control { DoneImpasse, DoneClean, ToLearn, ToSolve };

    StateId intern_state(const GridState &state);
    const FluentState &detection_of(StateId id) const;
    const SearchResult &plan_from(uint32_t detection_class, const FluentState &detection);
    void add_reach(uint32_t detection_class, const std::vector<PartialFluentState> &nodes);
    void add_plan_state(const PartialFluentState &state, int plan_length);
    bool plannable(const FluentState &detection) const;
    void spawn_learner(const PartialFluentState &subgoal);
    bool install_operator(const Operator &op, std::shared_ptr<const QTable> policy,
                          double value, bool record);
    void install_candidates();
    int executor_step_cap() const;

    Control solve_once(EpisodeContext &ctx, EpisodeRow &row, bool impasse_now);
    Control learn_once(EpisodeContext &ctx, EpisodeRow &row);

    IntegratedPlanningTask task_;
    EngineConfig config_;
    std::shared_ptr<StateKeyInterner> interner_;
    std::vector<TabularLearner> learners_; // [0] is the exploration learner

    DetectionView view_;
    std::unordered_map<PartialFluentState, uint32_t, PartialFluentStateHash> class_ids_;

    std::vector<PartialFluentState> sigma_reach_;
    std::unordered_set<PartialFluentState, PartialFluentStateHash> sigma_reach_index_;
    std::unordered_set<uint32_t> reach_merged_classes_;
    std::vector<SigmaPlanEntry> sigma_plan_;

    std::unordered_map<uint32_t, SearchResult> plan_cache_;

    Rng reset_rng_;
    Rng explore_rng_;
    int episode_ = 0;
    int next_learned_ = 1;
    RunReport report_;
};

// Runs episodes until one completes without an impasse, or the budget is
// spent. Returns the report; the task inside the engine accumulates any
// discovered operators.
RunReport run_spotter(Engine &engine, int episode_budget);

} // namespace spotter

#endif

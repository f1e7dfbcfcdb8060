#ifndef SPOTTER_HARNESS_H
#define SPOTTER_HARNESS_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/engine.h"

namespace spotter::harness {

class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string &what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

class EmptyInput : public UsageError {
public:
    explicit EmptyInput(const std::string &what) : UsageError(what) {}
};

enum class Mode { Spotter, Vql, Hlaql, Hlalql };

Mode parse_mode(const std::string &name); // throws UsageError

struct ExperimentConfig {
    Mode mode = Mode::Spotter;
    std::vector<int> puzzles = {1, 2, 3};
    std::vector<int> episodes = {10000, 20000, 10000};
    double alpha = 0.1;
    double gamma = 0.99;
    double tau = 0.9;
    double eps_max = 0.9;
    double eps_min = 0.05;
    int eps_horizon = 0; // 0: use each puzzle's episode count as N
    uint64_t master_seed = 1;
    int runs = 10;
    int width = 11;
    int height = 7;
    std::size_t genprecon_budget = 32;
    bool defer_operators = false;
    int log_every = 50;
    bool render = false;
    std::string load_operators; // operator dump to preinstall
    std::string out_dir;        // empty: keep results in memory only
    int jobs = 0;               // 0: hardware concurrency

    void validate() const; // throws UsageError
};

// Seeds are consecutive integers from the master seed, one per run.
std::vector<uint64_t> seeds_of(const ExperimentConfig &config);

struct MetricsRow {
    uint64_t seed = 0;
    int puzzle = 0;
    int episode = 0;
    double reward = 0.0;
    int steps = 0;
    bool impasse = false;
    int operators_known = 0;
    long wall_ms = 0; // kept zero: metrics files are byte-reproducible
};

struct PreconLogRow {
    int episode = 0;
    int learner = 0;
    int op_id = 0;
    int precondition_count = 0;
    int dominated_by = -1; // op_id of the first later dominating operator
    PartialFluentState pre;
    PartialFluentState eff;
};

struct SeedResult {
    uint64_t seed = 0;
    std::vector<MetricsRow> rows;
    std::vector<int> learn_calls_per_puzzle;
    std::vector<DiscoveredOperator> discovered; // accumulated over puzzles
    std::vector<PreconLogRow> precon_log;       // deferred-installation mode
    long primitive_updates = 0;                 // baselines: one-step updates applied
    long executor_updates = 0;                  // baselines: multi-step updates applied
};

// Discounted return of an executor trajectory plus the discount reaching
// its exit state: the two pieces of the multi-step backup target.
std::pair<double, double> discounted_return(const std::vector<Transition> &trajectory,
                                            double gamma);

struct RunResult {
    ExperimentConfig config;
    std::vector<SeedResult> seeds;
};

/*
  Runs the configured experiment over all seeds (in parallel worker
  threads; each seed is internally sequential and deterministic). With an
  output directory set, writes per-seed metrics CSVs, operator dumps with
  their policy tables, the precondition log in deferred mode, and a
  merged summary.
*/
RunResult run_experiment(const ExperimentConfig &config);

struct SummaryRow {
    int puzzle = 0;
    int episode = 0;
    double mean_reward = 0.0;
    double std_reward = 0.0; // population standard deviation across seeds
};

// Per-(puzzle, episode) mean and standard deviation of reward across
// seeds. With normalize set, values are scaled by the maximum mean.
std::vector<SummaryRow> summarize(const std::vector<std::vector<MetricsRow>> &per_seed,
                                  bool normalize);

std::vector<MetricsRow> read_metrics_csv(const std::string &path);
void write_metrics_csv(const std::string &path, const std::vector<MetricsRow> &rows);
void write_summary_csv(const std::string &path, const std::vector<SummaryRow> &rows);

// Operator dump + per-operator policy snapshot files ("<stem>.<name>.qtable").
void write_operator_dump(const std::string &path, const std::vector<DiscoveredOperator> &ops,
                         const std::vector<Fluent> &fluents, const StateKeyInterner &interner);

struct LoadedOperator {
    Operator op;
    LoadedQTable policy;
};

// Reads a dump written by write_operator_dump. Grounds against the given
// puzzle's problem; discovered operators are open-world, so their static
// set is forced empty regardless of the target puzzle's fluent universe.
std::vector<LoadedOperator> load_operator_dump(const std::string &path, int puzzle);

} // namespace spotter::harness

#endif

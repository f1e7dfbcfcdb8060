#include "spotter/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "spotter/domains.h"

namespace spotter::harness {

Mode parse_mode(const std::string &name) {
    if (name == "spotter")
        return Mode::Spotter;
    if (name == "vql")
        return Mode::Vql;
    if (name == "hlaql")
        return Mode::Hlaql;
    if (name == "hlalql")
        return Mode::Hlalql;
    throw UsageError("unknown mode '" + name + "' (expected spotter, vql, hlaql or hlalql)");
}

void ExperimentConfig::validate() const {
    if (puzzles.empty())
        throw UsageError("at least one puzzle required");
    if (puzzles.size() != episodes.size())
        throw UsageError("--puzzles and --episodes must have matching lengths");
    for (int p : puzzles)
        if (p < 1 || p > 3)
            throw UsageError("puzzles must be 1, 2 or 3");
    for (int e : episodes)
        if (e < 1)
            throw UsageError("episode counts must be at least 1");
    if (tau <= 0.0 || tau > 1.0)
        throw UsageError("tau must lie in (0, 1]");
    if (alpha <= 0.0 || alpha > 1.0 || gamma <= 0.0 || gamma > 1.0)
        throw UsageError("alpha and gamma must lie in (0, 1]");
    if (eps_min < 0.0 || eps_max > 1.0 || eps_min > eps_max)
        throw UsageError("epsilon range must satisfy 0 <= min <= max <= 1");
    if (runs < 1)
        throw UsageError("--runs must be at least 1");
    if (width < 7 || height < 5)
        throw UsageError("grid must be at least 7x5");
    if (defer_operators && log_every < 1)
        throw UsageError("--log-every must be at least 1");
    if (defer_operators && mode != Mode::Spotter)
        throw UsageError("--defer-operators applies to spotter mode only");
}

std::vector<uint64_t> seeds_of(const ExperimentConfig &config) {
    std::vector<uint64_t> seeds;
    for (int i = 0; i < config.runs; ++i)
        seeds.push_back(config.master_seed + static_cast<uint64_t>(i));
    return seeds;
}

namespace {

uint64_t puzzle_stream_seed(uint64_t seed, std::size_t puzzle_index) {
    uint64_t state = seed;
    uint64_t value = split_mix64(state);
    for (std::size_t i = 0; i < puzzle_index; ++i)
        value = split_mix64(state);
    return value;
}

EngineConfig engine_config_for(const ExperimentConfig &config, uint64_t seed,
                               std::size_t puzzle_index, int episode_count) {
    EngineConfig cfg;
    cfg.alpha = config.alpha;
    cfg.gamma = config.gamma;
    cfg.tau = config.tau;
    cfg.eps_min = config.eps_min;
    cfg.eps_max = config.eps_max;
    cfg.eps_horizon = config.eps_horizon > 0 ? config.eps_horizon : episode_count;
    cfg.genprecon_budget = config.genprecon_budget;
    cfg.defer_operators = config.defer_operators;
    cfg.render = config.render;
    cfg.master_seed = puzzle_stream_seed(seed, puzzle_index);
    return cfg;
}

void log_new_candidates(Engine &engine, const ExperimentConfig &config,
                        SeedResult &result, int puzzle_episode, int &next_op_id) {
    for (std::size_t li = 1; li < engine.learners().size(); ++li) {
        auto candidates = engine.candidates_for(li, config.genprecon_budget);
        for (const PreconditionCandidate &cand : candidates) {
            bool specification = false;
            for (const PreconLogRow &row : result.precon_log) {
                if (row.learner == static_cast<int>(li) &&
                    row.pre.subset_of(cand.literals)) {
                    specification = true;
                    break;
                }
            }
            if (specification)
                continue;
            PreconLogRow row;
            row.episode = puzzle_episode;
            row.learner = static_cast<int>(li);
            row.op_id = next_op_id++;
            row.precondition_count = static_cast<int>(cand.literals.size());
            row.pre = cand.literals;
            row.eff = *engine.learners()[li].subgoal;
            result.precon_log.push_back(std::move(row));
        }
    }
}

void mark_dominated(std::vector<PreconLogRow> &log) {
    for (std::size_t i = 0; i < log.size(); ++i) {
        for (std::size_t j = i + 1; j < log.size(); ++j) {
            if (log[j].learner != log[i].learner)
                continue;
            if (log[j].pre != log[i].pre && log[j].pre.subset_of(log[i].pre)) {
                log[i].dominated_by = log[j].op_id;
                break;
            }
        }
    }
}

SeedResult run_spotter_seed(const ExperimentConfig &config, uint64_t seed) {
    SeedResult result;
    result.seed = seed;

    auto interner = std::make_shared<StateKeyInterner>();
    std::vector<TabularLearner> learners;
    std::vector<DiscoveredOperator> discovered;
    std::vector<Fluent> last_fluents;
    int next_op_id = 1;

    for (std::size_t pi = 0; pi < config.puzzles.size(); ++pi) {
        int puzzle = config.puzzles[pi];
        int episode_count = config.episodes[pi];

        EnvConfig env;
        env.puzzle = puzzle;
        env.width = config.width;
        env.height = config.height;
        env.seed = seed;

        Engine engine(make_integrated_task(env), engine_config_for(config, seed, pi,
                                                                   episode_count),
                      interner, std::move(learners));

        if (!config.load_operators.empty()) {
            try {
                for (const LoadedOperator &loaded :
                     load_operator_dump(config.load_operators, puzzle)) {
                    auto table = std::make_shared<QTable>();
                    for (const auto &[key, row] : loaded.policy.entries)
                        (*table)[interner->intern(key)] = row;
                    engine.install_external(loaded.op, std::move(table));
                }
            } catch (const owpddl::SemanticError &e) {
                std::cerr << "note: skipping operator dump for puzzle " << puzzle
                          << ": " << e.what() << "\n";
            }
        }
        for (const DiscoveredOperator &d : discovered)
            engine.install_external(d.op, d.policy);

        for (int ep = 0; ep < episode_count; ++ep) {
            EpisodeRow row = engine.run_episode();
            MetricsRow metrics;
            metrics.seed = seed;
            metrics.puzzle = puzzle;
            metrics.episode = ep;
            metrics.reward = row.reward;
            metrics.steps = row.steps;
            metrics.impasse = row.impasse;
            metrics.operators_known = row.operators_known;
            result.rows.push_back(metrics);

            if (config.defer_operators && (ep + 1) % config.log_every == 0)
                log_new_candidates(engine, config, result, ep, next_op_id);
        }

        result.learn_calls_per_puzzle.push_back(engine.report().total_learn_calls);
        for (const DiscoveredOperator &d : engine.report().operators_added)
            discovered.push_back(d);
        last_fluents = engine.task().strips.fluents;
        learners = engine.take_learners();
    }

    mark_dominated(result.precon_log);
    if (!config.out_dir.empty() && !discovered.empty()) {
        write_operator_dump(config.out_dir + "/discovered_seed" + std::to_string(seed) +
                                ".owpddl",
                            discovered, last_fluents, *interner);
    }
    result.discovered = std::move(discovered);
    return result;
}

/*
  Baselines share one flat q-table across puzzles, with actions tracked in
  a run-global registry: 0..5 are the primitives, high-level executors are
  registered by operator name as puzzles introduce them.
*/
struct BaselineRunner {
    const ExperimentConfig &config;
    uint64_t seed;
    std::shared_ptr<StateKeyInterner> interner = std::make_shared<StateKeyInterner>();
    std::vector<std::string> registry;
    std::unordered_map<StateId, std::vector<double>> q;
    Rng reset_rng;
    Rng explore_rng;

    BaselineRunner(const ExperimentConfig &config, uint64_t seed)
        : config(config), seed(seed), reset_rng(0), explore_rng(0) {
        for (int a = 0; a < kNumActions; ++a)
            registry.push_back(action_name(static_cast<PrimitiveAction>(a)));
        uint64_t state = seed;
        reset_rng = Rng(split_mix64(state));
        explore_rng = Rng(split_mix64(state));
    }

    int register_action(const std::string &name) {
        auto it = std::find(registry.begin(), registry.end(), name);
        if (it != registry.end())
            return static_cast<int>(it - registry.begin());
        registry.push_back(name);
        return static_cast<int>(registry.size() - 1);
    }

    std::vector<double> &row(StateId s) {
        std::vector<double> &r = q[s];
        if (r.size() < registry.size())
            r.resize(registry.size(), 0.0);
        return r;
    }

    double max_over(StateId s, const std::vector<int> &available) {
        const std::vector<double> &r = row(s);
        double best = r[available.front()];
        for (int a : available)
            best = std::max(best, r[a]);
        return best;
    }

    int greedy(StateId s, const std::vector<int> &available) {
        const std::vector<double> &r = row(s);
        int best = available.front();
        for (int a : available)
            if (r[a] > r[best])
                best = a;
        return best;
    }

    void update(StateId s, int action, double target) {
        double &entry = row(s)[action];
        entry += config.alpha * (target - entry);
    }

    long primitive_updates = 0;
    long executor_updates = 0;

    void run_puzzle(int puzzle, int episode_count, SeedResult &result) {
        EnvConfig env;
        env.puzzle = puzzle;
        env.width = config.width;
        env.height = config.height;
        env.seed = seed;
        IntegratedPlanningTask task = make_integrated_task(env);

        std::vector<int> available;
        for (int a = 0; a < kNumActions; ++a)
            available.push_back(a);
        std::vector<std::string> executor_names;
        if (config.mode != Mode::Vql) {
            for (const Operator &op : task.strips.operators) {
                available.push_back(register_action(op.name));
                executor_names.push_back(op.name);
            }
        }
        int high_level = static_cast<int>(executor_names.size());

        EpsSchedule schedule{config.eps_min, config.eps_max,
                             config.eps_horizon > 0 ? config.eps_horizon : episode_count};
        int max_steps = env.effective_max_steps();

        for (int ep = 0; ep < episode_count; ++ep) {
            double eps = epsilon(schedule, ep);
            EpisodeContext ctx(reset(env, reset_rng));
            int driver_steps = 0;

            while (!ctx.done && driver_steps < max_steps) {
                StateId s = interner->intern(state_key(ctx.state));
                int action;
                if (explore_rng.next_real() < eps)
                    action = available[explore_rng.next_below(available.size())];
                else
                    action = greedy(s, available);

                if (action < kNumActions) {
                    StepResult r = ctx.advance(static_cast<PrimitiveAction>(action));
                    StateId s2 = interner->intern(state_key(ctx.state));
                    update(s, action, r.reward + config.gamma * max_over(s2, available));
                    ++primitive_updates;
                    ++driver_steps;
                    continue;
                }

                const std::string &name = registry[action];
                const Executor &x = task.executor_map.at(name);
                if (!x.initiation(ctx.state)) {
                    // unavailable executor: one wasted step, zero reward
                    update(s, action, config.gamma * max_over(s, available));
                    ++driver_steps;
                    continue;
                }
                ExecutionResult res = execute(x, ctx);
                std::size_t k = res.trajectory.size();
                if (k == 0) {
                    update(s, action, config.gamma * max_over(s, available));
                    ++driver_steps;
                    continue;
                }
                // Multi-step discounted return with a bootstrap at the exit.
                auto [rbar, discount] = discounted_return(res.trajectory, config.gamma);
                StateId exit = interner->intern(state_key(ctx.state));
                update(s, action, rbar + discount * max_over(exit, available));
                ++executor_updates;
                if (config.mode == Mode::Hlalql) {
                    // One-step updates trickle down to the primitives.
                    for (const Transition &t : res.trajectory) {
                        StateId ti = interner->intern(state_key(t.state));
                        StateId tn = interner->intern(state_key(t.next));
                        update(ti, static_cast<int>(t.action),
                               t.reward + config.gamma * max_over(tn, available));
                        ++primitive_updates;
                    }
                }
                driver_steps += static_cast<int>(k);
            }

            MetricsRow metrics;
            metrics.seed = seed;
            metrics.puzzle = puzzle;
            metrics.episode = ep;
            metrics.reward = ctx.reward_total;
            metrics.steps = ctx.state.steps;
            metrics.impasse = false;
            metrics.operators_known = high_level;
            result.rows.push_back(metrics);
        }
    }
};

} // namespace

std::pair<double, double> discounted_return(const std::vector<Transition> &trajectory,
                                            double gamma) {
    double rbar = 0.0;
    double discount = 1.0;
    for (const Transition &t : trajectory) {
        rbar += discount * t.reward;
        discount *= gamma;
    }
    return {rbar, discount};
}

namespace {

SeedResult run_baseline_seed(const ExperimentConfig &config, uint64_t seed) {
    SeedResult result;
    result.seed = seed;
    BaselineRunner runner(config, seed);
    for (std::size_t pi = 0; pi < config.puzzles.size(); ++pi) {
        runner.run_puzzle(config.puzzles[pi], config.episodes[pi], result);
        result.learn_calls_per_puzzle.push_back(0);
    }
    result.primitive_updates = runner.primitive_updates;
    result.executor_updates = runner.executor_updates;
    return result;
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.10g", value);
    return buffer;
}

} // namespace

void write_metrics_csv(const std::string &path, const std::vector<MetricsRow> &rows) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << "seed,puzzle,episode,reward,steps,impasse,operators_known,wall_ms\n";
    for (const MetricsRow &row : rows) {
        out << row.seed << ',' << row.puzzle << ',' << row.episode << ','
            << format_double(row.reward) << ',' << row.steps << ','
            << (row.impasse ? 1 : 0) << ',' << row.operators_known << ','
            << row.wall_ms << '\n';
    }
    if (!out.good())
        throw IoError("failed while writing " + path);
}

std::vector<MetricsRow> read_metrics_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path);
    std::vector<MetricsRow> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        MetricsRow row;
        int impasse = 0;
        unsigned long long seed = 0;
        if (std::sscanf(line.c_str(), "%llu,%d,%d,%lf,%d,%d,%d,%ld", &seed, &row.puzzle,
                        &row.episode, &row.reward, &row.steps, &impasse,
                        &row.operators_known, &row.wall_ms) != 8)
            throw IoError(path + ": malformed row '" + line + "'");
        row.seed = seed;
        row.impasse = impasse != 0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<SummaryRow> summarize(const std::vector<std::vector<MetricsRow>> &per_seed,
                                  bool normalize) {
    if (per_seed.empty())
        throw EmptyInput("no metrics to summarize");
    std::map<std::pair<int, int>, std::vector<double>> grouped;
    for (const auto &rows : per_seed)
        for (const MetricsRow &row : rows)
            grouped[{row.puzzle, row.episode}].push_back(row.reward);
    if (grouped.empty())
        throw EmptyInput("metrics contain no rows");

    std::vector<SummaryRow> out;
    double max_mean = 0.0;
    for (const auto &[key, values] : grouped) {
        SummaryRow row;
        row.puzzle = key.first;
        row.episode = key.second;
        double sum = 0.0;
        for (double v : values)
            sum += v;
        row.mean_reward = sum / static_cast<double>(values.size());
        double var = 0.0;
        for (double v : values)
            var += (v - row.mean_reward) * (v - row.mean_reward);
        row.std_reward = std::sqrt(var / static_cast<double>(values.size()));
        max_mean = std::max(max_mean, row.mean_reward);
        out.push_back(row);
    }
    if (normalize && max_mean > 0.0) {
        for (SummaryRow &row : out) {
            row.mean_reward /= max_mean;
            row.std_reward /= max_mean;
        }
    }
    return out;
}

void write_summary_csv(const std::string &path, const std::vector<SummaryRow> &rows) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << "puzzle,episode,mean_reward,std_reward\n";
    for (const SummaryRow &row : rows)
        out << row.puzzle << ',' << row.episode << ',' << format_double(row.mean_reward)
            << ',' << format_double(row.std_reward) << '\n';
    if (!out.good())
        throw IoError("failed while writing " + path);
}

void write_operator_dump(const std::string &path, const std::vector<DiscoveredOperator> &ops,
                         const std::vector<Fluent> &fluents,
                         const StateKeyInterner &interner) {
    std::vector<owpddl::DumpEntry> entries;
    std::vector<Operator> operators;
    for (const DiscoveredOperator &d : ops) {
        owpddl::DumpEntry entry;
        entry.episode = d.episode;
        entry.value = d.value;
        entry.precondition_count = static_cast<int>(d.op.pre.size());
        entries.push_back(entry);
        operators.push_back(d.op);
    }
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    out << owpddl::serialize_dump(entries, operators, fluents);
    if (!out.good())
        throw IoError("failed while writing " + path);

    for (const DiscoveredOperator &d : ops) {
        TabularLearner snapshot;
        snapshot.subgoal = d.op.eff;
        if (d.policy) {
            snapshot.q = *d.policy;
            for (const auto &[id, qrow] : snapshot.q)
                snapshot.visited.insert(id);
        }
        save_qtable(snapshot, interner, path + "." + d.op.name + ".qtable");
    }
}

std::vector<LoadedOperator> load_operator_dump(const std::string &path, int puzzle) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    owpddl::DomainSource domain = owpddl::parse_domain(owpddl::builtin_domain_text());
    owpddl::ProblemSource problem =
        owpddl::parse_problem(owpddl::builtin_problem_text(puzzle));

    std::vector<LoadedOperator> out;
    for (const owpddl::DumpEntry &entry : owpddl::parse_dump(buffer.str())) {
        auto ground = owpddl::ground_actions(domain, problem, {entry.schema});
        for (Operator op : ground.operators) {
            // Discovered operators are open-world regardless of the
            // fluent universe they are re-grounded into.
            LoadedOperator loaded;
            loaded.op = Operator(op.name, op.pre, op.eff, {});
            loaded.policy = load_qtable(path + "." + op.name + ".qtable");
            out.push_back(std::move(loaded));
        }
    }
    return out;
}

RunResult run_experiment(const ExperimentConfig &config) {
    config.validate();

    RunResult result;
    result.config = config;
    std::vector<uint64_t> seeds = seeds_of(config);
    result.seeds.resize(seeds.size());

    if (!config.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(config.out_dir, ec);
        if (ec)
            throw IoError("cannot create output directory " + config.out_dir);
    }

    unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                    : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, seeds.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t index = next.fetch_add(1);
            if (index >= seeds.size())
                return;
            if (config.mode == Mode::Spotter)
                result.seeds[index] = run_spotter_seed(config, seeds[index]);
            else
                result.seeds[index] = run_baseline_seed(config, seeds[index]);
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < jobs; ++i)
            pool.emplace_back(worker);
        for (std::thread &t : pool)
            t.join();
    }

    if (!config.out_dir.empty()) {
        std::vector<std::vector<MetricsRow>> all_rows;
        for (const SeedResult &seed_result : result.seeds) {
            std::string stem = config.out_dir + "/metrics_seed" +
                               std::to_string(seed_result.seed) + ".csv";
            write_metrics_csv(stem, seed_result.rows);
            all_rows.push_back(seed_result.rows);

            if (config.defer_operators) {
                std::string log_path = config.out_dir + "/precon_log_seed" +
                                       std::to_string(seed_result.seed) + ".csv";
                std::ofstream out(log_path);
                if (!out)
                    throw IoError("cannot write " + log_path);
                out << "episode,learner,op_id,preconds,dominated_by\n";
                for (const PreconLogRow &row : seed_result.precon_log) {
                    out << row.episode << ',' << row.learner << ',' << row.op_id << ','
                        << row.precondition_count << ',';
                    if (row.dominated_by >= 0)
                        out << row.dominated_by;
                    out << '\n';
                }
            }
        }
        write_summary_csv(config.out_dir + "/summary.csv", summarize(all_rows, false));
    }
    return result;
}

} // namespace spotter::harness

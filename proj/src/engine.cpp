#include "spotter/engine.h"

#include <algorithm>
#include <cassert>
#include <iostream>

#include "spotter/domains.h"

namespace spotter {

IntegratedPlanningTask make_integrated_task(const EnvConfig &env) {
    owpddl::DomainSource domain = owpddl::parse_domain(owpddl::builtin_domain_text());
    owpddl::ProblemSource problem =
        owpddl::parse_problem(owpddl::builtin_problem_text(env.puzzle));
    owpddl::GroundResult ground = owpddl::ground(domain, problem);

    IntegratedPlanningTask task;
    task.strips = std::move(ground.task);
    task.env = env;
    int cap = 4 * env.width * env.height;
    for (const Operator &op : task.strips.operators)
        task.executor_map.emplace(op.name, hand_executor(op, cap));
    return task;
}

Engine::Engine(IntegratedPlanningTask task, EngineConfig config,
               std::shared_ptr<StateKeyInterner> interner,
               std::vector<TabularLearner> learners)
    : task_(std::move(task)), config_(config),
      interner_(interner ? std::move(interner) : std::make_shared<StateKeyInterner>()),
      learners_(std::move(learners)),
      reset_rng_(0), explore_rng_(0) {
    uint64_t seed_state = config_.master_seed;
    reset_rng_ = Rng(split_mix64(seed_state));
    explore_rng_ = Rng(split_mix64(seed_state));

    if (learners_.empty())
        learners_.emplace_back(config_.alpha, config_.gamma, std::nullopt);

    for (const Operator &op : task_.strips.operators) {
        if (!task_.executor_map.count(op.name))
            throw InvariantViolation("operator " + op.name + " has no executor");
        // learned<N> names continue after any carried-over operators
        if (op.name.rfind("learned", 0) == 0) {
            int index = std::atoi(op.name.c_str() + 7);
            next_learned_ = std::max(next_learned_, index + 1);
        }
    }
}

int Engine::executor_step_cap() const {
    return 4 * task_.env.width * task_.env.height;
}

StateId Engine::intern_state(const GridState &state) {
    StateId id = interner_->intern(state_key(state));
    if (id >= view_.class_of.size())
        view_.class_of.resize(id + 1, kNoDetection);
    if (view_.class_of[id] == kNoDetection) {
        FluentState detection = detect(state);
        auto [it, inserted] =
            class_ids_.emplace(detection, static_cast<uint32_t>(view_.classes.size()));
        if (inserted)
            view_.classes.push_back(detection);
        view_.class_of[id] = it->second;
    }
    return id;
}

const FluentState &Engine::detection_of(StateId id) const {
    return view_.classes[view_.class_of[id]];
}

const SearchResult &Engine::plan_from(uint32_t detection_class,
                                      const FluentState &detection) {
    auto it = plan_cache_.find(detection_class);
    if (it == plan_cache_.end())
        it = plan_cache_.emplace(detection_class, owfs(task_.strips, detection,
                                                       config_.owfs_cap))
                 .first;
    return it->second;
}

void Engine::add_reach(uint32_t detection_class,
                       const std::vector<PartialFluentState> &nodes) {
    if (!reach_merged_classes_.insert(detection_class).second)
        return; // this search tree was merged earlier in the episode
    for (const PartialFluentState &node : nodes)
        if (sigma_reach_index_.insert(node).second)
            sigma_reach_.push_back(node);
}

void Engine::add_plan_state(const PartialFluentState &state, int plan_length) {
    for (const SigmaPlanEntry &entry : sigma_plan_)
        if (entry.state.subset_of(state))
            return; // already covered by a weaker entry
    std::erase_if(sigma_plan_, [&](const SigmaPlanEntry &entry) {
        return state.subset_of(entry.state);
    });
    sigma_plan_.push_back({state, plan_length});
}

bool Engine::plannable(const FluentState &detection) const {
    for (const SigmaPlanEntry &entry : sigma_plan_)
        if (entry.state.subset_of(detection))
            return true;
    return false;
}

void Engine::spawn_learner(const PartialFluentState &subgoal) {
    for (const TabularLearner &learner : learners_)
        if (learner.subgoal && *learner.subgoal == subgoal)
            return;
    learners_.emplace_back(config_.alpha, config_.gamma, subgoal);
}

bool Engine::install_operator(const Operator &op, std::shared_ptr<const QTable> policy,
                              double value, bool record) {
    for (const Operator &existing : task_.strips.operators)
        if (existing.same_pre_eff(op))
            return false;
    op.check_invariants();
    if (!op.static_fluents.empty())
        throw InvariantViolation("discovered operators must have no static fluents");

    Executor x = make_executor(policy, op, interner_, executor_step_cap());
    task_.strips.operators.push_back(op);
    std::sort(task_.strips.operators.begin(), task_.strips.operators.end(),
              [](const Operator &a, const Operator &b) { return a.name < b.name; });
    task_.executor_map.emplace(op.name, std::move(x));
    plan_cache_.clear();
    if (record)
        report_.operators_added.push_back({op, episode_, value, std::move(policy)});
    return true;
}

bool Engine::install_external(const Operator &op, std::shared_ptr<const QTable> policy) {
    return install_operator(op, std::move(policy), 0.0, false);
}

std::vector<PreconditionCandidate> Engine::candidates_for(std::size_t learner_index,
                                                          std::size_t budget) {
    return gen_precon(learners_[learner_index], view_, sigma_reach_, config_.tau, budget);
}

void Engine::install_candidates() {
    // Spawn order over learners, discovery order over candidates.
    for (std::size_t i = 1; i < learners_.size(); ++i) {
        auto candidates = candidates_for(i, config_.genprecon_budget);
        for (const PreconditionCandidate &cand : candidates) {
            const PartialFluentState &eff = *learners_[i].subgoal;
            if (eff.minus(cand.literals).empty())
                continue; // effects would add nothing over these preconditions
            Operator op("learned" + std::to_string(next_learned_), cand.literals, eff, {});
            auto policy = std::make_shared<const QTable>(learners_[i].q);
            if (install_operator(op, std::move(policy), cand.avg_value, true))
                ++next_learned_;
        }
    }
}

Engine::Control Engine::solve_once(EpisodeContext &ctx, EpisodeRow &row,
                                   bool impasse_now) {
    StateId id = intern_state(ctx.state);
    FluentState detection = detection_of(id);
    if (task_.strips.goal.subset_of(detection))
        return impasse_now ? Control::DoneImpasse : Control::DoneClean;
    if (ctx.done)
        return Control::DoneImpasse;

    const SearchResult &search = plan_from(view_.class_of[id], detection);
    add_reach(view_.class_of[id], search.visited);
    if (!search.plan)
        return Control::ToLearn;

    // Remember the states along the plan; each can reach the goal through
    // the corresponding suffix.
    Plan plan = *search.plan;
    std::vector<PartialFluentState> states = plan_states(task_.strips, detection, plan);
    for (std::size_t i = 0; i < states.size(); ++i)
        add_plan_state(states[i], static_cast<int>(plan.size() - i));

    for (std::size_t i = 0; i < plan.size(); ++i) {
        const Operator &op = task_.strips.operators[plan[i]];
        row.executed.push_back(op.name);
        ExecutionResult result = execute(task_.executor_map.at(op.name), ctx);
        StateId here = intern_state(ctx.state);
        detection = detection_of(here);
        if (ctx.done)
            break;
        if (i + 1 < plan.size() &&
            !task_.strips.operators[plan[i + 1]].pre.subset_of(detection))
            return Control::ToLearn;
    }

    if (task_.strips.goal.subset_of(detection))
        return impasse_now ? Control::DoneImpasse : Control::DoneClean;
    if (ctx.done)
        return Control::DoneImpasse;
    return Control::ToLearn;
}

Engine::Control Engine::learn_once(EpisodeContext &ctx, EpisodeRow &row) {
    ++row.learn_calls;
    ++report_.total_learn_calls;

    bool done = ctx.done;
    double eps = epsilon({config_.eps_min, config_.eps_max, config_.eps_horizon},
                         episode_);
    StateId here = ctx.done ? 0 : intern_state(ctx.state);

    while (!done) {
        PrimitiveAction action = select_action(learners_[0], here, eps, explore_rng_);
        StateId previous = here;
        ctx.advance(action);
        here = intern_state(ctx.state);
        const FluentState &detection = detection_of(here);

        bool reached_plannable = false;
        if (plannable(detection)) {
            done = true;
            reached_plannable = true;
        } else {
            const SearchResult &search = plan_from(view_.class_of[here], detection);
            add_reach(view_.class_of[here], search.visited);
            if (search.plan) {
                // Regress the goal back through the plan; every regressed
                // state is plannable and names a subgoal worth learning.
                PartialFluentState subgoal = task_.strips.goal;
                const Plan &plan = *search.plan;
                int suffix = 0;
                for (auto it = plan.rbegin(); it != plan.rend(); ++it) {
                    subgoal = regress_unchecked(subgoal, task_.strips.operators[*it]);
                    ++suffix;
                    add_plan_state(subgoal, suffix);
                    spawn_learner(subgoal);
                }
                done = true;
                reached_plannable = true;
            }
        }
        if (ctx.done)
            done = true;

        q_update(learners_[0], previous, action, reached_plannable ? 1.0 : 0.0, here);
        for (std::size_t i = 1; i < learners_.size(); ++i) {
            double reward = subsumes(*learners_[i].subgoal, detection) ? 1.0 : 0.0;
            q_update(learners_[i], previous, action, reward, here);
        }
    }

    if (!config_.defer_operators)
        install_candidates();
    if (ctx.done)
        return Control::DoneImpasse;
    return Control::ToSolve;
}

EpisodeRow Engine::run_episode() {
    sigma_reach_.clear();
    sigma_reach_index_.clear();
    reach_merged_classes_.clear();
    sigma_plan_.clear();

    EpisodeContext ctx(reset(task_.env, reset_rng_));
    if (config_.render)
        std::cerr << "episode " << episode_ << "\n" << render_ascii(ctx.state);

    EpisodeRow row;
    Control control = solve_once(ctx, row, false);
    while (control == Control::ToLearn || control == Control::ToSolve) {
        control = control == Control::ToLearn ? learn_once(ctx, row)
                                              : solve_once(ctx, row, true);
    }

    row.reward = ctx.reward_total;
    row.steps = ctx.state.steps;
    row.impasse = control == Control::DoneImpasse;
    row.operators_known = static_cast<int>(task_.strips.operators.size());

    ++episode_;
    report_.episodes.push_back(row);
    report_.episodes_used = episode_;
    report_.impasse = row.impasse;
    return row;
}

RunReport run_spotter(Engine &engine, int episode_budget) {
    for (int i = 0; i < episode_budget; ++i) {
        EpisodeRow row = engine.run_episode();
        if (!row.impasse)
            break;
    }
    return engine.report();
}

} // namespace spotter

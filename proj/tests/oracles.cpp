#include "oracles.h"

#include <string>

namespace spotter::oracle {

std::optional<PartialFluentState> successor_by_hand(const PartialFluentState &state,
                                                    const Operator &op) {
    for (const Literal &lit : op.pre.literals()) {
        if (!state.contains(lit))
            return std::nullopt;
    }
    std::vector<Literal> out;
    std::set<Fluent> touched;
    for (const Literal &lit : op.eff.literals())
        touched.insert(lit.fluent);
    for (const Literal &lit : state.literals())
        touched.insert(lit.fluent);
    for (const Fluent &f : touched) {
        if (auto v = op.eff.value(f)) {
            out.emplace_back(f, *v);
        } else if (op.static_fluents.count(f)) {
            if (auto sv = state.value(f))
                out.emplace_back(f, *sv);
        }
    }
    return PartialFluentState(out);
}

bool plan_executable(const std::vector<Operator> &ops, const PartialFluentState &start,
                     const std::vector<int> &plan) {
    PartialFluentState state = start;
    for (int index : plan) {
        auto next = successor_by_hand(state, ops[index]);
        if (!next)
            return false;
        state = *next;
    }
    return true;
}

std::optional<PartialFluentState> run_plan(const std::vector<Operator> &ops,
                                           const PartialFluentState &start,
                                           const std::vector<int> &plan) {
    PartialFluentState state = start;
    for (int index : plan) {
        auto next = successor_by_hand(state, ops[index]);
        if (!next)
            return std::nullopt;
        state = *next;
    }
    return state;
}

std::optional<std::vector<int>> enumerate_plan(const std::vector<Operator> &ops,
                                               const PartialFluentState &start,
                                               const PartialFluentState &goal,
                                               int max_len) {
    std::vector<int> sequence;
    // Depth-first over sequences of each exact length, shortest first.
    auto try_length = [&](auto &&self, PartialFluentState state, int remaining) -> bool {
        if (goal.subset_of(state))
            return true;
        if (remaining == 0)
            return false;
        for (int i = 0; i < static_cast<int>(ops.size()); ++i) {
            auto next = successor_by_hand(state, ops[i]);
            if (!next)
                continue;
            sequence.push_back(i);
            if (self(self, *next, remaining - 1))
                return true;
            sequence.pop_back();
        }
        return false;
    };
    for (int len = 0; len <= max_len; ++len) {
        sequence.clear();
        if (try_length(try_length, start, len))
            return sequence;
    }
    return std::nullopt;
}

std::vector<PartialFluentState> all_partial_states(const std::vector<Fluent> &fluents) {
    std::vector<PartialFluentState> out;
    const std::size_t n = fluents.size();
    std::vector<int> digits(n, 0); // 0 absent, 1 positive, 2 negative
    for (;;) {
        std::vector<Literal> lits;
        for (std::size_t i = 0; i < n; ++i) {
            if (digits[i] == 1)
                lits.emplace_back(fluents[i], true);
            else if (digits[i] == 2)
                lits.emplace_back(fluents[i], false);
        }
        out.emplace_back(std::move(lits));
        std::size_t pos = 0;
        while (pos < n && ++digits[pos] == 3)
            digits[pos++] = 0;
        if (pos == n)
            break;
    }
    return out;
}

RandomDomain random_domain(Rng &rng, int max_fluents, int max_operators) {
    RandomDomain dom;
    int num_fluents = rng.next_int(2, max_fluents);
    for (int i = 0; i < num_fluents; ++i)
        dom.fluents.emplace_back("f" + std::to_string(i), std::vector<std::string>{});

    int num_ops = rng.next_int(1, max_operators);
    for (int i = 0; i < num_ops; ++i) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            std::vector<Literal> pre, eff;
            std::set<Fluent> statics;
            for (const Fluent &f : dom.fluents) {
                int p = rng.next_int(0, 2);
                if (p == 1)
                    pre.emplace_back(f, true);
                else if (p == 2)
                    pre.emplace_back(f, false);
                int e = rng.next_int(0, 3); // bias toward sparse effects
                if (e == 1)
                    eff.emplace_back(f, true);
                else if (e == 2)
                    eff.emplace_back(f, false);
                else if (e == 0 && rng.next_bool())
                    statics.insert(f);
            }
            PartialFluentState pre_state(pre), eff_state(eff);
            if (eff_state.minus(pre_state).empty())
                continue;
            dom.operators.emplace_back("op" + std::to_string(i), pre_state, eff_state,
                                       statics);
            break;
        }
    }

    std::vector<Literal> init;
    for (const Fluent &f : dom.fluents)
        init.emplace_back(f, rng.next_bool());
    dom.initial = FluentState(init);

    std::vector<Literal> goal;
    for (const Fluent &f : dom.fluents) {
        int g = rng.next_int(0, 3);
        if (g == 1)
            goal.emplace_back(f, true);
        else if (g == 2)
            goal.emplace_back(f, false);
    }
    dom.goal = PartialFluentState(goal);
    return dom;
}

} // namespace spotter::oracle

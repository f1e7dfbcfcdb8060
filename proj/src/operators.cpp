#include "spotter/operators.h"

#include <algorithm>

namespace spotter {

Operator::Operator(std::string op_name, PartialFluentState precondition,
                   PartialFluentState effect, std::set<Fluent> statics)
    : name(std::move(op_name)), pre(std::move(precondition)),
      eff(std::move(effect)), static_fluents(std::move(statics)) {
    check_invariants();
}

void Operator::check_invariants() const {
    if (eff.minus(pre).empty())
        throw InvariantViolation("operator " + name + ": effects add nothing beyond preconditions");
    for (const Literal &lit : eff.literals()) {
        if (static_fluents.count(lit.fluent))
            throw InvariantViolation("operator " + name + ": effect touches static fluent " +
                                     lit.fluent.to_string());
    }
}

StripsTask::StripsTask(std::vector<Fluent> f, std::vector<Operator> ops,
                       FluentState init, PartialFluentState g)
    : fluents(std::move(f)), operators(std::move(ops)),
      initial(std::move(init)), goal(std::move(g)) {
    std::sort(fluents.begin(), fluents.end());
    fluents.erase(std::unique(fluents.begin(), fluents.end()), fluents.end());
    std::sort(operators.begin(), operators.end(),
              [](const Operator &a, const Operator &b) { return a.name < b.name; });
    if (initial.size() != fluents.size())
        throw InvariantViolation("initial state is not a complete assignment");
    for (const Literal &lit : goal.literals()) {
        if (!std::binary_search(fluents.begin(), fluents.end(), lit.fluent))
            throw InvariantViolation("goal mentions unknown fluent " + lit.fluent.to_string());
    }
}

} // namespace spotter

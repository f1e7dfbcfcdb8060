#ifndef SPOTTER_OPERATORS_H
#define SPOTTER_OPERATORS_H

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/fluents.h"

namespace spotter {

class InvariantViolation : public std::runtime_error {
public:
    explicit InvariantViolation(const std::string &what) : std::runtime_error(what) {}
};

/*
  Open-world planning action. `static_fluents` are the fluents known not
  to change while the operator executes; everything outside effects and
  statics is unknown afterwards.
*/
struct Operator {
    std::string name;
    PartialFluentState pre;
    PartialFluentState eff;
    std::set<Fluent> static_fluents;

    Operator() = default;
    Operator(std::string op_name, PartialFluentState precondition,
             PartialFluentState effect, std::set<Fluent> statics);

    // Required of every operator: it must assert something new, and its
    // effects must not touch its static set.
    void check_invariants() const;

    bool same_pre_eff(const Operator &other) const {
        return pre == other.pre && eff == other.eff;
    }
};

struct StripsTask {
    std::vector<Fluent> fluents;      // sorted, unique
    std::vector<Operator> operators;  // sorted by name
    FluentState initial;              // complete over `fluents`
    PartialFluentState goal;

    StripsTask() = default;
    StripsTask(std::vector<Fluent> f, std::vector<Operator> ops,
               FluentState init, PartialFluentState g);

    bool is_complete(const PartialFluentState &state) const {
        return state.size() == fluents.size();
    }
};

// Sequence of operator indices into StripsTask::operators. Valid until the
// operator set is mutated.
using Plan = std::vector<int>;

} // namespace spotter

#endif

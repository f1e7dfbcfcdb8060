#ifndef SPOTTER_FLUENTS_H
#define SPOTTER_FLUENTS_H

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spotter {

// A ground propositional state variable: predicate applied to object names.
struct Fluent {
    std::string predicate;
    std::vector<std::string> args;

    Fluent() = default;
    Fluent(std::string pred, std::vector<std::string> arguments)
        : predicate(std::move(pred)), args(std::move(arguments)) {}

    bool operator==(const Fluent &other) const {
        return predicate == other.predicate && args == other.args;
    }
    bool operator!=(const Fluent &other) const { return !(*this == other); }
    bool operator<(const Fluent &other) const {
        if (predicate != other.predicate)
            return predicate < other.predicate;
        return args < other.args;
    }

    std::string to_string() const;
};

struct Literal {
    Fluent fluent;
    bool positive = true;

    Literal() = default;
    Literal(Fluent f, bool pos) : fluent(std::move(f)), positive(pos) {}

    bool operator==(const Literal &other) const {
        return positive == other.positive && fluent == other.fluent;
    }
    bool operator!=(const Literal &other) const { return !(*this == other); }
    bool operator<(const Literal &other) const {
        if (fluent != other.fluent)
            return fluent < other.fluent;
        return positive < other.positive;
    }

    Literal negated() const { return Literal(fluent, !positive); }
    std::string to_string() const;
};

class InconsistentState : public std::logic_error {
public:
    explicit InconsistentState(const std::string &what) : std::logic_error(what) {}
};

/*
  A consistent set of signed ground fluents. Fluents not mentioned are
  unknown (open world). Literals are kept sorted by (predicate, args,
  polarity), so equality, hashing and ordering are canonical.
*/
class PartialFluentState {
public:
    PartialFluentState() = default;
    // Sorts and deduplicates; throws InconsistentState if some fluent
    // appears with both polarities.
    explicit PartialFluentState(std::vector<Literal> literals);

    static PartialFluentState single(Literal lit) {
        return PartialFluentState(std::vector<Literal>{std::move(lit)});
    }

    const std::vector<Literal> &literals() const { return literals_; }
    std::size_t size() const { return literals_.size(); }
    bool empty() const { return literals_.empty(); }

    bool contains(const Literal &lit) const;
    // Value of a fluent: true/false if assigned, nullopt if unknown.
    std::optional<bool> value(const Fluent &f) const;

    bool subset_of(const PartialFluentState &other) const;

    // Literal-set union; throws InconsistentState on a polarity conflict.
    PartialFluentState unite(const PartialFluentState &other) const;
    // Literal-set difference (signed literals, not fluents).
    PartialFluentState minus(const PartialFluentState &other) const;
    // Literal-set intersection.
    PartialFluentState intersect(const PartialFluentState &other) const;
    // Literals whose fluent belongs to `keep`.
    PartialFluentState restricted_to(const std::set<Fluent> &keep) const;

    std::set<Fluent> fluents() const;

    bool operator==(const PartialFluentState &other) const {
        return literals_ == other.literals_;
    }
    bool operator!=(const PartialFluentState &other) const {
        return !(*this == other);
    }
    bool operator<(const PartialFluentState &other) const {
        return literals_ < other.literals_;
    }

    std::size_t hash() const;
    std::string to_string() const;

private:
    std::vector<Literal> literals_;
};

// Complete assignments use the same representation; completeness over a
// fluent universe is checked where a contract requires it.
using FluentState = PartialFluentState;

inline PartialFluentState restrict_to(const PartialFluentState &state,
                                      const std::set<Fluent> &keep) {
    return state.restricted_to(keep);
}

// true iff `general` (the weaker description) is a literal subset of
// `specific`.
inline bool subsumes(const PartialFluentState &general,
                     const PartialFluentState &specific) {
    return general.subset_of(specific);
}

std::size_t hash_combine(std::size_t seed, std::size_t value);

struct PartialFluentStateHash {
    std::size_t operator()(const PartialFluentState &s) const { return s.hash(); }
};

} // namespace spotter

#endif

#ifndef SPOTTER_OWPDDL_H
#define SPOTTER_OWPDDL_H

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spotter/operators.h"

namespace spotter::owpddl {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string &message)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + message),
          line(line), column(column) {}
    int line;
    int column;
};

class SemanticError : public std::runtime_error {
public:
    explicit SemanticError(const std::string &what) : std::runtime_error(what) {}
};

struct PredicateSchema {
    std::string name;
    std::vector<std::string> param_names;
    std::vector<std::string> param_types;

    std::size_t arity() const { return param_types.size(); }
};

// Argument entries starting with '?' are schema variables; anything else
// is an object constant resolved against the problem at grounding time.
struct SchemaAtom {
    std::string predicate;
    std::vector<std::string> args;
};

struct SchemaLiteral {
    SchemaAtom atom;
    bool positive = true;
};

struct ActionSchema {
    std::string name;
    std::vector<std::string> param_names;
    std::vector<std::string> param_types;
    std::vector<SchemaLiteral> pre;
    std::vector<SchemaLiteral> eff;
    // Atoms whose ground instances are neither effects nor statics. An
    // entry with any variable argument covers every ground instance of
    // its predicate; a fully ground entry covers that one fluent.
    std::vector<SchemaAtom> unknown;
};

struct DomainSource {
    std::string name;
    std::map<std::string, std::string> type_parents; // type -> parent
    std::vector<PredicateSchema> predicates;
    std::vector<ActionSchema> actions;

    bool has_type(const std::string &type) const;
    bool type_is_a(const std::string &type, const std::string &ancestor) const;
    const PredicateSchema *find_predicate(const std::string &pred) const;
};

struct ProblemSource {
    std::string name;
    std::string domain_name;
    std::vector<std::pair<std::string, std::string>> objects; // name, type
    std::vector<SchemaAtom> init;                             // positive ground atoms
    std::vector<SchemaLiteral> goal;

    std::optional<std::string> object_type(const std::string &object) const;
};

DomainSource parse_domain(const std::string &text);
ProblemSource parse_problem(const std::string &text);

struct GroundResult {
    StripsTask task;
    std::vector<std::string> warnings; // dropped operators etc.
};

/*
  Instantiates every action schema over all type-compatible object tuples.
  static(o) = F \ (effect fluents ∪ ground unknown list); the initial
  state is completed under the closed-world assumption. Ill-typed literals
  denote fluents that do not exist: a negative precondition on one is
  vacuously true and is dropped, a positive one makes the instance
  inapplicable and the instance is skipped; an ill-typed effect or initial
  atom is an error. Instances whose effects add nothing are dropped with a
  warning.
*/
GroundResult ground(const DomainSource &domain, const ProblemSource &problem);

// Round-trippable :action block for a ground operator. The unknown list
// is F minus effect fluents minus statics, written as ground atoms.
std::string serialize_operator(const Operator &op, const std::vector<Fluent> &fluents);

struct DumpEntry {
    ActionSchema schema;
    int episode = -1;
    double value = 0.0;
    int precondition_count = 0;
};

// Dump file: per operator, a "; episode=<n> value=<v> preconds=<k>"
// comment followed by its :action block.
std::string serialize_dump(const std::vector<DumpEntry> &entries,
                           const std::vector<Operator> &ops,
                           const std::vector<Fluent> &fluents);

std::vector<DumpEntry> parse_dump(const std::string &text);

struct GroundOperators {
    std::vector<Operator> operators;
    std::vector<std::string> warnings;
};

// Grounds extra action schemas (typically dumped operators with zero
// parameters and ground atoms) against the same domain and problem.
GroundOperators ground_actions(const DomainSource &domain, const ProblemSource &problem,
                               const std::vector<ActionSchema> &actions);

} // namespace spotter::owpddl

#endif

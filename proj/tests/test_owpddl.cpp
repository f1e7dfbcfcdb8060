#include "doctest.h"

#include <algorithm>

#include "spotter/domains.h"
#include "spotter/owpddl.h"
#include "spotter/random.h"
#include "spotter/search.h"

using namespace spotter;
using namespace spotter::owpddl;

TEST_CASE("builtin domain parses with the documented schemas") {
    DomainSource domain = parse_domain(builtin_domain_text());
    CHECK(domain.name == "two-room");
    REQUIRE(domain.actions.size() == 5);

    const ActionSchema *go = nullptr, *put = nullptr;
    for (const ActionSchema &a : domain.actions) {
        if (a.name == "goToObj")
            go = &a;
        if (a.name == "putDown")
            put = &a;
    }
    REQUIRE(go != nullptr);
    REQUIRE(put != nullptr);

    REQUIRE(go->pre.size() == 3);
    CHECK(go->pre[0].atom.predicate == "holding");
    CHECK(!go->pre[0].positive);
    CHECK(go->pre[1].atom.predicate == "blocked");
    CHECK(!go->pre[1].positive);
    CHECK(go->pre[2].atom.predicate == "inRoom");
    CHECK(go->pre[2].positive);
    REQUIRE(go->eff.size() == 1);
    CHECK(go->eff[0].atom.predicate == "nextToFacing");

    bool leaves_blocked_unknown = false;
    for (const SchemaAtom &atom : put->unknown)
        if (atom.predicate == "blocked")
            leaves_blocked_unknown = true;
    CHECK(leaves_blocked_unknown);
}

TEST_CASE("malformed input is rejected with positions") {
    CHECK_THROWS_AS(parse_domain("(define (domain d) (:action foo))"), ParseError);
    CHECK_THROWS_AS(parse_domain("(define (domain d)"), ParseError);
    try {
        parse_domain("(define (domain d)\n  (:action foo))");
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(e.line == 2);
    }
    // Unknown predicates are semantic, not syntactic, errors.
    CHECK_THROWS_AS(
        parse_domain("(define (domain d) (:predicates (p ?x)) (:action a"
                     " :parameters (?x) :precondition (q ?x) :effect (p ?x)))"),
        SemanticError);
}

TEST_CASE("grounding instantiates schemas over type-compatible objects") {
    DomainSource domain = parse_domain(
        "(define (domain d) (:types thing - object)"
        " (:predicates (wet ?x - thing) (seen ?x - thing))"
        " (:action observe :parameters (?x - thing)"
        "  :effect (seen ?x)))");
    ProblemSource problem = parse_problem(
        "(define (problem p) (:domain d)"
        " (:objects a b - thing) (:init (wet a)) (:goal (seen b)))");
    GroundResult result = ground(domain, problem);
    CHECK(result.task.operators.size() == 2);
    CHECK(result.task.fluents.size() == 4);

    // Closed-world completion of the initial state.
    CHECK(result.task.initial.size() == 4);
    CHECK(result.task.initial.value(Fluent("wet", {"a"})) == true);
    CHECK(result.task.initial.value(Fluent("wet", {"b"})) == false);
    CHECK(result.task.initial.value(Fluent("seen", {"a"})) == false);

    // No :unknown list: every ground operator is complete.
    for (const Operator &op : result.task.operators) {
        std::set<Fluent> covered = op.static_fluents;
        for (const Literal &lit : op.eff.literals())
            covered.insert(lit.fluent);
        CHECK(covered.size() == result.task.fluents.size());
    }
}

TEST_CASE("grounding is deterministic") {
    DomainSource domain = parse_domain(builtin_domain_text());
    ProblemSource problem = parse_problem(builtin_problem_text(2));
    GroundResult a = ground(domain, problem);
    GroundResult b = ground(domain, problem);
    REQUIRE(a.task.operators.size() == b.task.operators.size());
    CHECK(a.task.fluents == b.task.fluents);
    CHECK(a.task.initial == b.task.initial);
    for (std::size_t i = 0; i < a.task.operators.size(); ++i) {
        CHECK(a.task.operators[i].name == b.task.operators[i].name);
        CHECK(a.task.operators[i].pre == b.task.operators[i].pre);
        CHECK(a.task.operators[i].eff == b.task.operators[i].eff);
        CHECK(a.task.operators[i].static_fluents == b.task.operators[i].static_fluents);
    }
}

TEST_CASE("puzzle 1 grounds to a task solved by the four-step plan") {
    DomainSource domain = parse_domain(builtin_domain_text());
    ProblemSource problem = parse_problem(builtin_problem_text(1));
    GroundResult result = ground(domain, problem);
    CHECK(result.warnings.empty());

    auto search = owfs(result.task, result.task.initial);
    REQUIRE(search.plan.has_value());
    REQUIRE(search.plan->size() == 4);
    std::vector<std::string> names;
    for (int index : *search.plan)
        names.push_back(result.task.operators[index].name);
    CHECK(names[0] == "goToObj(agent,key)");
    CHECK(names[1] == "pickUp(agent,key)");
    CHECK(names[2] == "goToObj(agent,door)");
    CHECK(names[3] == "useKey(agent,door)");
}

TEST_CASE("puzzle 2 has no plan from a blocked initial state") {
    DomainSource domain = parse_domain(builtin_domain_text());
    ProblemSource problem = parse_problem(builtin_problem_text(2));
    GroundResult result = ground(domain, problem);
    auto search = owfs(result.task, result.task.initial);
    CHECK(!search.plan.has_value());
}

TEST_CASE("ill-typed preconditions follow the loose-typing rule") {
    // blocked only applies to doors; the negative literal drops, so the
    // instance for the key exists and has a two-literal precondition.
    DomainSource domain = parse_domain(builtin_domain_text());
    ProblemSource problem = parse_problem(builtin_problem_text(1));
    GroundResult result = ground(domain, problem);
    const Operator *go_key = nullptr, *go_door = nullptr;
    for (const Operator &op : result.task.operators) {
        if (op.name == "goToObj(agent,key)")
            go_key = &op;
        if (op.name == "goToObj(agent,door)")
            go_door = &op;
    }
    REQUIRE(go_key != nullptr);
    REQUIRE(go_door != nullptr);
    CHECK(go_key->pre.size() == 2); // not holding, inRoom
    CHECK(go_key->pre.contains(Literal(Fluent("holding", {"agent", "key"}), false)));
    CHECK(go_door->pre.size() == 2); // not blocked, inRoom
    CHECK(go_door->pre.contains(Literal(Fluent("blocked", {"door"}), false)));

    // A positive precondition on a nonexistent fluent drops the instance.
    DomainSource strict = parse_domain(
        "(define (domain d) (:types tool - object)"
        " (:predicates (sharp ?x - tool) (used ?x))"
        " (:action use :parameters (?x) :precondition (sharp ?x) :effect (used ?x)))");
    ProblemSource mixed = parse_problem(
        "(define (problem p) (:domain d)"
        " (:objects saw - tool rock) (:init) (:goal (used saw)))");
    GroundResult ops = ground(strict, mixed);
    REQUIRE(ops.task.operators.size() == 1);
    CHECK(ops.task.operators[0].name == "use(saw)");
}

TEST_CASE("serialized operators re-ground to equal operators") {
    DomainSource domain = parse_domain(builtin_domain_text());
    ProblemSource problem = parse_problem(builtin_problem_text(2));
    GroundResult result = ground(domain, problem);

    for (const Operator &op : result.task.operators) {
        std::string text = serialize_operator(op, result.task.fluents);
        auto entries = parse_dump(text);
        REQUIRE(entries.size() == 1);
        auto reground = ground_actions(domain, problem, {entries[0].schema});
        REQUIRE(reground.operators.size() == 1);
        CHECK(reground.operators[0].pre == op.pre);
        CHECK(reground.operators[0].eff == op.eff);
        CHECK(reground.operators[0].static_fluents == op.static_fluents);
    }
}

TEST_CASE("unknown list length counts fluents outside the effects") {
    std::vector<Fluent> fluents;
    for (int i = 0; i < 10; ++i)
        fluents.emplace_back("f" + std::to_string(i), std::vector<std::string>{});
    Operator op("probe",
                PartialFluentState({Literal(fluents[2], false)}),
                PartialFluentState({Literal(fluents[0], true), Literal(fluents[1], false)}),
                {});
    std::string text = serialize_operator(op, fluents);
    auto entries = parse_dump(text);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].schema.unknown.size() == 8);
}

TEST_CASE("a discovered ball-clearing operator round-trips and applies") {
    DomainSource domain = parse_domain(builtin_domain_text());
    ProblemSource problem = parse_problem(builtin_problem_text(2));
    GroundResult base = ground(domain, problem);

    auto lit = [](const std::string &pred, std::vector<std::string> args, bool positive) {
        return Literal(Fluent(pred, std::move(args)), positive);
    };
    PartialFluentState eff({
        lit("nextToFacing", {"agent", "ball"}, true),
        lit("handsFree", {"agent"}, true),
        lit("inRoom", {"agent", "key"}, true),
        lit("inRoom", {"agent", "door"}, true),
        lit("locked", {"door"}, true),
        lit("holding", {"agent", "key"}, false),
        lit("blocked", {"door"}, false),
    });
    PartialFluentState pre({
        lit("blocked", {"door"}, true),
        lit("handsFree", {"agent"}, true),
        lit("locked", {"door"}, true),
    });
    Operator moved_ball("learned1", pre, eff, {});

    std::string text = serialize_operator(moved_ball, base.task.fluents);
    auto entries = parse_dump(text);
    REQUIRE(entries.size() == 1);
    auto reground = ground_actions(domain, problem, {entries[0].schema});
    REQUIRE(reground.operators.size() == 1);
    const Operator &loaded = reground.operators[0];
    CHECK(loaded.name == "learned1");
    CHECK(loaded.eff == eff);
    CHECK(loaded.static_fluents.empty());

    CHECK(applicable(loaded, base.task.initial));
    // With the clearing operator installed the task becomes plannable.
    std::vector<Operator> ops = base.task.operators;
    ops.push_back(loaded);
    StripsTask extended(base.task.fluents, ops, base.task.initial, base.task.goal);
    CHECK(owfs(extended, extended.initial).plan.has_value());
}

TEST_CASE("dump metadata survives serialization") {
    DomainSource domain = parse_domain(builtin_domain_text());
    ProblemSource problem = parse_problem(builtin_problem_text(1));
    GroundResult base = ground(domain, problem);

    DumpEntry meta;
    meta.episode = 412;
    meta.value = 0.9375;
    meta.precondition_count = 6;
    std::string text =
        serialize_dump({meta}, {base.task.operators[0]}, base.task.fluents);
    auto entries = parse_dump(text);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].episode == 412);
    CHECK(entries[0].value == doctest::Approx(0.9375));
    CHECK(entries[0].precondition_count == 6);
}

TEST_CASE("builtin texts match the files under domains/") {
#ifdef SPOTTER_SOURCE_DIR
    auto slurp = [](const std::string &path) {
        std::FILE *f = std::fopen(path.c_str(), "rb");
        REQUIRE(f != nullptr);
        std::string data;
        char buffer[4096];
        std::size_t n;
        while ((n = std::fread(buffer, 1, sizeof buffer, f)) > 0)
            data.append(buffer, n);
        std::fclose(f);
        return data;
    };
    const std::string root = SPOTTER_SOURCE_DIR;
    CHECK(builtin_domain_text() == slurp(root + "/domains/two_room.owpddl"));
    CHECK(builtin_problem_text(1) == slurp(root + "/domains/puzzle1.owpddl"));
    CHECK(builtin_problem_text(2) == slurp(root + "/domains/puzzle2.owpddl"));
    CHECK(builtin_problem_text(3) == slurp(root + "/domains/puzzle3.owpddl"));
#endif
}

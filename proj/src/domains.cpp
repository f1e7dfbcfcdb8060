#include "spotter/domains.h"

#include <stdexcept>

namespace spotter::owpddl {

namespace {

const std::string k_two_room = R"OWP(;; Two-room door-and-key domain for the gridworld puzzles. Navigation is
;; framed in terms of objects; the low-level movement actions do not
;; appear here. The :unknown clause lists predicates (or ground atoms)
;; whose values are no longer known after the action runs.
(define (domain two-room)
  (:requirements :strips :typing :open-world)
  (:types agent physobj - object
          carryable door goalsq - physobj
          key ball - carryable)
  (:predicates
    (inRoom ?a - agent ?o - physobj)
    (nextToFacing ?a - agent ?o - physobj)
    (holding ?a - agent ?o - carryable)
    (handsFree ?a - agent)
    (blocked ?d - door)
    (locked ?d - door)
    (open ?d - door)
    (atGoal ?a - agent))

  ;; Walking to an object changes what the agent faces and may cross the
  ;; goal square, so those predicates become unknown.
  (:action goToObj
    :parameters (?a - agent ?o - physobj)
    :precondition (and (not (holding ?a ?o))
                       (not (blocked ?o))
                       (inRoom ?a ?o))
    :effect (nextToFacing ?a ?o)
    :unknown (and (nextToFacing ?a ?x) (atGoal ?b)))

  (:action pickUp
    :parameters (?a - agent ?o - carryable)
    :precondition (and (nextToFacing ?a ?o) (handsFree ?a))
    :effect (and (holding ?a ?o)
                 (not (handsFree ?a))
                 (not (nextToFacing ?a ?o))))

  ;; Putting something down leaves unknown whether a door ends up blocked.
  (:action putDown
    :parameters (?a - agent ?o - carryable)
    :precondition (holding ?a ?o)
    :effect (and (not (holding ?a ?o))
                 (handsFree ?a)
                 (nextToFacing ?a ?o))
    :unknown (blocked ?d))

  (:action useKey
    :parameters (?a - agent ?d - door)
    :precondition (and (holding ?a key)
                       (nextToFacing ?a ?d)
                       (locked ?d))
    :effect (and (open ?d) (not (locked ?d))))

  ;; Reaching the goal square may cross between rooms.
  (:action goToGoal
    :parameters (?a - agent ?g - goalsq)
    :precondition (open door)
    :effect (atGoal ?a)
    :unknown (and (nextToFacing ?a ?x) (inRoom ?a ?x)))
)
)OWP";

const std::string k_puzzle1 = R"OWP(;; Puzzle 1: pick up the key and unlock the door.
(define (problem puzzle1)
  (:domain two-room)
  (:objects agent - agent
            key - key
            door - door)
  (:init (inRoom agent key)
         (inRoom agent door)
         (handsFree agent)
         (locked door))
  (:goal (open door)))
)OWP";

const std::string k_puzzle2 = R"OWP(;; Puzzle 2: as puzzle 1, but a ball blocks the door.
(define (problem puzzle2)
  (:domain two-room)
  (:objects agent - agent
            key - key
            ball - ball
            door - door)
  (:init (inRoom agent key)
         (inRoom agent ball)
         (inRoom agent door)
         (handsFree agent)
         (blocked door)
         (locked door))
  (:goal (open door)))
)OWP";

const std::string k_puzzle3 = R"OWP(;; Puzzle 3: as puzzle 2, but the goal is the far square in the other room.
(define (problem puzzle3)
  (:domain two-room)
  (:objects agent - agent
            key - key
            ball - ball
            door - door
            goal - goalsq)
  (:init (inRoom agent key)
         (inRoom agent ball)
         (inRoom agent door)
         (handsFree agent)
         (blocked door)
         (locked door))
  (:goal (atGoal agent)))
)OWP";

} // namespace

const std::string &builtin_domain_text() { return k_two_room; }

const std::string &builtin_problem_text(int puzzle) {
    switch (puzzle) {
    case 1: return k_puzzle1;
    case 2: return k_puzzle2;
    case 3: return k_puzzle3;
    default: throw std::invalid_argument("puzzle must be 1, 2 or 3");
    }
}

} // namespace spotter::owpddl

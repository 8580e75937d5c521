#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "abortd/parse.hpp"
#include "abortd/pddl.hpp"
#include "abortd/validate.hpp"

namespace abortd::kitchen {

// The kitchen domain. Two put schemas avoid conditional effects for the two
// hands; both surface as "put" in plans. transitive-at guards its recursive
// case with (not (= ?x ?y)) so self-containment cannot fabricate reachability.
inline const char* domain_text() {
  return R"PDDL((define (domain kitchen)
  (:requirements :strips :typing :equality :negative-preconditions
                 :disjunctive-preconditions :existential-preconditions
                 :universal-preconditions :derived-predicates)
  (:types
    locatable - object
    container utensil food disposable - locatable
    vessel storage trash_can - container
    clopenable notclopenablestorage - storage
    device fridge clopenablestorage - clopenable
    perishable nonperishable - food)
  (:predicates
    (at ?obj - locatable ?loc - locatable)
    (opened ?c - clopenable)
    (device-on ?d - device)
    (holding-left ?obj - locatable)
    (holding-right ?obj - locatable)
    (immobile ?obj - locatable))

  (:derived (robot-can-grasp)
    (and (not (exists (?obj - locatable) (holding-left ?obj)))
         (not (exists (?obj - locatable) (holding-right ?obj)))))

  (:derived (transitive-at ?x - locatable ?y - locatable)
    (or (at ?x ?y)
        (and (not (= ?x ?y))
             (exists (?mid - locatable)
               (and (at ?x ?mid) (transitive-at ?mid ?y))))))

  (:derived (safe-perishable ?p - perishable)
    (exists (?fr - fridge) (transitive-at ?p ?fr)))

  (:derived (safe-nonperishable ?n - nonperishable)
    (exists (?s - storage)
      (and (transitive-at ?n ?s)
           (forall (?fr - fridge) (not (= ?s ?fr))))))

  (:derived (safe-vessel ?v - vessel)
    (exists (?s - storage) (transitive-at ?v ?s)))

  (:derived (safe-utensil ?u - utensil)
    (exists (?s - storage) (transitive-at ?u ?s)))

  (:derived (safe-disposable ?d - disposable)
    (exists (?t - trash_can) (transitive-at ?d ?t)))

  (:derived (safe-device ?dev - device)
    (not (device-on ?dev)))

  (:derived (safe-clopenable ?c - clopenable)
    (not (opened ?c)))

  (:action close
    :parameters (?c - clopenable)
    :precondition (and (opened ?c))
    :effect (and (not (opened ?c))))

  (:action move
    :parameters (?gr - locatable ?src - container ?dest - storage)
    :precondition (and
      (robot-can-grasp)
      (not (immobile ?gr))
      (at ?gr ?src))
    :effect (and
      (not (at ?gr ?src))
      (at ?gr ?dest)))

  (:action turn-off
    :parameters (?d - device)
    :precondition (and (device-on ?d))
    :effect (and (not (device-on ?d))))

  (:action put-left
    :parameters (?obj - locatable ?dest - container)
    :precondition (and (holding-left ?obj))
    :effect (and (not (holding-left ?obj)) (at ?obj ?dest)))

  (:action put-right
    :parameters (?obj - locatable ?dest - container)
    :precondition (and (holding-right ?obj))
    :effect (and (not (holding-right ?obj)) (at ?obj ?dest)))
)
)PDDL";
}

inline const pddl::DomainDef& builtin_domain() {
  static const pddl::DomainDef dom = [] {
    pddl::DomainDef d = pddl::parse_domain(domain_text());
    auto diags = pddl::validate_domain(d);
    if (pddl::has_errors(diags))
      throw std::logic_error("embedded kitchen domain failed validation: " +
                             diags.front().render());
    for (auto& act : d.actions)
      if (act.name == "put-left" || act.name == "put-right")
        act.display_name = "put";
    return d;
  }();
  return dom;
}

// Per-type safety predicate. An object's rule is the most specific entry on
// its type chain; types without a rule (plain fixtures like counters and
// trash cans) contribute nothing to the goal.
struct SafetyRule {
  std::string type;
  std::string predicate;
};

inline const std::vector<SafetyRule>& safety_rules() {
  static const std::vector<SafetyRule> rules = {
      {"perishable", "safe-perishable"},
      {"nonperishable", "safe-nonperishable"},
      {"vessel", "safe-vessel"},
      {"utensil", "safe-utensil"},
      {"disposable", "safe-disposable"},
      {"device", "safe-device"},
      {"clopenable", "safe-clopenable"},
  };
  return rules;
}

inline const SafetyRule* rule_for_type(const std::string& type) {
  const pddl::TypeTree& types = builtin_domain().types;
  std::string cur = type;
  for (;;) {
    for (const auto& r : safety_rules())
      if (r.type == cur) return &r;
    const std::string* p = types.parent_of(cur);
    if (!p) return nullptr;
    cur = *p;
  }
}

struct SafeGoal {
  pddl::Formula goal;
  std::vector<std::string> skipped;  // objects with no safety rule
};

// Grounded conjunction: robot-can-grasp plus one safe-* atom per covered
// object, in declaration order.
inline SafeGoal safe_goal(const std::vector<pddl::TypedObject>& objects) {
  SafeGoal out;
  std::vector<pddl::Formula> conjuncts;
  conjuncts.push_back(
      pddl::Formula::make_atom(pddl::Atom{"robot-can-grasp", {}, {}}));
  for (const auto& obj : objects) {
    const SafetyRule* rule = rule_for_type(obj.type);
    if (!rule) {
      out.skipped.push_back(obj.name);
      continue;
    }
    conjuncts.push_back(pddl::Formula::make_atom(
        pddl::Atom{rule->predicate, {pddl::Term::constant(obj.name)}, {}}));
  }
  out.goal = pddl::Formula::make_and(std::move(conjuncts));
  return out;
}

}  // namespace abortd::kitchen

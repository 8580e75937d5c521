#pragma once

#include <vector>

#include "abortd/ground.hpp"

namespace abortd::axioms {

// State extended with all derivable atoms. Derived truth is a function of
// the base state; closures are recomputed per state, never carried across
// transitions.
struct DerivedClosure {
  const ground::GroundTask* task = nullptr;
  ground::State base;
  ground::Bits derived;

  bool truth(ground::FactId f) const {
    if (f < task->num_base()) return base.test(f);
    return derived.test(f - task->num_base());
  }
};

inline bool eval(const ground::Node& n, const DerivedClosure& c) {
  using K = ground::Node::Kind;
  switch (n.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Lit:
      return c.truth(n.fact) == n.positive;
    case K::And:
      for (const auto& ch : n.children)
        if (!eval(ch, c)) return false;
      return true;
    case K::Or:
      for (const auto& ch : n.children)
        if (eval(ch, c)) return true;
      return false;
  }
  return false;
}

// Least fixpoint, stratum by stratum. Within a stratum the evaluation is
// delta-driven: an axiom is re-checked only when one of its same-stratum
// positive body facts fires.
inline DerivedClosure closure(const ground::State& base,
                              const ground::GroundTask& task) {
  DerivedClosure c;
  c.task = &task;
  c.base = base;
  c.derived = ground::Bits(task.num_derived());

  const ground::FactId nb = task.num_base();
  std::vector<ground::FactId> queue;
  for (const auto& stratum : task.axioms_by_stratum) {
    queue.clear();
    for (int ai : stratum) {
      const auto& ax = task.axioms[ai];
      if (!c.derived.test(ax.head - nb) && eval(ax.body, c)) {
        c.derived.set(ax.head - nb);
        queue.push_back(ax.head);
      }
    }
    while (!queue.empty()) {
      ground::FactId f = queue.back();
      queue.pop_back();
      for (int ai : task.axiom_watchers[f - nb]) {
        const auto& ax = task.axioms[ai];
        if (!c.derived.test(ax.head - nb) && eval(ax.body, c)) {
          c.derived.set(ax.head - nb);
          queue.push_back(ax.head);
        }
      }
    }
  }
  return c;
}

}  // namespace abortd::axioms

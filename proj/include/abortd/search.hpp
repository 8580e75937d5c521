#pragma once

#include <cassert>
#include <chrono>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "abortd/closure.hpp"
#include "abortd/ground.hpp"

namespace abortd::search {

inline constexpr int kInfinity = std::numeric_limits<int>::max() / 4;

struct PlanStep {
  std::string schema;   // empty for externally supplied plans
  std::string display;
  std::vector<std::string> args;
};

struct Plan {
  std::vector<PlanStep> steps;
  size_t size() const { return steps.size(); }
};

struct Limits {
  long max_expansions = 100000;
  double max_seconds = 10.0;
};

struct Stats {
  long expansions = 0;
  long generated = 0;
  double seconds = 0.0;
};

enum class Status { Solved, Unsolvable, LimitExceeded };

struct Result {
  Status status = Status::Unsolvable;
  Plan plan;
  Stats stats;
};

inline bool applicable(const axioms::DerivedClosure& c,
                       const ground::GroundAction& a) {
  return axioms::eval(a.pre, c);
}

// Progression; calling this with a non-applicable action violates the
// contract.
inline ground::State apply(const ground::State& s,
                           const ground::GroundAction& a) {
  ground::State ns = s;
  for (ground::FactId f : a.del) ns.reset(f);
  for (ground::FactId f : a.add) ns.set(f);
  return ns;
}

namespace detail {

inline int saturating_add(int a, int b) {
  return std::min<long long>(static_cast<long long>(a) + b, kInfinity);
}

inline int formula_cost(const ground::Node& n, const std::vector<int>& cost) {
  using K = ground::Node::Kind;
  switch (n.kind) {
    case K::True:
      return 0;
    case K::False:
      return kInfinity;
    case K::Lit:
      return n.positive ? cost[n.fact] : 0;
    case K::And: {
      int sum = 0;
      for (const auto& c : n.children) {
        sum = saturating_add(sum, formula_cost(c, cost));
        if (sum >= kInfinity) return kInfinity;
      }
      return sum;
    }
    case K::Or: {
      int best = kInfinity;
      for (const auto& c : n.children)
        best = std::min(best, formula_cost(c, cost));
      return best;
    }
  }
  return kInfinity;
}

}  // namespace detail

// Additive delete-relaxation heuristic. Fact costs are the least fixpoint
// over actions (cost 1) and axioms (cost 0); conjunctions sum, disjunctions
// take the minimum, negative literals are free. Zero exactly when the goal
// already holds under the closure.
inline int h_add(const ground::GroundTask& task,
                 const axioms::DerivedClosure& c) {
  if (axioms::eval(task.goal, c)) return 0;

  std::vector<int> cost(task.facts.size(), kInfinity);
  for (ground::FactId f = 0; f < task.num_base(); ++f)
    if (c.base.test(f)) cost[f] = 0;

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& ax : task.axioms) {
      int bc = detail::formula_cost(ax.body, cost);
      if (bc < cost[ax.head]) {
        cost[ax.head] = bc;
        changed = true;
      }
    }
    for (const auto& a : task.actions) {
      int pc = detail::formula_cost(a.pre, cost);
      if (pc >= kInfinity) continue;
      for (ground::FactId f : a.add) {
        if (pc + 1 < cost[f]) {
          cost[f] = pc + 1;
          changed = true;
        }
      }
    }
  }

  int g = detail::formula_cost(task.goal, cost);
  if (g >= kInfinity) return kInfinity;
  return std::max(g, 1);  // goal not yet satisfied, so at least one step
}

namespace detail {

struct NodeRec {
  ground::State state;
  int parent = -1;
  int action = -1;
};

inline Plan extract_plan(const std::vector<NodeRec>& nodes,
                         const ground::GroundTask& task, int idx) {
  Plan plan;
  while (nodes[idx].parent != -1) {
    const auto& a = task.actions[nodes[idx].action];
    plan.steps.push_back({a.schema, a.display, a.args});
    idx = nodes[idx].parent;
  }
  std::reverse(plan.steps.begin(), plan.steps.end());
  return plan;
}

}  // namespace detail

// Greedy best-first search ordered by h_add alone; ties break FIFO. States
// are deduplicated on the base-fact set.
inline Result gbfs(const ground::GroundTask& task, const Limits& limits = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  Result res;
  std::vector<detail::NodeRec> nodes;
  std::unordered_set<ground::State, ground::StateHash> seen;
  using Entry = std::tuple<int, long, int>;  // (h, fifo seq, node index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  long seq = 0;

  {
    axioms::DerivedClosure c = axioms::closure(task.init, task);
    int h = h_add(task, c);
    nodes.push_back({task.init, -1, -1});
    seen.insert(task.init);
    if (h < kInfinity) open.emplace(h, seq++, 0);
  }

  while (!open.empty()) {
    if (res.stats.expansions >= limits.max_expansions ||
        elapsed() > limits.max_seconds) {
      res.status = Status::LimitExceeded;
      res.stats.seconds = elapsed();
      return res;
    }
    auto [h, s, idx] = open.top();
    open.pop();
    axioms::DerivedClosure c = axioms::closure(nodes[idx].state, task);
    if (axioms::eval(task.goal, c)) {
      res.status = Status::Solved;
      res.plan = detail::extract_plan(nodes, task, idx);
      res.stats.seconds = elapsed();
      return res;
    }
    ++res.stats.expansions;
    for (size_t ai = 0; ai < task.actions.size(); ++ai) {
      if (!applicable(c, task.actions[ai])) continue;
      ground::State succ = apply(nodes[idx].state, task.actions[ai]);
      if (!seen.insert(succ).second) continue;
      axioms::DerivedClosure sc = axioms::closure(succ, task);
      int sh = h_add(task, sc);
      ++res.stats.generated;
      nodes.push_back({std::move(succ), idx, static_cast<int>(ai)});
      if (sh < kInfinity)
        open.emplace(sh, seq++, static_cast<int>(nodes.size() - 1));
    }
  }

  res.status = Status::Unsolvable;
  res.stats.seconds = elapsed();
  return res;
}

struct Verdict {
  bool valid = false;
  size_t failed_step = 0;  // steps.size() means the goal check failed
  std::string reason;
};

// Replays a plan from init, recomputing the closure before every step.
// Steps resolve by schema name when present, otherwise by display name;
// among matching ground actions the first applicable one fires.
inline Verdict validate_plan(const ground::GroundTask& task, const Plan& plan) {
  ground::State s = task.init;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    axioms::DerivedClosure c = axioms::closure(s, task);
    const ground::GroundAction* chosen = nullptr;
    bool name_matched = false;
    for (const auto& a : task.actions) {
      bool match = step.schema.empty()
                       ? a.display == step.display && a.args == step.args
                       : a.schema == step.schema && a.args == step.args;
      if (!match) continue;
      name_matched = true;
      if (axioms::eval(a.pre, c)) {
        chosen = &a;
        break;
      }
    }
    if (!chosen)
      return {false, i,
              name_matched ? "precondition not satisfied"
                           : "no matching ground action"};
    s = apply(s, *chosen);
  }
  axioms::DerivedClosure c = axioms::closure(s, task);
  if (!axioms::eval(task.goal, c))
    return {false, plan.steps.size(), "goal not satisfied"};
  return {true, 0, ""};
}

// Exhaustive breadth-first oracle; returns a shortest plan within the depth
// bound. Test-sized tasks only.
inline std::optional<Plan> bfs_oracle(const ground::GroundTask& task,
                                      int depth_bound) {
  assert(task.objects.size() <= 20 && "bfs_oracle is for small tasks");
  std::vector<detail::NodeRec> nodes;
  std::vector<int> depth;
  std::unordered_set<ground::State, ground::StateHash> seen;
  nodes.push_back({task.init, -1, -1});
  depth.push_back(0);
  seen.insert(task.init);

  for (size_t head = 0; head < nodes.size(); ++head) {
    axioms::DerivedClosure c = axioms::closure(nodes[head].state, task);
    if (axioms::eval(task.goal, c))
      return detail::extract_plan(nodes, task, static_cast<int>(head));
    if (depth[head] == depth_bound) continue;
    for (size_t ai = 0; ai < task.actions.size(); ++ai) {
      if (!applicable(c, task.actions[ai])) continue;
      ground::State succ = apply(nodes[head].state, task.actions[ai]);
      if (!seen.insert(succ).second) continue;
      nodes.push_back({std::move(succ), static_cast<int>(head),
                       static_cast<int>(ai)});
      depth.push_back(depth[head] + 1);
    }
  }
  return std::nullopt;
}

}  // namespace abortd::search

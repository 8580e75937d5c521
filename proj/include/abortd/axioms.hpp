#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "abortd/pddl.hpp"

namespace abortd::axioms {

class NegativeCycleError : public std::runtime_error {
 public:
  NegativeCycleError(std::string msg, std::vector<std::string> cycle)
      : std::runtime_error(std::move(msg)), cycle(std::move(cycle)) {}
  std::vector<std::string> cycle;
};

// PDDL 2.2 axiom stratification. Strata are the strongly connected
// components of the derived-predicate dependency graph, emitted in
// topological order with a lexicographic tie-break; a negative dependency
// inside a component is unstratifiable.
struct Stratification {
  std::vector<std::vector<std::string>> strata;  // predicate groups in order
  std::map<std::string, int> level;

  int level_of(const std::string& pred) const { return level.at(pred); }
};

namespace detail {

// Collects derived predicates referenced by `f`; `polarity` flips under
// negation, so an atom under an odd number of nots is a negative dependency.
inline void collect_deps(const pddl::Formula& f,
                         const std::set<std::string>& derived, bool positive,
                         std::set<std::string>& pos, std::set<std::string>& neg) {
  switch (f.kind) {
    case pddl::Formula::Kind::Atom:
      if (derived.count(f.atom.pred)) (positive ? pos : neg).insert(f.atom.pred);
      return;
    case pddl::Formula::Kind::Equal:
      return;
    case pddl::Formula::Kind::Not:
      collect_deps(f.children[0], derived, !positive, pos, neg);
      return;
    default:
      for (const auto& c : f.children)
        collect_deps(c, derived, positive, pos, neg);
      return;
  }
}

}  // namespace detail

inline Stratification stratify(const pddl::DomainDef& dom) {
  const std::set<std::string> derived = dom.derived_names();
  if (derived.empty()) return {};

  // dep -> heads that use it, with edge sign.
  std::map<std::string, std::set<std::string>> pos_edges, neg_edges;
  for (const auto& ax : dom.derived) {
    std::set<std::string> pos, neg;
    detail::collect_deps(ax.body, derived, true, pos, neg);
    for (const auto& q : pos) pos_edges[q].insert(ax.head);
    for (const auto& q : neg) neg_edges[q].insert(ax.head);
  }

  // Strongly connected components via iterative Tarjan over sorted names.
  std::vector<std::string> names(derived.begin(), derived.end());
  std::map<std::string, int> id;
  for (size_t i = 0; i < names.size(); ++i) id[names[i]] = static_cast<int>(i);
  const int n = static_cast<int>(names.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& [q, heads] : pos_edges)
    for (const auto& p : heads) adj[id[q]].push_back(id[p]);
  for (const auto& [q, heads] : neg_edges)
    for (const auto& p : heads) adj[id[q]].push_back(id[p]);
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  struct Frame {
    int v;
    size_t edge;
  };
  for (int start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    std::vector<Frame> call{{start, 0}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < adj[f.v].size()) {
        int w = adj[f.v][f.edge++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> c;
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = static_cast<int>(comps.size());
            c.push_back(w);
            if (w == f.v) break;
          }
          comps.push_back(std::move(c));
        }
        int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }

  // Negative edge within a component means p depends negatively on itself
  // through the cycle.
  for (const auto& [q, heads] : neg_edges) {
    for (const auto& p : heads) {
      if (comp[id.at(q)] == comp[id.at(p)]) {
        std::vector<std::string> cycle;
        for (int v : comps[comp[id.at(q)]]) cycle.push_back(names[v]);
        std::sort(cycle.begin(), cycle.end());
        std::string msg = "negative cycle through derived predicates:";
        for (const auto& c : cycle) msg += " " + c;
        throw NegativeCycleError(msg, cycle);
      }
    }
  }

  // Minimal levels over the condensation: positive dependencies may share a
  // stratum, negative ones force a strictly higher one. Components with no
  // interdependency land in the same stratum, so a negation-free program is
  // a single stratum 0.
  const int nc = static_cast<int>(comps.size());
  std::vector<std::set<int>> cadj(nc);
  std::vector<int> indeg(nc, 0);
  std::map<std::pair<int, int>, bool> edge_negative;
  auto mark_edge = [&](const std::string& q, const std::string& p, bool neg) {
    int cq = comp[id.at(q)], cp = comp[id.at(p)];
    if (cq == cp) return;
    if (cadj[cq].insert(cp).second) ++indeg[cp];
    if (neg) edge_negative[{cq, cp}] = true;
  };
  for (const auto& [q, heads] : pos_edges)
    for (const auto& p : heads) mark_edge(q, p, false);
  for (const auto& [q, heads] : neg_edges)
    for (const auto& p : heads) mark_edge(q, p, true);

  std::vector<int> level(nc, 0);
  std::vector<int> order;
  {
    std::vector<int> deg = indeg;
    std::set<int> ready;
    for (int c = 0; c < nc; ++c)
      if (deg[c] == 0) ready.insert(c);
    while (!ready.empty()) {
      int c = *ready.begin();
      ready.erase(ready.begin());
      order.push_back(c);
      for (int w : cadj[c]) {
        level[w] = std::max(level[w],
                            level[c] + (edge_negative.count({c, w}) ? 1 : 0));
        if (--deg[w] == 0) ready.insert(w);
      }
    }
  }

  Stratification out;
  int max_level = 0;
  for (int c = 0; c < nc; ++c) max_level = std::max(max_level, level[c]);
  out.strata.assign(max_level + 1, {});
  for (int c = 0; c < nc; ++c)
    for (int v : comps[c]) out.strata[level[c]].push_back(names[v]);
  for (int s = 0; s <= max_level; ++s) {
    std::sort(out.strata[s].begin(), out.strata[s].end());
    for (const auto& p : out.strata[s]) out.level[p] = s;
  }
  return out;
}

}  // namespace abortd::axioms

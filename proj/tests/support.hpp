// Shared test fixtures and independent oracles. Everything here stays
// implementation-agnostic: the oracles recompute expected results from first
// principles so they can disagree with the library under test.
#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "abortd/closure.hpp"
#include "abortd/ground.hpp"
#include "abortd/kitchen.hpp"
#include "abortd/ontology.hpp"
#include "abortd/pddl.hpp"
#include "abortd/search.hpp"
#include "abortd/snapshot.hpp"
#include "abortd/world.hpp"

namespace testsupport {

inline std::string data_dir() { return ABORTD_DATA_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline const abortd::ontology::OntologySets& cached_kb() {
  static const abortd::ontology::OntologySets kb =
      abortd::ontology::read_cache(data_dir() + "/ontology_cache.json");
  return kb;
}

inline abortd::world::MapResult map_fixture(const std::string& name) {
  return abortd::world::map_world(
      abortd::world::parse_snapshot_text(read_file(data_dir() + "/" + name)),
      cached_kb());
}

inline abortd::ground::GroundTask fixture_task(const std::string& name,
                                               bool pruned = true) {
  auto mapped = map_fixture(name);
  auto task =
      abortd::ground::ground(abortd::kitchen::builtin_domain(), mapped.problem);
  return pruned ? abortd::ground::prune(task) : task;
}

// ---------------------------------------------------------------------------
// Oracles

// Objects of a subtype, walking the parent chains directly.
inline std::vector<std::string> subtype_objects_oracle(
    const abortd::pddl::DomainDef& dom, const abortd::pddl::ProblemDef& prob,
    const std::string& type) {
  std::vector<std::string> out;
  for (const auto& o : prob.objects) {
    std::string cur = o.type;
    for (;;) {
      if (cur == type) {
        out.push_back(o.name);
        break;
      }
      if (cur == abortd::pddl::kRootType) break;
      const std::string* p = dom.types.parent_of(cur);
      if (!p) break;
      cur = *p;
    }
  }
  return out;
}

// Naive closure: per stratum, re-scan every axiom until nothing changes.
inline abortd::ground::Bits naive_closure_oracle(
    const abortd::ground::State& base, const abortd::ground::GroundTask& task) {
  abortd::axioms::DerivedClosure c;
  c.task = &task;
  c.base = base;
  c.derived = abortd::ground::Bits(task.num_derived());
  const auto nb = task.num_base();
  for (const auto& stratum : task.axioms_by_stratum) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int ai : stratum) {
        const auto& ax = task.axioms[ai];
        if (!c.derived.test(ax.head - nb) && abortd::axioms::eval(ax.body, c)) {
          c.derived.set(ax.head - nb);
          changed = true;
        }
      }
    }
  }
  return c.derived;
}

// transitive-at ground truth from graph reachability over the at-edges:
// off-diagonal pairs need a directed path, the diagonal needs a literal
// self-edge.
inline std::map<std::pair<std::string, std::string>, bool>
transitive_at_oracle(const abortd::ground::State& base,
                     const abortd::ground::GroundTask& task) {
  std::map<std::string, std::vector<std::string>> edges;
  std::set<std::pair<std::string, std::string>> edge_set;
  for (abortd::ground::FactId f = 0; f < task.num_base(); ++f) {
    if (!base.test(f)) continue;
    const auto& atom = task.facts.atom(f);
    if (atom.pred != "at") continue;
    edges[atom.args[0]].push_back(atom.args[1]);
    edge_set.insert({atom.args[0], atom.args[1]});
  }
  auto reach = [&](const std::string& from, const std::string& to) {
    std::set<std::string> seen;
    std::queue<std::string> q;
    for (const auto& n : edges[from]) {
      if (seen.insert(n).second) q.push(n);
    }
    while (!q.empty()) {
      std::string cur = q.front();
      q.pop();
      if (cur == to) return true;
      for (const auto& n : edges[cur])
        if (seen.insert(n).second) q.push(n);
    }
    return seen.count(to) > 0;
  };
  std::map<std::pair<std::string, std::string>, bool> out;
  for (const auto& a : task.objects) {
    for (const auto& b : task.objects) {
      bool expected = a == b ? edge_set.count({a, a}) > 0 : reach(a, b);
      out[{a, b}] = expected;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random kitchen worlds (problems over the built-in domain)

struct RandomWorldOptions {
  int max_items = 5;
  bool allow_immobile_items = true;
  bool allow_floating_items = true;
};

inline abortd::pddl::ProblemDef random_kitchen_problem(
    std::mt19937& rng, const RandomWorldOptions& opt = {}) {
  using abortd::pddl::GroundAtom;
  abortd::pddl::ProblemDef prob;
  prob.name = "random-world";
  prob.domain_name = "kitchen";

  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto chance = [&](double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
  };

  struct Fixture {
    const char* name;
    const char* type;
    bool openable;
    bool device;
  };
  static const Fixture kFixtures[] = {
      {"fridge", "fridge", true, false},
      {"counter", "notclopenablestorage", false, false},
      {"cabinet", "clopenablestorage", true, false},
      {"bin", "trash_can", false, false},
      {"oven", "device", true, true},
  };
  int n_fixtures = 1 + pick(3);
  std::vector<int> fixture_ids;
  while (static_cast<int>(fixture_ids.size()) < n_fixtures) {
    int f = pick(5);
    if (std::find(fixture_ids.begin(), fixture_ids.end(), f) ==
        fixture_ids.end())
      fixture_ids.push_back(f);
  }
  for (int f : fixture_ids) {
    prob.objects.push_back({kFixtures[f].name, kFixtures[f].type, {}});
    prob.init.push_back(GroundAtom{"immobile", {kFixtures[f].name}});
    if (kFixtures[f].openable && chance(0.4))
      prob.init.push_back(GroundAtom{"opened", {kFixtures[f].name}});
    if (kFixtures[f].device && chance(0.4))
      prob.init.push_back(GroundAtom{"device-on", {kFixtures[f].name}});
  }

  static const char* kItemTypes[] = {"vessel", "utensil", "perishable",
                                     "nonperishable", "disposable"};
  int n_items = pick(opt.max_items + 1);
  bool left_free = true, right_free = true;
  std::vector<std::string> placed_vessels;
  for (int i = 0; i < n_items; ++i) {
    std::string name = "item" + std::to_string(i);
    std::string type = kItemTypes[pick(5)];
    prob.objects.push_back({name, type, {}});
    if (opt.allow_immobile_items && chance(0.05)) {
      prob.init.push_back(GroundAtom{"immobile", {name}});
    }
    int placement = pick(10);
    if (placement == 0 && left_free) {
      prob.init.push_back(GroundAtom{"holding-left", {name}});
      left_free = false;
    } else if (placement == 1 && right_free) {
      prob.init.push_back(GroundAtom{"holding-right", {name}});
      right_free = false;
    } else if (placement == 2 && !placed_vessels.empty()) {
      prob.init.push_back(
          GroundAtom{"at", {name, placed_vessels[pick(static_cast<int>(
                                      placed_vessels.size()))]}});
    } else if (placement == 3 && opt.allow_floating_items) {
      // no at-atom: the item is nowhere
    } else {
      const char* fixture = kFixtures[fixture_ids[pick(n_fixtures)]].name;
      prob.init.push_back(GroundAtom{"at", {name, fixture}});
      if (type == std::string("vessel")) placed_vessels.push_back(name);
    }
  }

  std::sort(prob.init.begin(), prob.init.end());
  prob.init.erase(std::unique(prob.init.begin(), prob.init.end()),
                  prob.init.end());
  prob.goal = abortd::kitchen::safe_goal(prob.objects).goal;
  return prob;
}

// Random base states over an existing task's fact universe (not necessarily
// consistent worlds; closure must handle anything).
inline abortd::ground::State random_state(std::mt19937& rng,
                                          const abortd::ground::GroundTask& task,
                                          double density = 0.12) {
  abortd::ground::State s(task.num_base());
  std::uniform_real_distribution<double> dist(0, 1);
  for (abortd::ground::FactId f = 0; f < task.num_base(); ++f)
    if (dist(rng) < density) s.set(f);
  return s;
}

// ---------------------------------------------------------------------------
// Random fuzz domains for parser round-trips

inline abortd::pddl::DomainDef random_fuzz_domain(std::mt19937& rng) {
  namespace pddl = abortd::pddl;
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto chance = [&](double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
  };

  pddl::DomainDef dom;
  dom.name = "fuzz" + std::to_string(pick(1000));
  dom.requirements = {":typing", ":negative-preconditions",
                      ":disjunctive-preconditions",
                      ":existential-preconditions", ":derived-predicates"};

  int n_types = 2 + pick(5);
  std::vector<std::string> types{"object"};
  for (int i = 0; i < n_types; ++i) {
    std::string name = "t" + std::to_string(i);
    dom.types.add(name, types[pick(static_cast<int>(types.size()))]);
    types.push_back(name);
  }

  int n_preds = 1 + pick(4);
  for (int i = 0; i < n_preds; ++i) {
    pddl::PredicateDecl decl;
    decl.name = "p" + std::to_string(i);
    int arity = pick(4);
    for (int a = 0; a < arity; ++a)
      decl.params.push_back({"x" + std::to_string(a),
                             types[pick(static_cast<int>(types.size()))],
                             {}});
    dom.predicates.push_back(std::move(decl));
  }

  int fresh_var = 0;
  // Atom over a random base predicate; parameters with no matching in-scope
  // variable get an enclosing Exists with exactly-typed fresh variables.
  auto make_atom = [&](const std::vector<pddl::TypedVar>& scope)
      -> pddl::Formula {
    const pddl::PredicateDecl& decl = dom.predicates[pick(n_preds)];
    std::vector<pddl::TypedVar> fresh;
    pddl::Atom atom;
    atom.pred = decl.name;
    for (const auto& param : decl.params) {
      std::vector<const pddl::TypedVar*> candidates;
      for (const auto& v : scope)
        if (v.type == param.type) candidates.push_back(&v);
      for (const auto& v : fresh)
        if (v.type == param.type) candidates.push_back(&v);
      if (!candidates.empty() && chance(0.7)) {
        atom.args.push_back(pddl::Term::var(
            candidates[pick(static_cast<int>(candidates.size()))]->name));
      } else {
        pddl::TypedVar v{"f" + std::to_string(fresh_var++), param.type, {}};
        atom.args.push_back(pddl::Term::var(v.name));
        fresh.push_back(std::move(v));
      }
    }
    pddl::Formula f = pddl::Formula::make_atom(std::move(atom));
    if (!fresh.empty())
      f = pddl::Formula::quantified(pddl::Formula::Kind::Exists,
                                    std::move(fresh), std::move(f));
    return f;
  };

  std::function<pddl::Formula(const std::vector<pddl::TypedVar>&, int)> gen =
      [&](const std::vector<pddl::TypedVar>& scope, int depth) -> pddl::Formula {
    if (depth == 0 || chance(0.4)) return make_atom(scope);
    switch (pick(3)) {
      case 0:
        return pddl::Formula::make_not(gen(scope, depth - 1));
      case 1: {
        std::vector<pddl::Formula> cs;
        int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) cs.push_back(gen(scope, depth - 1));
        return pddl::Formula::make_and(std::move(cs));
      }
      default: {
        std::vector<pddl::Formula> cs;
        int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) cs.push_back(gen(scope, depth - 1));
        return pddl::Formula::make_or(std::move(cs));
      }
    }
  };

  int n_axioms = 1 + pick(3);
  for (int i = 0; i < n_axioms; ++i) {
    pddl::AxiomDef ax;
    ax.head = "d" + std::to_string(i);
    int arity = pick(3);
    for (int a = 0; a < arity; ++a)
      ax.params.push_back({"y" + std::to_string(a),
                           types[pick(static_cast<int>(types.size()))],
                           {}});
    ax.body = gen(ax.params, 2);
    dom.derived.push_back(std::move(ax));
  }

  int n_actions = 1 + pick(3);
  for (int i = 0; i < n_actions; ++i) {
    pddl::ActionSchema act;
    act.name = "a" + std::to_string(i);
    act.display_name = act.name;
    int arity = pick(4);
    for (int a = 0; a < arity; ++a)
      act.params.push_back({"z" + std::to_string(a),
                            types[pick(static_cast<int>(types.size()))],
                            {}});
    act.precondition = gen(act.params, 2);
    // Effects draw from base predicates fully instantiable by parameters.
    for (const auto& decl : dom.predicates) {
      if (!chance(0.5)) continue;
      pddl::Atom atom;
      atom.pred = decl.name;
      bool ok = true;
      for (const auto& param : decl.params) {
        std::vector<const pddl::TypedVar*> candidates;
        for (const auto& v : act.params)
          if (v.type == param.type) candidates.push_back(&v);
        if (candidates.empty()) {
          ok = false;
          break;
        }
        atom.args.push_back(pddl::Term::var(
            candidates[pick(static_cast<int>(candidates.size()))]->name));
      }
      if (ok) act.effects.push_back({chance(0.3), std::move(atom)});
    }
    dom.actions.push_back(std::move(act));
  }
  return dom;
}

// ---------------------------------------------------------------------------
// CLI runner

struct CliResult {
  int exit_code = -1;
  std::string out;
};

inline CliResult run_cli(const std::string& binary, const std::string& args,
                         bool keep_stderr = false) {
  std::string cmd =
      binary + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WEXITSTATUS(status);
  return res;
}

// Parses "('put', ['a', 'b'])," lines into steps of (name, args).
inline std::vector<std::pair<std::string, std::vector<std::string>>>
parse_tuple_lines(const std::string& text) {
  std::vector<std::pair<std::string, std::vector<std::string>>> steps;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> quoted;
    size_t pos = 0;
    while ((pos = line.find('\'', pos)) != std::string::npos) {
      size_t end = line.find('\'', pos + 1);
      if (end == std::string::npos) break;
      quoted.push_back(line.substr(pos + 1, end - pos - 1));
      pos = end + 1;
    }
    if (quoted.empty()) continue;
    steps.push_back({quoted[0], {quoted.begin() + 1, quoted.end()}});
  }
  return steps;
}

}  // namespace testsupport

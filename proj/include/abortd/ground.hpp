#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "abortd/axioms.hpp"
#include "abortd/pddl.hpp"

namespace abortd::ground {

using FactId = int32_t;
inline constexpr FactId kNoFact = -1;

// Fixed-width bit set; doubles as the search state over base facts.
class Bits {
 public:
  Bits() = default;
  explicit Bits(int n) : n_(n), w_((n + 63) / 64, 0) {}

  int size() const { return n_; }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { w_[i >> 6] |= uint64_t{1} << (i & 63); }
  void reset(int i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  void operator|=(const Bits& o) {
    for (size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
  }

  bool operator==(const Bits& o) const = default;

  size_t hash() const {
    size_t h = 1469598103934665603ull;
    for (uint64_t w : w_) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return h;
  }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (int i = 0; i < n_; ++i)
      if (test(i)) fn(i);
  }

 private:
  int n_ = 0;
  std::vector<uint64_t> w_;
};

using State = Bits;

struct StateHash {
  size_t operator()(const State& s) const { return s.hash(); }
};

// Dense atom <-> id bijection. Base facts occupy [0, num_base), derived
// facts [num_base, size()); each predicate owns one contiguous range.
class FactTable {
 public:
  FactId intern(const pddl::GroundAtom& a) {
    auto [it, inserted] = index_.emplace(a, static_cast<FactId>(atoms_.size()));
    if (inserted) atoms_.push_back(a);
    return it->second;
  }

  FactId lookup(const pddl::GroundAtom& a) const {
    auto it = index_.find(a);
    return it == index_.end() ? kNoFact : it->second;
  }

  const pddl::GroundAtom& atom(FactId f) const { return atoms_[f]; }
  FactId size() const { return static_cast<FactId>(atoms_.size()); }

  FactId num_base = 0;
  bool is_derived(FactId f) const { return f >= num_base; }

  std::map<std::string, std::pair<FactId, FactId>> pred_range;

  std::string render(FactId f) const {
    const auto& a = atoms_[f];
    std::string s = "(" + a.pred;
    for (const auto& arg : a.args) s += " " + arg;
    return s + ")";
  }

 private:
  std::vector<pddl::GroundAtom> atoms_;
  std::map<pddl::GroundAtom, FactId> index_;
};

// Compiled NNF formula over fact ids; quantifiers and equality are gone by
// construction.
struct Node {
  enum class Kind { True, False, Lit, And, Or };
  Kind kind = Kind::True;
  FactId fact = kNoFact;
  bool positive = true;
  std::vector<Node> children;

  static Node make(bool b) {
    Node n;
    n.kind = b ? Kind::True : Kind::False;
    return n;
  }
  static Node lit(FactId f, bool positive) {
    Node n;
    n.kind = Kind::Lit;
    n.fact = f;
    n.positive = positive;
    return n;
  }
  static Node join(Kind k, std::vector<Node> cs) {
    const bool is_and = k == Kind::And;
    std::vector<Node> kept;
    for (auto& c : cs) {
      if (c.kind == Kind::True) {
        if (!is_and) return make(true);
        continue;
      }
      if (c.kind == Kind::False) {
        if (is_and) return make(false);
        continue;
      }
      kept.push_back(std::move(c));
    }
    if (kept.empty()) return make(is_and);
    if (kept.size() == 1) return std::move(kept.front());
    Node n;
    n.kind = k;
    n.children = std::move(kept);
    return n;
  }
};

struct GroundAction {
  std::string schema;
  std::string display;
  std::vector<std::string> args;
  Node pre;
  std::vector<FactId> add, del;

  std::string label() const {
    std::string s = schema + "(";
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) s += ",";
      s += args[i];
    }
    return s + ")";
  }
};

struct GroundAxiom {
  FactId head = kNoFact;
  Node body;
};

struct GroundTask {
  std::string domain_name, problem_name;
  FactTable facts;
  std::vector<std::string> objects;                 // declaration order
  std::map<std::string, std::string> object_type;   // name -> type
  State init;
  Node goal;
  std::vector<GroundAction> actions;
  std::vector<GroundAxiom> axioms;
  axioms::Stratification strat;
  std::vector<std::vector<int>> axioms_by_stratum;  // axiom indices per level
  // Same-stratum positive body facts -> axioms to re-check when the fact
  // fires during fixpoint computation. Indexed by (fact - num_base).
  std::vector<std::vector<int>> axiom_watchers;

  FactId num_base() const { return facts.num_base; }
  FactId num_derived() const { return facts.size() - facts.num_base; }
};

namespace detail {

using Binding = std::map<std::string, std::string>;

inline const std::string& resolve(const pddl::Term& t, const Binding& b) {
  if (t.kind == pddl::Term::Kind::Constant) return t.name;
  return b.at(t.name);
}

// Objects whose declared type is a subtype of `type`, in declaration order.
inline std::vector<std::string> objects_of_type(
    const pddl::TypeTree& types, const std::vector<std::string>& objects,
    const std::map<std::string, std::string>& object_type,
    const std::string& type) {
  std::vector<std::string> out;
  for (const auto& o : objects)
    if (types.is_subtype(object_type.at(o), type)) out.push_back(o);
  return out;
}

struct Compiler {
  const pddl::TypeTree& types;
  const std::vector<std::string>& objects;
  const std::map<std::string, std::string>& object_type;
  const FactTable& facts;

  Node compile(const pddl::Formula& f, Binding& b, bool negate) const {
    using K = pddl::Formula::Kind;
    switch (f.kind) {
      case K::Atom: {
        pddl::GroundAtom ga;
        ga.pred = f.atom.pred;
        for (const auto& t : f.atom.args) ga.args.push_back(resolve(t, b));
        FactId id = facts.lookup(ga);
        if (id == kNoFact) return Node::make(negate);  // out-of-type binding
        return Node::lit(id, !negate);
      }
      case K::Equal: {
        bool eq = resolve(f.lhs, b) == resolve(f.rhs, b);
        return Node::make(eq != negate);
      }
      case K::Not:
        return compile(f.children[0], b, !negate);
      case K::And:
      case K::Or: {
        bool make_and = (f.kind == K::And) != negate;
        std::vector<Node> cs;
        cs.reserve(f.children.size());
        for (const auto& c : f.children) {
          Node n = compile(c, b, negate);
          // Early exit on a dominating constant.
          if (make_and && n.kind == Node::Kind::False) return Node::make(false);
          if (!make_and && n.kind == Node::Kind::True) return Node::make(true);
          cs.push_back(std::move(n));
        }
        return Node::join(make_and ? Node::Kind::And : Node::Kind::Or,
                          std::move(cs));
      }
      case K::Exists:
      case K::Forall: {
        bool expand_or = (f.kind == K::Exists) != negate;
        std::vector<Node> cs;
        expand(f, 0, b, negate, expand_or, cs);
        return Node::join(expand_or ? Node::Kind::Or : Node::Kind::And,
                          std::move(cs));
      }
    }
    return Node::make(false);
  }

  void expand(const pddl::Formula& f, size_t var_idx, Binding& b, bool negate,
              bool expand_or, std::vector<Node>& out) const {
    if (var_idx == f.vars.size()) {
      out.push_back(compile(f.children[0], b, negate));
      return;
    }
    const auto& v = f.vars[var_idx];
    for (const auto& o : objects_of_type(types, objects, object_type, v.type)) {
      auto saved = b.find(v.name) == b.end()
                       ? std::optional<std::string>{}
                       : std::optional<std::string>{b[v.name]};
      b[v.name] = o;
      expand(f, var_idx + 1, b, negate, expand_or, out);
      if (saved)
        b[v.name] = *saved;
      else
        b.erase(v.name);
    }
  }
};

inline void index_strata(GroundTask& task) {
  task.axioms_by_stratum.assign(task.strat.strata.size(), {});
  for (size_t i = 0; i < task.axioms.size(); ++i) {
    const auto& pred = task.facts.atom(task.axioms[i].head).pred;
    task.axioms_by_stratum[task.strat.level_of(pred)].push_back(
        static_cast<int>(i));
  }
  // Watcher lists: positive derived literals in the body belonging to the
  // head's own stratum.
  task.axiom_watchers.assign(task.num_derived(), {});
  for (size_t i = 0; i < task.axioms.size(); ++i) {
    const auto& head_pred = task.facts.atom(task.axioms[i].head).pred;
    int level = task.strat.level_of(head_pred);
    std::vector<const Node*> stack{&task.axioms[i].body};
    while (!stack.empty()) {
      const Node* n = stack.back();
      stack.pop_back();
      if (n->kind == Node::Kind::Lit) {
        if (n->positive && task.facts.is_derived(n->fact) &&
            task.strat.level_of(task.facts.atom(n->fact).pred) == level)
          task.axiom_watchers[n->fact - task.num_base()].push_back(
              static_cast<int>(i));
      }
      for (const auto& c : n->children) stack.push_back(&c);
    }
  }
}

}  // namespace detail

// Compiles the lifted task into propositional form. Quantifiers expand over
// the declared objects; an empty domain turns Exists into false and Forall
// into true. Instantiations whose compiled precondition or body is constant
// false are dropped.
inline GroundTask ground(const pddl::DomainDef& dom,
                         const pddl::ProblemDef& prob) {
  GroundTask task;
  task.domain_name = dom.name;
  task.problem_name = prob.name;
  for (const auto& o : prob.objects) {
    task.objects.push_back(o.name);
    task.object_type[o.name] = o.type;
  }

  auto objs_of = [&](const std::string& type) {
    return detail::objects_of_type(dom.types, task.objects, task.object_type,
                                   type);
  };

  // Fact table: all type-consistent instantiations, base predicates first.
  auto enumerate = [&](const pddl::PredicateDecl& decl) {
    const size_t arity = decl.params.size();
    std::vector<std::vector<std::string>> pools;
    for (const auto& p : decl.params) pools.push_back(objs_of(p.type));
    pddl::GroundAtom atom;
    atom.pred = decl.name;
    atom.args.assign(arity, "");
    FactId begin = task.facts.size();
    std::vector<size_t> idx(arity, 0);
    for (;;) {
      bool done = false;
      for (size_t i = 0; i < arity; ++i) {
        if (pools[i].empty()) {
          done = true;
          break;
        }
        atom.args[i] = pools[i][idx[i]];
      }
      if (done) break;
      task.facts.intern(atom);
      size_t k = arity;
      while (k > 0) {
        if (++idx[k - 1] < pools[k - 1].size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
      if (arity == 0) break;
    }
    task.facts.pred_range[decl.name] = {begin, task.facts.size()};
  };

  for (const auto& p : dom.predicates) enumerate(p);
  task.facts.num_base = task.facts.size();
  std::vector<std::string> derived_order;
  for (const auto& ax : dom.derived) {
    if (std::find(derived_order.begin(), derived_order.end(), ax.head) ==
        derived_order.end()) {
      derived_order.push_back(ax.head);
      enumerate(*dom.derived_decl(ax.head));
    }
  }

  task.init = State(task.facts.num_base);
  for (const auto& a : prob.init) {
    FactId f = task.facts.lookup(a);
    if (f != kNoFact && !task.facts.is_derived(f)) task.init.set(f);
  }

  detail::Compiler comp{dom.types, task.objects, task.object_type, task.facts};

  // Actions: one instance per type-consistent parameter binding.
  for (const auto& schema : dom.actions) {
    std::vector<std::vector<std::string>> pools;
    for (const auto& p : schema.params) pools.push_back(objs_of(p.type));
    std::vector<size_t> idx(schema.params.size(), 0);
    bool empty_pool = false;
    for (const auto& pool : pools) empty_pool |= pool.empty();
    if (empty_pool) continue;
    for (;;) {
      detail::Binding b;
      GroundAction ga;
      ga.schema = schema.name;
      ga.display = schema.display_name;
      for (size_t i = 0; i < pools.size(); ++i) {
        b[schema.params[i].name] = pools[i][idx[i]];
        ga.args.push_back(pools[i][idx[i]]);
      }
      ga.pre = comp.compile(schema.precondition, b, false);
      bool keep = ga.pre.kind != Node::Kind::False;
      if (keep) {
        for (const auto& e : schema.effects) {
          pddl::GroundAtom atom;
          atom.pred = e.atom.pred;
          for (const auto& t : e.atom.args)
            atom.args.push_back(detail::resolve(t, b));
          FactId f = task.facts.lookup(atom);
          if (f == kNoFact) {
            keep = false;  // effect on a fact outside the typed universe
            break;
          }
          (e.negated ? ga.del : ga.add).push_back(f);
        }
      }
      if (keep) {
        // PDDL add-wins semantics keeps add and delete disjoint.
        std::erase_if(ga.del, [&](FactId f) {
          return std::find(ga.add.begin(), ga.add.end(), f) != ga.add.end();
        });
        task.actions.push_back(std::move(ga));
      }
      size_t k = pools.size();
      while (k > 0) {
        if (++idx[k - 1] < pools[k - 1].size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }

  // Axioms: one instance per head binding; constant-false bodies are
  // dropped, constant-true bodies stay (the head is unconditionally true).
  for (const auto& ax : dom.derived) {
    std::vector<std::vector<std::string>> pools;
    for (const auto& p : ax.params) pools.push_back(objs_of(p.type));
    std::vector<size_t> idx(ax.params.size(), 0);
    bool empty_pool = false;
    for (const auto& pool : pools) empty_pool |= pool.empty();
    if (empty_pool) continue;
    for (;;) {
      detail::Binding b;
      pddl::GroundAtom head;
      head.pred = ax.head;
      for (size_t i = 0; i < pools.size(); ++i) {
        b[ax.params[i].name] = pools[i][idx[i]];
        head.args.push_back(pools[i][idx[i]]);
      }
      GroundAxiom ga;
      ga.head = task.facts.lookup(head);
      ga.body = comp.compile(ax.body, b, false);
      if (ga.body.kind != Node::Kind::False) task.axioms.push_back(std::move(ga));
      size_t k = pools.size();
      while (k > 0) {
        if (++idx[k - 1] < pools[k - 1].size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }

  {
    detail::Binding b;
    task.goal = comp.compile(prob.goal, b, false);
  }

  task.strat = axioms::stratify(dom);
  detail::index_strata(task);
  return task;
}

namespace detail {

// Optimistic truth: positive base literals read reachability, everything
// else is assumed satisfiable.
inline bool maybe_satisfiable(const Node& n, const Bits& maybe_true,
                              FactId num_base) {
  switch (n.kind) {
    case Node::Kind::True:
      return true;
    case Node::Kind::False:
      return false;
    case Node::Kind::Lit:
      if (n.positive && n.fact < num_base) return maybe_true.test(n.fact);
      return true;
    case Node::Kind::And:
      for (const auto& c : n.children)
        if (!maybe_satisfiable(c, maybe_true, num_base)) return false;
      return true;
    case Node::Kind::Or:
      for (const auto& c : n.children)
        if (maybe_satisfiable(c, maybe_true, num_base)) return true;
      return false;
  }
  return true;
}

// Rewrites a formula over the pruned fact table. Dropped base facts are
// false forever; delete lists silently lose them.
inline Node remap_node(const Node& n, const std::vector<FactId>& remap) {
  switch (n.kind) {
    case Node::Kind::True:
    case Node::Kind::False:
      return n;
    case Node::Kind::Lit: {
      FactId f = remap[n.fact];
      if (f == kNoFact) return Node::make(!n.positive);
      return Node::lit(f, n.positive);
    }
    case Node::Kind::And:
    case Node::Kind::Or: {
      std::vector<Node> cs;
      cs.reserve(n.children.size());
      for (const auto& c : n.children) cs.push_back(remap_node(c, remap));
      return Node::join(n.kind, std::move(cs));
    }
  }
  return n;
}

}  // namespace detail

// Removes ground actions that can never fire because a required positive
// base fact is neither in init nor added by any surviving action, iterated
// to fixpoint; never-true base facts are dropped from the fact table.
// Valid plans are preserved exactly.
inline GroundTask prune(const GroundTask& task) {
  const FactId nb = task.num_base();
  std::vector<bool> live(task.actions.size(), true);
  Bits maybe_true(nb);
  bool changed = true;
  while (changed) {
    changed = false;
    maybe_true = task.init;
    for (size_t i = 0; i < task.actions.size(); ++i)
      if (live[i])
        for (FactId f : task.actions[i].add) maybe_true.set(f);
    for (size_t i = 0; i < task.actions.size(); ++i) {
      if (!live[i]) continue;
      if (!detail::maybe_satisfiable(task.actions[i].pre, maybe_true, nb)) {
        live[i] = false;
        changed = true;
      }
    }
  }

  GroundTask out;
  out.domain_name = task.domain_name;
  out.problem_name = task.problem_name;
  out.objects = task.objects;
  out.object_type = task.object_type;
  out.strat = task.strat;

  // Kept base facts preserve relative order, so per-predicate ranges stay
  // contiguous.
  std::vector<FactId> remap(task.facts.size(), kNoFact);
  for (FactId f = 0; f < nb; ++f)
    if (maybe_true.test(f)) remap[f] = out.facts.intern(task.facts.atom(f));
  out.facts.num_base = out.facts.size();
  for (FactId f = nb; f < task.facts.size(); ++f)
    remap[f] = out.facts.intern(task.facts.atom(f));
  for (const auto& [pred, range] : task.facts.pred_range) {
    FactId lo = out.facts.size(), hi = 0;
    bool any = false;
    for (FactId f = range.first; f < range.second; ++f) {
      if (remap[f] == kNoFact) continue;
      lo = std::min(lo, remap[f]);
      hi = std::max(hi, remap[f] + 1);
      any = true;
    }
    if (any) out.facts.pred_range[pred] = {lo, hi};
  }

  out.init = State(out.facts.num_base);
  task.init.for_each_set([&](int f) { out.init.set(remap[f]); });

  for (size_t i = 0; i < task.actions.size(); ++i) {
    if (!live[i]) continue;
    const GroundAction& a = task.actions[i];
    GroundAction na;
    na.schema = a.schema;
    na.display = a.display;
    na.args = a.args;
    na.pre = detail::remap_node(a.pre, remap);
    for (FactId f : a.add) na.add.push_back(remap[f]);
    for (FactId f : a.del)
      if (remap[f] != kNoFact) na.del.push_back(remap[f]);
    out.actions.push_back(std::move(na));
  }

  for (const auto& ax : task.axioms) {
    GroundAxiom na;
    na.head = remap[ax.head];
    na.body = detail::remap_node(ax.body, remap);
    if (na.body.kind != Node::Kind::False) out.axioms.push_back(std::move(na));
  }

  out.goal = detail::remap_node(task.goal, remap);
  detail::index_strata(out);
  return out;
}

// ---------------------------------------------------------------------------
// Debug dump

namespace detail {

inline void render_pre(const Node& n, std::ostream& os) {
  switch (n.kind) {
    case Node::Kind::True:
      os << "true";
      return;
    case Node::Kind::False:
      os << "false";
      return;
    case Node::Kind::Lit:
      if (!n.positive) os << '-';
      os << n.fact;
      return;
    case Node::Kind::And:
    case Node::Kind::Or: {
      bool flat = n.kind == Node::Kind::And;
      for (const auto& c : n.children) flat &= c.kind == Node::Kind::Lit;
      if (flat) {
        for (size_t i = 0; i < n.children.size(); ++i) {
          if (i) os << ',';
          render_pre(n.children[i], os);
        }
      } else {
        os << (n.kind == Node::Kind::And ? "(and" : "(or");
        for (const auto& c : n.children) {
          os << ' ';
          render_pre(c, os);
        }
        os << ')';
      }
      return;
    }
  }
}

inline std::string ids(const std::vector<FactId>& fs) {
  std::string s;
  for (size_t i = 0; i < fs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(fs[i]);
  }
  return s;
}

}  // namespace detail

inline std::string dump_task(const GroundTask& task) {
  std::ostringstream os;
  for (FactId f = 0; f < task.facts.size(); ++f)
    os << "fact " << f << ' ' << task.facts.render(f) << '\n';
  for (const auto& a : task.actions) {
    os << "action " << a.label() << " pre=";
    detail::render_pre(a.pre, os);
    os << " add=" << detail::ids(a.add) << " del=" << detail::ids(a.del)
       << '\n';
  }
  for (const auto& ax : task.axioms) {
    os << "axiom " << ax.head << " body=";
    detail::render_pre(ax.body, os);
    os << '\n';
  }
  return os.str();
}

}  // namespace abortd::ground

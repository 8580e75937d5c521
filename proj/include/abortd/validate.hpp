#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "abortd/pddl.hpp"

namespace abortd::pddl {

namespace detail {

struct SigTable {
  std::map<std::string, PredicateDecl> decls;
  std::set<std::string> derived;

  static SigTable build(const DomainDef& dom) {
    SigTable t;
    for (const auto& p : dom.predicates) t.decls.emplace(p.name, p);
    for (const auto& ax : dom.derived) {
      t.derived.insert(ax.head);
      t.decls.emplace(ax.head, PredicateDecl{ax.head, ax.params, ax.loc});
    }
    return t;
  }
};

class DomainChecker {
 public:
  DomainChecker(const DomainDef& dom, std::vector<Diagnostic>& out)
      : dom_(dom), sigs_(SigTable::build(dom)), out_(out) {}

  void run() {
    check_types();
    check_predicates();
    check_axioms();
    check_actions();
  }

  // Formula sanity: predicates declared with matching arity, variables
  // bound, quantified variable types declared, argument types related to
  // the declared parameter types. `allow_forall` covers the
  // universal-preconditions-in-goals-only restriction.
  void check_formula(const Formula& f, std::vector<TypedVar> scope,
                     bool allow_forall,
                     const std::map<std::string, std::string>* objects) {
    switch (f.kind) {
      case Formula::Kind::Atom: {
        auto it = sigs_.decls.find(f.atom.pred);
        if (it == sigs_.decls.end()) {
          error(f.atom.loc, "undeclared predicate '" + f.atom.pred + "'");
          return;
        }
        const PredicateDecl& decl = it->second;
        if (f.atom.args.size() != decl.params.size()) {
          error(f.atom.loc, "predicate '" + f.atom.pred + "' expects " +
                                std::to_string(decl.params.size()) +
                                " arguments");
          return;
        }
        for (size_t i = 0; i < f.atom.args.size(); ++i)
          check_term(f.atom.args[i], scope, decl.params[i].type, f.atom.loc,
                     objects);
        return;
      }
      case Formula::Kind::Equal:
        check_term(f.lhs, scope, "", f.loc, objects);
        check_term(f.rhs, scope, "", f.loc, objects);
        return;
      case Formula::Kind::Not:
        check_formula(f.children[0], scope, allow_forall, objects);
        return;
      case Formula::Kind::And:
      case Formula::Kind::Or:
        for (const auto& c : f.children)
          check_formula(c, scope, allow_forall, objects);
        return;
      case Formula::Kind::Forall:
        if (!allow_forall)
          error(f.loc, "universal quantifier not allowed in action preconditions");
        [[fallthrough]];
      case Formula::Kind::Exists: {
        for (const auto& v : f.vars)
          if (!dom_.types.contains(v.type))
            error(v.loc, "undeclared type '" + v.type + "'");
        std::vector<TypedVar> inner = scope;
        inner.insert(inner.end(), f.vars.begin(), f.vars.end());
        check_formula(f.children[0], std::move(inner), allow_forall, objects);
        return;
      }
    }
  }

  void check_term(const Term& t, const std::vector<TypedVar>& scope,
                  const std::string& expected, SourceLoc loc,
                  const std::map<std::string, std::string>* objects) {
    if (t.kind == Term::Kind::Variable) {
      const TypedVar* bound = nullptr;
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->name == t.name) {
          bound = &*it;
          break;
        }
      if (!bound) {
        error(loc, "unbound variable '?" + t.name + "'");
        return;
      }
      if (!expected.empty() && !dom_.types.is_subtype(bound->type, expected) &&
          !dom_.types.is_subtype(expected, bound->type))
        error(loc, "type mismatch: variable '?" + t.name + "' of type '" +
                       bound->type + "' where '" + expected + "' required");
      return;
    }
    if (!objects) {
      error(loc, "constant '" + t.name + "' not allowed in domain formulas");
      return;
    }
    auto it = objects->find(t.name);
    if (it == objects->end()) {
      error(loc, "undeclared object '" + t.name + "'");
      return;
    }
    if (!expected.empty() && !dom_.types.is_subtype(it->second, expected))
      error(loc, "type mismatch: object '" + t.name + "' of type '" +
                     it->second + "' where '" + expected + "' required");
  }

  const SigTable& sigs() const { return sigs_; }

 private:
  void check_types() {
    std::set<std::string> in_reported_cycle;
    for (const auto& [child, parent] : dom_.types.parents()) {
      if (!dom_.types.contains(parent))
        error({}, "undeclared parent type '" + parent + "' of '" + child + "'");
      // Cycle / rootedness: the chain from every type must reach "object".
      std::set<std::string> seen;
      std::string cur = child;
      for (;;) {
        if (cur == kRootType) break;
        if (!seen.insert(cur).second) {
          if (!in_reported_cycle.count(cur)) {
            error({}, "type cycle involving '" + cur + "'");
            in_reported_cycle.insert(seen.begin(), seen.end());
          }
          break;
        }
        const std::string* p = dom_.types.parent_of(cur);
        if (!p) break;  // reported above
        cur = *p;
      }
    }
  }

  void check_predicates() {
    std::set<std::string> seen;
    for (const auto& p : dom_.predicates) {
      if (!seen.insert(p.name).second)
        error(p.loc, "duplicate predicate '" + p.name + "'");
      if (sigs_.derived.count(p.name))
        error(p.loc, "predicate '" + p.name + "' declared both base and derived");
      check_params(p.params);
    }
  }

  void check_params(const std::vector<TypedVar>& params) {
    std::set<std::string> seen;
    for (const auto& v : params) {
      if (!seen.insert(v.name).second)
        error(v.loc, "duplicate parameter '?" + v.name + "'");
      if (!dom_.types.contains(v.type))
        error(v.loc, "undeclared type '" + v.type + "'");
    }
  }

  void check_axioms() {
    for (const auto& ax : dom_.derived) {
      check_params(ax.params);
      const PredicateDecl& decl = sigs_.decls.at(ax.head);
      if (decl.params.size() != ax.params.size())
        error(ax.loc, "axioms for '" + ax.head + "' disagree on arity");
      check_formula(ax.body, ax.params, /*allow_forall=*/true, nullptr);
    }
  }

  void check_actions() {
    std::set<std::string> seen;
    for (const auto& act : dom_.actions) {
      if (!seen.insert(act.name).second)
        error(act.loc, "duplicate action '" + act.name + "'");
      check_params(act.params);
      check_formula(act.precondition, act.params, /*allow_forall=*/false,
                    nullptr);
      for (const auto& e : act.effects) {
        auto it = sigs_.decls.find(e.atom.pred);
        if (it == sigs_.decls.end()) {
          error(e.atom.loc, "undeclared predicate '" + e.atom.pred +
                                "' in effect");
          continue;
        }
        if (sigs_.derived.count(e.atom.pred)) {
          error(e.atom.loc,
                "derived predicate in effect: '" + e.atom.pred + "'");
          continue;
        }
        if (e.atom.args.size() != it->second.params.size()) {
          error(e.atom.loc, "predicate '" + e.atom.pred + "' expects " +
                                std::to_string(it->second.params.size()) +
                                " arguments");
          continue;
        }
        for (size_t i = 0; i < e.atom.args.size(); ++i)
          check_term(e.atom.args[i], act.params, it->second.params[i].type,
                     e.atom.loc, nullptr);
      }
    }
  }

  void error(SourceLoc loc, std::string msg) {
    out_.push_back({Severity::Error, loc, std::move(msg)});
  }

  const DomainDef& dom_;
  SigTable sigs_;
  std::vector<Diagnostic>& out_;
};

}  // namespace detail

inline std::vector<Diagnostic> validate_domain(const DomainDef& dom) {
  std::vector<Diagnostic> out;
  detail::DomainChecker(dom, out).run();
  return out;
}

inline std::vector<Diagnostic> validate_problem(const ProblemDef& prob,
                                                const DomainDef& dom) {
  std::vector<Diagnostic> out;
  detail::DomainChecker checker(dom, out);
  const detail::SigTable& sigs = checker.sigs();

  std::map<std::string, std::string> object_types;
  for (const auto& o : prob.objects) {
    if (!dom.types.contains(o.type))
      out.push_back({Severity::Error, o.loc,
                     "undeclared type '" + o.type + "' for object '" + o.name + "'"});
    if (!object_types.emplace(o.name, o.type).second)
      out.push_back({Severity::Error, o.loc, "duplicate object '" + o.name + "'"});
  }

  for (const auto& a : prob.init) {
    auto it = sigs.decls.find(a.pred);
    if (it == sigs.decls.end()) {
      out.push_back({Severity::Error, {}, "undeclared predicate '" + a.pred + "' in init"});
      continue;
    }
    if (sigs.derived.count(a.pred)) {
      out.push_back({Severity::Error, {}, "derived predicate in init: '" + a.pred + "'"});
      continue;
    }
    if (a.args.size() != it->second.params.size()) {
      out.push_back({Severity::Error, {}, "arity mismatch in init atom '" + a.pred + "'"});
      continue;
    }
    for (size_t i = 0; i < a.args.size(); ++i) {
      auto oit = object_types.find(a.args[i]);
      if (oit == object_types.end()) {
        out.push_back({Severity::Error, {}, "undeclared object '" + a.args[i] + "' in init"});
      } else if (!dom.types.is_subtype(oit->second, it->second.params[i].type)) {
        out.push_back({Severity::Error, {}, "type mismatch in init atom '" + a.pred + "'"});
      }
    }
  }

  checker.check_formula(prob.goal, {}, /*allow_forall=*/true, &object_types);
  return out;
}

}  // namespace abortd::pddl

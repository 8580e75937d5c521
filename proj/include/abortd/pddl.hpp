#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "abortd/sexpr.hpp"

namespace abortd::pddl {

inline constexpr const char* kRootType = "object";

// Single-inheritance type forest rooted at "object". The root itself is
// implicit and always present.
class TypeTree {
 public:
  TypeTree() { order_.push_back(kRootType); }

  bool contains(const std::string& name) const {
    return name == kRootType || parent_.count(name) > 0;
  }

  // Declares `child - parent`. Re-declaration with a different parent is
  // rejected by validation, not here; the first declaration wins.
  void add(const std::string& child, const std::string& parent) {
    if (child == kRootType) return;
    auto [it, inserted] = parent_.emplace(child, parent);
    if (inserted) order_.push_back(child);
    (void)it;
  }

  const std::string* parent_of(const std::string& name) const {
    auto it = parent_.find(name);
    return it == parent_.end() ? nullptr : &it->second;
  }

  // is_subtype(t, t) is true; every declared type is a subtype of "object".
  // Walks are cycle-guarded so malformed trees still terminate.
  bool is_subtype(const std::string& sub, const std::string& super) const {
    if (super == kRootType) return contains(sub);
    std::string cur = sub;
    for (size_t steps = 0; steps <= parent_.size(); ++steps) {
      if (cur == super) return true;
      const std::string* p = parent_of(cur);
      if (!p) return false;
      cur = *p;
    }
    return false;  // cycle
  }

  // Declaration order, root first.
  const std::vector<std::string>& names() const { return order_; }
  const std::map<std::string, std::string>& parents() const { return parent_; }

  bool operator==(const TypeTree& o) const { return parent_ == o.parent_; }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> parent_;
};

struct TypedVar {
  std::string name;  // without '?'
  std::string type;
  SourceLoc loc;
  bool operator==(const TypedVar& o) const {
    return name == o.name && type == o.type;
  }
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedVar> params;
  SourceLoc loc;
  bool operator==(const PredicateDecl& o) const {
    return name == o.name && params == o.params;
  }
};

struct Term {
  enum class Kind { Variable, Constant };
  Kind kind = Kind::Constant;
  std::string name;  // variable name without '?'
  SourceLoc loc;
  bool operator==(const Term& o) const {
    return kind == o.kind && name == o.name;
  }
  static Term var(std::string n) {
    return Term{Kind::Variable, std::move(n), {}};
  }
  static Term constant(std::string n) {
    return Term{Kind::Constant, std::move(n), {}};
  }
};

struct Atom {
  std::string pred;
  std::vector<Term> args;
  SourceLoc loc;
  bool operator==(const Atom& o) const {
    return pred == o.pred && args == o.args;
  }
};

// Formula in the supported subset. Equal carries its terms directly; Not
// wraps one child; Exists/Forall carry typed vars plus one child.
struct Formula {
  enum class Kind { Atom, Equal, Not, And, Or, Exists, Forall };
  Kind kind = Kind::And;
  Atom atom;                       // Atom
  Term lhs, rhs;                   // Equal
  std::vector<TypedVar> vars;      // Exists / Forall
  std::vector<Formula> children;   // Not(1), And(n), Or(n), quantifiers(1)
  SourceLoc loc;

  bool operator==(const Formula& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::Atom:
        return atom == o.atom;
      case Kind::Equal:
        return lhs == o.lhs && rhs == o.rhs;
      case Kind::Exists:
      case Kind::Forall:
        if (!(vars == o.vars)) return false;
        [[fallthrough]];
      default:
        return children == o.children;
    }
  }

  static Formula make_atom(Atom a) {
    Formula f;
    f.kind = Kind::Atom;
    f.atom = std::move(a);
    return f;
  }
  static Formula make_and(std::vector<Formula> cs) {
    Formula f;
    f.kind = Kind::And;
    f.children = std::move(cs);
    return f;
  }
  static Formula make_or(std::vector<Formula> cs) {
    Formula f;
    f.kind = Kind::Or;
    f.children = std::move(cs);
    return f;
  }
  static Formula make_not(Formula c) {
    Formula f;
    f.kind = Kind::Not;
    f.children.push_back(std::move(c));
    return f;
  }
  static Formula make_equal(Term a, Term b) {
    Formula f;
    f.kind = Kind::Equal;
    f.lhs = std::move(a);
    f.rhs = std::move(b);
    return f;
  }
  static Formula quantified(Kind k, std::vector<TypedVar> vs, Formula body) {
    Formula f;
    f.kind = k;
    f.vars = std::move(vs);
    f.children.push_back(std::move(body));
    return f;
  }
};

struct SignedAtom {
  bool negated = false;
  Atom atom;
  bool operator==(const SignedAtom& o) const {
    return negated == o.negated && atom == o.atom;
  }
};

struct ActionSchema {
  std::string name;
  std::string display_name;  // plan-output label; defaults to name
  std::vector<TypedVar> params;
  Formula precondition;
  std::vector<SignedAtom> effects;
  SourceLoc loc;
  bool operator==(const ActionSchema& o) const {
    return name == o.name && display_name == o.display_name &&
           params == o.params && precondition == o.precondition &&
           effects == o.effects;
  }
};

struct AxiomDef {
  std::string head;  // derived predicate name
  std::vector<TypedVar> params;
  Formula body;
  SourceLoc loc;
  bool operator==(const AxiomDef& o) const {
    return head == o.head && params == o.params && body == o.body;
  }
};

struct DomainDef {
  std::string name;
  std::vector<std::string> requirements;
  TypeTree types;
  std::vector<PredicateDecl> predicates;  // base predicates
  std::vector<AxiomDef> derived;
  std::vector<ActionSchema> actions;

  bool operator==(const DomainDef& o) const {
    return name == o.name && requirements == o.requirements &&
           types == o.types && predicates == o.predicates &&
           derived == o.derived && actions == o.actions;
  }

  std::set<std::string> derived_names() const {
    std::set<std::string> s;
    for (const auto& ax : derived) s.insert(ax.head);
    return s;
  }

  const PredicateDecl* find_predicate(const std::string& n) const {
    for (const auto& p : predicates)
      if (p.name == n) return &p;
    return nullptr;
  }

  // Signature of a derived predicate, taken from its first axiom.
  std::optional<PredicateDecl> derived_decl(const std::string& n) const {
    for (const auto& ax : derived)
      if (ax.head == n) return PredicateDecl{ax.head, ax.params, ax.loc};
    return std::nullopt;
  }
};

struct TypedObject {
  std::string name;
  std::string type;
  SourceLoc loc;
  bool operator==(const TypedObject& o) const {
    return name == o.name && type == o.type;
  }
};

struct GroundAtom {
  std::string pred;
  std::vector<std::string> args;
  auto operator<=>(const GroundAtom& o) const = default;
};

struct ProblemDef {
  std::string name;
  std::string domain_name;
  std::vector<TypedObject> objects;
  std::vector<GroundAtom> init;  // kept sorted and unique
  Formula goal = Formula::make_and({});

  bool operator==(const ProblemDef& o) const {
    return name == o.name && domain_name == o.domain_name &&
           objects == o.objects && init == o.init && goal == o.goal;
  }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string message;

  std::string render() const {
    return format_message(
        loc, severity == Severity::Error ? "error" : "warning", message);
  }
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) {
    return d.severity == Severity::Error;
  });
}

}  // namespace abortd::pddl

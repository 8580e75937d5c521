#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "abortd/pddl.hpp"

namespace abortd::pddl {

namespace detail {

inline void print_typed_vars(std::ostream& os, const std::vector<TypedVar>& vs) {
  bool first = true;
  for (const auto& v : vs) {
    if (!first) os << ' ';
    first = false;
    os << '?' << v.name << " - " << v.type;
  }
}

inline void print_term(std::ostream& os, const Term& t) {
  if (t.kind == Term::Kind::Variable) os << '?';
  os << t.name;
}

inline void print_atom(std::ostream& os, const Atom& a) {
  os << '(' << a.pred;
  for (const auto& t : a.args) {
    os << ' ';
    print_term(os, t);
  }
  os << ')';
}

inline void print_formula(std::ostream& os, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      print_atom(os, f.atom);
      return;
    case Formula::Kind::Equal:
      os << "(= ";
      print_term(os, f.lhs);
      os << ' ';
      print_term(os, f.rhs);
      os << ')';
      return;
    case Formula::Kind::Not:
      os << "(not ";
      print_formula(os, f.children[0]);
      os << ')';
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      os << (f.kind == Formula::Kind::And ? "(and" : "(or");
      for (const auto& c : f.children) {
        os << ' ';
        print_formula(os, c);
      }
      os << ')';
      return;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      os << (f.kind == Formula::Kind::Exists ? "(exists (" : "(forall (");
      print_typed_vars(os, f.vars);
      os << ") ";
      print_formula(os, f.children[0]);
      os << ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string print_formula(const Formula& f) {
  std::ostringstream os;
  detail::print_formula(os, f);
  return os.str();
}

inline std::string print_domain(const DomainDef& dom) {
  std::ostringstream os;
  os << "(define (domain " << dom.name << ")\n";
  if (!dom.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : dom.requirements) os << ' ' << r;
    os << ")\n";
  }

  const auto& names = dom.types.names();
  if (names.size() > 1) {
    // Group children under their parent, groups in declaration order.
    std::vector<std::pair<std::string, std::vector<std::string>>> groups;
    for (const auto& n : names) {
      if (n == kRootType) continue;
      const std::string& parent = *dom.types.parent_of(n);
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const auto& g) { return g.first == parent; });
      if (it == groups.end()) {
        groups.push_back({parent, {n}});
      } else {
        it->second.push_back(n);
      }
    }
    os << "  (:types\n";
    for (const auto& [parent, children] : groups) {
      os << "   ";
      for (const auto& c : children) os << ' ' << c;
      os << " - " << parent << '\n';
    }
    os << "  )\n";
  }

  if (!dom.predicates.empty()) {
    os << "  (:predicates\n";
    for (const auto& p : dom.predicates) {
      os << "    (" << p.name;
      if (!p.params.empty()) {
        os << ' ';
        detail::print_typed_vars(os, p.params);
      }
      os << ")\n";
    }
    os << "  )\n";
  }

  for (const auto& ax : dom.derived) {
    os << "  (:derived (" << ax.head;
    if (!ax.params.empty()) {
      os << ' ';
      detail::print_typed_vars(os, ax.params);
    }
    os << ")\n    ";
    detail::print_formula(os, ax.body);
    os << ")\n";
  }

  for (const auto& act : dom.actions) {
    os << "  (:action " << act.name << "\n    :parameters (";
    detail::print_typed_vars(os, act.params);
    os << ")\n    :precondition ";
    detail::print_formula(os, act.precondition);
    os << "\n    :effect (and";
    for (const auto& e : act.effects) {
      os << ' ';
      if (e.negated) os << "(not ";
      detail::print_atom(os, e.atom);
      if (e.negated) os << ')';
    }
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string print_problem(const ProblemDef& prob) {
  std::ostringstream os;
  os << "(define (problem " << prob.name << ")\n";
  if (!prob.domain_name.empty())
    os << "  (:domain " << prob.domain_name << ")\n";
  os << "  (:objects\n";
  for (const auto& o : prob.objects)
    os << "    " << o.name << " - " << o.type << '\n';
  os << "  )\n  (:init\n";
  for (const auto& a : prob.init) {
    os << "    (" << a.pred;
    for (const auto& arg : a.args) os << ' ' << arg;
    os << ")\n";
  }
  os << "  )\n  (:goal ";
  detail::print_formula(os, prob.goal);
  os << ")\n)\n";
  return os.str();
}

}  // namespace abortd::pddl

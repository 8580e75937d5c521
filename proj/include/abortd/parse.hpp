#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "abortd/pddl.hpp"
#include "abortd/sexpr.hpp"

namespace abortd::pddl {

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline const std::set<std::string>& supported_requirements() {
  // :strips and :equality are accepted as implied; everything else outside
  // this set is a hard error.
  static const std::set<std::string> reqs = {
      ":strips",
      ":typing",
      ":equality",
      ":negative-preconditions",
      ":disjunctive-preconditions",
      ":existential-preconditions",
      ":universal-preconditions",
      ":derived-predicates",
  };
  return reqs;
}

struct PredSig {
  PredicateDecl decl;
  bool is_derived = false;
};

// Shared machinery for typed lists and formulas.
class ParserBase {
 public:
  explicit ParserBase(const TypeTree* types) : types_(types) {}

 protected:
  // Parses "a b - t c d - u e" style typed lists. `items` are the raw list
  // entries; names not followed by "- type" default to "object".
  template <typename T>
  std::vector<T> parse_typed_names(const std::vector<sexpr::Node>& items,
                                   bool variables) const {
    std::vector<T> out;
    std::vector<T> pending;
    for (size_t i = 0; i < items.size(); ++i) {
      const sexpr::Node& n = items[i];
      if (!n.is_symbol())
        throw ParseError(n.loc, "expected name in typed list");
      if (n.text == "-") {
        if (pending.empty())
          throw ParseError(n.loc, "dangling '-' in typed list");
        if (i + 1 >= items.size() || !items[i + 1].is_symbol())
          throw ParseError(n.loc, "expected type after '-'");
        std::string ty = lower(items[i + 1].text);
        check_type(ty, items[i + 1].loc);
        for (auto& p : pending) p.type = ty;
        for (auto& p : pending) out.push_back(std::move(p));
        pending.clear();
        ++i;
        continue;
      }
      std::string name = lower(n.text);
      bool is_var = !name.empty() && name[0] == '?';
      if (is_var != variables)
        throw ParseError(n.loc, variables ? "expected variable (leading '?')"
                                          : "unexpected variable in object list");
      if (is_var) name.erase(0, 1);
      if (name.empty()) throw ParseError(n.loc, "empty name");
      T t;
      t.name = std::move(name);
      t.type = kRootType;
      t.loc = n.loc;
      pending.push_back(std::move(t));
    }
    for (auto& p : pending) out.push_back(std::move(p));
    return out;
  }

  void check_type(const std::string& ty, SourceLoc loc) const {
    if (types_ && !types_->contains(ty))
      throw ParseError(loc, "undeclared type '" + ty + "'");
  }

  const TypeTree* types_;
};

// Variable scope: schema parameters plus enclosing quantifiers.
class VarScope {
 public:
  void push(const std::vector<TypedVar>& vars) {
    for (const auto& v : vars) stack_.push_back(v);
    marks_.push_back(vars.size());
  }
  void pop() {
    for (size_t i = 0; i < marks_.back(); ++i) stack_.pop_back();
    marks_.pop_back();
  }
  const TypedVar* lookup(const std::string& name) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

 private:
  std::vector<TypedVar> stack_;
  std::vector<size_t> marks_;
};

class FormulaParser : public ParserBase {
 public:
  FormulaParser(const TypeTree* types,
                const std::map<std::string, PredSig>* sigs,
                const std::map<std::string, std::string>* objects)
      : ParserBase(types), sigs_(sigs), objects_(objects) {}

  Formula parse(const sexpr::Node& n, VarScope& scope) const {
    if (!n.is_list()) throw ParseError(n.loc, "expected formula");
    if (n.items.empty()) {
      // "()" — treat as empty conjunction.
      Formula f = Formula::make_and({});
      f.loc = n.loc;
      return f;
    }
    if (!n.items[0].is_symbol())
      throw ParseError(n.items[0].loc, "expected operator or predicate name");
    std::string head = lower(n.items[0].text);

    if (head == "and" || head == "or") {
      std::vector<Formula> children;
      for (size_t i = 1; i < n.items.size(); ++i)
        children.push_back(parse(n.items[i], scope));
      Formula f = head == "and" ? Formula::make_and(std::move(children))
                                : Formula::make_or(std::move(children));
      f.loc = n.loc;
      return f;
    }
    if (head == "not") {
      if (n.items.size() != 2)
        throw ParseError(n.loc, "'not' takes exactly one argument");
      Formula f = Formula::make_not(parse(n.items[1], scope));
      f.loc = n.loc;
      return f;
    }
    if (head == "exists" || head == "forall") {
      if (n.items.size() != 3 || !n.items[1].is_list())
        throw ParseError(n.loc, "'" + head + "' expects (vars) body");
      std::vector<TypedVar> vars =
          parse_typed_names<TypedVar>(n.items[1].items, /*variables=*/true);
      if (vars.empty())
        throw ParseError(n.items[1].loc, "quantifier with no variables");
      scope.push(vars);
      Formula body = parse(n.items[2], scope);
      scope.pop();
      Formula f = Formula::quantified(head == "exists" ? Formula::Kind::Exists
                                                       : Formula::Kind::Forall,
                                      std::move(vars), std::move(body));
      f.loc = n.loc;
      return f;
    }
    if (head == "=") {
      if (n.items.size() != 3)
        throw ParseError(n.loc, "'=' takes exactly two arguments");
      Formula f = Formula::make_equal(parse_term(n.items[1], scope, nullptr),
                                      parse_term(n.items[2], scope, nullptr));
      f.loc = n.loc;
      return f;
    }
    // Predicate atom.
    Formula f = Formula::make_atom(parse_atom(n, scope));
    f.loc = n.loc;
    return f;
  }

  Atom parse_atom(const sexpr::Node& n, VarScope& scope) const {
    std::string pred = lower(n.items[0].text);
    auto it = sigs_->find(pred);
    if (it == sigs_->end())
      throw ParseError(n.items[0].loc, "undeclared predicate '" + pred + "'");
    const PredicateDecl& decl = it->second.decl;
    if (n.items.size() - 1 != decl.params.size())
      throw ParseError(n.loc, "predicate '" + pred + "' expects " +
                                  std::to_string(decl.params.size()) +
                                  " arguments, got " +
                                  std::to_string(n.items.size() - 1));
    Atom a;
    a.pred = pred;
    a.loc = n.loc;
    for (size_t i = 1; i < n.items.size(); ++i)
      a.args.push_back(parse_term(n.items[i], scope, &decl.params[i - 1]));
    return a;
  }

  Term parse_term(const sexpr::Node& n, VarScope& scope,
                  const TypedVar* expected) const {
    if (!n.is_symbol()) throw ParseError(n.loc, "expected term");
    std::string name = lower(n.text);
    Term t;
    t.loc = n.loc;
    if (!name.empty() && name[0] == '?') {
      name.erase(0, 1);
      const TypedVar* bound = scope.lookup(name);
      if (!bound)
        throw ParseError(n.loc, "unbound variable '?" + name + "'");
      t.kind = Term::Kind::Variable;
      t.name = name;
      if (expected) check_compatible(bound->type, expected->type, n.loc);
      return t;
    }
    if (!objects_)
      throw ParseError(n.loc, "constant '" + name + "' not allowed here");
    auto it = objects_->find(name);
    if (it == objects_->end())
      throw ParseError(n.loc, "undeclared object '" + name + "'");
    t.kind = Term::Kind::Constant;
    t.name = name;
    if (expected && !types_->is_subtype(it->second, expected->type))
      throw ParseError(n.loc, "type mismatch: object '" + name + "' of type '" +
                                  it->second + "' where '" + expected->type +
                                  "' required");
    return t;
  }

 private:
  // A variable argument is acceptable when its type and the declared
  // parameter type are related in either direction; out-of-type bindings
  // compile to false at ground time.
  void check_compatible(const std::string& actual, const std::string& declared,
                        SourceLoc loc) const {
    if (types_->is_subtype(actual, declared) ||
        types_->is_subtype(declared, actual))
      return;
    throw ParseError(loc, "type mismatch: variable of type '" + actual +
                              "' where '" + declared + "' required");
  }

  const std::map<std::string, PredSig>* sigs_;
  const std::map<std::string, std::string>* objects_;  // name -> type, or null
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Domain parsing

inline std::vector<SignedAtom> parse_effect(const sexpr::Node& n,
                                            const detail::FormulaParser& fp,
                                            detail::VarScope& scope) {
  std::vector<SignedAtom> out;
  auto parse_literal = [&](const sexpr::Node& lit) {
    if (!lit.is_list() || lit.items.empty() || !lit.items[0].is_symbol())
      throw ParseError(lit.loc, "expected effect literal");
    if (detail::lower(lit.items[0].text) == "not") {
      if (lit.items.size() != 2 || !lit.items[1].is_list())
        throw ParseError(lit.loc, "malformed negated effect");
      out.push_back({true, fp.parse_atom(lit.items[1], scope)});
    } else {
      out.push_back({false, fp.parse_atom(lit, scope)});
    }
  };
  if (n.is_list() && !n.items.empty() && n.items[0].is_symbol("and")) {
    for (size_t i = 1; i < n.items.size(); ++i) parse_literal(n.items[i]);
  } else if (n.is_list() && n.items.empty()) {
    // "()" — no effects
  } else {
    parse_literal(n);
  }
  return out;
}

inline DomainDef parse_domain(std::string_view text) {
  using detail::lower;
  sexpr::Node root;
  try {
    root = sexpr::parse(text);
  } catch (const ParseError& e) {
    if (std::string(e.what()) == "empty input")
      throw ParseError(e.loc, "expected (define (domain ...))");
    throw;
  }
  if (!root.is_list() || root.items.size() < 2 ||
      !root.items[0].is_symbol() || lower(root.items[0].text) != "define" ||
      !root.items[1].is_list() || root.items[1].items.size() != 2 ||
      !root.items[1].items[0].is_symbol() ||
      lower(root.items[1].items[0].text) != "domain")
    throw ParseError(root.loc, "expected (define (domain ...))");

  DomainDef dom;
  dom.name = lower(root.items[1].items[1].text);

  // First pass: collect type tree, predicate signatures and derived heads so
  // bodies can reference predicates declared later in the file.
  std::map<std::string, detail::PredSig> sigs;
  detail::ParserBase base(nullptr);

  for (size_t i = 2; i < root.items.size(); ++i) {
    const sexpr::Node& sec = root.items[i];
    if (!sec.is_list() || sec.items.empty() || !sec.items[0].is_symbol())
      throw ParseError(sec.loc, "expected domain section");
    std::string key = lower(sec.items[0].text);
    if (key == ":types") {
      std::vector<TypedObject> entries =
          base.parse_typed_names<TypedObject>(
              {sec.items.begin() + 1, sec.items.end()}, /*variables=*/false);
      for (const auto& e : entries) dom.types.add(e.name, e.type);
      // Parent types mentioned only on the right-hand side become children
      // of "object".
      for (const auto& e : entries) dom.types.add(e.type, kRootType);
    }
  }

  detail::ParserBase typed(&dom.types);
  for (size_t i = 2; i < root.items.size(); ++i) {
    const sexpr::Node& sec = root.items[i];
    std::string key = lower(sec.items[0].text);
    if (key == ":requirements") {
      for (size_t j = 1; j < sec.items.size(); ++j) {
        if (!sec.items[j].is_symbol())
          throw ParseError(sec.items[j].loc, "expected requirement flag");
        std::string flag = lower(sec.items[j].text);
        if (!detail::supported_requirements().count(flag))
          throw ParseError(sec.items[j].loc,
                           "unsupported requirement '" + flag + "'");
        dom.requirements.push_back(flag);
      }
    } else if (key == ":predicates") {
      for (size_t j = 1; j < sec.items.size(); ++j) {
        const sexpr::Node& p = sec.items[j];
        if (!p.is_list() || p.items.empty() || !p.items[0].is_symbol())
          throw ParseError(p.loc, "expected predicate declaration");
        PredicateDecl decl;
        decl.name = lower(p.items[0].text);
        decl.loc = p.loc;
        decl.params = typed.parse_typed_names<TypedVar>(
            {p.items.begin() + 1, p.items.end()}, /*variables=*/true);
        sigs[decl.name] = {decl, false};
        dom.predicates.push_back(std::move(decl));
      }
    } else if (key == ":derived") {
      if (sec.items.size() != 3 || !sec.items[1].is_list() ||
          sec.items[1].items.empty() || !sec.items[1].items[0].is_symbol())
        throw ParseError(sec.loc, "expected (:derived (head vars...) body)");
      AxiomDef ax;
      ax.head = lower(sec.items[1].items[0].text);
      ax.loc = sec.loc;
      ax.params = typed.parse_typed_names<TypedVar>(
          {sec.items[1].items.begin() + 1, sec.items[1].items.end()},
          /*variables=*/true);
      auto it = sigs.find(ax.head);
      if (it == sigs.end()) {
        sigs[ax.head] = {PredicateDecl{ax.head, ax.params, ax.loc}, true};
      } else {
        it->second.is_derived = true;
      }
      dom.derived.push_back(std::move(ax));
    } else if (key != ":types" && key != ":action") {
      throw ParseError(sec.loc, "unknown section keyword '" + key + "'");
    }
  }
  // Predicates declared in :predicates that also have :derived rules count
  // as derived; drop them from the base list.
  std::erase_if(dom.predicates, [&](const PredicateDecl& p) {
    return sigs.at(p.name).is_derived;
  });

  // Second pass: axiom bodies and actions.
  detail::FormulaParser fp(&dom.types, &sigs, nullptr);
  size_t axiom_idx = 0;
  for (size_t i = 2; i < root.items.size(); ++i) {
    const sexpr::Node& sec = root.items[i];
    std::string key = lower(sec.items[0].text);
    if (key == ":derived") {
      AxiomDef& ax = dom.derived[axiom_idx++];
      detail::VarScope scope;
      scope.push(ax.params);
      ax.body = fp.parse(sec.items[2], scope);
    } else if (key == ":action") {
      if (sec.items.size() < 2 || !sec.items[1].is_symbol())
        throw ParseError(sec.loc, "expected action name");
      ActionSchema act;
      act.name = lower(sec.items[1].text);
      act.display_name = act.name;
      act.loc = sec.loc;
      bool saw_params = false, saw_pre = false, saw_eff = false;
      for (size_t j = 2; j < sec.items.size(); j += 2) {
        if (!sec.items[j].is_symbol() || j + 1 >= sec.items.size())
          throw ParseError(sec.items[j].loc, "malformed action body");
        std::string k = lower(sec.items[j].text);
        const sexpr::Node& v = sec.items[j + 1];
        if (k == ":parameters") {
          if (!v.is_list())
            throw ParseError(v.loc, "expected parameter list");
          act.params = typed.parse_typed_names<TypedVar>(v.items, true);
          saw_params = true;
        } else if (k == ":precondition") {
          detail::VarScope scope;
          scope.push(act.params);
          act.precondition = fp.parse(v, scope);
          saw_pre = true;
        } else if (k == ":effect") {
          detail::VarScope scope;
          scope.push(act.params);
          act.effects = parse_effect(v, fp, scope);
          saw_eff = true;
        } else {
          throw ParseError(sec.items[j].loc,
                           "unknown action keyword '" + k + "'");
        }
      }
      if (!saw_params || !saw_pre || !saw_eff)
        throw ParseError(sec.loc,
                         "action requires :parameters, :precondition, :effect");
      dom.actions.push_back(std::move(act));
    }
  }
  return dom;
}

// ---------------------------------------------------------------------------
// Problem parsing

inline ProblemDef parse_problem(std::string_view text, const DomainDef& dom) {
  using detail::lower;
  sexpr::Node root;
  try {
    root = sexpr::parse(text);
  } catch (const ParseError& e) {
    if (std::string(e.what()) == "empty input")
      throw ParseError(e.loc, "expected (define (problem ...))");
    throw;
  }
  if (!root.is_list() || root.items.size() < 2 ||
      !root.items[0].is_symbol() || lower(root.items[0].text) != "define" ||
      !root.items[1].is_list() || root.items[1].items.size() != 2 ||
      !root.items[1].items[0].is_symbol() ||
      lower(root.items[1].items[0].text) != "problem")
    throw ParseError(root.loc, "expected (define (problem ...))");

  ProblemDef prob;
  prob.name = lower(root.items[1].items[1].text);

  std::map<std::string, detail::PredSig> sigs;
  for (const auto& p : dom.predicates) sigs[p.name] = {p, false};
  for (const auto& ax : dom.derived) {
    if (!sigs.count(ax.head))
      sigs[ax.head] = {PredicateDecl{ax.head, ax.params, ax.loc}, true};
  }

  detail::ParserBase typed(&dom.types);
  std::map<std::string, std::string> object_types;

  // Objects must be known before :init/:goal; collect them first.
  for (size_t i = 2; i < root.items.size(); ++i) {
    const sexpr::Node& sec = root.items[i];
    if (!sec.is_list() || sec.items.empty() || !sec.items[0].is_symbol())
      throw ParseError(sec.loc, "expected problem section");
    std::string key = lower(sec.items[0].text);
    if (key == ":objects") {
      prob.objects = typed.parse_typed_names<TypedObject>(
          {sec.items.begin() + 1, sec.items.end()}, /*variables=*/false);
      for (const auto& o : prob.objects) {
        if (!object_types.emplace(o.name, o.type).second)
          throw ParseError(o.loc, "duplicate object '" + o.name + "'");
      }
    }
  }

  detail::FormulaParser fp(&dom.types, &sigs, &object_types);
  for (size_t i = 2; i < root.items.size(); ++i) {
    const sexpr::Node& sec = root.items[i];
    std::string key = lower(sec.items[0].text);
    if (key == ":domain") {
      if (sec.items.size() != 2 || !sec.items[1].is_symbol())
        throw ParseError(sec.loc, "expected (:domain name)");
      prob.domain_name = lower(sec.items[1].text);
      if (prob.domain_name != dom.name)
        throw ParseError(sec.items[1].loc, "problem references domain '" +
                                               prob.domain_name +
                                               "' but '" + dom.name +
                                               "' was provided");
    } else if (key == ":requirements") {
      for (size_t j = 1; j < sec.items.size(); ++j) {
        std::string flag = lower(sec.items[j].text);
        if (!detail::supported_requirements().count(flag))
          throw ParseError(sec.items[j].loc,
                           "unsupported requirement '" + flag + "'");
      }
    } else if (key == ":init") {
      detail::VarScope scope;
      for (size_t j = 1; j < sec.items.size(); ++j) {
        const sexpr::Node& a = sec.items[j];
        if (!a.is_list() || a.items.empty() || !a.items[0].is_symbol())
          throw ParseError(a.loc, "expected ground atom in :init");
        std::string pred = lower(a.items[0].text);
        auto it = sigs.find(pred);
        if (it != sigs.end() && it->second.is_derived)
          throw ParseError(a.loc, "derived predicate in init: '" + pred + "'");
        Atom atom = fp.parse_atom(a, scope);
        GroundAtom ga;
        ga.pred = atom.pred;
        for (const auto& t : atom.args) {
          if (t.kind != Term::Kind::Constant)
            throw ParseError(t.loc, "variable in :init atom");
          ga.args.push_back(t.name);
        }
        prob.init.push_back(std::move(ga));
      }
    } else if (key == ":goal") {
      if (sec.items.size() != 2)
        throw ParseError(sec.loc, "expected (:goal formula)");
      detail::VarScope scope;
      prob.goal = fp.parse(sec.items[1], scope);
    } else if (key != ":objects") {
      throw ParseError(sec.loc, "unknown section keyword '" + key + "'");
    }
  }

  std::sort(prob.init.begin(), prob.init.end());
  prob.init.erase(std::unique(prob.init.begin(), prob.init.end()),
                  prob.init.end());
  return prob;
}

}  // namespace abortd::pddl

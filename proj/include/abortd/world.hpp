#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "abortd/kitchen.hpp"
#include "abortd/names.hpp"
#include "abortd/ontology.hpp"
#include "abortd/pddl.hpp"
#include "abortd/search.hpp"
#include "abortd/snapshot.hpp"

namespace abortd::world {

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stable warning codes:
//   W001 unknown characteristic flag (ignored)
//   W002 classified by fallback (no rule matched, not in ontology)
//   W003 immobile scenery skipped from the problem
//   W004 object has no safety rule, skipped from the goal
//   W005 opened flag without canOpen (ignored)
//   W006 poweredOn flag without canTurnOn (ignored)
//   W007 located at an object that was skipped as scenery (atom omitted)
//   W008 state flag does not fit the classified type (ignored)
struct Warning {
  std::string code;
  std::string message;
  std::string render() const { return code + ": " + message; }
};

struct Classification {
  enum class Source { LocalRule, Ontology, DefaultFallback };
  std::string pddl_type;
  Source source = Source::DefaultFallback;
  std::string rule;

  std::string source_name() const {
    switch (source) {
      case Source::LocalRule: return "local-rule";
      case Source::Ontology: return "ontology";
      case Source::DefaultFallback: return "fallback";
    }
    return "";
  }
};

// Characteristic decision ladder, first match wins; the ontology is only
// consulted when no local rule fires, and the final fallback is
// nonperishable (any storage satisfies it).
inline Classification classify(const ObjectRecord& rec,
                               const ontology::OntologySets& kb) {
  using Source = Classification::Source;
  if (rec.has("isFridge")) return {"fridge", Source::LocalRule, "isFridge"};
  if (rec.has("isTrash")) return {"trash_can", Source::LocalRule, "isTrash"};
  if (rec.has("canTurnOn")) return {"device", Source::LocalRule, "canTurnOn"};
  if (rec.has("canOpen") && rec.has("canContain") && rec.immobile)
    return {"clopenablestorage", Source::LocalRule,
            "canOpen+canContain+immobile"};
  if (rec.has("canContain") && rec.immobile)
    return {"notclopenablestorage", Source::LocalRule, "canContain+immobile"};
  if (rec.has("canContain") && rec.has("portable"))
    return {"vessel", Source::LocalRule, "canContain+portable"};
  if (rec.has("canCut") || rec.has("canBake"))
    return {"utensil", Source::LocalRule,
            rec.has("canCut") ? "canCut" : "canBake"};
  if (rec.has("edible") && rec.has("perishableHint"))
    return {"perishable", Source::LocalRule, "edible+perishableHint"};
  if (rec.has("edible")) return {"nonperishable", Source::LocalRule, "edible"};
  if (kb.is_perishable(rec.name))
    return {"perishable", Source::Ontology, "perishable-label"};
  if (kb.is_utensil(rec.name))
    return {"utensil", Source::Ontology, "utensil-label"};
  return {"nonperishable", Source::DefaultFallback, "fallback"};
}

struct MapResult {
  pddl::ProblemDef problem;
  names::NameMap aliases;
  std::vector<Warning> warnings;
  std::map<std::string, Classification> classifications;  // by original name
};

inline MapResult map_world(const WorldSnapshot& snap,
                           const ontology::OntologySets& kb) {
  MapResult out;
  out.problem.name = "abort";
  out.problem.domain_name = kitchen::builtin_domain().name;

  std::set<std::string> snapshot_names;
  for (const auto& rec : snap.objects) {
    if (!snapshot_names.insert(rec.name).second)
      throw MapError("duplicate object '" + rec.name + "' in snapshot");
    if (!out.aliases.insert(rec.name))
      throw MapError("object names '" + rec.name +
                     "' collide after normalization");
  }
  for (const std::string& held : {snap.left_hand, snap.right_hand}) {
    if (!held.empty() && !snapshot_names.count(held))
      throw MapError("held object '" + held + "' is not in the objects list");
  }

  auto warn = [&](std::string code, std::string msg) {
    out.warnings.push_back({std::move(code), std::move(msg)});
  };

  // Classify; decide inclusion.
  std::set<std::string> included;   // original names
  std::set<std::string> skipped;
  for (const auto& rec : snap.objects) {
    for (const auto& flag : rec.characteristics)
      if (!known_characteristics().count(flag))
        warn("W001", "unknown characteristic '" + flag + "' on '" + rec.name +
                         "'");
    Classification cls = classify(rec, kb);
    if (cls.source == Classification::Source::DefaultFallback) {
      if (rec.immobile) {
        warn("W003", "immobile scenery '" + rec.name + "' skipped");
        skipped.insert(rec.name);
        out.classifications.emplace(rec.name, cls);
        continue;
      }
      warn("W002", "'" + rec.name + "' classified nonperishable by fallback");
    }
    out.classifications.emplace(rec.name, cls);
    included.insert(rec.name);
    out.problem.objects.push_back(
        {names::to_snake(rec.name), cls.pddl_type, {}});
  }

  // Init atoms.
  auto add_atom = [&](const std::string& pred,
                      std::vector<std::string> args) {
    out.problem.init.push_back({pred, std::move(args)});
  };
  const pddl::TypeTree& types = kitchen::builtin_domain().types;
  for (const auto& rec : snap.objects) {
    if (!included.count(rec.name)) continue;
    const std::string norm = names::to_snake(rec.name);
    const Classification& cls = out.classifications.at(rec.name);
    const bool held = rec.name == snap.left_hand || rec.name == snap.right_hand;

    if (!rec.location.empty()) {
      if (held)
        throw MapError("held object '" + rec.name +
                       "' also has a location in the snapshot");
      if (!snapshot_names.count(rec.location))
        throw MapError("object '" + rec.name +
                       "' located at unknown object '" + rec.location + "'");
      if (skipped.count(rec.location)) {
        warn("W007", "'" + rec.name + "' located at skipped scenery '" +
                         rec.location + "'; at-atom omitted");
      } else {
        add_atom("at", {norm, names::to_snake(rec.location)});
      }
    }
    if (rec.opened.has_value()) {
      if (!rec.has("canOpen")) {
        warn("W005", "opened flag on '" + rec.name + "' without canOpen");
      } else if (!types.is_subtype(cls.pddl_type, "clopenable")) {
        warn("W008", "opened flag on '" + rec.name + "' of type " +
                         cls.pddl_type + " ignored");
      } else if (*rec.opened) {
        add_atom("opened", {norm});
      }
    }
    if (rec.powered_on.has_value()) {
      if (!rec.has("canTurnOn")) {
        warn("W006", "poweredOn flag on '" + rec.name + "' without canTurnOn");
      } else if (!types.is_subtype(cls.pddl_type, "device")) {
        warn("W008", "poweredOn flag on '" + rec.name + "' of type " +
                         cls.pddl_type + " ignored");
      } else if (*rec.powered_on) {
        add_atom("device-on", {norm});
      }
    }
    if (rec.immobile) add_atom("immobile", {norm});
  }
  if (!snap.left_hand.empty()) {
    if (!included.count(snap.left_hand))
      throw MapError("held object '" + snap.left_hand +
                     "' was skipped as scenery");
    add_atom("holding-left", {names::to_snake(snap.left_hand)});
  }
  if (!snap.right_hand.empty()) {
    if (!included.count(snap.right_hand))
      throw MapError("held object '" + snap.right_hand +
                     "' was skipped as scenery");
    add_atom("holding-right", {names::to_snake(snap.right_hand)});
  }

  std::sort(out.problem.init.begin(), out.problem.init.end());
  out.problem.init.erase(
      std::unique(out.problem.init.begin(), out.problem.init.end()),
      out.problem.init.end());

  kitchen::SafeGoal sg = kitchen::safe_goal(out.problem.objects);
  for (const auto& name : sg.skipped)
    warn("W004", "no safety rule for '" + out.aliases.render(name) +
                     "'; not part of the goal");
  out.problem.goal = std::move(sg.goal);
  return out;
}

// Plan arguments back in the snapshot's original spelling.
inline search::Plan render_plan_names(const search::Plan& plan,
                                      const names::NameMap& aliases) {
  search::Plan out = plan;
  for (auto& step : out.steps)
    for (auto& arg : step.args) arg = aliases.render(arg);
  return out;
}

}  // namespace abortd::world

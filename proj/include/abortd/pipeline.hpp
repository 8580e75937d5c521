#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "abortd/ground.hpp"
#include "abortd/kitchen.hpp"
#include "abortd/names.hpp"
#include "abortd/ontology.hpp"
#include "abortd/parse.hpp"
#include "abortd/search.hpp"
#include "abortd/snapshot.hpp"
#include "abortd/validate.hpp"
#include "abortd/world.hpp"

namespace abortd::pipeline {

// Paper-style tuple rendering, one step per line:
//   ('put', ['mediumBowl3', 'kitchenCounter']),
//   ('move', ['onion', 'kitchenCounter', 'fridge'])
inline std::string plan_tuples(const search::Plan& plan) {
  std::ostringstream os;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    os << "('" << s.display << "', [";
    for (size_t k = 0; k < s.args.size(); ++k) {
      if (k) os << ", ";
      os << '\'' << s.args[k] << '\'';
    }
    os << "])";
    if (i + 1 < plan.steps.size()) os << ',';
    os << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json plan_json(const search::Plan& plan) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : plan.steps) {
    nlohmann::ordered_json step;
    step["action"] = s.display;
    step["args"] = s.args;
    arr.push_back(std::move(step));
  }
  return arr;
}

struct AbortOutcome {
  search::Status status = search::Status::Unsolvable;
  search::Plan plan;  // arguments in original snapshot spelling
  search::Stats stats;
  std::vector<world::Warning> warnings;
};

// The full abort pipeline: snapshot -> problem -> ground task -> plan, with
// plan arguments rendered back to the snapshot's spelling. Shared by the
// CLI and the HTTP service so both produce identical plans.
inline AbortOutcome run_abort(const world::WorldSnapshot& snap,
                              const ontology::OntologySets& kb,
                              const search::Limits& limits) {
  AbortOutcome out;
  world::MapResult mapped = world::map_world(snap, kb);
  out.warnings = mapped.warnings;
  ground::GroundTask task =
      ground::prune(ground::ground(kitchen::builtin_domain(), mapped.problem));
  search::Result res = search::gbfs(task, limits);
  out.status = res.status;
  out.stats = res.stats;
  out.plan = world::render_plan_names(res.plan, mapped.aliases);
  return out;
}

inline nlohmann::ordered_json abort_response_json(const AbortOutcome& out) {
  nlohmann::ordered_json j;
  j["plan"] = plan_json(out.plan);
  nlohmann::ordered_json paper = nlohmann::ordered_json::array();
  {
    std::istringstream lines(plan_tuples(out.plan));
    std::string line;
    while (std::getline(lines, line)) paper.push_back(line);
  }
  j["paper_style"] = std::move(paper);
  j["stats"] = {{"expansions", out.stats.expansions},
                {"seconds", out.stats.seconds}};
  nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
  for (const auto& w : out.warnings) warnings.push_back(w.render());
  j["warnings"] = std::move(warnings);
  return j;
}

struct PlanOutcome {
  search::Status status = search::Status::Unsolvable;
  search::Plan plan;
  search::Stats stats;
};

// Plain domain+problem planning used by `abortd plan` and POST /plan.
// Throws ParseError on bad input text.
inline PlanOutcome run_plan(const std::string& domain_text,
                            const std::string& problem_text,
                            const search::Limits& limits,
                            std::string* ground_dump = nullptr) {
  pddl::DomainDef dom = pddl::parse_domain(domain_text);
  auto diags = pddl::validate_domain(dom);
  if (pddl::has_errors(diags))
    throw ParseError(diags.front().loc, diags.front().message);
  pddl::ProblemDef prob = pddl::parse_problem(problem_text, dom);
  auto pdiags = pddl::validate_problem(prob, dom);
  if (pddl::has_errors(pdiags))
    throw ParseError(pdiags.front().loc, pdiags.front().message);

  ground::GroundTask task = ground::prune(ground::ground(dom, prob));
  if (ground_dump) *ground_dump = ground::dump_task(task);
  search::Result res = search::gbfs(task, limits);
  return {res.status, std::move(res.plan), res.stats};
}

// Accepts a plan as a JSON array of {action, args} or as paper-style tuple
// lines; argument names are normalized the same way the mapper does.
inline search::Plan parse_plan_text(const std::string& text) {
  search::Plan plan;
  // JSON first.
  {
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_array()) {
      for (const auto& step : j) {
        search::PlanStep ps;
        ps.display = step.at("action").get<std::string>();
        for (const auto& a : step.at("args"))
          ps.args.push_back(names::to_snake(a.get<std::string>()));
        plan.steps.push_back(std::move(ps));
      }
      return plan;
    }
  }
  // Tuple lines: ('name', ['a', 'b']),
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::vector<std::string> quoted;
    size_t pos = 0;
    while ((pos = line.find('\'', pos)) != std::string::npos) {
      size_t end = line.find('\'', pos + 1);
      if (end == std::string::npos)
        throw ParseError({lineno, static_cast<int>(pos) + 1},
                         "unterminated quote in plan line");
      quoted.push_back(line.substr(pos + 1, end - pos - 1));
      pos = end + 1;
    }
    if (quoted.empty()) continue;  // blank or noise line
    search::PlanStep ps;
    ps.display = quoted[0];
    for (size_t i = 1; i < quoted.size(); ++i)
      ps.args.push_back(names::to_snake(quoted[i]));
    plan.steps.push_back(std::move(ps));
  }
  return plan;
}

}  // namespace abortd::pipeline

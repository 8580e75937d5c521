#include <gtest/gtest.h>

#include "abortd/closure.hpp"
#include "abortd/ground.hpp"
#include "abortd/kitchen.hpp"
#include "abortd/parse.hpp"
#include "support.hpp"

namespace pddl = abortd::pddl;
namespace kitchen = abortd::kitchen;

namespace {

TEST(Kitchen, TwoSchemasDisplayAsPut) {
  int puts = 0;
  for (const auto& a : kitchen::builtin_domain().actions)
    if (a.display_name == "put") ++puts;
  EXPECT_EQ(puts, 2);
}

TEST(Kitchen, BasePredicates) {
  std::set<std::string> preds;
  for (const auto& p : kitchen::builtin_domain().predicates)
    preds.insert(p.name);
  EXPECT_EQ(preds, (std::set<std::string>{"at", "opened", "device-on",
                                          "holding-left", "holding-right",
                                          "immobile"}));
}

TEST(Kitchen, MovePreconditionConjuncts) {
  const pddl::ActionSchema* move = nullptr;
  for (const auto& a : kitchen::builtin_domain().actions)
    if (a.name == "move") move = &a;
  ASSERT_NE(move, nullptr);
  const pddl::Formula& pre = move->precondition;
  ASSERT_EQ(pre.kind, pddl::Formula::Kind::And);
  ASSERT_EQ(pre.children.size(), 3u);
  EXPECT_EQ(pre.children[0].kind, pddl::Formula::Kind::Atom);
  EXPECT_EQ(pre.children[0].atom.pred, "robot-can-grasp");
  ASSERT_EQ(pre.children[1].kind, pddl::Formula::Kind::Not);
  EXPECT_EQ(pre.children[1].children[0].atom.pred, "immobile");
  EXPECT_EQ(pre.children[2].atom.pred, "at");
}

TEST(Kitchen, SafePerishableBody) {
  const pddl::AxiomDef* ax = nullptr;
  for (const auto& a : kitchen::builtin_domain().derived)
    if (a.head == "safe-perishable") ax = &a;
  ASSERT_NE(ax, nullptr);
  ASSERT_EQ(ax->body.kind, pddl::Formula::Kind::Exists);
  ASSERT_EQ(ax->body.vars.size(), 1u);
  EXPECT_EQ(ax->body.vars[0].type, "fridge");
  EXPECT_EQ(ax->body.children[0].atom.pred, "transitive-at");
}

TEST(Kitchen, SafetyRegistry) {
  auto rule = [](const char* type) {
    const kitchen::SafetyRule* r = kitchen::rule_for_type(type);
    return r ? r->predicate : std::string("<none>");
  };
  EXPECT_EQ(rule("perishable"), "safe-perishable");
  EXPECT_EQ(rule("nonperishable"), "safe-nonperishable");
  EXPECT_EQ(rule("vessel"), "safe-vessel");
  EXPECT_EQ(rule("utensil"), "safe-utensil");
  EXPECT_EQ(rule("disposable"), "safe-disposable");
  EXPECT_EQ(rule("device"), "safe-device");
  EXPECT_EQ(rule("fridge"), "safe-clopenable");
  EXPECT_EQ(rule("clopenablestorage"), "safe-clopenable");
  EXPECT_EQ(rule("trash_can"), "<none>");
  EXPECT_EQ(rule("notclopenablestorage"), "<none>");
}

TEST(Kitchen, SafeGoalScenario2Objects) {
  std::vector<pddl::TypedObject> objects = {
      {"cooking_knife", "utensil", {}},
      {"onion", "perishable", {}},
      {"kitchen_counter", "notclopenablestorage", {}},
      {"fridge", "fridge", {}},
  };
  kitchen::SafeGoal sg = kitchen::safe_goal(objects);
  std::set<std::string> atoms;
  for (const auto& c : sg.goal.children)
    atoms.insert(c.atom.pred +
                 (c.atom.args.empty() ? "" : "(" + c.atom.args[0].name + ")"));
  EXPECT_TRUE(atoms.count("robot-can-grasp"));
  EXPECT_TRUE(atoms.count("safe-perishable(onion)"));
  EXPECT_TRUE(atoms.count("safe-utensil(cooking_knife)"));
  EXPECT_TRUE(atoms.count("safe-clopenable(fridge)"));
  ASSERT_EQ(sg.skipped.size(), 1u);
  EXPECT_EQ(sg.skipped[0], "kitchen_counter");
}

TEST(Kitchen, SafeGoalEmptyObjects) {
  kitchen::SafeGoal sg = kitchen::safe_goal({});
  ASSERT_EQ(sg.goal.kind, pddl::Formula::Kind::And);
  ASSERT_EQ(sg.goal.children.size(), 1u);
  EXPECT_EQ(sg.goal.children[0].atom.pred, "robot-can-grasp");
}

// A closed fridge satisfies its safe-clopenable goal under the closure.
TEST(Kitchen, ClosedFridgeIsSafe) {
  const auto& dom = kitchen::builtin_domain();
  pddl::ProblemDef prob = pddl::parse_problem(R"((define (problem p)
    (:domain kitchen)
    (:objects f - fridge)
    (:init)
    (:goal (and))))",
                                              dom);
  prob.goal = kitchen::safe_goal(prob.objects).goal;
  auto task = abortd::ground::ground(dom, prob);
  auto c = abortd::axioms::closure(task.init, task);
  EXPECT_TRUE(abortd::axioms::eval(task.goal, c));
}

TEST(Kitchen, OpenedFridgeIsNotSafe) {
  const auto& dom = kitchen::builtin_domain();
  pddl::ProblemDef prob = pddl::parse_problem(R"((define (problem p)
    (:domain kitchen)
    (:objects f - fridge)
    (:init (opened f))
    (:goal (and))))",
                                              dom);
  prob.goal = kitchen::safe_goal(prob.objects).goal;
  auto task = abortd::ground::ground(dom, prob);
  auto c = abortd::axioms::closure(task.init, task);
  EXPECT_FALSE(abortd::axioms::eval(task.goal, c));
}

}  // namespace

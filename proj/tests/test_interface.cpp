#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "abortd/pipeline.hpp"
#include "abortd/server.hpp"
#include "support.hpp"

namespace pipeline = abortd::pipeline;
namespace search = abortd::search;

namespace {

class ServiceFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<abortd::server::Service>(
        testsupport::cached_kb(), search::Limits{});
    service_->attach(srv_);
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  void TearDown() override {
    srv_.stop();
    thread_.join();
  }
  httplib::Client client() {
    return httplib::Client("127.0.0.1", port_);
  }

  httplib::Server srv_;
  std::unique_ptr<abortd::server::Service> service_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(ServiceFixture, Healthz) {
  auto res = client().Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "ok");
}

TEST_F(ServiceFixture, AbortScenario1) {
  std::string body =
      testsupport::read_file(testsupport::data_dir() + "/scenario1.json");
  auto res = client().Post("/abort", body, "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto j = nlohmann::json::parse(res->body);
  ASSERT_EQ(j["plan"].size(), 1u);
  EXPECT_EQ(j["plan"][0]["action"], "put");
  EXPECT_EQ(j["plan"][0]["args"][0], "mediumBowl3");
  EXPECT_TRUE(j.contains("paper_style"));
  EXPECT_TRUE(j.contains("stats"));
  EXPECT_TRUE(j.contains("warnings"));
}

TEST_F(ServiceFixture, AbortMalformedBody) {
  auto res = client().Post("/abort", "{}", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  auto res2 = client().Post("/abort", "not json at all", "application/json");
  ASSERT_TRUE(res2);
  EXPECT_EQ(res2->status, 400);
}

TEST_F(ServiceFixture, AbortUnsolvableIs422) {
  // A perishable with no fridge anywhere cannot be made safe.
  nlohmann::json snap = {
      {"version", 1},
      {"robot", {{"leftHand", nullptr}, {"rightHand", nullptr}}},
      {"objects",
       {{{"name", "onion"},
         {"characteristics", {"portable"}},
         {"location", "counter"},
         {"immobile", false}},
        {{"name", "counter"},
         {"characteristics", {"canContain"}},
         {"location", nullptr},
         {"immobile", true}}}}};
  auto res = client().Post("/abort", snap.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  EXPECT_EQ(nlohmann::json::parse(res->body)["error"], "unsolvable");
}

TEST_F(ServiceFixture, PlanEndpoint) {
  nlohmann::json body;
  body["domain"] = abortd::kitchen::domain_text();
  body["problem"] =
      "(define (problem p) (:domain kitchen) "
      "(:objects bowl - vessel counter - notclopenablestorage) "
      "(:init (holding-left bowl) (immobile counter)) "
      "(:goal (and (robot-can-grasp) (safe-vessel bowl))))";
  auto res = client().Post("/plan", body.dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto j = nlohmann::json::parse(res->body);
  ASSERT_EQ(j["plan"].size(), 1u);
  EXPECT_EQ(j["plan"][0]["action"], "put");
}

TEST_F(ServiceFixture, PlanEndpointRejectsBadPddl) {
  nlohmann::json body;
  body["domain"] = "(define (domain broken)";
  body["problem"] = "(define (problem p))";
  auto res = client().Post("/plan", body.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

// Same snapshot, concurrent requests: identical plans, no cross-request
// state.
TEST_F(ServiceFixture, ConcurrentRequestsAgree) {
  std::string body =
      testsupport::read_file(testsupport::data_dir() + "/scenario2.json");
  constexpr int kThreads = 4;
  std::vector<std::string> plans(kThreads);
  std::vector<std::thread> threads;
  for (int i = 0; i < kThreads; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port_);
      auto res = c.Post("/abort", body, "application/json");
      if (res && res->status == 200)
        plans[i] = nlohmann::json::parse(res->body)["plan"].dump();
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 1; i < kThreads; ++i) EXPECT_EQ(plans[i], plans[0]);
  EXPECT_FALSE(plans[0].empty());
}

// The CLI and HTTP paths must serialize the same plan JSON for the same
// snapshot (stats are timing-dependent and excluded).
TEST_F(ServiceFixture, HttpPlanMatchesInProcessPipeline) {
  std::string body =
      testsupport::read_file(testsupport::data_dir() + "/scenario2.json");
  auto res = client().Post("/abort", body, "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto snap = abortd::world::parse_snapshot_text(body);
  pipeline::AbortOutcome out =
      pipeline::run_abort(snap, testsupport::cached_kb(), {});
  auto http_json = nlohmann::json::parse(res->body);
  auto local_json = pipeline::abort_response_json(out);
  EXPECT_EQ(http_json["plan"].dump(), local_json["plan"].dump());
  EXPECT_EQ(http_json["paper_style"].dump(), local_json["paper_style"].dump());
  EXPECT_EQ(http_json["warnings"].dump(), local_json["warnings"].dump());
}

TEST(PlanText, ParsesTupleLines) {
  search::Plan plan = pipeline::parse_plan_text(
      "('put', ['cookingKnife', 'kitchenCounter']),\n"
      "('move', ['onion', 'kitchenCounter', 'fridge'])\n");
  ASSERT_EQ(plan.size(), 2u);
  EXPECT_EQ(plan.steps[0].display, "put");
  EXPECT_EQ(plan.steps[0].args,
            (std::vector<std::string>{"cooking_knife", "kitchen_counter"}));
  EXPECT_EQ(plan.steps[1].args,
            (std::vector<std::string>{"onion", "kitchen_counter", "fridge"}));
}

TEST(PlanText, ParsesJsonPlans) {
  search::Plan plan = pipeline::parse_plan_text(
      R"([{"action": "put", "args": ["mediumBowl3", "kitchenCounter"]}])");
  ASSERT_EQ(plan.size(), 1u);
  EXPECT_EQ(plan.steps[0].display, "put");
  EXPECT_EQ(plan.steps[0].args,
            (std::vector<std::string>{"medium_bowl3", "kitchen_counter"}));
}

TEST(PlanText, TupleRenderingMatchesPaperShape) {
  search::Plan plan;
  plan.steps.push_back({"put-right", "put", {"mediumBowl3", "kitchenCounter"}});
  EXPECT_EQ(pipeline::plan_tuples(plan),
            "('put', ['mediumBowl3', 'kitchenCounter'])\n");
  plan.steps.push_back({"move", "move", {"onion", "kitchenCounter", "fridge"}});
  EXPECT_EQ(pipeline::plan_tuples(plan),
            "('put', ['mediumBowl3', 'kitchenCounter']),\n"
            "('move', ['onion', 'kitchenCounter', 'fridge'])\n");
}

}  // namespace

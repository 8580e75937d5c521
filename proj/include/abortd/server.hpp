#pragma once

#include <random>
#include <sstream>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "abortd/ontology.hpp"
#include "abortd/pipeline.hpp"
#include "abortd/search.hpp"
#include "abortd/snapshot.hpp"
#include "abortd/world.hpp"

namespace abortd::server {

// Stateless request handlers over a shared read-only knowledge base; every
// request plans independently.
class Service {
 public:
  Service(ontology::OntologySets kb, search::Limits default_limits)
      : kb_(std::move(kb)), defaults_(default_limits) {}

  void attach(httplib::Server& srv) const {
    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });

    srv.Post("/abort", [this](const httplib::Request& req,
                              httplib::Response& res) {
      handle_abort(req, res);
    });

    srv.Post("/plan", [this](const httplib::Request& req,
                             httplib::Response& res) {
      handle_plan(req, res);
    });
  }

 private:
  // Request limits may tighten but never exceed the server's own caps.
  search::Limits limits_from(const nlohmann::json& j) const {
    search::Limits l = defaults_;
    if (j.contains("limits") && j["limits"].is_object()) {
      const auto& jl = j["limits"];
      if (jl.contains("maxExpansions"))
        l.max_expansions =
            std::min<long>(defaults_.max_expansions, jl["maxExpansions"]);
      if (jl.contains("maxSeconds"))
        l.max_seconds =
            std::min<double>(defaults_.max_seconds, jl["maxSeconds"]);
    }
    return l;
  }

  static void reply_json(httplib::Response& res, int status,
                         const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(2) + "\n", "application/json");
  }

  static std::string correlation_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream os;
    os << std::hex << rng();
    return os.str();
  }

  void handle_abort(const httplib::Request& req, httplib::Response& res) const {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
      reply_json(res, 400, {{"error", "request body is not valid JSON"}});
      return;
    }
    try {
      world::WorldSnapshot snap = world::parse_snapshot(body);
      pipeline::AbortOutcome out =
          pipeline::run_abort(snap, kb_, limits_from(body));
      switch (out.status) {
        case search::Status::Solved:
          reply_json(res, 200, pipeline::abort_response_json(out));
          return;
        case search::Status::Unsolvable:
          reply_json(res, 422,
                     {{"error", "unsolvable"},
                      {"stats", {{"expansions", out.stats.expansions},
                                 {"seconds", out.stats.seconds}}}});
          return;
        case search::Status::LimitExceeded:
          reply_json(res, 422,
                     {{"error", "limit_exceeded"},
                      {"stats", {{"expansions", out.stats.expansions},
                                 {"seconds", out.stats.seconds}}}});
          return;
      }
    } catch (const world::SnapshotError& e) {
      reply_json(res, 400, {{"error", e.what()}});
    } catch (const world::MapError& e) {
      reply_json(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      reply_json(res, 500, {{"error", "internal"},
                            {"correlation_id", correlation_id()}});
    }
  }

  void handle_plan(const httplib::Request& req, httplib::Response& res) const {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() ||
        !body.contains("domain") || !body.contains("problem")) {
      reply_json(res, 400,
                 {{"error", "expected JSON body with domain and problem"}});
      return;
    }
    try {
      pipeline::PlanOutcome out = pipeline::run_plan(
          body["domain"].get<std::string>(),
          body["problem"].get<std::string>(), limits_from(body));
      if (out.status == search::Status::Solved) {
        nlohmann::ordered_json j;
        j["plan"] = pipeline::plan_json(out.plan);
        j["stats"] = {{"expansions", out.stats.expansions},
                      {"seconds", out.stats.seconds}};
        reply_json(res, 200, j);
      } else {
        reply_json(res, 422,
                   {{"error", out.status == search::Status::Unsolvable
                                  ? "unsolvable"
                                  : "limit_exceeded"}});
      }
    } catch (const ParseError& e) {
      reply_json(res, 400, {{"error", format_message({e.loc.line, e.loc.col},
                                                     "error", e.what())}});
    } catch (const std::exception&) {
      reply_json(res, 500, {{"error", "internal"},
                            {"correlation_id", correlation_id()}});
    }
  }

  ontology::OntologySets kb_;
  search::Limits defaults_;
};

}  // namespace abortd::server

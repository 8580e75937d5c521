// abortd — abort-command planning for the kitchen domain.
//
// Subcommands: abort, plan, validate, classify, domain, serve.
// Exit codes: 0 plan found / valid; 1 invalid plan; 2 unsolvable;
// 3 environment or input error; 4 search limit exceeded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "abortd/kitchen.hpp"
#include "abortd/ontology.hpp"
#include "abortd/pipeline.hpp"
#include "abortd/print.hpp"
#include "abortd/server.hpp"
#include "abortd/world.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidPlan = 1;
constexpr int kExitUnsolvable = 2;
constexpr int kExitEnvironment = 3;
constexpr int kExitLimit = 4;

struct OntologyOptions {
  bool live = false;
  std::string endpoint;
  std::string cache = "./ontology_cache.json";
};

void add_ontology_options(CLI::App* cmd, OntologyOptions& opts) {
  cmd->add_flag("--live", opts.live,
                "fetch the ontology sets from the SPARQL endpoint instead of "
                "relying on the cache");
  cmd->add_option("--endpoint", opts.endpoint,
                  "SPARQL endpoint URL (implies --live; default " +
                      std::string(abortd::ontology::kDefaultEndpoint) + ")")
      ->envname("ABORTD_SPARQL_ENDPOINT");
  cmd->add_option("--cache", opts.cache, "ontology cache file")
      ->envname("ABORTD_CACHE")
      ->capture_default_str();
}

abortd::ontology::OntologySets load_ontology(const OntologyOptions& opts) {
  std::optional<std::string> endpoint;
  if (opts.live || !opts.endpoint.empty())
    endpoint = opts.endpoint.empty()
                   ? std::string(abortd::ontology::kDefaultEndpoint)
                   : opts.endpoint;
  return abortd::ontology::load(endpoint, opts.cache);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void print_warnings(const std::vector<abortd::world::Warning>& warnings) {
  for (const auto& w : warnings) std::cerr << w.render() << '\n';
}

void print_stats(const abortd::search::Stats& stats) {
  std::fprintf(stderr, "expansions=%ld generated=%ld seconds=%.3f\n",
               stats.expansions, stats.generated, stats.seconds);
}

int report_no_plan(abortd::search::Status status) {
  if (status == abortd::search::Status::Unsolvable) {
    std::cerr << "no plan exists for this world\n";
    return kExitUnsolvable;
  }
  std::cerr << "search limit exceeded before a plan was found\n";
  return kExitLimit;
}

int cmd_abort(const std::string& snapshot_path, const OntologyOptions& onto,
              const abortd::search::Limits& limits, bool as_json) {
  auto kb = load_ontology(onto);
  auto snap = abortd::world::parse_snapshot_text(read_file(snapshot_path));
  abortd::pipeline::AbortOutcome out =
      abortd::pipeline::run_abort(snap, kb, limits);
  print_warnings(out.warnings);
  print_stats(out.stats);
  if (out.status != abortd::search::Status::Solved)
    return report_no_plan(out.status);
  if (as_json) {
    std::cout << abortd::pipeline::abort_response_json(out).dump(2) << '\n';
  } else if (out.plan.steps.empty()) {
    std::cout << "world already safe\n";
  } else {
    std::cout << abortd::pipeline::plan_tuples(out.plan);
  }
  return kExitOk;
}

int cmd_plan(const std::string& domain_path, const std::string& problem_path,
             const abortd::search::Limits& limits, bool as_json,
             bool dump_ground) {
  std::string dump;
  abortd::pipeline::PlanOutcome out = abortd::pipeline::run_plan(
      read_file(domain_path), read_file(problem_path), limits,
      dump_ground ? &dump : nullptr);
  if (dump_ground) std::cout << dump;
  print_stats(out.stats);
  if (out.status != abortd::search::Status::Solved)
    return report_no_plan(out.status);
  if (as_json) {
    nlohmann::ordered_json j;
    j["plan"] = abortd::pipeline::plan_json(out.plan);
    j["stats"] = {{"expansions", out.stats.expansions},
                  {"seconds", out.stats.seconds}};
    std::cout << j.dump(2) << '\n';
  } else if (out.plan.steps.empty()) {
    std::cout << "world already safe\n";
  } else {
    std::cout << abortd::pipeline::plan_tuples(out.plan);
  }
  return kExitOk;
}

int cmd_validate(const std::string& domain_path,
                 const std::string& problem_path,
                 const std::string& plan_path) {
  namespace pddl = abortd::pddl;
  pddl::DomainDef dom = pddl::parse_domain(read_file(domain_path));
  auto diags = pddl::validate_domain(dom);
  if (pddl::has_errors(diags)) {
    for (const auto& d : diags)
      std::cerr << domain_path << ':' << d.render() << '\n';
    return kExitEnvironment;
  }
  pddl::ProblemDef prob = pddl::parse_problem(read_file(problem_path), dom);
  abortd::ground::GroundTask task = abortd::ground::ground(dom, prob);
  abortd::search::Plan plan =
      abortd::pipeline::parse_plan_text(read_file(plan_path));
  abortd::search::Verdict v = abortd::search::validate_plan(task, plan);
  if (v.valid) {
    std::cout << "VALID\n";
    return kExitOk;
  }
  std::cout << "INVALID at step " << v.failed_step << ": " << v.reason << '\n';
  return kExitInvalidPlan;
}

int cmd_classify(const std::string& snapshot_path,
                 const OntologyOptions& onto) {
  auto kb = load_ontology(onto);
  auto snap = abortd::world::parse_snapshot_text(read_file(snapshot_path));
  for (const auto& rec : snap.objects) {
    abortd::world::Classification cls = abortd::world::classify(rec, kb);
    std::printf("%-24s %-20s %-10s %s\n", rec.name.c_str(),
                cls.pddl_type.c_str(), cls.source_name().c_str(),
                cls.rule.c_str());
  }
  return kExitOk;
}

int cmd_serve(const std::string& bind, const OntologyOptions& onto,
              const abortd::search::Limits& limits) {
  auto kb = load_ontology(onto);
  std::string host = bind;
  int port = 8080;
  if (auto colon = bind.rfind(':'); colon != std::string::npos) {
    host = bind.substr(0, colon);
    port = std::stoi(bind.substr(colon + 1));
  }
  abortd::server::Service service(std::move(kb), limits);
  httplib::Server srv;
  service.attach(srv);
  std::cerr << "abortd listening on " << host << ':' << port << '\n';
  if (!srv.listen(host, port)) {
    std::cerr << "cannot bind " << host << ':' << port << '\n';
    return kExitEnvironment;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"abort-command planning for the kitchen domain"};
  app.require_subcommand(1);

  OntologyOptions onto;
  abortd::search::Limits limits;
  bool as_json = false;
  bool dump_ground = false;
  bool dump_domain = false;
  std::string snapshot_path, domain_path, problem_path, plan_path;
  std::string bind = "127.0.0.1:8080";

  auto add_limits = [&](CLI::App* cmd) {
    cmd->add_option("--max-expansions", limits.max_expansions,
                    "search expansion limit")
        ->capture_default_str();
    cmd->add_option("--max-seconds", limits.max_seconds,
                    "search wall-clock limit")
        ->capture_default_str();
  };

  CLI::App* abort_cmd =
      app.add_subcommand("abort", "plan a safe-state recovery for a snapshot");
  abort_cmd->add_option("snapshot", snapshot_path, "world snapshot JSON file")
      ->required();
  abort_cmd->add_flag("--json", as_json, "JSON output");
  add_ontology_options(abort_cmd, onto);
  add_limits(abort_cmd);

  CLI::App* plan_cmd =
      app.add_subcommand("plan", "plan for a PDDL domain and problem");
  plan_cmd->add_option("domain", domain_path, "domain PDDL file")->required();
  plan_cmd->add_option("problem", problem_path, "problem PDDL file")
      ->required();
  plan_cmd->add_flag("--json", as_json, "JSON output");
  plan_cmd->add_flag("--dump-ground", dump_ground,
                     "print the ground task before planning");
  add_limits(plan_cmd);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "replay a plan against a PDDL task");
  validate_cmd->add_option("domain", domain_path, "domain PDDL file")
      ->required();
  validate_cmd->add_option("problem", problem_path, "problem PDDL file")
      ->required();
  validate_cmd->add_option("plan", plan_path, "plan file (tuples or JSON)")
      ->required();

  CLI::App* classify_cmd = app.add_subcommand(
      "classify", "show the inferred PDDL type of every snapshot object");
  classify_cmd->add_option("snapshot", snapshot_path, "world snapshot JSON")
      ->required();
  add_ontology_options(classify_cmd, onto);

  CLI::App* domain_cmd =
      app.add_subcommand("domain", "the built-in kitchen domain");
  domain_cmd->add_flag("--dump", dump_domain, "print the domain as PDDL");

  CLI::App* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
  serve_cmd->add_option("--bind", bind, "host:port")->capture_default_str();
  add_ontology_options(serve_cmd, onto);
  add_limits(serve_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (abort_cmd->parsed())
      return cmd_abort(snapshot_path, onto, limits, as_json);
    if (plan_cmd->parsed())
      return cmd_plan(domain_path, problem_path, limits, as_json, dump_ground);
    if (validate_cmd->parsed())
      return cmd_validate(domain_path, problem_path, plan_path);
    if (classify_cmd->parsed()) return cmd_classify(snapshot_path, onto);
    if (domain_cmd->parsed()) {
      if (dump_domain) {
        std::cout << abortd::kitchen::domain_text();
      } else {
        const auto& dom = abortd::kitchen::builtin_domain();
        std::cout << "domain " << dom.name << ": "
                  << dom.types.names().size() - 1 << " types, "
                  << dom.predicates.size() << " base predicates, "
                  << dom.derived.size() << " axioms, " << dom.actions.size()
                  << " actions\n";
      }
      return kExitOk;
    }
    if (serve_cmd->parsed()) return cmd_serve(bind, onto, limits);
  } catch (const abortd::ParseError& e) {
    std::cerr << abortd::format_message(e.loc, "error", e.what()) << '\n';
    return kExitEnvironment;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEnvironment;
  }
  return kExitEnvironment;
}

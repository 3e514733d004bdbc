#include "doctest.h"
#include "expertise/repro.hpp"
#include "expertise/scenario.hpp"

using namespace expertise;

namespace {

const char* kExample5 = R"json({
  "variables": ["p", "q"],
  "cases": ["c", "d"],
  "sources": ["*", "i"],
  "reports": [
    {"source": "*", "case": "c", "formula": "p"},
    {"source": "i", "case": "c", "formula": "!p & q"}
  ],
  "operator": {"name": "var-based-cond"},
  "queries": [
    {"case": "c", "formula": "q & E(i, q)", "target": "belief", "expect": true}
  ]
})json";

}  // namespace

TEST_CASE("scenario loading") {
  Scenario s = load_scenario_text(kExample5);
  CHECK(s.sig.num_variables() == 2);
  CHECK(s.reports.size() == 2);
  CHECK(s.operator_name == "var-based-cond");
  REQUIRE(s.queries.size() == 1);
  CHECK(s.queries[0].expect == true);
  CHECK_FALSE(s.queries[0].knowledge);
}

TEST_CASE("scenario validation names the offending field") {
  CHECK_THROWS_WITH_AS(load_scenario_text("{\"cases\": [\"c\"]}"),
                       doctest::Contains("variables"), InvalidScenario);
  CHECK_THROWS_WITH_AS(load_scenario_text("not json"),
                       doctest::Contains("not valid JSON"), InvalidScenario);

  nlohmann::json j = nlohmann::json::parse(kExample5);
  j["queries"][0]["case"] = "nowhere";
  CHECK_THROWS_WITH_AS(load_scenario(j), doctest::Contains("nowhere"),
                       InvalidScenario);
  j = nlohmann::json::parse(kExample5);
  j["operator"]["name"] = "mystery";
  CHECK_THROWS_WITH_AS(load_scenario(j), doctest::Contains("mystery"),
                       InvalidScenario);
  j = nlohmann::json::parse(kExample5);
  j["reports"][0]["formula"] = "p &";
  CHECK_THROWS_AS(load_scenario(j), InvalidScenario);
  j = nlohmann::json::parse(kExample5);
  j["reports"][0]["formula"] = "p & !p";
  CHECK_THROWS_AS(load_scenario(j), InvalidReport);
}

TEST_CASE("eval documents") {
  Scenario s = load_scenario_text(kExample5);
  EvalDocument doc = run_eval(s, /*with_timing=*/false);
  CHECK(doc.status == 0);
  CHECK(doc.doc["queries"][0]["holds"] == true);
  CHECK(doc.doc["stats"]["possible_count"] == 40);
  CHECK(doc.doc["stats"]["plausible_count"] == 8);
  CHECK(doc.doc["stats"]["wall_ms"] == 0);
  CHECK(doc.doc["prop_models"]["c"] == nlohmann::json::array({"pq"}));
  CHECK(doc.doc["trust"]["i"]["!p & q | p & q"] == "expert");

  // identical bytes across runs with timing off
  CHECK(run_eval(s, false).doc.dump(2) == doc.doc.dump(2));

  // expectation mismatches flip the status
  nlohmann::json j = nlohmann::json::parse(kExample5);
  j["queries"][0]["expect"] = false;
  CHECK(run_eval(load_scenario(j), false).status == 1);
}

TEST_CASE("worlds listing is deterministic and truncates") {
  Scenario s = load_scenario_text(kExample5);
  std::string all = run_worlds(s, /*plausible=*/false, 1000);
  std::string few = run_worlds(s, false, 3);
  CHECK(all.find("total 40 possible worlds (showing 40)") != std::string::npos);
  CHECK(few.find("total 40 possible worlds (showing 3)") != std::string::npos);
  CHECK(few.substr(0, few.find("total")) ==
        all.substr(0, few.find("total")));
  std::string plausible = run_worlds(s, true, 1000);
  CHECK(plausible.find("total 8 plausible worlds") != std::string::npos);
}

TEST_CASE("a minimal scenario lists its two worlds") {
  Scenario s = load_scenario_text(R"json({
    "variables": ["p"], "cases": ["c"], "sources": ["*"],
    "operator": {"name": "weak-mb"}})json");
  std::string text = run_worlds(s, false, 100);
  CHECK(text.find("total 2 possible worlds (showing 2)") != std::string::npos);
}

TEST_CASE("postulate documents") {
  nlohmann::json j = nlohmann::json::parse(kExample5);
  j["variables"] = {"p"};
  j["reports"] = nlohmann::json::array();
  j["queries"] = nlohmann::json::array();
  j["space"] = {{"max_length", 1}};
  Scenario s = load_scenario(j);
  nlohmann::json doc = run_postulates(s, "var-based-cond",
                                      {"Soundness", "Refinement"});
  REQUIRE(doc.size() == 2);
  CHECK(doc[0]["status"] == "holds-on-space");
  CHECK(doc[0]["instances"] > 0);
  CHECK(doc[1]["postulate"] == "Refinement");

  nlohmann::json ex = run_postulates(s, "excess-min", {"Refinement"});
  CHECK(ex[0]["status"] == "not-applicable");
}

TEST_CASE("the decomposed fallback matches enumeration") {
  // same scenario evaluated under a tight world budget and the default one
  nlohmann::json j = nlohmann::json::parse(kExample5);
  j["limits"] = {{"max_worlds", 10}};
  Scenario tight = load_scenario(j);
  Scenario loose = load_scenario_text(kExample5);
  Universe ut(tight.sig), ul(loose.sig);
  Outcome a = evaluate_scenario_op(ut, "var-based-cond", tight.reports, nullptr);
  Outcome b = evaluate_scenario_op(ul, "var-based-cond", loose.reports, nullptr);
  CHECK(a.decomposed);
  CHECK_FALSE(b.decomposed);
  CHECK(a.possible_count == b.possible_count);
  CHECK(a.plausible_count == b.plausible_count);
  for (CaseId c = 0; c < 2; ++c) {
    CHECK(a.prop_belief(c) == b.prop_belief(c));
    CHECK(a.prop_knowledge(c) == b.prop_knowledge(c));
  }
  Formula f = parse_lformula("q & E(i, q)", tight.sig);
  CHECK(a.in_belief(0, f) == b.in_belief(0, f));

  // a prior blocks the fallback
  j["prior"] = {{"c", {"E(i, q)"}}};
  Scenario with_prior = load_scenario(j);
  Universe up(with_prior.sig);
  CHECK_THROWS_AS(evaluate_scenario_op(up, "var-based-cond",
                                       with_prior.reports,
                                       &*with_prior.prior),
                  BudgetExceeded);
}

TEST_CASE("priors flow through eval documents") {
  nlohmann::json j = nlohmann::json::parse(kExample5);
  j["operator"]["name"] = "weak-mb";
  j["prior"] = {{"c", {"E(i, q)"}}};
  j["queries"] = {{{"case", "c"},
                   {"formula", "q"},
                   {"target", "belief"},
                   {"expect", true}}};
  EvalDocument doc = run_eval(load_scenario(j), false);
  CHECK(doc.status == 0);  // trusted expertise makes the q half stick
  CHECK(doc.doc["queries"][0]["holds"] == true);
}

TEST_CASE("unknown postulate names are rejected") {
  nlohmann::json j = nlohmann::json::parse(kExample5);
  Scenario s = load_scenario(j);
  CHECK_THROWS_WITH_AS(run_postulates(s, "weak-mb", {"Telepathy"}),
                       doctest::Contains("Telepathy"), InvalidScenario);
}

TEST_CASE("bundled reference scenarios replay clean") {
  for (const std::string& id : repro_ids()) {
    ReproResult r = run_repro(id);
    CAPTURE(r.id);
    for (const ReproCheck& c : r.checks) {
      CAPTURE(c.description);
      CHECK(c.pass);
    }
    CHECK(r.pass);
  }
  CHECK_THROWS_AS(run_repro("example-99"), InvalidScenario);
}

#pragma once

#include <string>
#include <vector>

#include "expertise/repro_golden.hpp"
#include "expertise/scenario.hpp"

namespace expertise {

// Replays one bundled reference scenario against its golden values. Each
// golden entry records where a value comes from: "pinned" values are fixed by
// the scenario description itself, "computed" ones were derived once by
// enumeration and frozen.
struct ReproCheck {
  std::string description;
  bool pass;
  std::string detail;
};

struct ReproResult {
  std::string id;
  std::string description;
  bool pass = true;
  std::vector<ReproCheck> checks;
};

namespace detail {

inline nlohmann::json golden_entries(const std::string& golden_text) {
  nlohmann::json j = nlohmann::json::parse(golden_text, nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw InvalidScenario("golden file is not a JSON array");
  return j;
}

inline World world_from_json(const Universe& u, const nlohmann::json& wj) {
  const Signature& sig = u.sig();
  World w;
  w.vals.assign(sig.num_cases(), 0);
  w.parts.assign(sig.num_sources(), u.unit_partition_id());
  for (const auto& [case_name, formula] : field(wj, "valuations").items()) {
    CaseId c = sig.find_case(case_name);
    if (c < 0) throw InvalidScenario("unknown case \"" + case_name + "\"");
    ModelSet m = models(parse_formula(formula.get<std::string>(), sig), sig);
    if (m.count() != 1)
      throw InvalidScenario("world valuation must have exactly one model");
    w.vals[c] = m.valuations()[0];
  }
  if (wj.contains("partitions")) {
    for (const auto& [source_name, cells] : wj["partitions"].items()) {
      SourceId s = sig.find_source(source_name);
      if (s < 0)
        throw InvalidScenario("unknown source \"" + source_name + "\"");
      std::vector<ModelSet> masks;
      for (const auto& cell : cells) {
        ModelSet m = ModelSet::none(sig);
        for (const auto& f : cell)
          m = m | models(parse_formula(f.get<std::string>(), sig), sig);
        masks.push_back(m);
      }
      int id = u.find_partition(Partition::from_cells(masks));
      if (id < 0) throw InvalidScenario("partition not found");
      w.parts[s] = id;
    }
  }
  return w;
}

}  // namespace detail

inline std::vector<std::string> repro_ids(
    const std::string& golden_text = kReproGolden) {
  std::vector<std::string> ids;
  for (const auto& entry : detail::golden_entries(golden_text))
    ids.push_back(entry.at("id").get<std::string>());
  return ids;
}

inline ReproResult run_repro(const std::string& id,
                             const std::string& golden_text = kReproGolden) {
  nlohmann::json entries = detail::golden_entries(golden_text);
  const nlohmann::json* entry = nullptr;
  for (const auto& e : entries)
    if (e.at("id") == id) entry = &e;
  if (!entry) throw InvalidScenario("unknown repro id \"" + id + "\"");

  const nlohmann::json& golden = *entry;
  ReproResult result;
  result.id = id;
  result.description = golden.value("description", "");

  const nlohmann::json& sg = detail::field(golden, "signature");
  Signature sig(detail::string_list(sg, "variables"),
                detail::string_list(sg, "cases"),
                detail::string_list(sg, "sources"));
  Universe u(sig);

  ReportSequence reports;
  if (golden.contains("reports"))
    for (const auto& r : golden["reports"])
      reports.push_back(
          make_report(sig, r.at("source").get<std::string>(),
                      r.at("case").get<std::string>(),
                      r.at("formula").get<std::string>()));

  // outcome cache per operator name
  std::vector<std::pair<std::string, Outcome>> outcomes;
  auto outcome_for = [&](const std::string& op_name) -> const Outcome& {
    for (const auto& [name, out] : outcomes)
      if (name == op_name) return out;
    outcomes.emplace_back(op_name,
                          evaluate_scenario_op(u, op_name, reports, nullptr));
    return outcomes.back().second;
  };

  auto record = [&](const std::string& what, bool pass,
                    const std::string& detail = "") {
    result.checks.push_back(ReproCheck{what, pass, detail});
    result.pass &= pass;
  };

  for (const auto& check : detail::field(golden, "checks")) {
    std::string kind = check.at("kind").get<std::string>();
    std::vector<std::string> ops;
    if (check.contains("operators"))
      for (const auto& o : check["operators"]) ops.push_back(o);

    if (kind == "world_fact") {
      World w = detail::world_from_json(u, detail::field(golden, "world"));
      CaseId c = sig.find_case(check.at("case").get<std::string>());
      Formula f = parse_lformula(check.at("formula").get<std::string>(), sig);
      bool got = eval(u, w, c, f);
      bool expect = check.at("expect").get<bool>();
      record("world fact " + f.to_string(sig) + " at " +
                 check.at("case").get<std::string>(),
             got == expect, got == expect ? "" : "engine disagrees");
    } else if (kind == "consequence") {
      CaseCollection g = CaseCollection::empty(sig);
      for (const auto& [case_name, formulas] :
           detail::field(golden, "collection").items()) {
        CaseId c = sig.find_case(case_name);
        for (const auto& f : formulas)
          g.add(c, parse_lformula(f.get<std::string>(), sig));
      }
      CaseId c = sig.find_case(check.at("case").get<std::string>());
      Formula f = parse_lformula(check.at("formula").get<std::string>(), sig);
      bool got = is_consequence(u, g, c, f);
      bool expect = check.at("expect").get<bool>();
      record("consequence " + f.to_string(sig) + " at " +
                 check.at("case").get<std::string>(),
             got == expect);
    } else if (kind == "knowledge" || kind == "belief") {
      CaseId c = sig.find_case(check.at("case").get<std::string>());
      Formula f = parse_lformula(check.at("formula").get<std::string>(), sig);
      bool expect = check.at("expect").get<bool>();
      for (const std::string& op : ops) {
        const Outcome& out = outcome_for(op);
        bool got = kind == "knowledge" ? out.in_knowledge(c, f)
                                       : out.in_belief(c, f);
        record(op + ": " + kind + " of " + f.to_string(sig) + " at " +
                   check.at("case").get<std::string>(),
               got == expect,
               got == expect ? "" : (got ? "holds" : "does not hold"));
      }
    } else if (kind == "prop_belief_models") {
      CaseId c = sig.find_case(check.at("case").get<std::string>());
      ModelSet expect =
          models(parse_formula(check.at("formula").get<std::string>(), sig),
                 sig);
      for (const std::string& op : ops) {
        ModelSet got = outcome_for(op).prop_belief(c);
        record(op + ": believed models at " +
                   check.at("case").get<std::string>() + " equal mods(" +
                   check.at("formula").get<std::string>() + ")",
               got == expect,
               got == expect ? "" : "got " + got.to_string(sig));
      }
    } else if (kind == "possible_count") {
      std::uint64_t expect = check.at("expect").get<std::uint64_t>();
      for (const std::string& op : ops) {
        std::uint64_t got = outcome_for(op).possible_count;
        record(op + ": possible world count", got == expect,
               got == expect ? "" : "got " + std::to_string(got));
      }
    } else if (kind == "h_bound") {
      CaseId c = sig.find_case(check.at("case").get<std::string>());
      std::vector<CaseId> hset;
      for (const auto& d : check.at("hset"))
        hset.push_back(sig.find_case(d.get<std::string>()));
      bool expect = check.at("expect").get<bool>();
      ModelSet reported = reported_models(sig, reports, c, hset);
      for (const std::string& op : ops) {
        const Outcome& out = outcome_for(op);
        ModelSet bound = reported;
        for (CaseId d : hset) bound = bound & out.prop_belief(d);
        bool got = bound.is_subset_of(out.prop_belief(c));
        record(op + ": belief bound instance at " +
                   check.at("case").get<std::string>(),
               got == expect);
      }
    } else if (kind == "strong_cond_success_violated") {
      const auto& rj = check.at("report");
      Report r = make_report(sig, rj.at("source").get<std::string>(),
                             rj.at("case").get<std::string>(),
                             rj.at("formula").get<std::string>());
      bool expect = check.at("expect").get<bool>();
      for (const std::string& op_name : ops) {
        Operator op = *operator_by_name(op_name);
        auto w = violates_cond_success(u, op, reports, r, /*strong=*/true);
        bool got = w.has_value();
        if (got && !replay_witness(u, op, PostulateId::StrongCondSuccess, *w))
          record(op_name + ": witness replay", false, "replay failed");
        record(op_name + ": strong conditional success violated", got == expect);
      }
    } else {
      record("check kind \"" + kind + "\"", false, "unknown kind");
    }
  }
  return result;
}

}  // namespace expertise

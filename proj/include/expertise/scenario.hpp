#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "expertise/decomposed.hpp"
#include "expertise/postulates.hpp"
#include "json.hpp"

namespace expertise {

// A batch problem instance as read from a scenario file: signature, report
// sequence, operator, optional prior collection, queries, and an optional
// sequence-space block for postulate runs.
struct Scenario {
  Signature sig;
  ReportSequence reports;
  std::string operator_name;
  std::optional<CaseCollection> prior;

  struct Query {
    CaseId caze;
    Formula formula;
    bool knowledge;  // otherwise belief
    std::optional<bool> expect;
    std::string case_name, formula_text, target;
  };
  std::vector<Query> queries;

  std::optional<SequenceSpace> space;
  int acyc_n = 2;
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j,
                                   const std::string& name) {
  auto it = j.find(name);
  if (it == j.end())
    throw InvalidScenario("missing field \"" + name + "\"");
  return *it;
}

inline std::vector<std::string> string_list(const nlohmann::json& j,
                                            const std::string& name) {
  const nlohmann::json& arr = field(j, name);
  if (!arr.is_array())
    throw InvalidScenario("field \"" + name + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& item : arr) {
    if (!item.is_string())
      throw InvalidScenario("field \"" + name + "\" must contain strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace detail

inline Scenario load_scenario(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidScenario("scenario must be a JSON object");
  Limits limits;
  if (j.contains("limits")) {
    const auto& l = j["limits"];
    if (l.contains("max_variables")) limits.max_variables = l["max_variables"];
    if (l.contains("max_partitions"))
      limits.max_partitions = l["max_partitions"];
    if (l.contains("max_worlds")) limits.max_worlds = l["max_worlds"];
    if (l.contains("max_sequences")) limits.max_sequences = l["max_sequences"];
  }
  std::vector<std::string> variables = detail::string_list(j, "variables");
  std::vector<std::string> cases = detail::string_list(j, "cases");
  std::vector<std::string> sources = detail::string_list(j, "sources");
  Scenario s{Signature(std::move(variables), std::move(cases),
                       std::move(sources), limits),
             {},
             "weak-mb",
             {},
             {},
             {},
             2};
  try {
    if (j.contains("reports")) {
      for (const auto& r : j["reports"])
        s.reports.push_back(make_report(
            s.sig, detail::field(r, "source").get<std::string>(),
            detail::field(r, "case").get<std::string>(),
            detail::field(r, "formula").get<std::string>()));
    }
    if (j.contains("operator"))
      s.operator_name =
          detail::field(j["operator"], "name").get<std::string>();
    if (j.contains("prior")) {
      CaseCollection prior = CaseCollection::empty(s.sig);
      for (const auto& [case_name, formulas] : j["prior"].items()) {
        CaseId c = s.sig.find_case(case_name);
        if (c < 0)
          throw InvalidScenario("prior references unknown case \"" +
                                case_name + "\"");
        for (const auto& f : formulas)
          prior.add(c, parse_lformula(f.get<std::string>(), s.sig));
      }
      s.prior = std::move(prior);
    }
    if (j.contains("queries")) {
      for (const auto& q : j["queries"]) {
        Scenario::Query query;
        query.case_name = detail::field(q, "case").get<std::string>();
        query.formula_text = detail::field(q, "formula").get<std::string>();
        query.target = detail::field(q, "target").get<std::string>();
        CaseId c = s.sig.find_case(query.case_name);
        if (c < 0)
          throw InvalidScenario("query references unknown case \"" +
                                query.case_name + "\"");
        query.caze = c;
        query.formula = parse_lformula(query.formula_text, s.sig);
        if (query.target == "knowledge")
          query.knowledge = true;
        else if (query.target == "belief")
          query.knowledge = false;
        else
          throw InvalidScenario(
              "query target must be \"belief\" or \"knowledge\"");
        if (q.contains("expect")) query.expect = q["expect"].get<bool>();
        s.queries.push_back(std::move(query));
      }
    }
    if (j.contains("space")) {
      const auto& sp = j["space"];
      SequenceSpace space = SequenceSpace::make_exhaustive(
          s.sig, sp.value("max_length", 2));
      if (sp.contains("formulas")) {
        space.pool.clear();
        for (const auto& f : sp["formulas"]) {
          ModelSet m = models(parse_formula(f.get<std::string>(), s.sig), s.sig);
          if (m.empty())
            throw InvalidScenario("space formulas must be satisfiable");
          space.pool.push_back(m);
        }
      }
      if (sp.contains("mode") && sp["mode"].is_object()) {
        const auto& sampled = detail::field(sp["mode"], "sampled");
        space.exhaustive = false;
        space.seed = detail::field(sampled, "seed").get<std::uint64_t>();
        space.samples = detail::field(sampled, "count").get<std::uint64_t>();
      }
      if (sp.contains("acyc_n")) s.acyc_n = sp["acyc_n"].get<int>();
      s.space = std::move(space);
    }
  } catch (const ParseError& e) {
    throw InvalidScenario(std::string("formula error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidScenario(std::string("malformed scenario: ") + e.what());
  }
  if (!operator_by_name(s.operator_name))
    throw InvalidScenario("unknown operator \"" + s.operator_name + "\"");
  return s;
}

inline Scenario load_scenario_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InvalidScenario("scenario is not valid JSON");
  return load_scenario(j);
}

// Backend-agnostic evaluation results: the same query surface whether the
// sets were enumerated or kept as decomposed blocks.
struct Outcome {
  std::function<bool(CaseId, const Formula&)> in_knowledge, in_belief;
  std::function<ModelSet(CaseId)> prop_knowledge, prop_belief;
  std::uint64_t possible_count = 0, plausible_count = 0;
  bool decomposed = false;
};

// Evaluates with full enumeration when the world budget allows it, falling
// back to the decomposed route for the additive operators (no prior there).
inline Outcome evaluate_scenario_op(const Universe& u,
                                    const std::string& op_name,
                                    const ReportSequence& seq,
                                    const CaseCollection* prior) {
  auto op = operator_by_name(op_name);
  if (!op) throw InvalidScenario("unknown operator \"" + op_name + "\"");
  try {
    u.ensure_enumerable();
    std::shared_ptr<Bitset> prior_models;
    if (prior && !prior->is_empty())
      prior_models = std::make_shared<Bitset>(mod_of(u, *prior));
    auto out = std::make_shared<OperatorOutput>(
        (*op)(u, seq, prior_models ? prior_models.get() : nullptr));
    Outcome outcome;
    outcome.in_knowledge = [&u, out](CaseId c, const Formula& f) {
      return in_knowledge(u, *out, c, f);
    };
    outcome.in_belief = [&u, out](CaseId c, const Formula& f) {
      return in_belief(u, *out, c, f);
    };
    outcome.prop_knowledge = [&u, out](CaseId c) {
      return prop_belief_models(u, out->possible, c);
    };
    outcome.prop_belief = [&u, out](CaseId c) {
      return prop_belief_models(u, out->plausible, c);
    };
    outcome.possible_count = out->possible.count();
    outcome.plausible_count = out->plausible.count();
    return outcome;
  } catch (const BudgetExceeded&) {
    auto dop = decomposable_op(op_name);
    if (!dop || (prior && !prior->is_empty())) throw;
    auto out = std::make_shared<DecomposedOutput>(
        decomposed_eval(u, *dop, seq));
    Outcome outcome;
    outcome.decomposed = true;
    outcome.in_knowledge = [out](CaseId c, const Formula& f) {
      return out->in_knowledge(c, f);
    };
    outcome.in_belief = [out](CaseId c, const Formula& f) {
      return out->in_belief(c, f);
    };
    outcome.prop_knowledge = [out](CaseId c) {
      return out->prop_knowledge_models(c);
    };
    outcome.prop_belief = [out](CaseId c) {
      return out->prop_belief_models(c);
    };
    outcome.possible_count = out->possible_count();
    outcome.plausible_count = out->plausible_count();
    return outcome;
  }
}

// The eval result document. Byte-stable for fixed inputs when timing is off.
// Returns exit status 0 or 1 (query expectation mismatch) in `status`.
struct EvalDocument {
  nlohmann::json doc;
  int status = 0;
};

inline EvalDocument run_eval(const Scenario& s, bool with_timing = true) {
  auto started = std::chrono::steady_clock::now();
  Universe u(s.sig);
  Outcome out = evaluate_scenario_op(u, s.operator_name, s.reports,
                                     s.prior ? &*s.prior : nullptr);

  EvalDocument result;
  nlohmann::json& doc = result.doc;
  doc["operator"] = s.operator_name;

  doc["queries"] = nlohmann::json::array();
  for (const Scenario::Query& q : s.queries) {
    bool holds = q.knowledge ? out.in_knowledge(q.caze, q.formula)
                             : out.in_belief(q.caze, q.formula);
    nlohmann::json entry{{"case", q.case_name},
                         {"formula", q.formula_text},
                         {"target", q.target},
                         {"holds", holds}};
    if (q.expect) {
      entry["expect"] = *q.expect;
      if (*q.expect != holds) result.status = 1;
    }
    doc["queries"].push_back(std::move(entry));
  }

  auto mask_names = [&](ModelSet m) {
    nlohmann::json arr = nlohmann::json::array();
    for (Valuation v : m.valuations()) arr.push_back(s.sig.valuation_name(v));
    return arr;
  };
  for (CaseId c = 0; c < static_cast<CaseId>(s.sig.num_cases()); ++c) {
    const std::string& name = s.sig.case_name(c);
    doc["prop_models"][name] = mask_names(out.prop_belief(c));
    doc["prop_knowledge_models"][name] = mask_names(out.prop_knowledge(c));
  }

  // trust verdicts per ordinary source; exhaustive over masks while the
  // signature is small, per-variable beyond that
  std::vector<ModelSet> trust_masks;
  if (s.sig.num_valuations() <= 6) {
    for (std::uint64_t m = 1; m < ModelSet::all(s.sig).bits(); ++m)
      trust_masks.push_back(ModelSet(m, s.sig.num_valuations()));
  } else {
    for (VarId v = 0; v < static_cast<VarId>(s.sig.num_variables()); ++v)
      trust_masks.push_back(ModelSet::of_variable(v, s.sig));
  }
  for (SourceId src = 0; src < static_cast<SourceId>(s.sig.num_sources());
       ++src) {
    if (src == s.sig.star()) continue;
    nlohmann::json& bucket = doc["trust"][s.sig.source_name(src)];
    for (const ModelSet& m : trust_masks) {
      Formula arg = canonical_formula(m, s.sig);
      Formula e = Formula::expert(src, arg);
      std::string verdict = "undecided";
      if (out.in_belief(0, e))
        verdict = "expert";
      else if (out.in_belief(0, Formula::negate(e)))
        verdict = "non-expert";
      bucket[arg.to_string(s.sig)] = verdict;
    }
  }

  doc["stats"]["possible_count"] = out.possible_count;
  doc["stats"]["plausible_count"] = out.plausible_count;
  doc["stats"]["decomposed"] = out.decomposed;
  std::int64_t wall_ms = 0;
  if (with_timing)
    wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - started)
                  .count();
  doc["stats"]["wall_ms"] = wall_ms;
  return result;
}

// Deterministic text listing of one world set in enumeration order.
inline std::string run_worlds(const Scenario& s, bool plausible,
                              std::uint64_t limit) {
  Universe u(s.sig);
  auto op = operator_by_name(s.operator_name);
  std::shared_ptr<Bitset> prior_models;
  if (s.prior && !s.prior->is_empty())
    prior_models = std::make_shared<Bitset>(mod_of(u, *s.prior));
  OperatorOutput out =
      (*op)(u, s.reports, prior_models ? prior_models.get() : nullptr);
  const Bitset& set = plausible ? out.plausible : out.possible;

  std::string text;
  std::uint64_t shown = 0;
  set.for_each([&](std::uint64_t index) {
    if (shown >= limit) return;
    ++shown;
    World w = u.world(index);
    text += "world " + std::to_string(index) + ": ";
    for (std::size_t c = 0; c < s.sig.num_cases(); ++c) {
      if (c) text += ", ";
      text += s.sig.case_name(c) + "=" + s.sig.valuation_name(w.vals[c]);
    }
    for (std::size_t src = 0; src < s.sig.num_sources(); ++src) {
      if (static_cast<SourceId>(src) == s.sig.star()) continue;
      text += "; " + s.sig.source_name(src) + ": " +
              u.partition(w.parts[src]).to_string(s.sig);
    }
    text += "\n";
  });
  text += "total " + std::to_string(set.count()) + " " +
          (plausible ? "plausible" : "possible") + " worlds (showing " +
          std::to_string(shown) + ")\n";
  return text;
}

inline nlohmann::json witness_to_json(const Signature& sig, const Witness& w) {
  nlohmann::json out;
  out["sequences"] = nlohmann::json::array();
  for (const ReportSequence& seq : w.sequences) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Report& r : seq)
      arr.push_back({{"source", sig.source_name(r.source)},
                     {"case", sig.case_name(r.caze)},
                     {"formula", r.formula.to_string(sig)}});
    out["sequences"].push_back(std::move(arr));
  }
  if (w.report)
    out["report"] = {{"source", sig.source_name(w.report->source)},
                     {"case", sig.case_name(w.report->caze)},
                     {"formula", w.report->formula.to_string(sig)}};
  if (w.caze >= 0) out["case"] = sig.case_name(w.caze);
  if (!w.hset.empty()) {
    out["hset"] = nlohmann::json::array();
    for (CaseId c : w.hset) out["hset"].push_back(sig.case_name(c));
  }
  if (!w.worlds.empty()) out["worlds"] = w.worlds;
  out["detail"] = w.detail;
  return out;
}

inline nlohmann::json postulate_report_to_json(const Signature& sig,
                                               const PostulateReport& rep) {
  nlohmann::json out;
  out["operator"] = rep.op;
  out["postulate"] = rep.postulate;
  switch (rep.status) {
    case PostulateReport::Status::HoldsOnSpace:
      out["status"] = "holds-on-space";
      break;
    case PostulateReport::Status::Counterexample:
      out["status"] = "counterexample";
      break;
    case PostulateReport::Status::NotApplicable:
      out["status"] = "not-applicable";
      break;
  }
  out["instances"] = rep.instances;
  if (!rep.note.empty()) out["note"] = rep.note;
  if (rep.witness) out["witness"] = witness_to_json(sig, *rep.witness);
  return out;
}

// Runs the requested postulates over the scenario's space (default: the
// exhaustive space of length <= 2 over all nonempty masks).
inline nlohmann::json run_postulates(const Scenario& s,
                                     const std::string& operator_name,
                                     const std::vector<std::string>& names) {
  Universe u(s.sig);
  auto op = operator_by_name(operator_name);
  if (!op) throw InvalidScenario("unknown operator \"" + operator_name + "\"");
  SequenceSpace space =
      s.space ? *s.space : SequenceSpace::make_exhaustive(s.sig, 2);

  nlohmann::json out = nlohmann::json::array();
  for (const std::string& name : names) {
    auto id = postulate_by_name(name);
    if (!id) throw InvalidScenario("unknown postulate \"" + name + "\"");
    out.push_back(postulate_report_to_json(
        s.sig, check_postulate(u, *op, *id, space, s.acyc_n)));
  }
  return out;
}

}  // namespace expertise

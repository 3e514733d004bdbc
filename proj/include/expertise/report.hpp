#pragma once

#include <string>
#include <vector>

#include "expertise/collections.hpp"
#include "expertise/parser.hpp"
#include "expertise/prop.hpp"

namespace expertise {

// A single report: source i claims the propositional formula holds in the
// given case. Formulas equivalent to falsum are rejected outright.
struct Report {
  SourceId source;
  CaseId caze;
  Formula formula;
  ModelSet mask;
};

inline Report make_report(const Signature& sig, SourceId source, CaseId caze,
                          Formula f) {
  if (source < 0 || source >= static_cast<SourceId>(sig.num_sources()))
    throw InvalidReport("report source outside signature");
  if (caze < 0 || caze >= static_cast<CaseId>(sig.num_cases()))
    throw InvalidReport("report case outside signature");
  ModelSet m = models(f, sig);
  if (m.empty())
    throw InvalidReport("report formula is inconsistent: " + f.to_string(sig));
  return Report{source, caze, std::move(f), m};
}

inline Report make_report(const Signature& sig, const std::string& source,
                          const std::string& caze, const std::string& formula) {
  SourceId s = sig.find_source(source);
  if (s < 0) throw InvalidReport("unknown source \"" + source + "\"");
  CaseId c = sig.find_case(caze);
  if (c < 0) throw InvalidReport("unknown case \"" + caze + "\"");
  return make_report(sig, s, c, parse_formula(formula, sig));
}

using ReportSequence = std::vector<Report>;

inline ReportSequence concat(ReportSequence a, const ReportSequence& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline ReportSequence append(ReportSequence a, Report r) {
  a.push_back(std::move(r));
  return a;
}

// The c-reports of a sequence, as (source, mask) pairs.
inline std::vector<std::pair<SourceId, ModelSet>> restrict_to(
    const ReportSequence& seq, CaseId c) {
  std::vector<std::pair<SourceId, ModelSet>> out;
  for (const Report& r : seq)
    if (r.caze == c) out.emplace_back(r.source, r.mask);
  return out;
}

// The soundness collection: one S_i(phi) per report, at the report's case.
// Duplicate (source, formula) pairs collapse per case.
inline CaseCollection soundness_collection(const Signature& sig,
                                           const ReportSequence& seq) {
  CaseCollection g = CaseCollection::empty(sig);
  std::vector<std::vector<std::pair<SourceId, std::uint64_t>>> seen(
      sig.num_cases());
  for (const Report& r : seq) {
    auto key = std::make_pair(r.source, r.mask.bits());
    auto& case_seen = seen[r.caze];
    if (std::find(case_seen.begin(), case_seen.end(), key) != case_seen.end())
      continue;
    case_seen.push_back(key);
    g.add(r.caze, Formula::sound(r.source, r.formula));
  }
  return g;
}

// True iff for every case the reliable source's reported masks intersect.
inline bool star_consistent(const Signature& sig, const ReportSequence& seq) {
  std::vector<std::uint64_t> joint(sig.num_cases(),
                                   ModelSet::all(sig).bits());
  for (const Report& r : seq)
    if (r.source == sig.star()) joint[r.caze] &= r.mask.bits();
  for (std::uint64_t m : joint)
    if (m == 0) return false;
  return true;
}

}  // namespace expertise

#pragma once

#include <string>
#include <vector>

#include "expertise/postulates.hpp"

namespace expertise {

// A selection scheme: per report, the weakening of the reported formula that
// generates the propositional beliefs case-wise. Extracted from a bounded
// operator as reported-models union believed-models.
struct SelectionScheme {
  struct Entry {
    SourceId source;
    CaseId caze;
    ModelSet reported;
    ModelSet selected;
  };
  std::vector<Entry> entries;
  std::vector<ModelSet> case_models;  // believed propositional models per case
};

struct SelectionResult {
  enum class Status {
    Ok,
    NotStarConsistent,
    BoundednessViolated,
    ReconstructionFailed
  } status;
  SelectionScheme scheme;
  std::string detail;
  std::optional<Witness> witness;

  bool ok() const { return status == Status::Ok; }
};

// A star-consistent sequence of c-reports whose soundness models are exactly
// the worlds that the given world refines at c: one singleton report per
// source and per valuation its c-cell contains.
inline ReportSequence local_refinement_sequence(const Universe& u,
                                                const World& w, CaseId c) {
  const Signature& sig = u.sig();
  ReportSequence seq;
  for (SourceId i = 0; i < static_cast<SourceId>(sig.num_sources()); ++i) {
    std::uint64_t cell = u.partition(w.parts[i]).cell_of(w.vals[c]);
    for (Valuation v = 0; v < sig.num_valuations(); ++v)
      if ((cell >> v) & 1)
        seq.push_back(make_report(
            sig, i, c, canonical_formula(ModelSet::singleton(v, sig), sig)));
  }
  return seq;
}

// The selectivity condition for a fixed plausibility rank: below every world
// and every target valuation there is an equally-plausible-or-better world
// carrying that valuation at c which the original world refines everywhere
// else. Implies Boundedness for the induced conditioning operator.
inline bool rank_selectivity_condition(const Universe& u,
                                       const RankFunction& rank) {
  const Signature& sig = u.sig();
  bool ok = true;
  u.for_each_world([&](std::uint64_t, const World& w) {
    if (!ok) return;
    std::int64_t rw = rank(u, w);
    for (CaseId c = 0; c < static_cast<CaseId>(sig.num_cases()) && ok; ++c)
      for (Valuation v = 0; v < sig.num_valuations() && ok; ++v) {
        bool found = false;
        u.for_each_world([&](std::uint64_t, const World& other) {
          if (found || other.vals[c] != v) return;
          if (rank(u, other) > rw) return;
          for (CaseId d = 0; d < static_cast<CaseId>(sig.num_cases()); ++d)
            if (d != c && !refines_at(u, w, other, d)) return;
          found = true;
        });
        ok &= found;
      }
  });
  return ok;
}

// Single-instance postulate entry points for the one-step and cross-case
// bounds.

inline PostulateReport check_success_variant(const Universe& u,
                                             const Operator& op,
                                             const ReportSequence& seq,
                                             const Report& r, bool strong) {
  PostulateReport rep;
  rep.op = op.name;
  rep.postulate = strong ? "Strong-cond-success" : "Cond-success";
  rep.instances = 1;
  rep.status = PostulateReport::Status::HoldsOnSpace;
  if (auto w = violates_cond_success(u, op, seq, r, strong)) {
    rep.status = PostulateReport::Status::Counterexample;
    rep.witness = std::move(w);
  }
  return rep;
}

inline PostulateReport check_h_boundedness(const Universe& u,
                                           const Operator& op,
                                           const ReportSequence& seq,
                                           const std::vector<CaseId>& hset,
                                           CaseId c) {
  PostulateReport rep;
  rep.op = op.name;
  rep.postulate = "H-Boundedness";
  rep.instances = 1;
  rep.status = PostulateReport::Status::HoldsOnSpace;
  rep.note =
      "single-instance check; a pass here decides nothing about the "
      "postulate in general";
  if (auto w = violates_h_boundedness(u, op, seq, hset, c)) {
    rep.status = PostulateReport::Status::Counterexample;
    rep.witness = std::move(w);
  }
  return rep;
}

// Builds the selection scheme for a star-consistent sequence, verifying
// Boundedness first and the reconstruction identity afterwards: intersecting
// the selected formulas of the c-reports must give back exactly the believed
// models at c (the empty intersection being the full valuation set).
inline SelectionResult extract_selection_scheme(const Universe& u,
                                                const Operator& op,
                                                const ReportSequence& seq) {
  SelectionResult res{SelectionResult::Status::Ok, {}, "", {}};
  const Signature& sig = u.sig();
  if (!star_consistent(sig, seq)) {
    res.status = SelectionResult::Status::NotStarConsistent;
    res.detail = "the reliable source's reports are jointly unsatisfiable";
    return res;
  }
  for (CaseId c = 0; c < static_cast<CaseId>(sig.num_cases()); ++c)
    if (auto w = violates_boundedness(u, op, seq, c)) {
      res.status = SelectionResult::Status::BoundednessViolated;
      res.detail = w->detail;
      res.witness = std::move(w);
      return res;
    }

  OperatorOutput out = op(u, seq);
  for (CaseId c = 0; c < static_cast<CaseId>(sig.num_cases()); ++c)
    res.scheme.case_models.push_back(prop_belief_models(u, out.plausible, c));
  for (const Report& r : seq) {
    ModelSet selected = r.mask | res.scheme.case_models[r.caze];
    res.scheme.entries.push_back(
        SelectionScheme::Entry{r.source, r.caze, r.mask, selected});
  }

  for (CaseId c = 0; c < static_cast<CaseId>(sig.num_cases()); ++c) {
    ModelSet joint = ModelSet::all(sig);
    for (const auto& e : res.scheme.entries)
      if (e.caze == c) joint = joint & e.selected;
    if (joint != res.scheme.case_models[c]) {
      res.status = SelectionResult::Status::ReconstructionFailed;
      res.detail = "case " + sig.case_name(c) + ": selected conjunction " +
                   joint.to_string(sig) + " vs believed " +
                   res.scheme.case_models[c].to_string(sig);
      return res;
    }
  }
  return res;
}

}  // namespace expertise

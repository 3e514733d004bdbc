#pragma once

#include <string>
#include <vector>

#include "expertise/operators.hpp"

namespace expertise {

// Decision of the revision postulate for reliable reports at one (sequence,
// case): does a single total preorder over valuations, faithful to the
// current propositional beliefs, reproduce the beliefs after revising by
// every admissible formula?
//
// The candidate order is read off the two-element revisions (v below v' iff v
// survives revising by the formula whose models are {v, v'}) and then checked
// in full: totality, transitivity, faithfulness, and min-agreement with every
// admissible mask.
struct AgmResult {
  enum class Status { WitnessFound, Counterexample, NotApplicable } status;
  std::vector<int> levels;  // per valuation: preorder level, -1 impossible
  std::string detail;

  bool ok() const { return status == Status::WitnessFound; }
};

inline AgmResult check_agm_star(const Universe& u, const Operator& op,
                                const ReportSequence& seq, CaseId c) {
  const Signature& sig = u.sig();
  const int nv = sig.num_valuations();
  OperatorOutput base = op(u, seq);
  if (base.possible.none())
    return AgmResult{AgmResult::Status::NotApplicable, {},
                     "inconsistent knowledge leaves no admissible formula"};

  ModelSet possible = prop_belief_models(u, base.possible, c);
  ModelSet believed = prop_belief_models(u, base.plausible, c);

  // admissible mask: not known false at c
  auto admissible = [&](std::uint64_t mask) {
    return (mask & possible.bits()) != 0;
  };
  auto revised = [&](std::uint64_t mask) {
    Report r = make_report(sig, sig.star(), c,
                           canonical_formula(ModelSet(mask, nv), sig));
    OperatorOutput out = op(u, append(seq, r));
    return prop_belief_models(u, out.plausible, c).bits();
  };

  std::vector<std::uint64_t> rev(std::uint64_t{1} << nv, 0);
  for (std::uint64_t mask = 1; mask < rev.size(); ++mask)
    if (admissible(mask)) rev[mask] = revised(mask);

  // two-element test over the possible valuations; impossible valuations sit
  // together above everything
  std::vector<std::vector<bool>> leq(nv, std::vector<bool>(nv, false));
  for (Valuation v = 0; v < nv; ++v)
    for (Valuation w = 0; w < nv; ++w) {
      bool pv = possible.contains(v), pw = possible.contains(w);
      if (!pv && !pw)
        leq[v][w] = true;
      else if (pv && !pw)
        leq[v][w] = true;
      else if (!pv && pw)
        leq[v][w] = false;
      else {
        std::uint64_t pair =
            (std::uint64_t{1} << v) | (std::uint64_t{1} << w);
        leq[v][w] = (rev[pair] >> v) & 1;
      }
    }

  auto fail = [&](std::string why) {
    return AgmResult{AgmResult::Status::Counterexample, {}, std::move(why)};
  };

  for (Valuation v = 0; v < nv; ++v) {
    if (!leq[v][v]) return fail("two-element test not reflexive");
    for (Valuation w = 0; w < nv; ++w) {
      if (!leq[v][w] && !leq[w][v]) return fail("two-element test not total");
      for (Valuation x = 0; x < nv; ++x)
        if (leq[v][w] && leq[w][x] && !leq[v][x])
          return fail("two-element test not transitive");
    }
  }

  auto minimal = [&](std::uint64_t mask) {
    std::uint64_t out = 0;
    for (Valuation v = 0; v < nv; ++v) {
      if (!((mask >> v) & 1)) continue;
      bool least = true;
      for (Valuation w = 0; w < nv && least; ++w)
        if (((mask >> w) & 1) && !leq[v][w]) least = false;
      if (least) out |= std::uint64_t{1} << v;
    }
    return out;
  };

  if (minimal(ModelSet::all(sig).bits()) != believed.bits())
    return fail("order not faithful to the current beliefs");
  for (std::uint64_t mask = 1; mask < rev.size(); ++mask) {
    if (!admissible(mask)) continue;
    if (minimal(mask) != rev[mask])
      return fail("minima disagree with revision by mask " +
                  ModelSet(mask, nv).to_string(sig));
  }

  // render the witness as levels of the preorder
  std::vector<int> levels(nv, -1);
  for (Valuation v = 0; v < nv; ++v) {
    if (!possible.contains(v)) continue;
    int level = 0;
    for (Valuation w = 0; w < nv; ++w)
      if (possible.contains(w) && leq[w][v] && !leq[v][w]) ++level;
    levels[v] = level;
  }
  return AgmResult{AgmResult::Status::WitnessFound, std::move(levels), ""};
}

}  // namespace expertise

#pragma once

#include <set>
#include <vector>

#include "expertise/formula.hpp"
#include "expertise/model_set.hpp"

namespace expertise {

// Classical model set of a propositional formula, computed structurally over
// valuation masks.
inline ModelSet models(const Formula& f, const Signature& sig) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
      return ModelSet::all(sig);
    case K::False:
      return ModelSet::none(sig);
    case K::Var: {
      if (f.var_id() < 0 ||
          f.var_id() >= static_cast<VarId>(sig.num_variables()))
        throw Error("formula variable outside signature");
      return ModelSet::of_variable(f.var_id(), sig);
    }
    case K::Not:
      return ~models(f.left(), sig);
    case K::And:
      return models(f.left(), sig) & models(f.right(), sig);
    case K::Or:
      return models(f.left(), sig) | models(f.right(), sig);
    case K::Imp:
      return ~models(f.left(), sig) | models(f.right(), sig);
    case K::Iff: {
      ModelSet a = models(f.left(), sig), b = models(f.right(), sig);
      return (a & b) | (~a & ~b);
    }
    case K::Expert:
    case K::Sound:
      throw Error("models() requires a propositional formula");
  }
  return ModelSet::none(sig);
}

inline bool equivalent(const Formula& f, const Formula& g,
                       const Signature& sig) {
  return models(f, sig) == models(g, sig);
}

// Classical consequence: intersection of premise models contained in the
// conclusion's models.
inline bool entails0(const std::vector<Formula>& premises, const Formula& f,
                     const Signature& sig) {
  ModelSet joint = ModelSet::all(sig);
  for (const Formula& p : premises) joint = joint & models(p, sig);
  return joint.is_subset_of(models(f, sig));
}

// Deterministic formula with the given model set: full DNF over the model
// valuations, "false" for the empty mask and "true" for the full one.
inline Formula canonical_formula(ModelSet m, const Signature& sig) {
  if (m.empty()) return Formula::truth(false);
  if (m.full()) return Formula::truth(true);
  Formula out;
  bool have = false;
  for (Valuation v : m.valuations()) {
    Formula term;
    bool have_term = false;
    for (VarId p = 0; p < static_cast<VarId>(sig.num_variables()); ++p) {
      Formula lit = Formula::var(p);
      if (!((v >> p) & 1)) lit = Formula::negate(lit);
      term = have_term ? Formula::conj(term, lit) : lit;
      have_term = true;
    }
    out = have ? Formula::disj(out, term) : term;
    have = true;
  }
  return out;
}

// A second, syntactically different formula with the same model set: the
// negated canonical form of the complement. Used where checks must not be
// made vacuous by mask canonicalization.
inline Formula canonical_formula_alt(ModelSet m, const Signature& sig) {
  return Formula::negate(canonical_formula(~m, sig));
}

// Variables the mask semantically depends on: flipping the variable changes
// membership for some valuation.
inline std::vector<VarId> mask_support(ModelSet m, const Signature& sig) {
  std::vector<VarId> out;
  for (VarId p = 0; p < static_cast<VarId>(sig.num_variables()); ++p) {
    for (Valuation v = 0; v < sig.num_valuations(); ++v) {
      if (m.contains(v) != m.contains(v ^ (1 << p))) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

}  // namespace expertise

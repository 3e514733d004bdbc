#pragma once

#include <random>
#include <vector>

#include "expertise/collections.hpp"
#include "expertise/report.hpp"

namespace testutil {

using namespace expertise;

// Uniform draw without std::uniform_int_distribution so streams are stable
// across standard libraries.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

inline ModelSet random_nonempty_mask(std::mt19937_64& rng,
                                     const Signature& sig) {
  std::uint64_t full = ModelSet::all(sig).bits();
  std::uint64_t bits = 1 + draw(rng, full);  // skip the empty mask
  return ModelSet(bits, sig.num_valuations());
}

inline Report random_report(std::mt19937_64& rng, const Signature& sig) {
  SourceId s = static_cast<SourceId>(draw(rng, sig.num_sources()));
  CaseId c = static_cast<CaseId>(draw(rng, sig.num_cases()));
  ModelSet m = random_nonempty_mask(rng, sig);
  return make_report(sig, s, c, canonical_formula(m, sig));
}

inline ReportSequence random_sequence(std::mt19937_64& rng,
                                      const Signature& sig, std::size_t len) {
  ReportSequence seq;
  for (std::size_t i = 0; i < len; ++i) seq.push_back(random_report(rng, sig));
  return seq;
}

inline Formula random_lformula(std::mt19937_64& rng, const Signature& sig,
                               int depth = 2) {
  switch (depth > 0 ? draw(rng, 5) : draw(rng, 3)) {
    case 0:
      return canonical_formula(random_nonempty_mask(rng, sig), sig);
    case 1:
      return Formula::expert(
          static_cast<SourceId>(draw(rng, sig.num_sources())),
          canonical_formula(random_nonempty_mask(rng, sig), sig));
    case 2:
      return Formula::sound(
          static_cast<SourceId>(draw(rng, sig.num_sources())),
          canonical_formula(random_nonempty_mask(rng, sig), sig));
    case 3:
      return Formula::negate(random_lformula(rng, sig, depth - 1));
    default:
      return Formula::conj(random_lformula(rng, sig, depth - 1),
                           random_lformula(rng, sig, depth - 1));
  }
}

inline Bitset random_world_set(std::mt19937_64& rng, const Universe& u,
                               std::uint64_t expected_size) {
  Bitset ws(u.world_count());
  for (std::uint64_t i = 0; i < expected_size; ++i)
    ws.set(draw(rng, u.world_count()));
  return ws;
}

// Reference implementation of the elementary closure: iterate the defining
// condition until fixpoint, mixing case valuations of partition-equivalent
// member pairs.
inline Bitset naive_elementary_closure(const Universe& u, const Bitset& ws) {
  Bitset out = ws;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::uint64_t> members;
    out.for_each([&](std::uint64_t i) { members.push_back(i); });
    for (std::size_t a = 0; a < members.size(); ++a) {
      World wa = u.world(members[a]);
      for (std::size_t b = 0; b < members.size(); ++b) {
        World wb = u.world(members[b]);
        if (!partition_equivalent(wa, wb)) continue;
        const std::size_t cases = u.sig().num_cases();
        for (std::uint64_t mix = 0; mix < (std::uint64_t{1} << cases); ++mix) {
          World w = wa;
          for (std::size_t c = 0; c < cases; ++c)
            if ((mix >> c) & 1) w.vals[c] = wb.vals[c];
          std::uint64_t idx = u.index_of(w);
          if (!out.test(idx)) {
            out.set(idx);
            changed = true;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace testutil

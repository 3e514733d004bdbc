#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "expertise/operators.hpp"

namespace expertise {

enum class DecomposableOp { WeakMb, VarBasedCond, PartBasedCond, ExcessMin };

inline std::optional<DecomposableOp> decomposable_op(const std::string& name) {
  if (name == "weak-mb") return DecomposableOp::WeakMb;
  if (name == "var-based-cond") return DecomposableOp::VarBasedCond;
  if (name == "part-based-cond") return DecomposableOp::PartBasedCond;
  if (name == "excess-min") return DecomposableOp::ExcessMin;
  return std::nullopt;
}

constexpr std::int64_t kInfRank = std::numeric_limits<std::int64_t>::max();

namespace detail {

struct ESAtom {
  bool expert;
  SourceId source;
  std::uint64_t mask;
  bool operator==(const ESAtom&) const = default;
};

inline void collect_es_atoms(const Formula& f, const Signature& sig,
                             std::vector<ESAtom>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Expert:
    case K::Sound: {
      ESAtom a{f.kind() == K::Expert, f.source(),
               models(f.left(), sig).bits()};
      if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
      return;
    }
    case K::Not:
      collect_es_atoms(f.left(), sig, out);
      return;
    case K::And:
    case K::Or:
    case K::Imp:
    case K::Iff:
      collect_es_atoms(f.left(), sig, out);
      collect_es_atoms(f.right(), sig, out);
      return;
    default:
      return;
  }
}

// Truth of a formula at a fixed case valuation, with E/S atom values supplied
// externally.
inline bool eval_assigned(const Formula& f, const Signature& sig, Valuation vc,
                          const std::vector<ESAtom>& atoms,
                          const std::vector<bool>& value) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Var:
      return (vc >> f.var_id()) & 1;
    case K::Not:
      return !eval_assigned(f.left(), sig, vc, atoms, value);
    case K::And:
      return eval_assigned(f.left(), sig, vc, atoms, value) &&
             eval_assigned(f.right(), sig, vc, atoms, value);
    case K::Or:
      return eval_assigned(f.left(), sig, vc, atoms, value) ||
             eval_assigned(f.right(), sig, vc, atoms, value);
    case K::Imp:
      return !eval_assigned(f.left(), sig, vc, atoms, value) ||
             eval_assigned(f.right(), sig, vc, atoms, value);
    case K::Iff:
      return eval_assigned(f.left(), sig, vc, atoms, value) ==
             eval_assigned(f.right(), sig, vc, atoms, value);
    case K::Expert:
    case K::Sound: {
      ESAtom a{f.kind() == K::Expert, f.source(),
               models(f.left(), sig).bits()};
      for (std::size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i] == a) return value[i];
      throw Error("unassigned E/S atom");
    }
  }
  return false;
}

}  // namespace detail

// Result of the per-source decomposition. The possible set is the union over
// feasible valuation tuples of the product of per-source feasible partition
// sets; the plausible set is the union over best-scoring tuples of the
// product of per-source minimizer sets. Queries run on the block structure
// without expanding it, so spaces far beyond the world budget stay reachable.
class DecomposedOutput {
 public:
  struct SourceChoice {
    Bitset feasible;    // over partition ids
    Bitset minimizers;  // argmin subset of feasible
    std::int64_t min_score = kInfRank;
  };
  struct TupleBlock {
    std::uint64_t vt;
    std::vector<SourceChoice> sources;  // aligned with ordinary_sources()
    std::int64_t score = kInfRank;      // star constant + per-source minima
  };

  DecomposedOutput(const Universe& u, std::vector<TupleBlock> tuples,
                   std::int64_t best)
      : u_(&u), tuples_(std::move(tuples)), best_(best) {}

  const std::vector<TupleBlock>& tuples() const { return tuples_; }
  std::int64_t best_score() const { return best_; }
  bool possible_empty() const { return tuples_.empty(); }

  std::uint64_t possible_count() const { return count(false); }
  std::uint64_t plausible_count() const { return count(true); }

  ModelSet prop_knowledge_models(CaseId c) const { return prop_models(c, false); }
  ModelSet prop_belief_models(CaseId c) const { return prop_models(c, true); }

  bool in_knowledge(CaseId c, const Formula& f) const {
    return holds_universally(c, f, false);
  }
  bool in_belief(CaseId c, const Formula& f) const {
    return holds_universally(c, f, true);
  }

  // Explicit world sets; requires the universe to be within the world budget.
  OperatorOutput materialize() const {
    OperatorOutput out{u_->empty_set(), u_->empty_set()};
    const std::size_t ns = u_->ordinary_sources().size();
    std::vector<int> pick(ns, 0);
    for (const TupleBlock& t : tuples_) {
      expand(t, /*minimal=*/false, out.possible);
      if (t.score == best_) expand(t, /*minimal=*/true, out.plausible);
    }
    return out;
  }

 private:
  Valuation digit(std::uint64_t vt, CaseId c) const {
    for (CaseId i = 0; i < c; ++i) vt /= u_->sig().num_valuations();
    return static_cast<Valuation>(vt % u_->sig().num_valuations());
  }

  std::uint64_t count(bool minimal) const {
    std::uint64_t total = 0;
    for (const TupleBlock& t : tuples_) {
      if (minimal && t.score != best_) continue;
      std::uint64_t prod = 1;
      for (const SourceChoice& s : t.sources)
        prod *= (minimal ? s.minimizers : s.feasible).count();
      total += prod;
    }
    return total;
  }

  ModelSet prop_models(CaseId c, bool minimal) const {
    std::uint64_t bits = 0;
    for (const TupleBlock& t : tuples_) {
      if (minimal && t.score != best_) continue;
      bits |= std::uint64_t{1} << digit(t.vt, c);
    }
    return ModelSet(bits, u_->sig().num_valuations());
  }

  void expand(const TupleBlock& t, bool minimal, Bitset& out) const {
    const auto& ordinary = u_->ordinary_sources();
    std::vector<std::vector<std::uint64_t>> ids(ordinary.size());
    for (std::size_t k = 0; k < ordinary.size(); ++k)
      (minimal ? t.sources[k].minimizers : t.sources[k].feasible)
          .for_each([&](std::uint64_t p) { ids[k].push_back(p); });
    std::vector<std::size_t> at(ordinary.size(), 0);
    while (true) {
      std::uint64_t pc = 0;
      for (std::size_t k = 0; k < ordinary.size(); ++k)
        pc = pc * u_->num_partitions() + ids[k][at[k]];
      out.set(t.vt * u_->partition_combo_count() + pc);
      std::size_t k = ordinary.size();
      while (k > 0 && ++at[k - 1] == ids[k - 1].size()) at[--k] = 0;
      if (k == 0) break;
    }
  }

  bool holds_universally(CaseId c, const Formula& f, bool minimal) const {
    std::vector<detail::ESAtom> atoms;
    detail::collect_es_atoms(f, u_->sig(), atoms);
    const auto& ordinary = u_->ordinary_sources();

    for (const TupleBlock& t : tuples_) {
      if (minimal && t.score != best_) continue;
      Valuation vc = digit(t.vt, c);
      std::vector<bool> value(atoms.size(), false);
      // star atoms are fixed by the unit partition
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].source != u_->sig().star()) continue;
        value[i] = atoms[i].expert || ((atoms[i].mask >> vc) & 1);
      }
      // distinct per-source atom profiles over the block's partition sets
      std::vector<std::vector<std::size_t>> atom_ix(ordinary.size());
      std::vector<std::vector<std::uint64_t>> profiles(ordinary.size());
      for (std::size_t k = 0; k < ordinary.size(); ++k) {
        for (std::size_t i = 0; i < atoms.size(); ++i)
          if (atoms[i].source == ordinary[k]) atom_ix[k].push_back(i);
        if (atom_ix[k].empty()) {
          profiles[k].push_back(0);
          continue;
        }
        const Bitset& set = minimal ? t.sources[k].minimizers
                                    : t.sources[k].feasible;
        std::vector<std::uint64_t>& out = profiles[k];
        set.for_each([&](std::uint64_t pid) {
          const Partition& p = u_->partition(pid);
          std::uint64_t prof = 0;
          for (std::size_t j = 0; j < atom_ix[k].size(); ++j) {
            const detail::ESAtom& a = atoms[atom_ix[k][j]];
            std::uint64_t img = p.image(a.mask);
            bool v = a.expert ? img == a.mask : (img >> vc) & 1;
            if (v) prof |= std::uint64_t{1} << j;
          }
          if (std::find(out.begin(), out.end(), prof) == out.end())
            out.push_back(prof);
        });
      }
      // formula must hold under every combination of source profiles
      std::vector<std::size_t> at(ordinary.size(), 0);
      while (true) {
        for (std::size_t k = 0; k < ordinary.size(); ++k)
          for (std::size_t j = 0; j < atom_ix[k].size(); ++j)
            value[atom_ix[k][j]] = (profiles[k][at[k]] >> j) & 1;
        if (!detail::eval_assigned(f, u_->sig(), vc, atoms, value))
          return false;
        std::size_t k = ordinary.size();
        while (k > 0 && ++at[k - 1] == profiles[k - 1].size()) at[--k] = 0;
        if (k == 0) break;
      }
    }
    return true;
  }

  const Universe* u_;
  std::vector<TupleBlock> tuples_;
  std::int64_t best_;
};

// Evaluates one of the additive operators by iterating valuation tuples and
// minimizing per source over its partitions, subject to that source's
// soundness constraints. Produces the same possible/plausible sets as the
// world-enumeration route. An empty possible set is a result, not an error.
inline DecomposedOutput decomposed_eval(const Universe& u, DecomposableOp op,
                                        const ReportSequence& seq) {
  const Signature& sig = u.sig();
  const auto& ordinary = u.ordinary_sources();
  const int np = u.num_partitions();
  const std::uint64_t nv = sig.num_valuations();

  // image and excess tables per report
  std::vector<std::vector<std::uint64_t>> images(seq.size());
  std::vector<std::vector<std::uint64_t>> excess(seq.size());
  for (std::size_t r = 0; r < seq.size(); ++r) {
    images[r].resize(np);
    excess[r].resize(np);
    for (int p = 0; p < np; ++p) {
      std::uint64_t img = u.partition(p).image(seq[r].mask.bits());
      images[r][p] = img;
      excess[r][p] = std::popcount(img & ~seq[r].mask.bits());
    }
  }

  // static per-partition score for the rank-based operators
  std::vector<std::int64_t> static_score(np, 0);
  std::int64_t star_const = 0;
  if (op == DecomposableOp::VarBasedCond) {
    for (int p = 0; p < np; ++p) static_score[p] = -variable_expertise(u, p);
    star_const = -static_cast<std::int64_t>(sig.num_variables());
  } else if (op == DecomposableOp::PartBasedCond) {
    for (int p = 0; p < np; ++p)
      static_score[p] = -u.partition(p).num_cells();
    star_const = -static_cast<std::int64_t>(nv);
  }

  std::vector<std::vector<std::size_t>> reports_of(sig.num_sources());
  for (std::size_t r = 0; r < seq.size(); ++r)
    reports_of[seq[r].source].push_back(r);

  std::vector<DecomposedOutput::TupleBlock> tuples;
  std::int64_t best = kInfRank;

  std::vector<Valuation> vals(sig.num_cases(), 0);
  for (std::uint64_t vt = 0;; ++vt) {
    // the reliable source's constraints: its reports must be true
    bool star_ok = true;
    for (std::size_t r : reports_of[sig.star()])
      star_ok &= (seq[r].mask.bits() >> vals[seq[r].caze]) & 1;

    if (star_ok) {
      DecomposedOutput::TupleBlock block;
      block.vt = vt;
      block.score = star_const;
      bool feasible = true;
      for (std::size_t k = 0; k < ordinary.size() && feasible; ++k) {
        DecomposedOutput::SourceChoice choice{Bitset(np), Bitset(np),
                                              kInfRank};
        for (int p = 0; p < np; ++p) {
          std::int64_t score = static_score[p];
          bool ok = true;
          for (std::size_t r : reports_of[ordinary[k]]) {
            if (!((images[r][p] >> vals[seq[r].caze]) & 1)) {
              ok = false;
              break;
            }
            if (op == DecomposableOp::ExcessMin)
              score += static_cast<std::int64_t>(excess[r][p]);
          }
          if (!ok) continue;
          choice.feasible.set(p);
          if (score < choice.min_score) {
            choice.min_score = score;
            choice.minimizers.clear();
          }
          if (score == choice.min_score) choice.minimizers.set(p);
        }
        if (choice.feasible.none())
          feasible = false;
        else {
          block.score += choice.min_score;
          block.sources.push_back(std::move(choice));
        }
      }
      if (feasible) {
        best = std::min(best, block.score);
        tuples.push_back(std::move(block));
      }
    }

    std::size_t c = 0;
    while (c < sig.num_cases()) {
      if (++vals[c] < static_cast<Valuation>(nv)) break;
      vals[c] = 0;
      ++c;
    }
    if (c == sig.num_cases()) break;
  }
  return DecomposedOutput(u, std::move(tuples), best);
}

}  // namespace expertise

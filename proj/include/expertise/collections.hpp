#pragma once

#include <cstdint>
#include <vector>

#include "expertise/world.hpp"

namespace expertise {

// Formula evaluator with masks resolved up front: maximal propositional
// subtrees collapse to one valuation-mask test, E/S atoms carry the model set
// of their argument. Keeps world loops free of repeated models() calls.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const Signature& sig) {
    root_ = compile(f, sig);
  }

  bool eval(const Universe& u, const World& w, CaseId c) const {
    return eval_node(root_, u, w, c);
  }

 private:
  enum class Op { PropMask, Expert, Sound, Not, And, Or };
  struct Node {
    Op op;
    int a = -1, b = -1;
    SourceId source = -1;
    std::uint64_t mask = 0;
  };

  int compile(const Formula& f, const Signature& sig) {
    using K = Formula::Kind;
    Node n;
    if (f.is_propositional()) {
      n.op = Op::PropMask;
      n.mask = models(f, sig).bits();
      return push(n);
    }
    switch (f.kind()) {
      case K::Expert:
      case K::Sound:
        n.op = f.kind() == K::Expert ? Op::Expert : Op::Sound;
        n.source = f.source();
        n.mask = models(f.left(), sig).bits();
        return push(n);
      case K::Not:
        n.op = Op::Not;
        n.a = compile(f.left(), sig);
        return push(n);
      case K::And:
        n.op = Op::And;
        n.a = compile(f.left(), sig);
        n.b = compile(f.right(), sig);
        return push(n);
      case K::Or:
        n.op = Op::Or;
        n.a = compile(f.left(), sig);
        n.b = compile(f.right(), sig);
        return push(n);
      case K::Imp: {
        // a -> b  ==  !a | b
        Node neg;
        neg.op = Op::Not;
        neg.a = compile(f.left(), sig);
        n.op = Op::Or;
        n.a = push(neg);
        n.b = compile(f.right(), sig);
        return push(n);
      }
      case K::Iff: {
        int a = compile(f.left(), sig);
        int b = compile(f.right(), sig);
        Node na{Op::Not, a}, nb{Op::Not, b};
        Node both{Op::And, a, b}, neither{Op::And, push(na), push(nb)};
        n.op = Op::Or;
        n.a = push(both);
        n.b = push(neither);
        return push(n);
      }
      default:
        throw Error("unreachable formula kind in compile");
    }
  }

  int push(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool eval_node(int i, const Universe& u, const World& w, CaseId c) const {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::PropMask:
        return (n.mask >> w.vals[c]) & 1;
      case Op::Expert:
        return u.partition(w.parts[n.source]).image(n.mask) == n.mask;
      case Op::Sound:
        return (u.partition(w.parts[n.source]).image(n.mask) >> w.vals[c]) & 1;
      case Op::Not:
        return !eval_node(n.a, u, w, c);
      case Op::And:
        return eval_node(n.a, u, w, c) && eval_node(n.b, u, w, c);
      case Op::Or:
        return eval_node(n.a, u, w, c) || eval_node(n.b, u, w, c);
    }
    return false;
  }

  std::vector<Node> nodes_;
  int root_;
};

// Case-indexed collection of expertise-language formulas; every case has an
// entry, possibly empty.
struct CaseCollection {
  std::vector<std::vector<Formula>> by_case;

  static CaseCollection empty(const Signature& sig) {
    CaseCollection g;
    g.by_case.resize(sig.num_cases());
    return g;
  }
  void add(CaseId c, Formula f) { by_case[c].push_back(std::move(f)); }
  bool is_empty() const {
    for (const auto& fs : by_case)
      if (!fs.empty()) return false;
    return true;
  }
};

// Worlds satisfying every formula of the collection at its case.
inline Bitset mod_of(const Universe& u, const CaseCollection& g) {
  std::vector<std::vector<CompiledFormula>> compiled(g.by_case.size());
  for (std::size_t c = 0; c < g.by_case.size(); ++c)
    for (const Formula& f : g.by_case[c])
      compiled[c].emplace_back(f, u.sig());

  Bitset out(u.world_count());
  u.for_each_world([&](std::uint64_t index, const World& w) {
    for (std::size_t c = 0; c < compiled.size(); ++c)
      for (const CompiledFormula& f : compiled[c])
        if (!f.eval(u, w, static_cast<CaseId>(c))) return;
    out.set(index);
  });
  return out;
}

// f is a c-consequence of g iff it holds at c in every model of g.
inline bool is_consequence(const Universe& u, const CaseCollection& g,
                           CaseId c, const Formula& f) {
  CompiledFormula cf(f, u.sig());
  Bitset m = mod_of(u, g);
  bool ok = true;
  m.for_each([&](std::uint64_t index) {
    if (ok && !cf.eval(u, u.world(index), c)) ok = false;
  });
  return ok;
}

// Valuations realized at case c by some world of the set. By the
// correspondence between world sets and belief collections this is the model
// set of the propositional part of the theory the set determines at c.
inline ModelSet prop_belief_models(const Universe& u, const Bitset& ws,
                                   CaseId c) {
  std::uint64_t bits = 0;
  const std::uint64_t pc = u.partition_combo_count();
  const int nv = u.sig().num_valuations();
  std::uint64_t stride = 1;
  for (CaseId i = 0; i < c; ++i) stride *= nv;
  ws.for_each([&](std::uint64_t index) {
    bits |= std::uint64_t{1} << ((index / pc / stride) % nv);
  });
  return ModelSet(bits, nv);
}

// w draws each case valuation from some member of ws.
inline bool is_valuation_combination(const Universe& u, const World& w,
                                     const Bitset& ws) {
  const std::size_t cases = u.sig().num_cases();
  std::vector<bool> covered(cases, false);
  std::size_t remaining = cases;
  bool done = false;
  ws.for_each([&](std::uint64_t index) {
    if (done) return;
    for (std::size_t c = 0; c < cases; ++c) {
      if (!covered[c] &&
          u.valuation_of(index, static_cast<CaseId>(c)) == w.vals[c]) {
        covered[c] = true;
        if (--remaining == 0) done = true;
      }
    }
  });
  return remaining == 0;
}

// Least superset closed under valuation combinations of partition-equivalent
// members. Within a fixed partition assignment, closing under pairwise
// combinations yields the product of the per-case valuation projections, so
// the closure is computed group by group.
inline Bitset elementary_closure(const Universe& u, const Bitset& ws) {
  const std::uint64_t vt_count = u.valuation_tuple_count();
  const std::uint64_t pc_count = u.partition_combo_count();
  const int nv = u.sig().num_valuations();
  const std::size_t cases = u.sig().num_cases();

  Bitset out(u.world_count());
  std::vector<std::uint64_t> proj(cases);
  for (std::uint64_t pc = 0; pc < pc_count; ++pc) {
    bool nonempty = false;
    for (auto& p : proj) p = 0;
    for (std::uint64_t vt = 0; vt < vt_count; ++vt) {
      if (!ws.test(vt * pc_count + pc)) continue;
      nonempty = true;
      std::uint64_t digits = vt;
      for (std::size_t c = 0; c < cases; ++c) {
        proj[c] |= std::uint64_t{1} << (digits % nv);
        digits /= nv;
      }
    }
    if (!nonempty) continue;
    for (std::uint64_t vt = 0; vt < vt_count; ++vt) {
      std::uint64_t digits = vt;
      bool in = true;
      for (std::size_t c = 0; c < cases && in; ++c) {
        in = (proj[c] >> (digits % nv)) & 1;
        digits /= nv;
      }
      if (in) out.set(vt * pc_count + pc);
    }
  }
  return out;
}

inline bool is_elementary(const Universe& u, const Bitset& ws) {
  return elementary_closure(u, ws) == ws;
}

// The constructive half of the correspondence: a collection whose models are
// exactly the elementary closure of ws. Each case gets one disjunction with a
// disjunct per member world, pinning its case valuation and its full
// expertise profile.
inline CaseCollection defining_collection(const Universe& u,
                                          const Bitset& ws) {
  const Signature& sig = u.sig();
  const int nv = sig.num_valuations();
  std::vector<Formula> val_formulas;
  for (Valuation v = 0; v < nv; ++v)
    val_formulas.push_back(canonical_formula(ModelSet::singleton(v, sig), sig));
  std::vector<Formula> mask_formulas;
  for (int m = 0; m < (1 << nv); ++m)
    mask_formulas.push_back(canonical_formula(ModelSet(m, nv), sig));

  CaseCollection g = CaseCollection::empty(sig);
  if (ws.none()) {
    for (CaseId c = 0; c < static_cast<CaseId>(sig.num_cases()); ++c)
      g.add(c, Formula::truth(false));
    return g;
  }
  for (CaseId c = 0; c < static_cast<CaseId>(sig.num_cases()); ++c) {
    Formula disjunction;
    bool have = false;
    ws.for_each([&](std::uint64_t index) {
      World w = u.world(index);
      Formula term = val_formulas[w.vals[c]];
      for (SourceId i = 0; i < static_cast<SourceId>(sig.num_sources()); ++i) {
        const Partition& p = u.partition(w.parts[i]);
        for (int m = 0; m < (1 << nv); ++m) {
          std::uint64_t mask = static_cast<std::uint64_t>(m);
          Formula atom = Formula::expert(i, mask_formulas[m]);
          if (p.image(mask) != mask) atom = Formula::negate(atom);
          term = Formula::conj(term, atom);
        }
      }
      disjunction = have ? Formula::disj(disjunction, term) : term;
      have = true;
    });
    g.add(c, disjunction);
  }
  return g;
}

}  // namespace expertise

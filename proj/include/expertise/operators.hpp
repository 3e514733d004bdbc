#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "expertise/report.hpp"

namespace expertise {

// Scores live in the naturals extended with infinity; infinity absorbs
// addition and marks impossible worlds.
constexpr std::uint64_t kInfScore = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t add_scores(std::uint64_t a, std::uint64_t b) {
  if (a == kInfScore || b == kInfScore) return kInfScore;
  return a + b;  // domain scores are tiny, no overflow in practice
}

// The possible/plausible world pair that induces knowledge and belief sets.
struct OperatorOutput {
  Bitset possible;   // X
  Bitset plausible;  // Y, subset of X
};

using RankFunction = std::function<std::int64_t(const Universe&, const World&)>;
struct ScoreFunction {
  std::function<std::uint64_t(const Universe&, const World&)> prior;
  std::function<std::uint64_t(const Universe&, const World&, const Report&)>
      disagreement;
};

// Worlds satisfying the soundness constraint of every report, intersected
// with the models of the prior knowledge collection when one is given.
inline Bitset possible_worlds(const Universe& u, const ReportSequence& seq,
                              const Bitset* prior = nullptr) {
  // image of the report mask per partition id, so the soundness test per
  // world is one bit probe
  std::vector<std::vector<std::uint64_t>> images(seq.size());
  for (std::size_t r = 0; r < seq.size(); ++r) {
    images[r].resize(u.num_partitions());
    for (int p = 0; p < u.num_partitions(); ++p)
      images[r][p] = u.partition(p).image(seq[r].mask.bits());
  }
  Bitset out(u.world_count());
  u.for_each_world([&](std::uint64_t index, const World& w) {
    if (prior && !prior->test(index)) return;
    for (std::size_t r = 0; r < seq.size(); ++r) {
      const Report& rep = seq[r];
      if (!((images[r][w.parts[rep.source]] >> w.vals[rep.caze]) & 1)) return;
    }
    out.set(index);
  });
  return out;
}

// weak-mb: plausible = possible = models of the soundness collection.
inline OperatorOutput weak_mb(const Universe& u, const ReportSequence& seq,
                              const Bitset* prior = nullptr) {
  Bitset x = possible_worlds(u, seq, prior);
  return OperatorOutput{x, x};
}

// Conditioning: plausible worlds are the rank-minimal possible ones under a
// fixed total preorder given by an integer rank (lower is more plausible).
inline OperatorOutput conditioning(const Universe& u, const ReportSequence& seq,
                                   const RankFunction& rank,
                                   const Bitset* prior = nullptr) {
  Bitset x = possible_worlds(u, seq, prior);
  Bitset y(u.world_count());
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  x.for_each([&](std::uint64_t index) {
    std::int64_t r = rank(u, u.world(index));
    if (r < best) {
      best = r;
      y.clear();
    }
    if (r == best) y.set(index);
  });
  return OperatorOutput{std::move(x), std::move(y)};
}

// Count of variables the partition is an expert on.
inline int variable_expertise(const Universe& u, int partition_id) {
  const Partition& p = u.partition(partition_id);
  int n = 0;
  for (VarId v = 0; v < static_cast<VarId>(u.sig().num_variables()); ++v) {
    std::uint64_t m = ModelSet::of_variable(v, u.sig()).bits();
    if (p.image(m) == m) ++n;
  }
  return n;
}

// Negated number of (source, variable) expertise pairs.
inline std::int64_t var_rank(const Universe& u, const World& w) {
  std::int64_t total = 0;
  for (int pid : w.parts) total += variable_expertise(u, pid);
  return -total;
}

// Negated total cell count across sources.
inline std::int64_t part_rank(const Universe& u, const World& w) {
  std::int64_t total = 0;
  for (int pid : w.parts) total += u.partition(pid).num_cells();
  return -total;
}

// Disagreement of a world with one report: the number of valuations in the
// image of the report's models beyond the models themselves, infinite when
// the report is not sound there.
inline std::uint64_t excess_min_d(const Universe& u, const World& w,
                                  const Report& r) {
  const Partition& p = u.partition(w.parts[r.source]);
  std::uint64_t image = p.image(r.mask.bits());
  if (!((image >> w.vals[r.caze]) & 1)) return kInfScore;
  return std::popcount(image & ~r.mask.bits());
}

// Score-based evaluation: possible worlds are those of finite total score,
// plausible worlds the score minimizers.
inline OperatorOutput score_based(const Universe& u, const ReportSequence& seq,
                                  const ScoreFunction& score,
                                  const Bitset* prior = nullptr) {
  Bitset x(u.world_count());
  Bitset y(u.world_count());
  std::uint64_t best = kInfScore;
  u.for_each_world([&](std::uint64_t index, const World& w) {
    if (prior && !prior->test(index)) return;
    std::uint64_t total = score.prior(u, w);
    for (const Report& r : seq) {
      if (total == kInfScore) break;
      total = add_scores(total, score.disagreement(u, w, r));
    }
    if (total == kInfScore) return;
    x.set(index);
    if (total < best) {
      best = total;
      y.clear();
    }
    if (total == best) y.set(index);
  });
  return OperatorOutput{std::move(x), std::move(y)};
}

// A belief change operator: maps report sequences to world-set pairs. The
// rank is present exactly for conditioning-backed operators, where it
// witnesses the fixed plausibility order.
struct Operator {
  std::string name;
  std::function<OperatorOutput(const Universe&, const ReportSequence&,
                               const Bitset*)>
      eval;
  RankFunction rank;  // empty unless conditioning-backed

  OperatorOutput operator()(const Universe& u, const ReportSequence& seq,
                            const Bitset* prior = nullptr) const {
    return eval(u, seq, prior);
  }
};

inline Operator make_weak_mb() {
  return Operator{"weak-mb",
                  [](const Universe& u, const ReportSequence& s,
                     const Bitset* p) { return weak_mb(u, s, p); },
                  nullptr};
}

inline Operator make_conditioning(std::string name, RankFunction rank) {
  return Operator{std::move(name),
                  [rank](const Universe& u, const ReportSequence& s,
                         const Bitset* p) { return conditioning(u, s, rank, p); },
                  rank};
}

inline Operator make_var_based_cond() {
  return make_conditioning("var-based-cond", var_rank);
}

inline Operator make_part_based_cond() {
  return make_conditioning("part-based-cond", part_rank);
}

// excess-min evaluated with per-(partition, mask) tables; the generic
// score_based path with excess_min_d is kept as the independent slow route.
inline OperatorOutput excess_min_eval(const Universe& u,
                                      const ReportSequence& seq,
                                      const Bitset* prior = nullptr) {
  std::vector<std::vector<std::uint64_t>> images(seq.size());
  std::vector<std::vector<std::uint64_t>> excess(seq.size());
  for (std::size_t r = 0; r < seq.size(); ++r) {
    images[r].resize(u.num_partitions());
    excess[r].resize(u.num_partitions());
    for (int p = 0; p < u.num_partitions(); ++p) {
      std::uint64_t img = u.partition(p).image(seq[r].mask.bits());
      images[r][p] = img;
      excess[r][p] = std::popcount(img & ~seq[r].mask.bits());
    }
  }
  Bitset x(u.world_count());
  Bitset y(u.world_count());
  std::uint64_t best = kInfScore;
  u.for_each_world([&](std::uint64_t index, const World& w) {
    if (prior && !prior->test(index)) return;
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < seq.size(); ++r) {
      const Report& rep = seq[r];
      int pid = w.parts[rep.source];
      if (!((images[r][pid] >> w.vals[rep.caze]) & 1)) return;  // unsound
      total += excess[r][pid];
    }
    x.set(index);
    if (total < best) {
      best = total;
      y.clear();
    }
    if (total == best) y.set(index);
  });
  return OperatorOutput{std::move(x), std::move(y)};
}

inline Operator make_excess_min() {
  return Operator{"excess-min",
                  [](const Universe& u, const ReportSequence& s,
                     const Bitset* p) { return excess_min_eval(u, s, p); },
                  nullptr};
}

inline ScoreFunction excess_min_score() {
  return ScoreFunction{
      [](const Universe&, const World&) -> std::uint64_t { return 0; },
      [](const Universe& u, const World& w, const Report& r) {
        return excess_min_d(u, w, r);
      }};
}

inline std::optional<Operator> operator_by_name(const std::string& name) {
  if (name == "weak-mb") return make_weak_mb();
  if (name == "var-based-cond") return make_var_based_cond();
  if (name == "part-based-cond") return make_part_based_cond();
  if (name == "excess-min") return make_excess_min();
  return std::nullopt;
}

// Knowledge membership: the formula holds at c in every possible world.
inline bool in_knowledge(const Universe& u, const OperatorOutput& out, CaseId c,
                         const Formula& f) {
  CompiledFormula cf(f, u.sig());
  bool ok = true;
  out.possible.for_each([&](std::uint64_t index) {
    if (ok && !cf.eval(u, u.world(index), c)) ok = false;
  });
  return ok;
}

// Belief membership: the formula holds at c in every plausible world.
inline bool in_belief(const Universe& u, const OperatorOutput& out, CaseId c,
                      const Formula& f) {
  CompiledFormula cf(f, u.sig());
  bool ok = true;
  out.plausible.for_each([&](std::uint64_t index) {
    if (ok && !cf.eval(u, u.world(index), c)) ok = false;
  });
  return ok;
}

}  // namespace expertise

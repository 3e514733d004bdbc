#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "expertise/operators.hpp"

namespace expertise {

// A generated space of report sequences: every sequence up to max_length over
// pool x sources x cases, or a seed-reproducible sample of them.
struct SequenceSpace {
  Signature sig;
  std::vector<ModelSet> pool;  // nonempty masks
  int max_length = 2;
  bool exhaustive = true;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;

  static std::vector<ModelSet> all_nonempty_masks(const Signature& sig) {
    std::vector<ModelSet> pool;
    for (std::uint64_t m = 1; m <= ModelSet::all(sig).bits(); ++m)
      pool.push_back(ModelSet(m, sig.num_valuations()));
    return pool;
  }

  static SequenceSpace make_exhaustive(Signature sig, int max_length) {
    SequenceSpace s{sig, all_nonempty_masks(sig), max_length, true, 0, 0};
    return s;
  }
  static SequenceSpace make_sampled(Signature sig, int max_length,
                                    std::uint64_t seed, std::uint64_t samples) {
    SequenceSpace s{sig, all_nonempty_masks(sig), max_length, false, seed,
                    samples};
    return s;
  }

  std::vector<Report> report_pool() const {
    std::vector<Report> out;
    for (SourceId s = 0; s < static_cast<SourceId>(sig.num_sources()); ++s)
      for (CaseId c = 0; c < static_cast<CaseId>(sig.num_cases()); ++c)
        for (const ModelSet& m : pool)
          out.push_back(make_report(sig, s, c, canonical_formula(m, sig)));
    return out;
  }

  std::uint64_t size() const {
    if (!exhaustive) return samples;
    std::uint64_t reports =
        sig.num_sources() * sig.num_cases() * pool.size();
    std::uint64_t total = 0, count = 1;
    for (int len = 0; len <= max_length; ++len) {
      if (count > sig.limits().max_sequences) return ~std::uint64_t{0};
      total += count;
      count *= reports;
    }
    return total;
  }

  template <typename Fn>
  void for_each_sequence(Fn&& fn) const {
    std::vector<Report> reports = report_pool();
    if (exhaustive) {
      for (int len = 0; len <= max_length; ++len) {
        std::vector<std::size_t> at(len, 0);
        while (true) {
          ReportSequence seq;
          seq.reserve(len);
          for (std::size_t i : at) seq.push_back(reports[i]);
          fn(seq);
          std::size_t k = len;
          while (k > 0 && ++at[k - 1] == reports.size()) at[--k] = 0;
          if (k == 0) break;
        }
      }
    } else {
      std::mt19937_64 rng(seed);
      for (std::uint64_t n = 0; n < samples; ++n) {
        std::size_t len = rng() % (max_length + 1);
        ReportSequence seq;
        for (std::size_t i = 0; i < len; ++i)
          seq.push_back(reports[rng() % reports.size()]);
        fn(seq);
      }
    }
  }
};

enum class PostulateId {
  Closure,
  Containment,
  Consistency,
  Soundness,
  KBound,
  PriorExtension,
  Rearrangement,
  Equivalence,
  KConjunction,
  DuplicateRemoval,
  ConditionalConsistency,
  InclusionVacuity,
  Acyc,
  Refinement,
  CondSuccess,
  StrongCondSuccess,
  Boundedness,
  HBoundedness,
};

inline const std::vector<std::pair<PostulateId, std::string>>&
postulate_names() {
  static const std::vector<std::pair<PostulateId, std::string>> names = {
      {PostulateId::Closure, "Closure"},
      {PostulateId::Containment, "Containment"},
      {PostulateId::Consistency, "Consistency"},
      {PostulateId::Soundness, "Soundness"},
      {PostulateId::KBound, "K-bound"},
      {PostulateId::PriorExtension, "Prior-Extension"},
      {PostulateId::Rearrangement, "Rearrangement"},
      {PostulateId::Equivalence, "Equivalence"},
      {PostulateId::KConjunction, "K-conjunction"},
      {PostulateId::DuplicateRemoval, "Duplicate-removal"},
      {PostulateId::ConditionalConsistency, "Conditional-consistency"},
      {PostulateId::InclusionVacuity, "Inclusion-vacuity"},
      {PostulateId::Acyc, "Acyc"},
      {PostulateId::Refinement, "Refinement"},
      {PostulateId::CondSuccess, "Cond-success"},
      {PostulateId::StrongCondSuccess, "Strong-cond-success"},
      {PostulateId::Boundedness, "Boundedness"},
      {PostulateId::HBoundedness, "H-Boundedness"},
  };
  return names;
}

inline std::string postulate_name(PostulateId id) {
  for (const auto& [pid, name] : postulate_names())
    if (pid == id) return name;
  return "?";
}

inline std::optional<PostulateId> postulate_by_name(const std::string& name) {
  for (const auto& [pid, pname] : postulate_names())
    if (pname == name) return pid;
  return std::nullopt;
}

// Everything needed to replay a violation: the sequences involved, plus the
// appended report, case, H-set or world pair where the postulate needs them.
struct Witness {
  std::vector<ReportSequence> sequences;
  std::optional<Report> report;
  CaseId caze = -1;
  std::vector<CaseId> hset;
  std::vector<std::uint64_t> worlds;
  std::string detail;
};

struct PostulateReport {
  std::string op;
  std::string postulate;
  enum class Status { HoldsOnSpace, Counterexample, NotApplicable } status;
  std::uint64_t instances = 0;
  std::string note;
  std::optional<Witness> witness;
};

namespace detail {

inline std::string seq_to_string(const Signature& sig,
                                 const ReportSequence& seq) {
  std::string out = "(";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ", ";
    out += "<" + sig.source_name(seq[i].source) + ", " +
           sig.case_name(seq[i].caze) + ", " + seq[i].formula.to_string(sig) +
           ">";
  }
  return out + ")";
}

struct Eval {
  OperatorOutput out;
  Bitset clx, cly;
};

inline Eval evaluate(const Universe& u, const Operator& op,
                     const ReportSequence& seq) {
  OperatorOutput out = op(u, seq);
  Bitset clx = elementary_closure(u, out.possible);
  Bitset cly = elementary_closure(u, out.plausible);
  return Eval{std::move(out), std::move(clx), std::move(cly)};
}

inline std::string sizes(const Bitset& a, const Bitset& b) {
  return "|lhs| = " + std::to_string(a.count()) +
         ", |rhs| = " + std::to_string(b.count());
}

}  // namespace detail

// Single-instance checks. Each returns a violation witness or nothing; the
// space drivers and the replay entry point share them.

inline std::optional<Witness> violates_closure(const Universe& u,
                                               const Operator& op,
                                               const ReportSequence& seq) {
  detail::Eval e = detail::evaluate(u, op, seq);
  if (elementary_closure(u, e.clx) == e.clx &&
      elementary_closure(u, e.cly) == e.cly)
    return std::nullopt;
  return Witness{{seq}, {}, -1, {}, {}, "closure of the induced collection moved"};
}

inline std::optional<Witness> violates_containment(const Universe& u,
                                                   const Operator& op,
                                                   const ReportSequence& seq) {
  detail::Eval e = detail::evaluate(u, op, seq);
  if (e.cly.is_subset_of(e.clx)) return std::nullopt;
  return Witness{{seq}, {}, -1, {}, {},
                 "mod(B) not within mod(K): " + detail::sizes(e.cly, e.clx)};
}

inline std::optional<Witness> violates_consistency(const Universe& u,
                                                   const Operator& op,
                                                   const ReportSequence& seq) {
  if (!star_consistent(u.sig(), seq)) return std::nullopt;
  OperatorOutput out = op(u, seq);
  if (out.possible.any() && out.plausible.any()) return std::nullopt;
  return Witness{{seq}, {}, -1, {}, {},
                 "star-consistent sequence with empty world sets"};
}

inline std::optional<Witness> violates_soundness(const Universe& u,
                                                 const Operator& op,
                                                 const ReportSequence& seq) {
  OperatorOutput out = op(u, seq);
  for (const Report& r : seq) {
    Formula s = Formula::sound(r.source, r.formula);
    if (!in_knowledge(u, out, r.caze, s))
      return Witness{{seq}, r, r.caze, {}, {},
                     s.to_string(u.sig()) + " missing from knowledge at " +
                         u.sig().case_name(r.caze)};
  }
  return std::nullopt;
}

inline std::optional<Witness> violates_k_bound(const Universe& u,
                                               const Operator& op,
                                               const ReportSequence& seq) {
  detail::Eval e = detail::evaluate(u, op, seq);
  Bitset snd = mod_of(u, soundness_collection(u.sig(), seq));
  // empty prior knowledge: mod(K^empty) intersects to mod(G_snd)
  if (snd.is_subset_of(e.clx)) return std::nullopt;
  return Witness{{seq}, {}, -1, {}, {},
                 "knowledge exceeds the soundness consequences: " +
                     detail::sizes(snd, e.clx)};
}

inline std::optional<Witness> violates_prior_extension(
    const Universe& u, const Operator& op, const ReportSequence& seq) {
  detail::Eval e = detail::evaluate(u, op, seq);
  detail::Eval base = detail::evaluate(u, op, {});
  if (e.clx.is_subset_of(base.clx)) return std::nullopt;
  return Witness{{seq}, {}, -1, {}, {}, "prior knowledge lost after reports"};
}

inline std::optional<Witness> violates_rearrangement(
    const Universe& u, const Operator& op, const ReportSequence& seq,
    const ReportSequence& perm) {
  detail::Eval a = detail::evaluate(u, op, seq);
  detail::Eval b = detail::evaluate(u, op, perm);
  if (a.clx == b.clx && a.cly == b.cly) return std::nullopt;
  return Witness{{seq, perm}, {}, -1, {}, {},
                 "permutation changed the output"};
}

inline std::optional<Witness> violates_equivalence(const Universe& u,
                                                   const Operator& op,
                                                   const ReportSequence& seq,
                                                   const Report& r1,
                                                   const Report& r2) {
  detail::Eval a = detail::evaluate(u, op, append(seq, r1));
  detail::Eval b = detail::evaluate(u, op, append(seq, r2));
  if (a.clx == b.clx && a.cly == b.cly) return std::nullopt;
  return Witness{{append(seq, r1), append(seq, r2)}, {}, -1, {}, {},
                 "equivalent reports produced different outputs"};
}

inline std::optional<Witness> violates_k_conjunction(
    const Universe& u, const Operator& op, const ReportSequence& seq,
    const ReportSequence& rho) {
  detail::Eval a = detail::evaluate(u, op, seq);
  detail::Eval b = detail::evaluate(u, op, rho);
  detail::Eval ab = detail::evaluate(u, op, concat(seq, rho));
  Bitset joint = a.clx & b.clx;
  if (ab.clx == joint) return std::nullopt;
  return Witness{{seq, rho}, {}, -1, {}, {},
                 "mod(K) of the concatenation differs from the intersection: " +
                     detail::sizes(ab.clx, joint)};
}

inline std::optional<Witness> violates_duplicate_removal(
    const Universe& u, const Operator& op, const ReportSequence& seq,
    const Report& r) {
  ReportSequence rho1 = append(seq, r);
  ReportSequence rho2 = append(rho1, r);
  detail::Eval a = detail::evaluate(u, op, rho1);
  detail::Eval b = detail::evaluate(u, op, rho2);
  if (a.clx == b.clx && a.cly == b.cly) return std::nullopt;
  return Witness{{rho1, rho2}, r, -1, {}, {},
                 "repeating the last report changed the output: mod(B) " +
                     detail::sizes(a.cly, b.cly)};
}

inline std::optional<Witness> violates_conditional_consistency(
    const Universe& u, const Operator& op, const ReportSequence& seq) {
  OperatorOutput out = op(u, seq);
  if (out.possible.none() || out.plausible.any()) return std::nullopt;
  return Witness{{seq}, {}, -1, {}, {},
                 "consistent knowledge but inconsistent belief"};
}

inline std::optional<Witness> violates_inclusion_vacuity(
    const Universe& u, const Operator& op, const ReportSequence& seq,
    const ReportSequence& rho) {
  detail::Eval a = detail::evaluate(u, op, seq);
  detail::Eval b = detail::evaluate(u, op, rho);
  detail::Eval ab = detail::evaluate(u, op, concat(seq, rho));
  Bitset bound = a.cly & b.clx;  // mod(B-sigma join K-rho)
  if (!bound.is_subset_of(ab.cly))
    return Witness{{seq, rho}, {}, -1, {}, {},
                   "inclusion failed: " + detail::sizes(bound, ab.cly)};
  if (bound.any() && ab.cly != bound)
    return Witness{{seq, rho}, {}, -1, {}, {},
                   "vacuity failed on a consistent join: " +
                       detail::sizes(ab.cly, bound)};
  return std::nullopt;
}

inline std::optional<Witness> violates_acyc(
    const Universe& u, const Operator& op,
    const std::vector<ReportSequence>& cycle) {
  std::vector<detail::Eval> evals;
  for (const ReportSequence& s : cycle) evals.push_back(detail::evaluate(u, op, s));
  const std::size_t n = cycle.size() - 1;
  for (std::size_t j = 0; j < n; ++j)
    if (!evals[j].clx.intersects(evals[j + 1].cly)) return std::nullopt;
  if (!evals[n].clx.intersects(evals[0].cly)) return std::nullopt;
  if (evals[0].clx.intersects(evals[n].cly)) return std::nullopt;
  return Witness{cycle, {}, -1, {}, {},
                 "consistent cycle with inconsistent K(first) + B(last)"};
}

inline std::optional<Witness> violates_refinement_at(
    const Universe& u, const Operator& op, std::uint64_t w1,
    std::uint64_t w2) {
  if (!op.rank) return std::nullopt;
  World a = u.world(w1), b = u.world(w2);
  if (!world_preceq(u, a, b)) return std::nullopt;
  if (op.rank(u, a) <= op.rank(u, b)) return std::nullopt;
  return Witness{{}, {}, -1, {}, {w1, w2},
                 "refining world ranked strictly less plausible"};
}

inline std::optional<Witness> violates_cond_success(const Universe& u,
                                                    const Operator& op,
                                                    const ReportSequence& seq,
                                                    const Report& r,
                                                    bool strong) {
  OperatorOutput before = op(u, seq);
  Formula ephi = Formula::expert(r.source, r.formula);
  bool antecedent;
  if (strong) {
    Formula blocker = Formula::negate(Formula::conj(ephi, r.formula));
    antecedent = !in_belief(u, before, r.caze, blocker);
  } else {
    antecedent = in_belief(u, before, r.caze, ephi) &&
                 !in_belief(u, before, r.caze, Formula::negate(r.formula));
  }
  if (!antecedent) return std::nullopt;
  OperatorOutput after = op(u, append(seq, r));
  if (in_belief(u, after, r.caze, r.formula)) return std::nullopt;
  return Witness{{seq}, r, r.caze, {}, {},
                 std::string(strong ? "strong " : "") +
                     "conditional success antecedent held but the report was "
                     "not accepted"};
}

// models of the set of formulas reported at c, optionally excluding the
// (source, formula) pairs repeated in some case of H
inline ModelSet reported_models(const Signature& sig, const ReportSequence& seq,
                                CaseId c, const std::vector<CaseId>& hset) {
  ModelSet joint = ModelSet::all(sig);
  for (const auto& [source, mask] : restrict_to(seq, c)) {
    bool repeated = false;
    for (CaseId d : hset)
      for (const auto& [other_source, other_mask] : restrict_to(seq, d))
        if (other_source == source && other_mask == mask) repeated = true;
    if (!repeated) joint = joint & mask;
  }
  return joint;
}

inline std::optional<Witness> violates_boundedness(const Universe& u,
                                                   const Operator& op,
                                                   const ReportSequence& seq,
                                                   CaseId c) {
  if (!star_consistent(u.sig(), seq)) return std::nullopt;
  OperatorOutput out = op(u, seq);
  ModelSet reported = reported_models(u.sig(), seq, c, {});
  ModelSet mc = prop_belief_models(u, out.plausible, c);
  if (reported.is_subset_of(mc)) return std::nullopt;
  return Witness{{seq}, {}, c, {}, {},
                 "beliefs at " + u.sig().case_name(c) +
                     " go beyond the reported formulas: believed models " +
                     mc.to_string(u.sig()) + ", reported models " +
                     reported.to_string(u.sig())};
}

inline std::optional<Witness> violates_h_boundedness(
    const Universe& u, const Operator& op, const ReportSequence& seq,
    const std::vector<CaseId>& hset, CaseId c) {
  if (!star_consistent(u.sig(), seq)) return std::nullopt;
  OperatorOutput out = op(u, seq);
  ModelSet bound = reported_models(u.sig(), seq, c, hset);
  for (CaseId d : hset) bound = bound & prop_belief_models(u, out.plausible, d);
  ModelSet mc = prop_belief_models(u, out.plausible, c);
  if (bound.is_subset_of(mc)) return std::nullopt;
  return Witness{{seq}, {}, c, hset, {},
                 "H-bounded models " + bound.to_string(u.sig()) +
                     " not contained in believed models " +
                     mc.to_string(u.sig())};
}

// Re-checks a previously reported counterexample.
inline bool replay_witness(const Universe& u, const Operator& op,
                           PostulateId id, const Witness& w) {
  auto seq = [&](std::size_t i) -> const ReportSequence& {
    return w.sequences.at(i);
  };
  switch (id) {
    case PostulateId::Closure:
      return violates_closure(u, op, seq(0)).has_value();
    case PostulateId::Containment:
      return violates_containment(u, op, seq(0)).has_value();
    case PostulateId::Consistency:
      return violates_consistency(u, op, seq(0)).has_value();
    case PostulateId::Soundness:
      return violates_soundness(u, op, seq(0)).has_value();
    case PostulateId::KBound:
      return violates_k_bound(u, op, seq(0)).has_value();
    case PostulateId::PriorExtension:
      return violates_prior_extension(u, op, seq(0)).has_value();
    case PostulateId::Rearrangement:
      return violates_rearrangement(u, op, seq(0), seq(1)).has_value();
    case PostulateId::Equivalence:
      return violates_rearrangement(u, op, seq(0), seq(1)).has_value();
    case PostulateId::KConjunction:
      return violates_k_conjunction(u, op, seq(0), seq(1)).has_value();
    case PostulateId::DuplicateRemoval: {
      // sequences hold (sigma.r, sigma.r.r); replay from the shorter one
      ReportSequence base = seq(0);
      base.pop_back();
      return violates_duplicate_removal(u, op, base, *w.report).has_value();
    }
    case PostulateId::ConditionalConsistency:
      return violates_conditional_consistency(u, op, seq(0)).has_value();
    case PostulateId::InclusionVacuity:
      return violates_inclusion_vacuity(u, op, seq(0), seq(1)).has_value();
    case PostulateId::Acyc:
      return violates_acyc(u, op, w.sequences).has_value();
    case PostulateId::Refinement:
      return violates_refinement_at(u, op, w.worlds.at(0), w.worlds.at(1))
          .has_value();
    case PostulateId::CondSuccess:
      return violates_cond_success(u, op, seq(0), *w.report, false)
          .has_value();
    case PostulateId::StrongCondSuccess:
      return violates_cond_success(u, op, seq(0), *w.report, true).has_value();
    case PostulateId::Boundedness:
      return violates_boundedness(u, op, seq(0), w.caze).has_value();
    case PostulateId::HBoundedness:
      return violates_h_boundedness(u, op, seq(0), w.hset, w.caze).has_value();
  }
  return false;
}

namespace detail {

struct SpaceChecker {
  const Universe& u;
  const Operator& op;
  const SequenceSpace& space;
  PostulateReport report;

  explicit SpaceChecker(const Universe& universe, const Operator& oper,
                        const SequenceSpace& sp, PostulateId id)
      : u(universe), op(oper), space(sp) {
    report.op = oper.name;
    report.postulate = postulate_name(id);
    report.status = PostulateReport::Status::HoldsOnSpace;
  }

  bool done() const {
    return report.status == PostulateReport::Status::Counterexample;
  }

  void found(Witness w) {
    if (done()) return;  // first counterexample in enumeration order wins
    report.status = PostulateReport::Status::Counterexample;
    report.witness = std::move(w);
  }

  template <typename Check>
  void per_sequence(Check&& check) {
    space.for_each_sequence([&](const ReportSequence& seq) {
      if (done()) return;
      ++report.instances;
      if (auto w = check(seq)) found(std::move(*w));
    });
  }

  template <typename Check>
  void per_sequence_and_report(Check&& check) {
    std::vector<Report> reports = space.report_pool();
    space.for_each_sequence([&](const ReportSequence& seq) {
      for (const Report& r : reports) {
        if (done()) return;
        ++report.instances;
        if (auto w = check(seq, r)) found(std::move(*w));
      }
    });
  }

  // pair drivers evaluate each base sequence once
  template <typename Check>
  void per_pair(Check&& check) {
    std::vector<ReportSequence> seqs;
    std::vector<detail::Eval> evals;
    space.for_each_sequence([&](const ReportSequence& seq) {
      seqs.push_back(seq);
      evals.push_back(detail::evaluate(u, op, seq));
    });
    if (seqs.size() * seqs.size() > u.limits().max_sequences)
      throw BudgetExceeded("pairwise check over this space is too large");
    for (std::size_t i = 0; i < seqs.size() && !done(); ++i)
      for (std::size_t j = 0; j < seqs.size() && !done(); ++j) {
        ++report.instances;
        if (auto w = check(seqs[i], evals[i], seqs[j], evals[j]))
          found(std::move(*w));
      }
  }
};

}  // namespace detail

// Runs one postulate check over the whole space. Counterexamples are
// self-verifying: the returned witness is replayed before the report leaves.
inline PostulateReport check_postulate(const Universe& u, const Operator& op,
                                       PostulateId id,
                                       const SequenceSpace& space,
                                       int acyc_n = 2) {
  if (space.size() > u.limits().max_sequences)
    throw BudgetExceeded("sequence space too large");
  detail::SpaceChecker ck(u, op, space, id);

  switch (id) {
    case PostulateId::Closure:
      ck.per_sequence([&](const ReportSequence& s) {
        return violates_closure(u, op, s);
      });
      break;
    case PostulateId::Containment:
      ck.per_sequence([&](const ReportSequence& s) {
        return violates_containment(u, op, s);
      });
      break;
    case PostulateId::Consistency:
      ck.per_sequence([&](const ReportSequence& s) {
        return violates_consistency(u, op, s);
      });
      break;
    case PostulateId::Soundness:
      ck.per_sequence([&](const ReportSequence& s) {
        return violates_soundness(u, op, s);
      });
      break;
    case PostulateId::KBound:
      ck.per_sequence([&](const ReportSequence& s) {
        return violates_k_bound(u, op, s);
      });
      break;
    case PostulateId::PriorExtension:
      ck.per_sequence([&](const ReportSequence& s) {
        return violates_prior_extension(u, op, s);
      });
      break;
    case PostulateId::Rearrangement:
      ck.per_sequence([&](const ReportSequence& s)
                          -> std::optional<Witness> {
        // enumerate distinct permutations via sorted index order
        auto before = [](const Report& a, const Report& b) {
          return std::make_tuple(a.source, a.caze, a.mask.bits()) <
                 std::make_tuple(b.source, b.caze, b.mask.bits());
        };
        ReportSequence sorted = s;
        std::sort(sorted.begin(), sorted.end(), before);
        do {
          if (auto w = violates_rearrangement(u, op, s, sorted)) return w;
        } while (std::next_permutation(sorted.begin(), sorted.end(), before));
        return std::nullopt;
      });
      break;
    case PostulateId::Equivalence:
      ck.per_sequence([&](const ReportSequence& s) -> std::optional<Witness> {
        for (SourceId src = 0;
             src < static_cast<SourceId>(space.sig.num_sources()); ++src)
          for (CaseId c = 0; c < static_cast<CaseId>(space.sig.num_cases());
               ++c)
            for (const ModelSet& m : space.pool) {
              Report r1 = make_report(space.sig, src, c,
                                      canonical_formula(m, space.sig));
              Report r2 = make_report(space.sig, src, c,
                                      canonical_formula_alt(m, space.sig));
              if (auto w = violates_equivalence(u, op, s, r1, r2)) return w;
            }
        return std::nullopt;
      });
      break;
    case PostulateId::KConjunction:
      ck.per_pair([&](const ReportSequence& s, const detail::Eval& es,
                      const ReportSequence& r, const detail::Eval& er)
                      -> std::optional<Witness> {
        detail::Eval ab = detail::evaluate(u, op, concat(s, r));
        Bitset joint = es.clx & er.clx;
        if (ab.clx == joint) return std::nullopt;
        return Witness{{s, r}, {}, -1, {}, {},
                       "mod(K) of the concatenation differs from the "
                       "intersection: " +
                           detail::sizes(ab.clx, joint)};
      });
      break;
    case PostulateId::DuplicateRemoval:
      ck.per_sequence_and_report([&](const ReportSequence& s, const Report& r) {
        return violates_duplicate_removal(u, op, s, r);
      });
      break;
    case PostulateId::ConditionalConsistency:
      ck.per_sequence([&](const ReportSequence& s) {
        return violates_conditional_consistency(u, op, s);
      });
      break;
    case PostulateId::InclusionVacuity:
      ck.per_pair([&](const ReportSequence& s, const detail::Eval& es,
                      const ReportSequence& r, const detail::Eval& er)
                      -> std::optional<Witness> {
        detail::Eval ab = detail::evaluate(u, op, concat(s, r));
        Bitset bound = es.cly & er.clx;
        if (!bound.is_subset_of(ab.cly))
          return Witness{{s, r}, {}, -1, {}, {},
                         "inclusion failed: " + detail::sizes(bound, ab.cly)};
        if (bound.any() && ab.cly != bound)
          return Witness{{s, r}, {}, -1, {}, {},
                         "vacuity failed on a consistent join: " +
                             detail::sizes(ab.cly, bound)};
        return std::nullopt;
      });
      break;
    case PostulateId::Acyc: {
      // the consistency tests only see mod(K) and mod(B), so sequences with
      // one output signature behave alike; quantify over signature classes
      std::vector<ReportSequence> reps;
      std::vector<detail::Eval> evals;
      space.for_each_sequence([&](const ReportSequence& s) {
        detail::Eval e = detail::evaluate(u, op, s);
        for (const detail::Eval& seen : evals)
          if (seen.clx == e.clx && seen.cly == e.cly) return;
        reps.push_back(s);
        evals.push_back(std::move(e));
      });
      std::vector<std::size_t> at(acyc_n + 1, 0);
      while (!ck.done()) {
        ++ck.report.instances;
        bool chain_ok = true;
        for (int j = 0; j < acyc_n && chain_ok; ++j)
          chain_ok = evals[at[j]].clx.intersects(evals[at[j + 1]].cly);
        if (chain_ok && evals[at[acyc_n]].clx.intersects(evals[at[0]].cly) &&
            !evals[at[0]].clx.intersects(evals[at[acyc_n]].cly)) {
          std::vector<ReportSequence> cycle;
          for (std::size_t i : at) cycle.push_back(reps[i]);
          ck.found(Witness{cycle, {}, -1, {}, {},
                           "consistent cycle with inconsistent K(first) + "
                           "B(last)"});
        }
        std::size_t k = at.size();
        while (k > 0 && ++at[k - 1] == reps.size()) at[--k] = 0;
        if (k == 0) break;
      }
      ck.report.note = "cycle length " + std::to_string(acyc_n) + ", " +
                       std::to_string(reps.size()) + " output classes";
      break;
    }
    case PostulateId::Refinement: {
      if (!op.rank) {
        ck.report.status = PostulateReport::Status::NotApplicable;
        ck.report.note = "no fixed plausibility order to check";
        break;
      }
      // rank extremes per partition assignment; valuations play no role in
      // the refinement relation
      const std::uint64_t pc_count = u.partition_combo_count();
      const std::uint64_t vt_count = u.valuation_tuple_count();
      std::vector<std::int64_t> lo(pc_count,
                                   std::numeric_limits<std::int64_t>::max());
      std::vector<std::int64_t> hi(pc_count,
                                   std::numeric_limits<std::int64_t>::min());
      u.for_each_world([&](std::uint64_t index, const World& w) {
        std::int64_t r = op.rank(u, w);
        std::uint64_t pc = index % pc_count;
        lo[pc] = std::min(lo[pc], r);
        hi[pc] = std::max(hi[pc], r);
      });
      for (std::uint64_t a = 0; a < pc_count && !ck.done(); ++a) {
        World wa = u.world(a);  // valuation tuple 0
        for (std::uint64_t b = 0; b < pc_count && !ck.done(); ++b) {
          World wb = u.world(b);
          if (!world_preceq(u, wa, wb)) continue;
          ++ck.report.instances;
          if (hi[a] > lo[b]) {
            // locate the violating valuation tuples
            for (std::uint64_t va = 0; va < vt_count && !ck.done(); ++va)
              for (std::uint64_t vb = 0; vb < vt_count && !ck.done(); ++vb) {
                auto w = violates_refinement_at(u, op, va * pc_count + a,
                                                vb * pc_count + b);
                if (w) ck.found(std::move(*w));
              }
          }
        }
      }
      break;
    }
    case PostulateId::CondSuccess:
      ck.per_sequence_and_report([&](const ReportSequence& s, const Report& r) {
        return violates_cond_success(u, op, s, r, false);
      });
      break;
    case PostulateId::StrongCondSuccess:
      ck.per_sequence_and_report([&](const ReportSequence& s, const Report& r) {
        return violates_cond_success(u, op, s, r, true);
      });
      break;
    case PostulateId::Boundedness:
      ck.per_sequence([&](const ReportSequence& s) -> std::optional<Witness> {
        for (CaseId c = 0; c < static_cast<CaseId>(space.sig.num_cases()); ++c)
          if (auto w = violates_boundedness(u, op, s, c)) return w;
        return std::nullopt;
      });
      break;
    case PostulateId::HBoundedness: {
      const std::size_t cases = space.sig.num_cases();
      std::vector<std::vector<CaseId>> hsets;
      if (cases <= 4) {
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << cases);
             ++bits) {
          std::vector<CaseId> h;
          for (std::size_t c = 0; c < cases; ++c)
            if ((bits >> c) & 1) h.push_back(static_cast<CaseId>(c));
          hsets.push_back(std::move(h));
        }
      } else {
        std::mt19937_64 rng(space.seed + 1);
        for (int k = 0; k < 16; ++k) {
          std::vector<CaseId> h;
          for (std::size_t c = 0; c < cases; ++c)
            if (rng() & 1) h.push_back(static_cast<CaseId>(c));
          hsets.push_back(std::move(h));
        }
      }
      ck.per_sequence([&](const ReportSequence& s) -> std::optional<Witness> {
        for (const auto& h : hsets)
          for (CaseId c = 0; c < static_cast<CaseId>(cases); ++c)
            if (auto w = violates_h_boundedness(u, op, s, h, c)) return w;
        return std::nullopt;
      });
      ck.report.note =
          "absence of a counterexample on this space decides nothing; "
          "whether the concrete operators satisfy H-Boundedness in general "
          "is open";
      break;
    }
  }

  if (ck.report.status == PostulateReport::Status::Counterexample) {
    if (!replay_witness(u, op, id, *ck.report.witness))
      throw Error("counterexample failed to replay: " +
                  ck.report.witness->detail);
  }
  return ck.report;
}

// Rank-level anonymity: permuting the names of the ordinary sources must not
// change a world's plausibility.
inline bool rank_is_anonymous(const Universe& u, const RankFunction& rank) {
  std::vector<SourceId> ordinary = u.ordinary_sources();
  std::vector<std::size_t> perm(ordinary.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  bool ok = true;
  do {
    u.for_each_world([&](std::uint64_t, const World& w) {
      if (!ok) return;
      World pw = w;
      for (std::size_t i = 0; i < perm.size(); ++i)
        pw.parts[ordinary[i]] = w.parts[ordinary[perm[i]]];
      if (rank(u, w) != rank(u, pw)) ok = false;
    });
  } while (ok && std::next_permutation(perm.begin(), perm.end()));
  return ok;
}

}  // namespace expertise

#include "doctest.h"
#include "expertise/operators.hpp"
#include "expertise/parser.hpp"
#include "helpers.hpp"

using namespace expertise;
using namespace testutil;

namespace {

Signature hospital_sig() {
  return Signature({"x", "y"}, {"c1", "c2"}, {"*", "a", "b"});
}

// (*, c1, x), (a, c2, x), (b, c2, !x), (a, c1, !x)
ReportSequence hospital_sequence(const Signature& sig) {
  return {make_report(sig, "*", "c1", "x"), make_report(sig, "a", "c2", "x"),
          make_report(sig, "b", "c2", "!x"),
          make_report(sig, "a", "c1", "!x")};
}

Signature pq_sig() { return Signature({"p", "q"}, {"c", "d"}, {"*", "i"}); }

// (*, c, p), (i, c, !p & q)
ReportSequence pq_sequence(const Signature& sig) {
  return {make_report(sig, "*", "c", "p"),
          make_report(sig, "i", "c", "!p & q")};
}

World hospital_world(const Universe& u) {
  World w;
  w.vals = {0b11, 0b10};
  Partition pa =
      Partition::from_cells({ModelSet(0b1100, 4), ModelSet(0b0011, 4)});
  Partition pb =
      Partition::from_cells({ModelSet(0b1010, 4), ModelSet(0b0101, 4)});
  w.parts.assign(3, u.unit_partition_id());
  w.parts[1] = u.find_partition(pa);
  w.parts[2] = u.find_partition(pb);
  return w;
}

std::vector<Operator> concrete_operators() {
  return {make_weak_mb(), make_var_based_cond(), make_part_based_cond(),
          make_excess_min()};
}

}  // namespace

TEST_CASE("reports reject inconsistent formulas") {
  Signature sig = pq_sig();
  CHECK_THROWS_AS(make_report(sig, "*", "c", "p & !p"), InvalidReport);
  CHECK_THROWS_AS(make_report(sig, "nobody", "c", "p"), InvalidReport);
  CHECK_THROWS_AS(make_report(sig, "*", "nowhere", "p"), InvalidReport);
}

TEST_CASE("soundness collection of the hospital sequence") {
  Signature sig = hospital_sig();
  CaseCollection g = soundness_collection(sig, hospital_sequence(sig));
  REQUIRE(g.by_case.size() == 2);
  CHECK(g.by_case[0].size() == 2);  // S(*, x), S(a, !x)
  CHECK(g.by_case[1].size() == 2);  // S(a, x), S(b, !x)
  CHECK(g.by_case[0][0].to_string(sig) == "S(*, x)");
  CHECK(g.by_case[0][1].to_string(sig) == "S(a, !x)");
  CHECK(g.by_case[1][0].to_string(sig) == "S(a, x)");
  CHECK(g.by_case[1][1].to_string(sig) == "S(b, !x)");

  CHECK(soundness_collection(sig, {}).is_empty());

  // duplicate reports collapse, even under different syntax
  ReportSequence twice = {make_report(sig, "a", "c1", "x"),
                          make_report(sig, "a", "c1", "!!x")};
  CHECK(soundness_collection(sig, twice).by_case[0].size() == 1);
}

TEST_CASE("star consistency") {
  Signature sig = pq_sig();
  CHECK(star_consistent(sig, {}));
  CHECK_FALSE(star_consistent(sig, {make_report(sig, "*", "c", "p"),
                                    make_report(sig, "*", "c", "!p")}));
  // contradicting reports in different cases are fine
  CHECK(star_consistent(sig, {make_report(sig, "*", "c", "p"),
                              make_report(sig, "*", "d", "!p")}));
  Signature s3({"p", "q"}, {"c", "d"}, {"*", "i", "j"});
  ReportSequence ex7 = {
      make_report(s3, "i", "c", "p -> q"), make_report(s3, "j", "c", "p -> !q"),
      make_report(s3, "*", "c", "p"), make_report(s3, "i", "d", "p"),
      make_report(s3, "i", "d", "q")};
  CHECK(star_consistent(s3, ex7));
}

TEST_CASE("weak-mb on the empty sequence accepts every world") {
  Universe u(pq_sig());
  OperatorOutput out = weak_mb(u, {});
  CHECK(out.possible == u.full_set());
  CHECK(out.plausible == u.full_set());
}

TEST_CASE("weak-mb possible worlds of the two-report sequence") {
  Universe u(pq_sig());
  ReportSequence seq = pq_sequence(u.sig());
  OperatorOutput out = weak_mb(u, seq);

  // independent route: models of the soundness collection
  CHECK(out.possible == mod_of(u, soundness_collection(u.sig(), seq)));
  // 2 c-valuations x Bell(3) partitions merging the !p&q valuation x 4 free
  // d-valuations
  CHECK(out.possible.count() == 40);
  CHECK(u.world_count() == 240);

  CHECK(in_knowledge(u, out, 0, parse_formula("p", u.sig())));
  CHECK(in_knowledge(u, out, 0, parse_lformula("!E(i, p)", u.sig())));
  CHECK(in_knowledge(u, out, 1, parse_lformula("!E(i, p)", u.sig())));
  for (const char* q : {"q", "!q", "E(i, q)", "!E(i, q)"})
    CHECK_FALSE(in_belief(u, out, 0, parse_lformula(q, u.sig())));
}

TEST_CASE("conditioning with a constant rank is weak-mb") {
  Universe u(pq_sig());
  std::mt19937_64 rng(3);
  for (int round = 0; round < 10; ++round) {
    ReportSequence seq = random_sequence(rng, u.sig(), draw(rng, 3));
    OperatorOutput cond = conditioning(
        u, seq, [](const Universe&, const World&) { return 7; });
    OperatorOutput weak = weak_mb(u, seq);
    CHECK(cond.possible == weak.possible);
    CHECK(cond.plausible == weak.plausible);
  }
}

TEST_CASE("rank values") {
  // two sources, both with unit partitions: every source expert on both
  // variables
  Universe u2(pq_sig());
  World all_unit;
  all_unit.vals = {0, 0};
  all_unit.parts = {u2.unit_partition_id(), u2.unit_partition_id()};
  CHECK(var_rank(u2, all_unit) == -4);
  CHECK(part_rank(u2, all_unit) == -8);

  // i expert on q only: cells {pq, !pq} and {p!q, !p!q}
  World mixed = all_unit;
  mixed.parts[1] = u2.find_partition(
      Partition::from_cells({ModelSet(0b1100, 4), ModelSet(0b0011, 4)}));
  CHECK(var_rank(u2, mixed) == -3);

  World coarse = all_unit;
  coarse.parts[1] = u2.find_partition(Partition::one_cell(4));
  CHECK(part_rank(u2, coarse) == -5);

  Universe uh(hospital_sig());
  World wh = hospital_world(uh);
  CHECK(var_rank(uh, wh) == -4);   // 2 for *, y for a, x for b
  CHECK(part_rank(uh, wh) == -8);  // 4 + 2 + 2 cells

  // cross-check var_rank against a direct count of expert variables
  std::mt19937_64 rng(23);
  for (int round = 0; round < 20; ++round) {
    World w = uh.world(draw(rng, uh.world_count()));
    int expected = 0;
    for (int pid : w.parts)
      for (VarId v = 0; v < 2; ++v) {
        std::uint64_t m = ModelSet::of_variable(v, uh.sig()).bits();
        expected += uh.partition(pid).image(m) == m;
      }
    CHECK(var_rank(uh, w) == -expected);
  }
}

TEST_CASE("var-based conditioning extracts the sound part of a report") {
  Universe u(pq_sig());
  OperatorOutput out = make_var_based_cond()(u, pq_sequence(u.sig()));
  CHECK(in_belief(u, out, 0, parse_lformula("q & E(i, q)", u.sig())));
  CHECK(prop_belief_models(u, out.plausible, 0) ==
        models(parse_formula("p & q", u.sig()), u.sig()));
}

TEST_CASE("part-based conditioning declines to split the report") {
  Universe u(pq_sig());
  OperatorOutput out = make_part_based_cond()(u, pq_sequence(u.sig()));
  CHECK(prop_belief_models(u, out.plausible, 0) ==
        models(parse_formula("p", u.sig()), u.sig()));
  CHECK(in_belief(u, out, 0, parse_lformula("E(i, p | q)", u.sig())));
  CHECK_FALSE(in_belief(u, out, 0, parse_formula("q", u.sig())));
  CHECK_FALSE(in_belief(u, out, 0, parse_lformula("E(i, q)", u.sig())));
}

TEST_CASE("score-based with zero scores accepts everything") {
  Universe u(pq_sig());
  ScoreFunction zero{
      [](const Universe&, const World&) -> std::uint64_t { return 0; },
      [](const Universe&, const World&, const Report&) -> std::uint64_t {
        return 0;
      }};
  OperatorOutput out = score_based(u, pq_sequence(u.sig()), zero);
  CHECK(out.possible == u.full_set());
  CHECK(out.plausible == u.full_set());
}

TEST_CASE("excess scores") {
  Universe uh(hospital_sig());
  World wh = hospital_world(uh);
  // a's image of !x covers all four valuations, two of them beyond the
  // models of !x, and the report is sound at c1
  Report r = make_report(uh.sig(), "a", "c1", "!x");
  CHECK(excess_min_d(uh, wh, r) == 2);
  // an expert, sound report costs nothing
  Report ry = make_report(uh.sig(), "a", "c1", "y");
  CHECK(excess_min_d(uh, wh, ry) == 0);
  // unsound report: b can distinguish, and x holds at c1
  Report rb = make_report(uh.sig(), "b", "c1", "!x");
  CHECK(excess_min_d(uh, wh, rb) == kInfScore);
}

TEST_CASE("excess-min fast path agrees with the generic score route") {
  Universe u(Signature({"p", "q"}, {"c", "d"}, {"*", "i", "j"}));
  std::mt19937_64 rng(5);
  for (int round = 0; round < 15; ++round) {
    ReportSequence seq = random_sequence(rng, u.sig(), draw(rng, 4));
    OperatorOutput fast = excess_min_eval(u, seq);
    OperatorOutput slow = score_based(u, seq, excess_min_score());
    CHECK(fast.possible == slow.possible);
    CHECK(fast.plausible == slow.plausible);
  }
}

TEST_CASE("excess-min pools reports across the sequence") {
  Universe u(Signature({"p", "q"}, {"c", "d"}, {"*", "i", "j"}));
  ReportSequence seq = {
      make_report(u.sig(), "i", "c", "p -> q"),
      make_report(u.sig(), "j", "c", "p -> !q"),
      make_report(u.sig(), "*", "c", "p"),
      make_report(u.sig(), "i", "d", "p"),
      make_report(u.sig(), "i", "d", "q")};
  OperatorOutput out = make_excess_min()(u, seq);
  CHECK(in_belief(u, out, 0, parse_lformula("E(i, p) & E(i, q)", u.sig())));
  CHECK(in_belief(u, out, 0, parse_lformula("E(i, p -> q)", u.sig())));
  CHECK(prop_belief_models(u, out.plausible, 0) ==
        models(parse_formula("p & q", u.sig()), u.sig()));

  // the conditioning operators decline to decide q at c on this input
  for (Operator op : {make_var_based_cond(), make_part_based_cond()}) {
    OperatorOutput cond = op(u, seq);
    CHECK(prop_belief_models(u, cond.plausible, 0) ==
          models(parse_formula("p", u.sig()), u.sig()));
  }
}

TEST_CASE("excess-min believes a repeated claim in a fresh case") {
  Universe u(Signature({"p"}, {"c", "d"}, {"*", "i", "j"}));
  ReportSequence seq = {make_report(u.sig(), "i", "c", "p"),
                        make_report(u.sig(), "j", "c", "!p"),
                        make_report(u.sig(), "i", "d", "p")};
  OperatorOutput out = make_excess_min()(u, seq);
  CHECK(in_belief(u, out, 1, parse_formula("p", u.sig())));
}

TEST_CASE("knowledge facts of the hospital sequence hold for every operator") {
  Universe u(hospital_sig());
  ReportSequence seq = hospital_sequence(u.sig());
  for (const Operator& op : concrete_operators()) {
    OperatorOutput out = op(u, seq);
    CHECK(in_knowledge(u, out, 0, parse_formula("x", u.sig())));
    for (CaseId c : {0, 1}) {
      CHECK(in_knowledge(u, out, c,
                         parse_lformula("!(E(a, x) & E(b, x))", u.sig())));
      CHECK(in_knowledge(u, out, c, parse_lformula("!E(a, x)", u.sig())));
    }
  }
  // var-based conditioning additionally trusts b on x
  OperatorOutput out = make_var_based_cond()(u, seq);
  CHECK(in_belief(u, out, 1, parse_lformula("E(b, x)", u.sig())));
  CHECK(in_belief(u, out, 1, parse_formula("!x", u.sig())));
}

TEST_CASE("an empty plausible set believes everything") {
  Universe u(pq_sig());
  ReportSequence bad = {make_report(u.sig(), "*", "c", "p"),
                        make_report(u.sig(), "*", "c", "!p")};
  OperatorOutput out = make_excess_min()(u, bad);
  CHECK(out.possible.none());
  CHECK(out.plausible.none());
  CHECK(in_belief(u, out, 0, parse_formula("p & !p", u.sig())));
}

TEST_CASE("operator properties on random sequences") {
  Universe u(pq_sig());
  std::mt19937_64 rng(29);
  auto ops = concrete_operators();
  for (int round = 0; round < 12; ++round) {
    ReportSequence seq = random_sequence(rng, u.sig(), draw(rng, 4));
    OperatorOutput weak = weak_mb(u, seq);
    for (const Operator& op : ops) {
      OperatorOutput out = op(u, seq);
      CHECK(out.plausible.is_subset_of(out.possible));
      CHECK(is_elementary(u, out.possible));
      CHECK(is_elementary(u, out.plausible));
      // weak-mb is the weakest operator: its sets dominate
      CHECK(out.possible.is_subset_of(weak.possible));
      CHECK(out.plausible.is_subset_of(weak.plausible));
      // knowledge is exactly the soundness collection's models
      CHECK(out.possible == mod_of(u, soundness_collection(u.sig(), seq)));
    }

    // monotone knowledge under concatenation
    ReportSequence rho = random_sequence(rng, u.sig(), draw(rng, 3));
    for (const Operator& op : ops) {
      OperatorOutput a = op(u, seq);
      OperatorOutput b = op(u, rho);
      OperatorOutput ab = op(u, concat(seq, rho));
      CHECK(ab.possible == (a.possible & b.possible));
    }

    // a report known false pins non-expertise of its source
    Report extra = random_report(rng, u.sig());
    for (const Operator& op : ops) {
      OperatorOutput before = op(u, seq);
      Formula neg = Formula::negate(extra.formula);
      if (!in_knowledge(u, before, extra.caze, neg)) continue;
      OperatorOutput after = op(u, append(seq, extra));
      CHECK(in_knowledge(u, after, extra.caze,
                         Formula::negate(Formula::expert(extra.source,
                                                         extra.formula))));
    }
  }
}

TEST_CASE("prior knowledge restricts the possible worlds") {
  Universe u(pq_sig());
  CaseCollection prior = CaseCollection::empty(u.sig());
  prior.add(0, parse_lformula("E(i, p)", u.sig()));
  Bitset prior_models = mod_of(u, prior);
  ReportSequence seq = {make_report(u.sig(), "i", "c", "p")};
  for (const Operator& op : concrete_operators()) {
    OperatorOutput out = op(u, seq, &prior_models);
    CHECK(out.possible.is_subset_of(prior_models));
    CHECK(out.possible.any());
    // trusted expert reports are believed
    CHECK(in_belief(u, out, 0, parse_formula("p", u.sig())));
  }
}

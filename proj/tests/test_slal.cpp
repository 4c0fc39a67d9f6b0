#include "doctest.h"

#include "generators.hpp"
#include "slent/oracle.hpp"
#include "slent/parser.hpp"
#include "slent/printer.hpp"
#include "slent/slal.hpp"

using namespace slent;
using namespace slent::slal;

namespace {

Term v(const char *n) { return Term::var(n); }
Term n(std::uint64_t k) { return Term::nat(k); }

Entailment ex82() {
  return parse_entailment("Arr(1,2) * 3 -> (10,0) * ls(10,20) |- Arr(1,3) * ls(10,20)");
}

bool bounded_valid(const Entailment &e, const oracle::Bounds &b) {
  return !oracle::find_countermodel(e, b).has_value();
}

bool bounded_valid(const Judgment &j, const oracle::Bounds &b) {
  return bounded_valid(Entailment{j.antecedent, j.succedents}, b);
}

}  // namespace

TEST_CASE("unroll collapse on the running example") {
  FreshGen fresh(free_vars(ex82()));
  auto js = eliminate_antecedent_lists(ex82(), fresh);
  REQUIRE(js.size() == 2);
  // first judgment: 10 = 20 joins the pure part, list removed
  CHECK(is_list_free(js[0].antecedent));
  CHECK(render(js[0].antecedent.pure).find("10 = 20") != std::string::npos);
  CHECK(js[0].antecedent.spatial.size() == 2);
  // second: the two-cell unfolding
  CHECK(is_list_free(js[1].antecedent));
  REQUIRE(js[1].antecedent.spatial.size() == 4);
  CHECK(js[1].antecedent.spatial[2].kind == SpatialAtom::Kind::PointsTo);
  CHECK(js[1].antecedent.spatial[3].kind == SpatialAtom::Kind::PointsTo);
  // succedents copied unchanged
  for (const auto &j : js) {
    REQUIRE(j.succedents.size() == 1);
    CHECK(alpha_equal(j.succedents[0], ex82().succedents[0]));
  }
}

TEST_CASE("unroll collapse shapes") {
  Entailment plain = parse_entailment("Arr(1,2) |- Emp");
  FreshGen f1(free_vars(plain));
  CHECK(eliminate_antecedent_lists(plain, f1).size() == 1);

  Entailment d = parse_entailment("dll(t,u,w,q) |- Emp");
  FreshGen f2(free_vars(d));
  auto js = eliminate_antecedent_lists(d, f2);
  REQUIRE(js.size() == 3);
  CHECK(js[0].antecedent.spatial.empty());
  CHECK(render(js[0].antecedent.pure).find("t = u") != std::string::npos);
  CHECK(render(js[0].antecedent.pure).find("w = q") != std::string::npos);
  REQUIRE(js[1].antecedent.spatial.size() == 1);
  CHECK(render(js[1].antecedent.pure).find("t = w") != std::string::npos);
  CHECK(js[2].antecedent.spatial.size() == 3);

  // 2 ls and 1 dll: 2 * 2 * 3 leaves
  Entailment big = parse_entailment("ls(a,b) * ls(c,d) * dll(t,u,w,q) |- Emp");
  FreshGen f3(free_vars(big));
  CHECK(eliminate_antecedent_lists(big, f3).size() == 12);
}

TEST_CASE("cell_formula") {
  CHECK(cell_formula({}, v("t")).kind() == PureFormula::Kind::False);
  PureFormula f = cell_formula({SpatialAtom::arr(n(1), n(5))}, n(3));
  CHECK(equal(f, PureFormula::conj({PureFormula::le(n(1), n(3)),
                                    PureFormula::le(n(3), n(5))})));
  SpatialFormula s{SpatialAtom::points_to(v("x"), {v("a"), v("b")}),
                   SpatialAtom::arr(v("u"), v("w"))};
  PureFormula g = cell_formula(s, v("t"));
  CHECK(g.kind() == PureFormula::Kind::Or);
  CHECK(equal(g.children()[0], PureFormula::eq(v("t"), v("x"))));
}

TEST_CASE("degree") {
  DecisionContext ctx;
  SymbolicHeap phi = parse_entailment("t -> (w,q) |-").antecedent;
  SymbolicHeap psi_plain = parse_entailment("Arr(1,2) |-").antecedent;
  Degree d0 = degree(psi_plain, phi, ctx);
  CHECK(d0.lists == 0);
  CHECK(d0.em == 0);

  SymbolicHeap psi_ls = parse_entailment("ls(tp,up) |-").antecedent;
  Degree d1 = degree(psi_ls, phi, ctx);
  CHECK(d1.lists == 1);
  CHECK(d1.em == 1);  // both t = tp and t != tp satisfiable
  CHECK(d1.unfold == 1);

  SymbolicHeap phi_eq = parse_entailment("x = tp & x -> (w,q) |-").antecedent;
  Degree d2 = degree(psi_ls, phi_eq, ctx);
  CHECK(d2.em == 0);  // x != tp contradicts the pure part
}

TEST_CASE("measure_less") {
  DecisionContext ctx;
  Entailment e = parse_entailment("x -> (a,b) |- ls(x,q) , Arr(1,2)");
  Judgment j{e.antecedent, e.succedents};
  Judgment smaller = j;
  smaller.succedents.pop_back();
  CHECK(measure_less(smaller, j, ctx));
  CHECK_FALSE(measure_less(j, j, ctx));

  // the unfolding premise of MapsToLs is smaller than its conclusion
  Entailment e2 = parse_entailment("x -> (a,b) |- ls(x,q)");
  Judgment j2{e2.antecedent, e2.succedents};
  auto prem = apply_rule(RuleId::MapsToLs, j2, ctx);
  REQUIRE(prem.has_value());
  REQUIRE(prem->size() == 1);
  CHECK(measure_less((*prem)[0], j2, ctx));
}

TEST_CASE("apply_rule: MapsToLs on the running example") {
  DecisionContext ctx;
  Entailment e = parse_entailment(
      "Arr(1,2) * 3 -> (10,0) * 10 -> (z,y) * z -> (20,w) |- Arr(1,3) * ls(10,20)");
  Judgment j{e.antecedent, e.succedents};
  auto prem = apply_rule(RuleId::MapsToLs, j, ctx);
  REQUIRE(prem.has_value());
  REQUIRE(prem->size() == 1);
  const Judgment &p = (*prem)[0];
  REQUIRE(p.succedents.size() == 2);
  // first disjunct: 10 = 20 & Arr(1,3)
  CHECK(render(p.succedents[0].pure).find("10 = 20") != std::string::npos);
  CHECK(p.succedents[0].spatial.size() == 1);
  // second disjunct: Arr(1,3) * 10 -> (z,y) * ls(z,20)
  REQUIRE(p.succedents[1].spatial.size() == 3);
  CHECK(p.succedents[1].spatial[0].kind == SpatialAtom::Kind::Arr);
  CHECK(p.succedents[1].spatial[1].kind == SpatialAtom::Kind::PointsTo);
  CHECK(p.succedents[1].spatial[2].kind == SpatialAtom::Kind::Ls);
  CHECK(p.succedents[1].spatial[2].args[0] == v("z"));

  // UnsatR then removes the 10 = 20 disjunct
  auto prem2 = apply_rule(RuleId::UnsatR, p, ctx);
  REQUIRE(prem2.has_value());
  CHECK((*prem2)[0].succedents.size() == 1);
  CHECK((*prem2)[0].succedents[0].spatial.size() == 3);
}

TEST_CASE("apply_rule: Start on a valid list-free judgment") {
  DecisionContext ctx;
  Entailment e = parse_entailment("x -> (a,b) |- x -> (a,b)");
  Judgment j{e.antecedent, e.succedents};
  auto prem = apply_rule(RuleId::Start, j, ctx);
  REQUIRE(prem.has_value());
  CHECK(prem->empty());

  Entailment bad = parse_entailment("x -> (a,b) |- Emp");
  CHECK_FALSE(apply_rule(RuleId::Start, {bad.antecedent, bad.succedents}, ctx).has_value());
}

TEST_CASE("search: the two running-example judgments") {
  DecisionContext ctx;
  FreshGen fresh(free_vars(ex82()));
  auto js = eliminate_antecedent_lists(ex82(), fresh);
  REQUIRE(js.size() == 2);

  auto ta = search(js[0], ctx);
  REQUIRE(ta.has_value());
  CHECK(ta->rule == RuleId::UnsatL);
  CHECK(ta->premises.empty());

  auto tb = search(js[1], ctx);
  REQUIRE(tb.has_value());
  std::map<RuleId, int> rules;
  count_rules(*tb, rules);
  // the narrated core of the derivation
  CHECK(rules[RuleId::MapsToLs] == 3);
  CHECK((rules[RuleId::UnsatR] == 2 || rules[RuleId::UnsatR] == 3));
  CHECK(rules[RuleId::MapsToLsEM] >= 1);
  CHECK(rules[RuleId::LsElim] == 1);
  CHECK(rules[RuleId::Start] >= 1);

  CHECK(check_derivation(*ta, ctx));
  CHECK(check_derivation(*tb, ctx));
}

TEST_CASE("search fails on an invalid list-free judgment") {
  DecisionContext ctx;
  Entailment e = parse_entailment("x -> (a,b) |- Emp");
  CHECK_FALSE(search({e.antecedent, e.succedents}, ctx).has_value());
}

TEST_CASE("check_derivation rejects tampered trees") {
  DecisionContext ctx;
  // Start at an invalid leaf
  Entailment bad = parse_entailment("x -> (a,b) |- Emp");
  DerivationTree t{RuleId::Start, {bad.antecedent, bad.succedents}, {}};
  CHECK_FALSE(check_derivation(t, ctx));
  // UnsatL with a satisfiable antecedent
  Entailment sat = parse_entailment("x -> (a,b) |- x -> (a,b)");
  DerivationTree t2{RuleId::UnsatL, {sat.antecedent, sat.succedents}, {}};
  CHECK_FALSE(check_derivation(t2, ctx));
}

TEST_CASE("decide_slal on the paper examples") {
  DecisionContext ctx;
  CHECK(decide_slal(ex82(), ctx).kind == sla::VerdictKind::Valid);
  CHECK(decide_slal(parse_entailment("ls(x,y) |- ls(x,y)"), ctx).kind ==
        sla::VerdictKind::Valid);
  auto bad = parse_entailment("x -> (a,b) |- ls(x,x)");
  CHECK(decide_slal(bad, ctx).kind == sla::VerdictKind::Invalid);
  auto cm = oracle::find_countermodel(bad, oracle::Bounds{6, 4, 0});
  REQUIRE(cm.has_value());
}

TEST_CASE("decide_slal: dll entailments") {
  DecisionContext ctx;
  CHECK(decide_slal(parse_entailment("dll(t,u,w,q) |- dll(t,u,w,q)"), ctx).kind ==
        sla::VerdictKind::Valid);
  // forgetting the back pointers of a dll leaves a singly-linked segment
  CHECK(decide_slal(parse_entailment("dll(t,u,w,q) |- ls(t,u)"), ctx).kind ==
        sla::VerdictKind::Valid);
  // but not one with swapped ends
  auto swapped = parse_entailment("ls(x,y) |- ls(y,x)");
  CHECK(decide_slal(swapped, ctx).kind == sla::VerdictKind::Invalid);
  CHECK(oracle::find_countermodel(swapped, oracle::Bounds{6, 4, 0}).has_value());
}

TEST_CASE("unroll collapse preserves bounded validity (small sample)") {
  testgen::Rng rng(77);
  std::vector<std::string> pool{"x", "y", "u"};
  testgen::SpatialConfig cfg;
  cfg.small_arrays = true;
  cfg.cmax = 3;
  oracle::Bounds b{6, 4, 0};
  for (int i = 0; i < 25; ++i) {
    // antecedent: one list atom plus up to one extra atom
    Entailment e;
    SpatialAtom lst = rng.chance(0.5)
                          ? SpatialAtom::ls(testgen::gen_term(rng, pool, 3, 0),
                                            testgen::gen_term(rng, pool, 3, 0))
                          : SpatialAtom::dll(testgen::gen_term(rng, pool, 3, 0),
                                             testgen::gen_term(rng, pool, 3, 0),
                                             testgen::gen_term(rng, pool, 3, 0),
                                             testgen::gen_term(rng, pool, 3, 0));
    e.antecedent.spatial.push_back(lst);
    if (rng.chance(0.6))
      e.antecedent.spatial.push_back(testgen::gen_spatial_atom(rng, pool, cfg));
    std::size_t succ = rng.below(3);
    for (std::size_t k = 0; k < succ; ++k)
      e.succedents.push_back(testgen::gen_qf_heap(rng, pool, cfg, 2, 1));

    FreshGen fresh(free_vars(e));
    auto js = eliminate_antecedent_lists(e, fresh);
    bool lhs = bounded_valid(e, b);
    bool rhs = true;
    for (const auto &j : js) rhs = rhs && bounded_valid(j, b);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("rules are sound and locally complete on bounded models") {
  testgen::Rng rng(101);
  std::vector<std::string> pool{"x", "y"};
  testgen::SpatialConfig cfg;
  cfg.small_arrays = true;
  cfg.cmax = 3;
  oracle::Bounds b{5, 4, 0};
  DecisionContext ctx;
  const RuleId rules[] = {RuleId::UnsatR,      RuleId::MapsToLsEM, RuleId::MapsToLs,
                          RuleId::LsElim,      RuleId::MapsToDllEM, RuleId::MapsToDll,
                          RuleId::DllElim,     RuleId::ArrListEM,  RuleId::ArrLs,
                          RuleId::ArrDll};
  const int per_rule = 50;
  std::map<RuleId, int> applied;
  auto done = [&]() {
    for (RuleId r : rules)
      if (applied[r] < per_rule) return false;
    return true;
  };
  for (int i = 0; i < 4000 && !done(); ++i) {
    testgen::SpatialConfig ante_cfg = cfg;
    ante_cfg.allow_lists = false;
    Entailment e;
    e.antecedent = testgen::gen_qf_heap(rng, pool, ante_cfg, 2, 1);
    std::size_t succ = 1 + rng.below(2);
    for (std::size_t k = 0; k < succ; ++k)
      e.succedents.push_back(testgen::gen_qf_heap(rng, pool, cfg, 2, 1));
    Judgment j{e.antecedent, e.succedents};
    for (RuleId r : rules) {
      auto prem = apply_rule(r, j, ctx);
      if (!prem || applied[r] >= per_rule) continue;
      ++applied[r];
      bool conclusion = bounded_valid(j, b);
      bool premises = true;
      for (const auto &p : *prem) premises = premises && bounded_valid(p, b);
      CHECK(conclusion == premises);
    }
  }
  for (RuleId r : rules) CHECK(applied[r] >= per_rule);
}

TEST_CASE("quantified inputs are rejected") {
  DecisionContext ctx;
  auto e = parse_entailment("ls(x,y) |- Ex q . q = q & ls(x,y)");
  CHECK_THROWS_AS(decide_slal(e, ctx), std::invalid_argument);
}

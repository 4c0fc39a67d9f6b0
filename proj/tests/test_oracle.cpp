#include "doctest.h"

#include "generators.hpp"
#include "slent/oracle.hpp"
#include "slent/parser.hpp"

using namespace slent;
using namespace slent::oracle;

namespace {

SymbolicHeap heap_of(const std::string &text, unsigned pt = 2) {
  return parse_entailment(text + " |-", ParseOptions{pt}).antecedent;
}

}  // namespace

TEST_CASE("satisfies basics") {
  Bounds b{4, 3, 0};
  CHECK(satisfies({{"x", 3}}, {}, heap_of("Emp"), b));
  CHECK_FALSE(satisfies({}, {{1, {0, 0}}}, heap_of("Emp"), b));

  // single cell
  CHECK(satisfies({{"x", 1}}, {{1, {2, 0}}}, heap_of("x -> (2,0)"), b));
  CHECK_FALSE(satisfies({{"x", 2}}, {{1, {2, 0}}}, heap_of("x -> (2,0)"), b));

  // empty list segment via the first unfolding
  CHECK(satisfies({{"t", 5}, {"u", 5}}, {}, heap_of("ls(t,u)"), b));
  CHECK_FALSE(satisfies({{"t", 5}, {"u", 6}}, {}, heap_of("ls(t,u)"), b));
}

TEST_CASE("satisfies: arrays and separation") {
  Bounds b{6, 4, 0};
  HeapModel h{{2, {9, 9}}, {3, {7, 7}}};
  CHECK(satisfies({}, h, heap_of("Arr(2,3)"), b));
  CHECK_FALSE(satisfies({}, h, heap_of("Arr(2,2)"), b));
  CHECK(satisfies({}, h, heap_of("Arr(2,2) * Arr(3,3)"), b));
  CHECK_FALSE(satisfies({}, h, heap_of("Arr(2,3) * Arr(2,3)"), b));
}

TEST_CASE("satisfies: list walks") {
  Bounds b{8, 5, 0};
  // 1 -> 2 -> 20, payloads arbitrary
  HeapModel h{{1, {2, 7}}, {2, {20, 7}}};
  CHECK(satisfies({{"x", 1}, {"y", 20}}, h, heap_of("ls(x,y)"), b));
  CHECK_FALSE(satisfies({{"x", 1}, {"y", 21}}, h, heap_of("ls(x,y)"), b));
  // a cyclic segment consumes its cells exactly once
  HeapModel cyc{{1, {2, 0}}, {2, {1, 0}}};
  CHECK(satisfies({{"x", 1}}, cyc, heap_of("ls(x,x)"), b));

  // dll with correct back pointers: t=1, chain 1-2, u=9(next of last),
  // v=2(last), w=5(prev of first)
  HeapModel d{{1, {2, 5}}, {2, {9, 1}}};
  CHECK(satisfies({{"t", 1}, {"u", 9}, {"v", 2}, {"w", 5}}, d, heap_of("dll(t,u,v,w)"), b));
  CHECK_FALSE(satisfies({{"t", 1}, {"u", 9}, {"v", 2}, {"w", 6}}, d, heap_of("dll(t,u,v,w)"), b));
  // empty dll needs both equalities
  CHECK(satisfies({{"t", 1}, {"u", 1}, {"v", 3}, {"w", 3}}, {}, heap_of("dll(t,u,v,w)"), b));
  CHECK_FALSE(satisfies({{"t", 1}, {"u", 2}, {"v", 3}, {"w", 3}}, {}, heap_of("dll(t,u,v,w)"), b));
}

TEST_CASE("unfold bound monotonicity") {
  testgen::Rng rng(5);
  std::vector<std::string> pool{"x", "y"};
  for (int i = 0; i < 60; ++i) {
    // random small heap and a random ls atom over it
    HeapModel h;
    std::size_t cells = rng.below(4);
    for (std::size_t c = 0; c < cells; ++c)
      h[1 + rng.below(5)] = {rng.below(6), rng.below(6)};
    Store s{{"x", rng.below(6)}, {"y", rng.below(6)}};
    SymbolicHeap ls = heap_of("ls(x,y)");
    for (std::size_t k = 1; k + 1 <= 6; ++k) {
      Bounds bk{8, 5, k};
      Bounds bk1{8, 5, k + 1};
      if (satisfies(s, h, ls, bk)) CHECK(satisfies(s, h, ls, bk1));
    }
  }
}

TEST_CASE("greedy matcher agrees with naive splitting") {
  testgen::Rng rng(31);
  std::vector<std::string> pool{"x", "y", "z"};
  testgen::SpatialConfig cfg;
  cfg.cmax = 3;
  Bounds b{3, 3, 0};
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    SymbolicHeap heap = testgen::gen_qf_heap(rng, pool, cfg, 3, 1);
    Store s;
    for (const auto &v : free_vars(heap)) s[v] = rng.below(4);
    HeapModel h;
    std::size_t cells = rng.below(4);
    for (std::size_t c = 0; c < cells; ++c) h[1 + rng.below(3)] = {rng.below(4), rng.below(4)};
    bool greedy = satisfies(s, h, heap, b);
    bool naive = satisfies_naive(s, h, heap, b);
    CHECK(greedy == naive);
    ++checked;
  }
  CHECK(checked == 150);
}

TEST_CASE("enumerate_models basics") {
  Bounds b{2, 2, 0};
  // Emp: the empty heap only
  int count = 0;
  enumerate_models(heap_of("Emp"), b, 2, [&](const Store &, const HeapModel &h) {
    CHECK(h.empty());
    ++count;
    return true;
  });
  CHECK(count == 1);

  // x -> (0,0): one model per address choice
  std::set<std::uint64_t> addrs;
  enumerate_models(heap_of("x -> (0,0)"), b, 2, [&](const Store &s, const HeapModel &h) {
    REQUIRE(h.size() == 1);
    CHECK(h.count(s.at("x")));
    addrs.insert(s.at("x"));
    return true;
  });
  CHECK(addrs == std::set<std::uint64_t>{1, 2});

  // unsatisfiable pure part: no models
  int none = 0;
  enumerate_models(heap_of("false & Emp"), b, 2,
                   [&](const Store &, const HeapModel &) { ++none; return true; });
  CHECK(none == 0);
}

TEST_CASE("find_countermodel basics") {
  Bounds b{4, 3, 0};
  auto cm = find_countermodel(parse_entailment("x -> (0,0) |- Emp"), b);
  REQUIRE(cm.has_value());
  CHECK(cm->second.size() == 1);

  CHECK_FALSE(find_countermodel(parse_entailment("Emp |- Emp"), b).has_value());

  auto e = parse_entailment("Arr(x,x) |- x -> (0) , Ex y . y > 0 & x -> (y)", {1});
  CHECK_FALSE(find_countermodel(e, b).has_value());

  // the documented countermodel for x->(a,b) |- ls(x,x)
  auto bad = find_countermodel(parse_entailment("x -> (a,b) |- ls(x,x)"), Bounds{6, 4, 0});
  REQUIRE(bad.has_value());
}

TEST_CASE("find_countermodel agrees with model enumeration on small inputs") {
  testgen::Rng rng(47);
  std::vector<std::string> pool{"x", "y"};
  testgen::SpatialConfig cfg;
  cfg.cmax = 2;
  Bounds b{3, 3, 0};
  for (int i = 0; i < 120; ++i) {
    Entailment e = testgen::gen_qf_entailment(rng, pool, cfg, 2, 2);
    // the enumerated stores must cover the succedent variables as well
    SymbolicHeap ante = e.antecedent;
    {
      auto have = free_vars(ante);
      std::vector<PureFormula> pad{ante.pure};
      for (const auto &v : free_vars(e))
        if (!have.count(v)) pad.push_back(PureFormula::le(Term::var(v), Term::var(v)));
      ante.pure = PureFormula::conj(std::move(pad));
    }
    bool enumerated = false;
    enumerate_models(ante, b, 2, [&](const Store &s, const HeapModel &h) {
      bool all_false = true;
      for (const auto &succ : e.succedents)
        if (satisfies(s, h, succ, b)) all_false = false;
      if (all_false) {
        enumerated = true;
        return false;
      }
      return true;
    });
    auto found = find_countermodel(e, b);
    if (found) {
      // certified: it satisfies the antecedent and no succedent
      CHECK(satisfies(found->first, found->second, e.antecedent, b));
      for (const auto &succ : e.succedents)
        CHECK_FALSE(satisfies(found->first, found->second, succ, b));
    }
    CHECK(enumerated == found.has_value());
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "generators.hpp"
#include "slent/parser.hpp"
#include "slent/printer.hpp"
#include "slent/syntax.hpp"

using namespace slent;

TEST_CASE("parse: identity case") {
  Entailment e = parse_entailment("Emp |- Emp");
  CHECK(e.antecedent.spatial.size() == 1);
  CHECK(e.antecedent.spatial[0].kind == SpatialAtom::Kind::Emp);
  REQUIRE(e.succedents.size() == 1);
  CHECK(e.succedents[0].spatial[0].kind == SpatialAtom::Kind::Emp);
}

TEST_CASE("parse: the unary points-to entailment") {
  Entailment e = parse_entailment("Arr(x,x) |- x -> (0) , Ex y . y > 0 & x -> (y)", {1});
  CHECK(e.antecedent.spatial[0].kind == SpatialAtom::Kind::Arr);
  REQUIRE(e.succedents.size() == 2);
  CHECK(e.succedents[0].bound_vars.empty());
  REQUIRE(e.succedents[1].bound_vars == std::vector<std::string>{"y"});
  // y > 0 parses as 0 < y
  CHECK(e.succedents[1].pure.kind() == PureFormula::Kind::Lt);
}

TEST_CASE("parse: arrays plus list segment") {
  Entailment e =
      parse_entailment("Arr(1,2) * 3 -> (10,0) * ls(10,20) |- Arr(1,3) * ls(10,20)");
  REQUIRE(e.antecedent.spatial.size() == 3);
  CHECK(e.antecedent.spatial[1].kind == SpatialAtom::Kind::PointsTo);
  CHECK(e.antecedent.spatial[2].kind == SpatialAtom::Kind::Ls);
  REQUIRE(e.succedents.size() == 1);
}

TEST_CASE("parse: empty succedent list") {
  Entailment e = parse_entailment("Emp |-");
  CHECK(e.succedents.empty());
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_entailment("Arr(1 |- Emp"), ParseError);
  // arity mismatch against configured pt
  CHECK_THROWS_AS(parse_entailment("x -> (1,2) |- Emp", {1}), ParseError);
  CHECK_THROWS_AS(parse_entailment("x -> (1) |- Emp", {2}), ParseError);
  // list predicates need pt = 2
  CHECK_THROWS_AS(parse_entailment("ls(x,y) |- Emp", {1}), ParseError);
  CHECK_THROWS_AS(parse_entailment("Ex y y . Emp |- Emp"), ParseError);
  try {
    parse_entailment("Emp |-\nEmp *", {2});
    CHECK(false);
  } catch (const ParseError &err) {
    CHECK(err.line == 2);
  }
}

TEST_CASE("free_vars") {
  CHECK(free_vars(Term::sum(Term::var("x"), Term::nat(1))) == std::set<std::string>{"x"});
  Entailment e = parse_entailment("Emp |- Ex y . y > 0 & x -> (y)", {1});
  CHECK(free_vars(e.succedents[0]) == std::set<std::string>{"x"});
  Entailment e2 = parse_entailment("Arr(a,b) * ls(c,d) |- Emp");
  CHECK(free_vars(e2.antecedent) == std::set<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("substitute") {
  FreshGen fresh;
  SpatialAtom a = SpatialAtom::points_to(Term::var("x"), {Term::var("z"), Term::var("y1")});
  SpatialAtom b = substitute(a, {{"z", Term::var("u")}});
  CHECK(b.args[1] == Term::var("u"));
  CHECK(b.args[2] == Term::var("y1"));

  // capture avoidance: (Ex y. x = y)[x := y] renames the binder
  PureFormula f = PureFormula::exists("y", PureFormula::eq(Term::var("x"), Term::var("y")));
  PureFormula g = substitute(f, {{"x", Term::var("y")}}, fresh);
  REQUIRE(g.kind() == PureFormula::Kind::Exists);
  CHECK(g.bound_var() != "y");
  CHECK(g.children()[0].lhs() == Term::var("y"));
  CHECK(g.children()[0].rhs() == Term::var(g.bound_var()));

  SpatialAtom arr = SpatialAtom::arr(Term::var("t"), Term::sum(Term::var("t"), Term::var("u")));
  SpatialAtom arr2 = substitute(arr, {{"u", Term::nat(3)}});
  CHECK(arr2.args[1] == Term::sum(Term::var("t"), Term::nat(3)));
}

TEST_CASE("free_vars after substitution shrink") {
  testgen::Rng rng(7);
  std::vector<std::string> pool{"x", "y", "z"};
  for (int i = 0; i < 200; ++i) {
    FreshGen fresh;
    PureFormula f = testgen::gen_pure_conj(rng, pool, 4, 3);
    Term t = testgen::gen_term(rng, pool, 4);
    PureFormula g = substitute(f, {{"x", t}}, fresh);
    auto fg = free_vars(g);
    auto bound = free_vars(f);
    bound.erase("x");
    for (const auto &v : free_vars(t)) bound.insert(v);
    for (const auto &v : fg) CHECK(bound.count(v));
  }
}

TEST_CASE("spatial_terms") {
  CHECK(spatial_terms({}).empty());
  SpatialFormula s{SpatialAtom::points_to(Term::var("x"), {Term::nat(1), Term::nat(2)})};
  CHECK(spatial_terms(s) == std::set<Term>{Term::var("x"), Term::nat(1), Term::nat(2)});
  SpatialFormula s2{SpatialAtom::arr(Term::var("a"), Term::var("b")),
                    SpatialAtom::arr(Term::var("b"), Term::var("c"))};
  CHECK(spatial_terms(s2) == std::set<Term>{Term::var("a"), Term::var("b"), Term::var("c")});
}

TEST_CASE("is_list_free") {
  Entailment e = parse_entailment("Arr(1,2) * 3 -> (10,0) |- Emp");
  CHECK(is_list_free(e));
  Entailment e2 = parse_entailment("ls(x,y) |- Emp");
  CHECK_FALSE(is_list_free(e2));
  CHECK(is_list_free(SpatialFormula{}));
}

TEST_CASE("spatial_terms and is_list_free ignore atom order") {
  testgen::Rng rng(11);
  std::vector<std::string> pool{"x", "y", "z"};
  testgen::SpatialConfig cfg;
  for (int i = 0; i < 100; ++i) {
    SymbolicHeap h = testgen::gen_qf_heap(rng, pool, cfg, 3, 0);
    SpatialFormula rev(h.spatial.rbegin(), h.spatial.rend());
    CHECK(spatial_terms(h.spatial) == spatial_terms(rev));
    CHECK(is_list_free(h.spatial) == is_list_free(rev));
  }
}

TEST_CASE("render round-trips") {
  Entailment e =
      parse_entailment("Arr(1,2) * 3 -> (10,0) * ls(10,20) |- Arr(1,3) * ls(10,20)");
  Entailment e2 = parse_entailment(render(e));
  CHECK(alpha_equal(e, e2));

  Entailment emp = parse_entailment("Emp |- Emp");
  CHECK(render(emp.antecedent).find("Emp") != std::string::npos);

  Entailment ex = parse_entailment("Emp |- Ex y . y > 0 & x -> (y)", {1});
  CHECK(render(ex.succedents[0]).rfind("Ex", 0) == 0);
}

TEST_CASE("render round-trip property") {
  testgen::Rng rng(23);
  std::vector<std::string> pool{"x", "y", "z", "w"};
  testgen::SpatialConfig cfg;
  for (int i = 0; i < 300; ++i) {
    Entailment e = testgen::gen_qf_entailment(rng, pool, cfg, 3, 2);
    if (i % 3 == 0 && !e.succedents.empty()) e.succedents[0].bound_vars = {"b0"};
    Entailment back = parse_entailment(render(e), ParseOptions{cfg.pt});
    CHECK(alpha_equal(e, back));
  }
}

TEST_CASE("alpha equivalence") {
  Entailment a = parse_entailment("Emp |- Ex y . y > 0 & x -> (y)", {1});
  Entailment b = parse_entailment("Emp |- Ex w . w > 0 & x -> (w)", {1});
  Entailment c = parse_entailment("Emp |- Ex w . w > 0 & w -> (x)", {1});
  CHECK(alpha_equal(a, b));
  CHECK_FALSE(alpha_equal(a, c));
}

// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include "corpus.hpp"
#include "teamlogic/error.hpp"
#include "teamlogic/syntax.hpp"

using namespace teamlogic;

namespace {

Formula team(const std::string& s) { return parse_formula(s); }
Formula foc(const std::string& s) { return parse_formula(s, {Layer::kFoc}); }
Formula so(const std::string& s) { return parse_formula(s, {Layer::kSigma11}); }

}  // namespace

TEST_CASE("literals and atoms parse to the expected nodes", "[syntax]") {
  Formula f = team("x=y");
  CHECK(f->kind == NodeKind::kEq);
  CHECK(f->positive);
  CHECK(f->args == VarTuple{"x", "y"});

  f = team("dep(x,y)");
  REQUIRE(f->kind == NodeKind::kBuiltinAtom);
  CHECK(f->builtin == BuiltinKind::kDep);
  CHECK(f->tuples == std::vector<VarTuple>{{"x"}, {"y"}});

  f = team("const(x)");
  CHECK(equal(f, dep_atom({}, "x")));

  f = team("~R(x,y)");
  CHECK(f->kind == NodeKind::kRel);
  CHECK_FALSE(f->positive);

  f = team("ind(; x; y)");
  CHECK(f->tuples == std::vector<VarTuple>{{}, {"x"}, {"y"}});

  f = team("@myatom(x,y; y)");
  CHECK(f->kind == NodeKind::kGenAtom);
  CHECK(f->tuples.size() == 2);
}

TEST_CASE("malformed input reports a position", "[syntax]") {
  CHECK_THROWS_AS(team("E x"), ParseError);
  CHECK_THROWS_AS(team("E x."), ParseError);
  CHECK_THROWS_AS(team("P(x) &"), ParseError);
  CHECK_THROWS_AS(team("(P(x)"), ParseError);
  CHECK_THROWS_AS(team("P(x) $ Q(x)"), ParseError);
  try {
    team("P(x) & & Q(x)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 7);
  }
}

TEST_CASE("layer rules are enforced at parse time", "[syntax]") {
  CHECK_THROWS_AS(team("!P(x)"), ParseError);
  CHECK_THROWS_AS(team("P(x) -> Q(x)"), ParseError);
  CHECK_THROWS_AS(team("E>=2 x. P(x)"), ParseError);
  CHECK_THROWS_AS(team("SOE S:1. S(x)"), ParseError);
  CHECK_THROWS_AS(foc("dep(x,y)"), ParseError);
  CHECK_THROWS_AS(so("A x. SOE S:1. S(x)"), ParseError);
  CHECK_NOTHROW(so("SOE S:1. SOE T:2. A x. (S(x) <-> E y. T(x,y))"));
  CHECK_NOTHROW(foc("!E>=2 x. R(x,y)"));
}

TEST_CASE("vocabulary and atom table checks", "[syntax]") {
  Vocabulary vocab{{"R", 2}};
  CHECK_THROWS_AS(parse_formula("S(x)", {Layer::kTeam, &vocab}), ParseError);
  CHECK_THROWS_AS(parse_formula("R(x)", {Layer::kTeam, &vocab}), ParseError);
  CHECK_NOTHROW(parse_formula("R(x,y)", {Layer::kTeam, &vocab}));
  CHECK_THROWS_AS(team("P(x) & P(x,y)"), ParseError);

  AtomTable atoms{{"a", AtomSignature{"a", {2}}}};
  CHECK_NOTHROW(parse_formula("@a(x,y)", {Layer::kTeam, nullptr, &atoms}));
  CHECK_THROWS_AS(parse_formula("@a(x)", {Layer::kTeam, nullptr, &atoms}), ParseError);
  CHECK_THROWS_AS(parse_formula("@b(x)", {Layer::kTeam, nullptr, &atoms}), ParseError);
  CHECK_THROWS_AS(team("@a(x) | @a(x,y)"), ParseError);
}

TEST_CASE("at-most counting is sugar for a negated at-least", "[syntax]") {
  CHECK(equal(foc("E<=1 x. P(x)"), negate(count_exists(2, "x", rel("P", {"x"})))));
  CHECK(render(foc("!E>=3 x. P(x)")) == "E<=2 x. P(x)");
}

TEST_CASE("precedence and associativity", "[syntax]") {
  Formula f = foc("P(x) | Q(x) & S(x) -> T(x) -> U(x) <-> V(x)");
  REQUIRE(f->kind == NodeKind::kIff);
  REQUIRE(f->lhs->kind == NodeKind::kImplies);
  CHECK(f->lhs->rhs->kind == NodeKind::kImplies);
  CHECK(f->lhs->lhs->kind == NodeKind::kOr);
  CHECK(f->lhs->lhs->rhs->kind == NodeKind::kAnd);
  Formula q = team("E x. P(x) & Q(x)");
  CHECK(q->kind == NodeKind::kExists);
  CHECK(q->lhs->kind == NodeKind::kAnd);
}

TEST_CASE("free variables", "[syntax]") {
  CHECK(free_variables(team("dep(x,y)")) == std::set<Variable>{"x", "y"});
  CHECK(free_variables(team("E x. R(x,y)")) == std::set<Variable>{"y"});
  CHECK(free_variables(team("x=x & A y. S(y)")) == std::set<Variable>{"x"});
  CHECK(free_variables(team("@a(x,z; y)")) == std::set<Variable>{"x", "y", "z"});
  CHECK(free_variables(team("E x. P(x) | Q(x)")).empty());
  CHECK(free_variables(team("(E x. P(x)) | Q(x)")) == std::set<Variable>{"x"});
}

TEST_CASE("prefix class", "[syntax]") {
  CHECK(prefix_class(team("E x. E y. A x. R(x,y)")) == PrefixClass{true, 2, 1});
  CHECK(prefix_class(team("A x. R(x,x)")) == PrefixClass{true, 0, 1});
  CHECK_FALSE(prefix_class(team("E x. (R(x) | A y. S(y))")).ea);
  CHECK_FALSE(prefix_class(team("A x. E y. R(x,y)")).ea);
  CHECK(prefix_class(team("P(x) & dep(x)")) == PrefixClass{true, 0, 0});
}

TEST_CASE("two-variable check", "[syntax]") {
  CHECK(is_two_variable(team("A x. E y. H(x,y)")));
  CHECK_FALSE(is_two_variable(team("dep(x,y,z)")));
  CHECK(is_two_variable(team("E x. x=x")));
}

TEST_CASE("render then parse is the identity on generated formulas", "[syntax][property]") {
  std::mt19937_64 rng(7);
  testing::GenConfig cfg;
  cfg.vars = {"x", "y", "z"};
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kConst, BuiltinKind::kInc, BuiltinKind::kExc,
                  BuiltinKind::kInd};
  cfg.generalized = {AtomSignature{"g", {1, 2}}};
  cfg.max_depth = 5;
  for (int i = 0; i < 500; ++i) {
    Formula f = testing::random_formula(rng, cfg);
    std::string text = render(f);
    INFO(text);
    CHECK(equal(parse_formula(text), f));
  }
  // FOC and Σ¹₁ shapes, built by hand since the generator is team-layer only.
  for (const char* text :
       {"SOE S:1. SOE T:2. A x. ((S(x) -> E y. T(x,y)) & !(E>=2 y. T(y,x) <-> S(x)))",
        "!(E x. P(x)) & Q(y)", "(A x. P(x)) -> Q(y) -> R(y)", "(P(x) -> Q(x)) -> R(x)",
        "E<=0 x. (P(x) | Q(x))", "!!P(x)", "(P(x) <-> Q(x)) <-> R(x)", "P(x) <-> (Q(x) <-> R(x))"}) {
    Formula f = so(text);
    INFO(text);
    CHECK(equal(so(render(f)), f));
  }
}

TEST_CASE("free variables of a quantified formula drop the bound variable", "[syntax][property]") {
  std::mt19937_64 rng(11);
  testing::GenConfig cfg;
  cfg.vars = {"x", "y", "z"};
  cfg.builtins = {BuiltinKind::kDep, BuiltinKind::kInd};
  for (int i = 0; i < 300; ++i) {
    Formula f = testing::random_formula(rng, cfg);
    for (const auto& v : cfg.vars) {
      auto expected = free_variables(f);
      expected.erase(v);
      CHECK(free_variables(exists(v, f)) == expected);
      CHECK(free_variables(forall(v, f)) == expected);
    }
  }
}

TEST_CASE("prefix class is stable under renaming bound variables", "[syntax][property]") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    int k = static_cast<int>(rng() % 3);
    int m = static_cast<int>(rng() % 3);
    Formula f = testing::random_ea_sentence(rng, k, m, Vocabulary{{"P", 1}, {"Q", 1}}, {BuiltinKind::kDep});
    std::map<Variable, Variable> renaming;
    for (const auto& v : all_variables(f)) renaming[v] = "w_" + v;
    CHECK(prefix_class(rename_variables(f, renaming)) == prefix_class(f));
    CHECK(prefix_class(f) == PrefixClass{true, k, m});
  }
}

TEST_CASE("vocabulary rejects conflicting arities and reserved names", "[syntax]") {
  Vocabulary v;
  v.add("R", 2);
  CHECK_NOTHROW(v.add("R", 2));
  CHECK_THROWS_AS(v.add("R", 1), InvalidArgument);
  CHECK_THROWS_AS(v.add("S", 0), InvalidArgument);
  v.add("_S0", 1);
  CHECK_THROWS_AS(v.check_user_names(), InvalidArgument);
}

TEST_CASE("relation renaming and SO-bound symbols", "[syntax]") {
  Formula f = so("SOE S:1. A x. (S(x) -> P(x))");
  Vocabulary free = relation_symbols(f);
  CHECK(free.contains("P"));
  CHECK_FALSE(free.contains("S"));
  Formula g = rename_relation(f, "S", "T");
  CHECK(render(g) == "SOE T:1. A x. (T(x) -> P(x))");
}
